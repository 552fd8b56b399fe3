import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import type { FetchLike } from '../src/api.js';

// vitest runs with frontend/ as cwd; import.meta.url is not a file URL in jsdom
const html = readFileSync(join(process.cwd(), 'index.html'), 'utf-8');

/** Mount the real markup (scripts stripped) so tests exercise the shipped ids. */
export function mountDom(): void {
  const body = /<body>([\s\S]*)<\/body>/.exec(html)![1]!;
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/g, '');
}

export function loadFixture<T>(name: string): T {
  const raw = readFileSync(join(process.cwd(), 'tests', 'fixtures', `${name}.json`), 'utf-8');
  return JSON.parse(raw) as T;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return {
    ok: status < 400,
    status,
    json: async () => body,
  } as unknown as Response;
}

export interface RecordedCall {
  url: string;
  init?: RequestInit;
}

/** Fetch stub that replays canned responses and records every call. */
export function stubFetch(
  handler: (url: string, init?: RequestInit) => Response | Promise<Response>,
): { fetchImpl: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return handler(url, init);
  };
  return { fetchImpl, calls };
}

export function setInput(id: string, value: string): void {
  const node = document.getElementById(id) as HTMLInputElement;
  node.value = value;
}
