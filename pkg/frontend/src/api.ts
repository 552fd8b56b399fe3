/** Thin typed client. The console talks only to these documented
 * endpoints; the contract tests enforce that. */

import type { ApiErrorBody, ConsultAnswer, ConsultRequest, EvaluateResponse } from './types.js';

export const ENDPOINTS = {
  health: '/api/health',
  ontologyTerm: (id: string) => `/api/ontology/terms/${encodeURIComponent(id)}`,
  ontologySimilarity: '/api/ontology/similarity',
  cases: '/api/cases',
  caseById: (id: string) => `/api/cases/${encodeURIComponent(id)}`,
  retrieve: '/api/retrieve',
  consult: '/api/consult',
  evaluate: '/api/evaluate',
} as const;

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody | null,
  ) {
    super(body?.error ? `${body.error.code}: ${body.error.message}` : `HTTP ${status}`);
    this.name = 'ApiRequestError';
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody | null = null;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = null;
  }
  throw new ApiRequestError(response.status, body);
}

export class ApiClient {
  constructor(private readonly fetchImpl: FetchLike = (...args) => fetch(...args)) {}

  private post<T>(url: string, payload: unknown): Promise<T> {
    return this.fetchImpl(url, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    }).then((r) => parseOrThrow<T>(r));
  }

  health(): Promise<{ status: string; ontology_terms: number; case_count: number; revision: number }> {
    return this.fetchImpl(ENDPOINTS.health).then((r) => parseOrThrow(r));
  }

  consult(request: ConsultRequest): Promise<ConsultAnswer> {
    return this.post(ENDPOINTS.consult, request);
  }

  evaluate(params: {
    dataset?: string;
    k_neighbors?: number;
    use_ontology: boolean;
    seed: number;
  }): Promise<EvaluateResponse> {
    return this.post(ENDPOINTS.evaluate, params);
  }
}
