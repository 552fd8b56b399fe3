/** Console controller: one in-flight consult at a time per tab; responses
 * superseded by a newer submit are discarded via a sequence number. */

import { ApiClient, ApiRequestError } from './api.js';
import {
  clearErrorBanner,
  readFormValues,
  renderAnswer,
  renderCaseDetail,
  renderErrorBanner,
  toConsultRequest,
  validateForm,
} from './render.js';
import { renderRoc } from './roc.js';
import type { ConsultAnswer } from './types.js';

export interface ConsultView {
  lastAnswer: ConsultAnswer | null;
  selectedCaseId: string | null;
  requestSeq: number;
}

export interface AppHandles {
  view: ConsultView;
  submitConsult: () => Promise<void>;
  selectCase: (caseId: string) => void;
  runEvaluation: (dataset?: string) => Promise<void>;
}

interface Panes {
  form: HTMLElement;
  answer: HTMLElement;
  detail: HTMLElement;
  errors: HTMLElement;
  roc: HTMLElement;
  status: HTMLElement | null;
}

function panes(root: Document): Panes {
  const get = (id: string) => {
    const node = root.getElementById(id);
    if (!node) throw new Error(`missing pane #${id}`);
    return node;
  };
  return {
    form: get('query-pane'),
    answer: get('answer-pane'),
    detail: get('detail-pane'),
    errors: get('error-pane'),
    roc: get('roc-pane'),
    status: root.getElementById('health-status'),
  };
}

export function createApp(root: Document, client: ApiClient): AppHandles {
  const ui = panes(root);
  const view: ConsultView = { lastAnswer: null, selectedCaseId: null, requestSeq: 0 };

  function selectCase(caseId: string): void {
    const entry = view.lastAnswer?.similar_cases.find((c) => c.case_id === caseId);
    if (!entry) return; // invariant: selection must exist in the last answer
    view.selectedCaseId = caseId;
    renderCaseDetail(ui.detail, entry);
  }

  async function submitConsult(): Promise<void> {
    const values = readFormValues(ui.form);
    const problem = validateForm(values);
    if (problem !== null) {
      renderErrorBanner(ui.errors, { message: problem }, () => void submitConsult());
      return;
    }
    clearErrorBanner(ui.errors);
    const seq = ++view.requestSeq;
    try {
      const answer = await client.consult(toConsultRequest(values));
      if (seq !== view.requestSeq) return; // stale: a newer submit superseded us
      view.lastAnswer = answer;
      view.selectedCaseId = null;
      ui.detail.replaceChildren();
      renderAnswer(ui.answer, answer, selectCase);
      if (answer.similar_cases.length > 0) {
        selectCase(answer.similar_cases[0]!.case_id);
      }
    } catch (err) {
      if (seq !== view.requestSeq) return;
      const wrapped =
        err instanceof ApiRequestError
          ? { status: err.status, body: err.body, message: err.message }
          : { message: err instanceof Error ? err.message : String(err) };
      renderErrorBanner(ui.errors, wrapped, () => void submitConsult());
    }
  }

  async function runEvaluation(dataset?: string): Promise<void> {
    try {
      const [withOntology, withoutOntology] = await Promise.all([
        client.evaluate({ dataset, use_ontology: true, seed: 0 }),
        client.evaluate({ dataset, use_ontology: false, seed: 0 }),
      ]);
      renderRoc(ui.roc, [
        { label: 'with ontology', points: withOntology.roc.points, auc: withOntology.roc.auc },
        { label: 'without ontology', points: withoutOntology.roc.points, auc: withoutOntology.roc.auc },
      ]);
    } catch (err) {
      renderRoc(ui.roc, []);
      const message = err instanceof Error ? err.message : String(err);
      renderErrorBanner(ui.errors, { message }, () => void runEvaluation(dataset));
    }
  }

  root.getElementById('consult-submit')?.addEventListener('click', () => void submitConsult());
  root.getElementById('roc-run')?.addEventListener('click', () => void runEvaluation());

  if (ui.status) {
    client
      .health()
      .then((h) => {
        ui.status!.textContent = `${h.case_count} cases, ${h.ontology_terms} terms (rev ${h.revision})`;
      })
      .catch(() => {
        ui.status!.textContent = 'service unreachable';
      });
  }

  return { view, submitConsult, selectCase, runEvaluation };
}

declare global {
  interface Window {
    oncodssApp?: AppHandles;
  }
}

if (typeof window !== 'undefined' && typeof document !== 'undefined' && document.getElementById('query-pane')) {
  window.oncodssApp = createApp(document, new ApiClient());
}
