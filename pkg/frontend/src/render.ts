/** DOM builders for the three panes. Everything renders from API data;
 * no clinical logic lives client-side. */

import { ordinal, percent, resultLabel } from './format.js';
import type { ApiErrorBody, ConsultAnswer, ConsultRequest, Sex, SimilarCase } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// -- consult form ------------------------------------------------------------

export interface ConsultFormValues {
  text: string;
  age: string;
  sex: string;
  stage: string;
  k: string;
  findings: string;
}

export function readFormValues(root: ParentNode): ConsultFormValues {
  const value = (id: string) => (root.querySelector(`#${id}`) as HTMLInputElement | HTMLTextAreaElement | HTMLSelectElement).value;
  return {
    text: value('consult-text'),
    age: value('consult-age'),
    sex: value('consult-sex'),
    stage: value('consult-stage'),
    k: value('consult-k'),
    findings: value('consult-findings'),
  };
}

export function validateForm(values: ConsultFormValues): string | null {
  const age = Number(values.age);
  if (values.age.trim() === '' || !Number.isInteger(age) || age < 0 || age > 150) {
    return 'Age must be a whole number between 0 and 150.';
  }
  if (values.text.trim() === '' && values.findings.trim() === '') {
    return 'Enter query text or at least one finding.';
  }
  if (values.k.trim() !== '' && (!Number.isInteger(Number(values.k)) || Number(values.k) < 1)) {
    return 'k must be a positive whole number.';
  }
  return null;
}

/** Lossless form -> request mapping: every form field lands in the payload. */
export function toConsultRequest(values: ConsultFormValues): ConsultRequest {
  const findings = values.findings
    .split(',')
    .map((s) => s.trim().toLowerCase())
    .filter((s) => s.length > 0);
  return {
    text: values.text,
    patient: {
      age: Number(values.age),
      sex: (values.sex || 'unknown') as Sex,
      findings,
      numeric_markers: {},
    },
    stage: values.stage.trim() === '' ? null : values.stage.trim(),
    k: values.k.trim() === '' ? null : Number(values.k),
  };
}

// -- answer pane ----------------------------------------------------------------

export function renderAnswer(
  pane: HTMLElement,
  answer: ConsultAnswer,
  onSelectCase: (caseId: string) => void,
): void {
  pane.replaceChildren();

  const diagnoses = el('section', 'diagnoses');
  diagnoses.append(el('h3', undefined, 'Diagnoses'));
  if (answer.diagnoses.length === 0) {
    diagnoses.append(el('p', 'empty', 'No diagnosis rule fired.'));
  } else {
    const list = el('ul');
    for (const d of answer.diagnoses) {
      list.append(el('li', 'diagnosis', `${d.code}: ${d.label}`));
    }
    diagnoses.append(list);
  }
  pane.append(diagnoses);

  const therapy = el('section', 'therapy');
  therapy.append(el('h3', undefined, 'Therapy'));
  if (answer.therapy.length === 0) {
    therapy.append(el('p', 'empty', 'No therapy plan.'));
  } else {
    for (const rule of answer.therapy) {
      const block = el('div', 'therapy-rule');
      block.append(el('strong', undefined, `${rule.diagnosis_code} [${rule.therapy_codes.join(' + ')}]`));
      block.append(el('p', 'narrative', rule.narrative));
      therapy.append(block);
    }
  }
  pane.append(therapy);

  const prognosis = el('section', 'prognosis');
  prognosis.append(el('h3', undefined, 'Prognosis'));
  const p = answer.prognosis;
  const outcomes = Object.entries(p.outcome_counts)
    .map(([outcome, count]) => `${outcome}: ${count}`)
    .join(', ');
  const median =
    p.median_survival_months === null ? 'n/a' : `${p.median_survival_months} months`;
  const range = p.survival_range_months
    ? ` (range ${p.survival_range_months[0]}–${p.survival_range_months[1]})`
    : '';
  prognosis.append(
    el(
      'p',
      'prognosis-summary',
      `${p.n_cases} precedent case(s); outcomes ${outcomes || 'n/a'}; median survival ${median}${range}`,
    ),
  );
  pane.append(prognosis);

  const similar = el('section', 'similar');
  similar.append(el('h3', undefined, 'Similar cases'));
  const list = el('ol', 'case-list');
  for (const entry of answer.similar_cases) {
    const item = el('li', 'case-row');
    const button = el('button', 'case-link', `${entry.case_id}  score ${entry.score.toFixed(4)}`);
    button.type = 'button';
    button.dataset.caseId = entry.case_id;
    button.addEventListener('click', () => onSelectCase(entry.case_id));
    item.append(button);
    list.append(item);
  }
  similar.append(list);
  pane.append(similar);
}

// -- case detail (treatment timeline) --------------------------------------------

export function renderCaseDetail(pane: HTMLElement, entry: SimilarCase): void {
  pane.replaceChildren();
  const body = entry.case;
  pane.append(el('h3', undefined, `Case ${body.case_id}`));
  pane.append(
    el(
      'p',
      'case-meta',
      `${body.environment.age} y/o ${body.environment.sex}` +
        (body.diagnosis.stage ? `, stage ${body.diagnosis.stage}` : '') +
        `, match ${percent(entry.score)}`,
    ),
  );
  if (body.problem.summary) pane.append(el('p', 'case-summary', body.problem.summary));

  const timeline = el('section', 'timeline');
  timeline.append(el('h4', undefined, 'Treatment timeline'));
  const rounds = el('ul', 'treatment-rounds');
  for (const round of body.treatment_rounds) {
    rounds.append(
      el('li', 'treatment-round', `${ordinal(round.round)} round Θ: ${round.description}`),
    );
  }
  timeline.append(rounds);
  const support = el('ul', 'support-rounds');
  for (const round of body.support_rounds) {
    support.append(
      el('li', 'support-round', `${ordinal(round.round)} round SΘ: ${round.description}`),
    );
  }
  timeline.append(support);
  pane.append(timeline);

  pane.append(el('p', 'case-result', `Result: ${resultLabel(body.result)}`));
}

// -- error banner ------------------------------------------------------------------

export function renderErrorBanner(
  container: HTMLElement,
  error: { status?: number; body?: ApiErrorBody | null; message: string },
  onRetry: () => void,
): void {
  container.replaceChildren();
  const banner = el('div', 'error-banner');
  const detail = error.body?.error;
  const state = detail?.fsa_state ? ` [state ${detail.fsa_state}]` : '';
  banner.append(
    el('span', 'error-text', detail ? `${detail.code}: ${detail.message}${state}` : error.message),
  );
  const retry = el('button', 'retry', 'Retry');
  retry.type = 'button';
  retry.addEventListener('click', onRetry);
  banner.append(retry);
  container.append(banner);
}

export function clearErrorBanner(container: HTMLElement): void {
  container.replaceChildren();
}
