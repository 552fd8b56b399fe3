/** JSON shapes of the decision-support API, as documented by the service. */

export type Sex = 'male' | 'female' | 'unknown';

export interface PatientRecord {
  age: number;
  sex: Sex;
  findings: string[];
  numeric_markers: Record<string, number>;
}

export interface ConsultRequest {
  text: string;
  patient: PatientRecord;
  stage: string | null;
  k: number | null;
}

export interface TreatmentRound {
  round: number;
  kind: string;
  description: string;
}

export interface CaseBody {
  case_id: string;
  environment: PatientRecord;
  problem: { keywords: string[]; summary: string };
  diagnosis: { term_id: string | null; code: string | null; stage: string | null };
  prognosis: string | null;
  treatment_rounds: TreatmentRound[];
  support_rounds: TreatmentRound[];
  result: { outcome: string; survival_months: number | null };
  dates?: { onset: string | null; closure: string | null };
}

export interface SimilarCase {
  case_id: string;
  score: number;
  component_scores: Record<string, number>;
  missing_facets: string[];
  case: CaseBody;
}

export interface TherapyRule {
  diagnosis_code: string;
  therapy_codes: string[];
  narrative: string;
  modalities: Record<string, string>;
}

export interface Prognosis {
  n_cases: number;
  outcome_counts: Record<string, number>;
  median_survival_months: number | null;
  survival_range_months: [number, number] | null;
}

export interface TraceEntry {
  state: string;
  event: string | null;
}

export interface ConsultAnswer {
  diagnoses: { code: string; label: string }[];
  therapy: TherapyRule[];
  prognosis: Prognosis;
  similar_cases: SimilarCase[];
  supervisor_trace: TraceEntry[];
  ontology_matches: { surface: string; term_id: string }[];
  query_keywords: string[];
}

export interface ApiErrorBody {
  error: { code: string; message: string; fsa_state?: string };
  supervisor_trace?: TraceEntry[];
}

export interface FoldRow {
  n: number;
  tp: number;
  fp: number;
  tn: number;
  fn: number;
  accuracy: number;
  fpr: number | null;
  tpr: number | null;
}

export interface EvaluateResponse {
  use_ontology: boolean;
  seed: number;
  k_neighbors: number;
  folds: FoldRow[];
  mean_accuracy: number;
  report: string;
  roc: { points: [number, number][]; auc: number };
}
