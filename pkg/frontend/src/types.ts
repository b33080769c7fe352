/** Wire types of the /api/v1 endpoints (numbers arrive at full precision). */

export type PipelineKind = 'Base' | 'FT' | 'RAG' | 'FT_RAG';

export const PIPELINE_KINDS: PipelineKind[] = ['Base', 'FT', 'RAG', 'FT_RAG'];

export interface CostBreakdown {
  embedding: number;
  retrieval: number;
  training: number;
  hosting: number;
  input: number;
  output: number;
  total: number;
}

export interface CopResult {
  cop_ex: number;
  denominator: number;
  beats_human: boolean;
}

export interface EconomicsValues {
  g: number;
  v: number;
  h: number;
  r: number;
  s: number;
}

export interface PipelineEvaluation {
  kind: PipelineKind;
  breakdown: CostBreakdown;
  economics?: EconomicsValues;
  cop?: CopResult;
  break_even: number | null;
}

export interface EvaluateResponse {
  tool: string;
  tool_version: string;
  schema_version: string;
  scenario_name: string;
  scenario_hash: string;
  assumptions: string[];
  pipelines: PipelineEvaluation[];
  scenario: ScenarioDocument;
}

export interface CostSeriesRow extends CostBreakdown {
  num_rl: number;
}

export interface CostResponse {
  scenario_hash: string;
  series: { kind: PipelineKind; rows: CostSeriesRow[] }[];
}

export interface CatalogEntry {
  name: string;
  variants: Record<string, Record<string, number>>;
}

export interface DatasetEntry {
  name: string;
  variants: Record<string, DatasetDocument>;
}

export interface DatasetDocument {
  num_c: number;
  len_c: number;
  len_q: number;
  len_a: Partial<Record<PipelineKind, number>>;
  len_qa?: number;
  len_a_ref?: number;
  num_ft_qa?: number;
  oddness?: number;
  n_train?: number;
  n_test?: number;
}

export interface ScenarioDocument {
  name: string;
  catalog: Record<string, number>;
  dataset: DatasetDocument;
  pipelines: { kind: PipelineKind; k?: number; len_p: number; len_p_rag?: number }[];
  workload: { num_rl: number; lifetime_hours: number };
  economics: { v: number; h: number; r: number; s: number };
}

export interface ApiError {
  errors: { message: string; field?: string }[];
}
