// Shapes of the annotation service's JSON payloads. The client never
// recomputes any of these values; it only parses and displays them.

export interface Candidate {
  piece: string;
  probability: number;
}

export interface PositionFlags {
  capped: boolean;
  estimated_rank: boolean;
  unscored: boolean;
}

export interface Position {
  index: number;
  piece: string;
  span: [number, number];
  probability: number | null;
  surprisal: number | null;
  rank: number | null;
  bucket: number;
  top: Candidate[];
  flags: PositionFlags;
}

export interface Word {
  index: number;
  tokens: [number, number];
  span: [number, number];
  probability: number | null;
  surprisal: number | null;
  bucket: number;
  capped: boolean;
}

export interface FormulaicRun {
  start_word: number;
  end_word: number;
  mean_surprisal: number;
}

export interface DocumentStats {
  token_count: number;
  word_count: number;
  scored_words: number;
  mean_surprisal: number | null;
  perplexity: number | null;
  bucket_histogram: number[];
  formulaic_coverage: number;
}

export interface Provenance {
  backend_id: string;
  model_id: string;
  config_digest: string;
}

export interface AnnotatedDocument {
  version: number;
  base: number;
  text: string;
  positions: Position[];
  words: Word[];
  runs: FormulaicRun[];
  stats: DocumentStats;
  provenance: Provenance;
}

export interface BackendCapabilities {
  max_context_tokens: number | null;
  provides_full_distribution: boolean;
  top_k_limit: number | null;
  has_bos: boolean;
}

export interface BackendInfo {
  id: string;
  model_id: string;
  description: string;
  capabilities: BackendCapabilities;
}
