export interface Category {
  key: string;
  label: string;
  criterion: string;
}

export interface SessionItem {
  sentence_id: string;
  source_text: string;
  reference_text: string;
  candidate_text: string;
}

export interface NextResponse {
  status: 'item' | 'done';
  completed: number;
  total: number;
  item?: SessionItem;
}

export interface SubmitAck {
  sentence_id: string;
  sentence_score: number;
}

export interface AnnotationPayload {
  sentence_id: string;
  annotator_id: string;
  timestamp: string;
  judgments: Record<string, number>;
  comment?: string;
}

export interface ScoreTable {
  annotator_id: string;
  sentence_count: number;
  sentence_scores: Record<string, number>;
  category_scores: Record<string, number>;
  model_score: number;
}

export interface ScoresResponse {
  session_id: string;
  item_count: number;
  completion: Record<string, number>;
  per_annotator: Record<string, ScoreTable>;
  pooled: ScoreTable | null;
  agreement: Record<string, number> | null;
}

export interface SessionMeta {
  session_id: string;
  model_label: string;
  item_count: number;
  completion: Record<string, number>;
}
