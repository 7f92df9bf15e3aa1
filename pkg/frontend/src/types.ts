/** Wire types of the classification service (POST /classify). */

export interface ClassifyRequest {
  title: string;
  body: string;
  tags: string[];
}

export interface SimilarQuestion {
  question_id: number;
  score: number;
  label: "clear" | "unclear";
}

export interface Hint {
  clarification_text: string;
  keyphrases: string[];
  retrieval_score: number;
}

export interface ClassifyResponse {
  label: "clear" | "unclear";
  probability_unclear: number;
  similar: SimilarQuestion[];
  hints: Hint[];
}
