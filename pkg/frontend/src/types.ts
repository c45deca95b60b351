export interface Citation {
  title: string;
  url: string;
  citation_count?: number | null;
}

export interface AskResponse {
  answer_html: string;
  citations: Citation[];
  outcome: "answered" | "refused" | "insufficient_data" | string;
  request_id: string;
}

export type TurnStatus = "pending" | "answered" | "refused" | "insufficient" | "error";

export interface TurnError {
  message: string;
  requestId?: string;
}

export interface ChatTurn {
  id: number;
  question: string;
  askedAt: number;
  status: TurnStatus;
  response?: AskResponse;
  error?: TurnError;
}
