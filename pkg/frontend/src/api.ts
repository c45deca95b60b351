import { SERVICE_BASE_URL } from "./config";
import type { AskResponse } from "./types";

export class ApiError extends Error {
  status: number;
  requestId?: string;

  constructor(message: string, status: number, requestId?: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.requestId = requestId;
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `request failed with status ${response.status}`;
  let requestId: string | undefined;
  try {
    const body = (await response.json()) as { error?: string; request_id?: string };
    if (body.error) message = body.error;
    requestId = body.request_id;
  } catch {
    // non-JSON error body: keep the status message
  }
  return new ApiError(message, response.status, requestId);
}

export async function askQuestion(
  question: string,
  baseUrl: string = SERVICE_BASE_URL,
): Promise<AskResponse> {
  const response = await fetch(`${baseUrl}/ask`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ question }),
  });
  if (!response.ok) {
    throw await errorFrom(response);
  }
  return (await response.json()) as AskResponse;
}

export async function checkHealth(
  baseUrl: string = SERVICE_BASE_URL,
): Promise<{ status: string; version?: string }> {
  const response = await fetch(`${baseUrl}/health`);
  if (!response.ok) {
    throw await errorFrom(response);
  }
  return (await response.json()) as { status: string; version?: string };
}
