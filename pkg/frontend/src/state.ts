import type { AskResponse, ChatTurn, TurnStatus } from "./types";

const OUTCOME_TO_STATUS: Record<string, TurnStatus> = {
  answered: "answered",
  refused: "refused",
  insufficient_data: "insufficient",
};

// In-memory session: turns accumulate for the page's lifetime, and only
// one question may be in flight at a time.
export class ChatSession {
  readonly turns: ChatTurn[] = [];
  private nextId = 1;

  get pendingTurn(): ChatTurn | undefined {
    return this.turns.find((turn) => turn.status === "pending");
  }

  get canSubmit(): boolean {
    return this.pendingTurn === undefined;
  }

  begin(question: string): ChatTurn | null {
    const trimmed = question.trim();
    if (!trimmed || !this.canSubmit) {
      return null;
    }
    const turn: ChatTurn = {
      id: this.nextId++,
      question: trimmed,
      askedAt: Date.now(),
      status: "pending",
    };
    this.turns.push(turn);
    return turn;
  }

  settle(turn: ChatTurn, response: AskResponse): ChatTurn {
    turn.response = response;
    turn.status = OUTCOME_TO_STATUS[response.outcome] ?? "error";
    if (turn.status === "error") {
      turn.error = { message: `unexpected outcome: ${response.outcome}` };
    }
    return turn;
  }

  fail(turn: ChatTurn, message: string, requestId?: string): ChatTurn {
    turn.status = "error";
    turn.error = { message, requestId };
    return turn;
  }
}
