import { ApiError, askQuestion, checkHealth } from "./api";
import { ChatSession } from "./state";
import type { ChatTurn } from "./types";
import { renderSession } from "./view";

const session = new ChatSession();

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const history = byId<HTMLElement>("history");
const form = byId<HTMLFormElement>("ask-form");
const input = byId<HTMLTextAreaElement>("question-input");
const submit = byId<HTMLButtonElement>("submit-button");
const serviceNote = byId<HTMLElement>("service-note");

function redraw(): void {
  renderSession(session.turns, history, { onRetry: retry });
  submit.disabled = !session.canSubmit;
  history.scrollTop = history.scrollHeight;
}

async function run(turn: ChatTurn): Promise<void> {
  redraw();
  try {
    const response = await askQuestion(turn.question);
    session.settle(turn, response);
  } catch (error) {
    if (error instanceof ApiError) {
      session.fail(turn, error.message, error.requestId);
    } else {
      session.fail(turn, error instanceof Error ? error.message : String(error));
    }
  }
  redraw();
}

function retry(failed: ChatTurn): void {
  const turn = session.begin(failed.question);
  if (turn) void run(turn);
}

form.addEventListener("submit", (event) => {
  event.preventDefault();
  const turn = session.begin(input.value);
  if (!turn) return;
  input.value = "";
  void run(turn);
});

void (async () => {
  try {
    const health = await checkHealth();
    serviceNote.textContent = `service ${health.status}` +
      (health.version ? ` (v${health.version})` : "");
  } catch {
    serviceNote.textContent = "service unreachable; answers will fail until it is up";
  }
})();
