import { sanitizeAnswerHtml } from "./sanitize";
import type { ChatTurn, Citation } from "./types";

export const INSUFFICIENT_DATA_MESSAGE = "insufficient research data";

export interface TurnHandlers {
  onRetry?: (turn: ChatTurn) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderAnswer(turn: ChatTurn, doc: Document): HTMLElement {
  const body = el(doc, "div", "answer-body");
  const response = turn.response!;
  const allowed = response.citations.map((citation) => citation.url);
  body.appendChild(sanitizeAnswerHtml(response.answer_html, allowed, doc));
  return body;
}

export function renderSourcesPanel(citations: Citation[], doc: Document): HTMLElement {
  const panel = el(doc, "details", "sources-panel");
  panel.appendChild(el(doc, "summary", undefined, `Sources (${citations.length})`));
  const list = el(doc, "ul", "sources-list");
  for (const citation of citations) {
    const item = el(doc, "li", "source");
    item.appendChild(el(doc, "span", "source-title", citation.title));
    const link = el(doc, "a", "source-url", citation.url);
    link.setAttribute("href", citation.url);
    link.setAttribute("target", "_blank");
    link.setAttribute("rel", "noopener noreferrer");
    item.appendChild(link);
    if (citation.citation_count !== undefined && citation.citation_count !== null) {
      item.appendChild(el(doc, "span", "source-count",
        `cited by ${citation.citation_count}`));
    }
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

export function renderTurn(
  turn: ChatTurn,
  doc: Document,
  handlers: TurnHandlers = {},
): HTMLElement {
  const root = el(doc, "article", `turn turn-${turn.status}`);
  root.dataset.turnId = String(turn.id);

  const question = el(doc, "div", "question-bubble", turn.question);
  root.appendChild(question);

  switch (turn.status) {
    case "pending":
      root.appendChild(el(doc, "div", "status-note", "Searching the literature…"));
      break;
    case "answered": {
      root.appendChild(renderAnswer(turn, doc));
      root.appendChild(renderSourcesPanel(turn.response!.citations, doc));
      break;
    }
    case "refused": {
      const card = el(doc, "div", "refusal-card");
      card.appendChild(el(doc, "strong", "label", "Out of scope"));
      card.appendChild(renderAnswer(turn, doc));
      root.appendChild(card);
      break;
    }
    case "insufficient": {
      const banner = el(doc, "div", "insufficient-banner");
      banner.appendChild(el(doc, "strong", "label", "No usable research found"));
      banner.appendChild(el(doc, "p", "message", INSUFFICIENT_DATA_MESSAGE));
      root.appendChild(banner);
      break;
    }
    case "error": {
      const card = el(doc, "div", "error-card");
      card.appendChild(el(doc, "strong", "label", "Something went wrong"));
      card.appendChild(el(doc, "p", "message", turn.error?.message ?? "unknown error"));
      if (turn.error?.requestId) {
        card.appendChild(el(doc, "p", "request-id", `request id: ${turn.error.requestId}`));
      }
      const retry = el(doc, "button", "retry-button", "Retry");
      retry.type = "button";
      retry.addEventListener("click", () => handlers.onRetry?.(turn));
      card.appendChild(retry);
      root.appendChild(card);
      break;
    }
  }
  return root;
}

export function renderSession(
  turns: ChatTurn[],
  container: HTMLElement,
  handlers: TurnHandlers = {},
): void {
  const doc = container.ownerDocument;
  container.replaceChildren(...turns.map((turn) => renderTurn(turn, doc, handlers)));
}
