// Allowlist sanitizer for model-generated answer HTML.
//
// Only the markup needed for cited answers survives: paragraphs, line
// breaks, emphasis, and anchors. Anchors are kept only when their href is
// an http(s) URL present in the response's citation list; everything else
// is unwrapped to its text. Script-bearing elements are removed together
// with their content, and no attributes other than a rebuilt href ever
// reach the live DOM.

const ALLOWED_TAGS = new Set(["P", "BR", "EM", "STRONG", "I", "B"]);

const DROP_WITH_CONTENT = new Set([
  "SCRIPT", "STYLE", "IFRAME", "OBJECT", "EMBED", "TEMPLATE", "NOSCRIPT",
  "SVG", "MATH", "LINK", "META", "BASE", "FORM", "INPUT", "BUTTON", "HEAD",
]);

function isHttpUrl(href: string): boolean {
  return /^https?:\/\//i.test(href);
}

function sanitizeInto(source: Node, target: Node, urls: Set<string>, doc: Document): void {
  for (const child of Array.from(source.childNodes)) {
    if (child.nodeType === child.TEXT_NODE) {
      target.appendChild(doc.createTextNode(child.textContent ?? ""));
      continue;
    }
    if (child.nodeType !== child.ELEMENT_NODE) {
      continue; // comments, processing instructions
    }
    const element = child as Element;
    const tag = element.tagName.toUpperCase();
    if (DROP_WITH_CONTENT.has(tag)) {
      continue; // drop the content too: script bodies must not leak as text
    }
    if (tag === "A") {
      const href = (element.getAttribute("href") ?? "").trim();
      if (isHttpUrl(href) && urls.has(href)) {
        const anchor = doc.createElement("a");
        anchor.setAttribute("href", href);
        anchor.setAttribute("target", "_blank");
        anchor.setAttribute("rel", "noopener noreferrer");
        sanitizeInto(element, anchor, urls, doc);
        target.appendChild(anchor);
      } else {
        sanitizeInto(element, target, urls, doc); // unwrap: keep inner text
      }
      continue;
    }
    if (ALLOWED_TAGS.has(tag)) {
      const clean = doc.createElement(tag.toLowerCase());
      sanitizeInto(element, clean, urls, doc);
      target.appendChild(clean);
    } else {
      sanitizeInto(element, target, urls, doc); // unknown element: unwrap
    }
  }
}

export function sanitizeAnswerHtml(
  html: string,
  allowedUrls: Iterable<string>,
  doc: Document = document,
): DocumentFragment {
  const urls = new Set(allowedUrls);
  const parsed = new DOMParser().parseFromString(html, "text/html");
  const fragment = doc.createDocumentFragment();
  sanitizeInto(parsed.body, fragment, urls, doc);
  return fragment;
}
