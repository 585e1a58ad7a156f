import type { WorkbookCard } from "./types";

export interface GridHandlers {
  onSelect(id: string): void; // single click: quick-view sidebar
  onOpen(id: string): void; // double click: full detail screen
}

function glyphFor(card: WorkbookCard): string {
  // placeholder thumbnail: deterministic glyph from the workbook id
  const glyphs = ["▤", "▥", "▦", "▧", "▨", "▩", "◫", "◧"];
  let hash = 0;
  for (const ch of card.id) {
    hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  }
  return glyphs[hash % glyphs.length] ?? "▤";
}

export function renderCard(card: WorkbookCard, handlers: GridHandlers): HTMLElement {
  const element = document.createElement("article");
  element.className = "card";
  element.dataset.id = card.id;

  const glyph = document.createElement("div");
  glyph.className = "card-glyph";
  glyph.textContent = glyphFor(card);

  const title = document.createElement("h3");
  title.className = "card-title";
  title.textContent = card.title;

  const byline = document.createElement("p");
  byline.className = "card-byline";
  byline.textContent = card.author;

  const date = document.createElement("p");
  date.className = "card-date";
  date.textContent = card.modified_date;

  element.append(glyph, title, byline, date);
  element.addEventListener("click", () => handlers.onSelect(card.id));
  element.addEventListener("dblclick", () => handlers.onOpen(card.id));
  return element;
}

export function renderGrid(
  container: HTMLElement,
  cards: WorkbookCard[],
  handlers: GridHandlers,
  emptyMessage = "No workbooks to show.",
): void {
  container.replaceChildren();
  if (cards.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = emptyMessage;
    container.append(empty);
    return;
  }
  for (const card of cards) {
    container.append(renderCard(card, handlers));
  }
}

export function renderErrorBanner(
  container: HTMLElement,
  message: string,
  onRetry: () => void,
): void {
  container.replaceChildren();
  const banner = document.createElement("div");
  banner.className = "error-banner";

  const text = document.createElement("span");
  text.textContent = message;

  const retry = document.createElement("button");
  retry.className = "retry-button";
  retry.textContent = "Retry";
  retry.addEventListener("click", onRetry);

  banner.append(text, retry);
  container.append(banner);
}
