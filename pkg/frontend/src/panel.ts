import type { ApiClient } from "./api";
import type { FacetName } from "./types";
import { FACETS, FACET_LABELS } from "./types";
import { renderCard } from "./grid";

export const COLLAPSED_CARDS = 5;
export const EXPANDED_CARDS = 24;

export interface PanelHandlers {
  onFacetChange(facet: FacetName): void;
  onToggleExpanded(expanded: boolean): void;
  onOpen(id: string): void;
}

/**
 * Bottom recommendation panel of the detail view: one tab per facet, a
 * horizontally scrollable card strip, and an expand toggle. Responses are
 * applied last-write-wins per (workbook, facet) so a slow earlier request
 * can never overwrite a newer tab's content.
 */
export class FacetPanel {
  private readonly tabs: HTMLElement;
  private readonly strip: HTMLElement;
  private readonly toggle: HTMLButtonElement;
  private requestSeq = 0;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly handlers: PanelHandlers,
  ) {
    this.tabs = document.createElement("nav");
    this.tabs.className = "facet-tabs";
    this.strip = document.createElement("div");
    this.strip.className = "facet-strip";
    this.toggle = document.createElement("button");
    this.toggle.className = "panel-toggle";
    container.replaceChildren(this.tabs, this.toggle, this.strip);
  }

  async show(id: string, facet: FacetName, expanded: boolean): Promise<void> {
    this.renderTabs(facet);
    this.renderToggle(expanded);
    const seq = ++this.requestSeq;
    const limit = expanded ? EXPANDED_CARDS : COLLAPSED_CARDS;
    try {
      const page = await this.api.recommendations(id, facet, limit);
      if (seq !== this.requestSeq) {
        return; // a newer request already owns the strip
      }
      this.renderStrip(page.items.map((r) => r.workbook));
    } catch (error) {
      if (seq !== this.requestSeq) {
        return;
      }
      this.strip.replaceChildren();
      const banner = document.createElement("p");
      banner.className = "error-banner";
      banner.textContent = `could not load recommendations: ${String(error)}`;
      this.strip.append(banner);
    }
  }

  private renderTabs(active: FacetName): void {
    this.tabs.replaceChildren();
    for (const facet of FACETS) {
      const tab = document.createElement("button");
      tab.className = facet === active ? "facet-tab facet-tab-active" : "facet-tab";
      tab.dataset.facet = facet;
      tab.setAttribute("aria-selected", facet === active ? "true" : "false");
      tab.textContent = FACET_LABELS[facet];
      tab.addEventListener("click", () => this.handlers.onFacetChange(facet));
      this.tabs.append(tab);
    }
  }

  private renderToggle(expanded: boolean): void {
    this.toggle.textContent = expanded ? "Collapse panel" : "Expand panel";
    this.toggle.onclick = () => this.handlers.onToggleExpanded(!expanded);
  }

  private renderStrip(cards: { id: string; title: string; author: string; modified_date: string }[]): void {
    this.strip.replaceChildren();
    if (cards.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "no recommendations in this facet";
      this.strip.append(empty);
      return;
    }
    for (const card of cards) {
      this.strip.append(
        renderCard(card, {
          onSelect: (cardId) => this.handlers.onOpen(cardId),
          onOpen: (cardId) => this.handlers.onOpen(cardId),
        }),
      );
    }
  }
}
