import { ApiClient, ServiceError } from "./api";
import { renderErrorBanner, renderGrid } from "./grid";
import { FacetPanel } from "./panel";
import {
  HOME,
  ViewState,
  detailState,
  formatRoute,
  gridState,
  parseRoute,
} from "./router";
import { clearSidebar, renderSidebar } from "./sidebar";
import { renderTagStrip } from "./tags";
import type { TagEntry, WorkbookCard } from "./types";

export const PAGE_SIZE = 24;

/**
 * Single-page browsing client. All ranking and filtering comes from the
 * service; this class only turns ViewState (kept in the URL hash) into
 * fetches and DOM. Re-applying the same route is idempotent.
 */
export class App {
  readonly searchInput: HTMLInputElement;
  private readonly tagStrip: HTMLElement;
  private readonly gridSection: HTMLElement;
  private readonly gridContainer: HTMLElement;
  private readonly pager: HTMLElement;
  private readonly sidebar: HTMLElement;
  private readonly detailSection: HTMLElement;
  private readonly detailMeta: HTMLElement;
  private readonly panel: FacetPanel;

  private current: ViewState = HOME;
  private lastAppliedRoute = "";
  private tags: TagEntry[] = [];
  private gridSeq = 0;
  private pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    root.replaceChildren();

    const header = document.createElement("header");
    const heading = document.createElement("h1");
    heading.textContent = "Workbook browser";
    const form = document.createElement("form");
    form.className = "search-form";
    this.searchInput = document.createElement("input");
    this.searchInput.type = "search";
    this.searchInput.name = "q";
    this.searchInput.placeholder = "Search titles, text, or authors";
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Search";
    form.append(this.searchInput, submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const query = this.searchInput.value.trim();
      void this.navigate(gridState({ query: query === "" ? null : query }));
    });
    header.append(heading, form);

    this.tagStrip = document.createElement("nav");
    this.tagStrip.className = "tag-strip";

    this.gridSection = document.createElement("section");
    this.gridSection.className = "grid-screen";
    this.gridContainer = document.createElement("main");
    this.gridContainer.className = "grid";
    this.pager = document.createElement("footer");
    this.pager.className = "pager";
    this.gridSection.append(this.gridContainer, this.pager);

    this.sidebar = document.createElement("aside");
    this.sidebar.className = "sidebar";

    this.detailSection = document.createElement("section");
    this.detailSection.className = "detail-screen hidden";
    const back = document.createElement("button");
    back.className = "back-button";
    back.textContent = "← All workbooks";
    back.addEventListener("click", () => void this.navigate(HOME));
    this.detailMeta = document.createElement("div");
    this.detailMeta.className = "detail-meta";
    const panelHost = document.createElement("div");
    panelHost.className = "detail-panel";
    this.detailSection.append(back, this.detailMeta, panelHost);

    this.panel = new FacetPanel(panelHost, api, {
      onFacetChange: (facet) => {
        if (this.current.screen === "detail") {
          void this.navigate({ ...this.current, facet });
        }
      },
      onToggleExpanded: (expanded) => {
        if (this.current.screen === "detail") {
          void this.navigate({ ...this.current, expanded });
        }
      },
      onOpen: (id) => void this.navigate(detailState(id)),
    });

    root.append(header, this.tagStrip, this.gridSection, this.sidebar, this.detailSection);
  }

  /** Load the tag table once, then render whatever the current URL names. */
  async start(): Promise<void> {
    try {
      this.tags = (await this.api.tags()).items;
    } catch {
      this.tags = []; // the grid still works without the tag strip
    }
    await this.handleHashChange();
  }

  navigate(state: ViewState): Promise<void> {
    const route = formatRoute(state);
    this.lastAppliedRoute = route;
    if (window.location.hash !== route) {
      window.location.hash = route;
    }
    this.pending = this.apply(state);
    return this.pending;
  }

  /** Wire to window "hashchange"; ignores echoes of navigate() itself. */
  handleHashChange(): Promise<void> {
    const hash = window.location.hash === "" ? "#/" : window.location.hash;
    if (hash === this.lastAppliedRoute) {
      return Promise.resolve();
    }
    this.lastAppliedRoute = hash;
    this.pending = this.apply(parseRoute(hash));
    return this.pending;
  }

  /** Resolves when the most recent event-driven navigation has rendered. */
  settled(): Promise<void> {
    return this.pending;
  }

  private async apply(state: ViewState): Promise<void> {
    this.current = state;
    if (state.screen === "detail") {
      this.gridSection.classList.add("hidden");
      clearSidebar(this.sidebar);
      this.detailSection.classList.remove("hidden");
      await this.applyDetail(state.id, state.facet, state.expanded);
      return;
    }
    this.detailSection.classList.add("hidden");
    this.gridSection.classList.remove("hidden");
    this.searchInput.value = state.query ?? "";
    renderTagStrip(this.tagStrip, this.tags, state.tag, (tag) => {
      void this.navigate(gridState({ tag }));
    });
    await Promise.all([this.applyGrid(state), this.applySidebar(state.selected)]);
  }

  private async applyGrid(state: Extract<ViewState, { screen: "grid" }>): Promise<void> {
    const seq = ++this.gridSeq;
    let cards: WorkbookCard[];
    let total: number | null = null;
    try {
      if (state.query !== null) {
        const found = await this.api.search(state.query, PAGE_SIZE);
        cards = found.items.map((row) => row.workbook);
      } else if (state.tag !== null) {
        cards = (await this.api.tagWorkbooks(state.tag)).items;
      } else {
        const page = await this.api.page((state.page - 1) * PAGE_SIZE, PAGE_SIZE);
        cards = page.items;
        total = page.total;
      }
    } catch (error) {
      if (seq !== this.gridSeq) {
        return;
      }
      renderErrorBanner(this.gridContainer, describe(error), () => {
        void this.apply(state);
      });
      this.pager.replaceChildren();
      return;
    }
    if (seq !== this.gridSeq) {
      return; // a newer navigation already owns the grid
    }
    renderGrid(
      this.gridContainer,
      cards,
      {
        onSelect: (id) => void this.navigate({ ...state, selected: id }),
        onOpen: (id) => void this.navigate(detailState(id)),
      },
      state.query !== null
        ? "No results for this search."
        : state.tag !== null
          ? "No workbooks carry this tag."
          : "No workbooks to show.",
    );
    this.renderPager(state, total);
  }

  private renderPager(
    state: Extract<ViewState, { screen: "grid" }>,
    total: number | null,
  ): void {
    this.pager.replaceChildren();
    if (total === null) {
      return; // search and tag views are single pages
    }
    const pages = Math.max(1, Math.ceil(total / PAGE_SIZE));
    const label = document.createElement("span");
    label.textContent = `Page ${state.page} of ${pages}`;
    const prev = document.createElement("button");
    prev.textContent = "Previous";
    prev.disabled = state.page <= 1;
    prev.addEventListener("click", () => {
      void this.navigate(gridState({ ...state, page: state.page - 1 }));
    });
    const next = document.createElement("button");
    next.textContent = "Next";
    next.disabled = state.page >= pages;
    next.addEventListener("click", () => {
      void this.navigate(gridState({ ...state, page: state.page + 1 }));
    });
    this.pager.append(prev, label, next);
  }

  private async applySidebar(selected: string | null): Promise<void> {
    if (selected === null) {
      clearSidebar(this.sidebar);
      return;
    }
    try {
      const detail = await this.api.detail(selected);
      if (this.current.screen !== "grid" || this.current.selected !== selected) {
        return;
      }
      renderSidebar(this.sidebar, detail, {
        onOpenDetail: (id) => void this.navigate(detailState(id)),
        onClose: () => {
          if (this.current.screen === "grid") {
            void this.navigate({ ...this.current, selected: null });
          }
        },
      });
    } catch (error) {
      this.sidebar.replaceChildren();
      const note = document.createElement("p");
      note.className = "error-banner";
      note.textContent = describe(error);
      this.sidebar.append(note);
    }
  }

  private async applyDetail(id: string, facet: "related" | "versions" | "similar-data", expanded: boolean): Promise<void> {
    const metaPromise = (async () => {
      try {
        const detail = await this.api.detail(id);
        if (this.current.screen !== "detail" || this.current.id !== id) {
          return;
        }
        this.renderDetailMeta(detail.workbook, detail.group);
      } catch (error) {
        renderErrorBanner(this.detailMeta, describe(error), () => {
          void this.apply({ screen: "detail", id, facet, expanded });
        });
      }
    })();
    await Promise.all([metaPromise, this.panel.show(id, facet, expanded)]);
  }

  private renderDetailMeta(
    workbook: {
      id: string;
      title: string;
      author: string;
      modified_date: string;
      language: string;
      word_count: number;
      sheets: { name: string; kind: string }[];
      columns: string[];
      eligible: boolean;
    },
    group: { members: WorkbookCard[]; representative_id: string } | null,
  ): void {
    this.detailMeta.replaceChildren();
    const title = document.createElement("h2");
    title.textContent = workbook.title;
    const meta = document.createElement("p");
    meta.className = "detail-byline";
    meta.textContent = `${workbook.author} · ${workbook.modified_date} · ${workbook.language} · ${workbook.word_count} words`;
    this.detailMeta.append(title, meta);

    if (!workbook.eligible) {
      const note = document.createElement("p");
      note.className = "detail-note";
      note.textContent = "This workbook is browsable but excluded from recommendations.";
      this.detailMeta.append(note);
    }
    if (group !== null) {
      const note = document.createElement("p");
      note.className = "detail-group";
      note.textContent = `One of ${group.members.length} near-identical versions; latest is ${group.representative_id}.`;
      this.detailMeta.append(note);
    }

    const sheets = document.createElement("p");
    sheets.className = "detail-sheets";
    sheets.textContent =
      "Sheets: " + (workbook.sheets.map((s) => `${s.name} (${s.kind})`).join(", ") || "none");
    const columns = document.createElement("p");
    columns.className = "detail-columns";
    columns.textContent = "Columns: " + (workbook.columns.join(", ") || "none");
    this.detailMeta.append(sheets, columns);
  }
}

function describe(error: unknown): string {
  if (error instanceof ServiceError) {
    return `service error (${error.code}): ${error.message}`;
  }
  return `could not reach the service: ${String(error)}`;
}
