import type { FacetName } from "./types";
import { FACETS } from "./types";

/**
 * The whole screen is a pure function of this state, and the state lives in
 * the URL hash, so reloading or sharing a URL reproduces the same screen.
 */
export interface GridState {
  screen: "grid";
  page: number; // 1-based
  tag: string | null; // drill-down filter; mutually exclusive with query
  query: string | null;
  selected: string | null; // workbook shown in the quick-view sidebar
}

export interface DetailState {
  screen: "detail";
  id: string;
  facet: FacetName;
  expanded: boolean;
}

export type ViewState = GridState | DetailState;

export const HOME: GridState = {
  screen: "grid",
  page: 1,
  tag: null,
  query: null,
  selected: null,
};

export function gridState(patch: Partial<Omit<GridState, "screen">>): GridState {
  const state = { ...HOME, ...patch };
  // a search query and a tag filter never apply at the same time
  if (state.query !== null) {
    state.tag = null;
  }
  return state;
}

export function detailState(id: string, facet: FacetName = "related", expanded = false): DetailState {
  return { screen: "detail", id, facet, expanded };
}

export function formatRoute(state: ViewState): string {
  if (state.screen === "detail") {
    const params = new URLSearchParams();
    params.set("facet", state.facet);
    if (state.expanded) {
      params.set("expanded", "1");
    }
    return `#/wb/${encodeURIComponent(state.id)}?${params.toString()}`;
  }
  const params = new URLSearchParams();
  if (state.page > 1) {
    params.set("page", String(state.page));
  }
  if (state.query !== null) {
    params.set("q", state.query);
  } else if (state.tag !== null) {
    params.set("tag", state.tag);
  }
  if (state.selected !== null) {
    params.set("sel", state.selected);
  }
  const suffix = params.toString();
  return suffix ? `#/?${suffix}` : "#/";
}

export function parseRoute(hash: string): ViewState {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const queryStart = raw.indexOf("?");
  const path = queryStart === -1 ? raw : raw.slice(0, queryStart);
  const params = new URLSearchParams(queryStart === -1 ? "" : raw.slice(queryStart + 1));

  const detailMatch = path.match(/^\/wb\/([^/]+)$/);
  if (detailMatch !== null && detailMatch[1] !== undefined) {
    const facetParam = params.get("facet");
    const facet = (FACETS as string[]).includes(facetParam ?? "")
      ? (facetParam as FacetName)
      : "related";
    return detailState(
      decodeURIComponent(detailMatch[1]),
      facet,
      params.get("expanded") === "1",
    );
  }

  const page = Number.parseInt(params.get("page") ?? "1", 10);
  return gridState({
    page: Number.isFinite(page) && page >= 1 ? page : 1,
    tag: params.get("tag"),
    query: params.get("q"),
    selected: params.get("sel"),
  });
}
