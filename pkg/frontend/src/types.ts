export type FacetName = "related" | "versions" | "similar-data";

export const FACETS: FacetName[] = ["related", "versions", "similar-data"];

export const FACET_LABELS: Record<FacetName, string> = {
  related: "Related",
  versions: "Similar versions",
  "similar-data": "Similar data",
};

export interface WorkbookCard {
  id: string;
  title: string;
  author: string;
  modified_date: string;
}

export interface WorkbookMeta extends WorkbookCard {
  language: string;
  sheets: { name: string; kind: string }[];
  columns: string[];
  word_count: number;
  eligible: boolean;
  exclusion_reasons: string[];
}

export interface PageResponse {
  total: number;
  offset: number;
  limit: number;
  items: WorkbookCard[];
}

export interface Recommendation {
  workbook: WorkbookCard;
  score: number;
}

export interface RecommendationPage {
  id: string;
  facet: string;
  total: number;
  offset: number;
  limit: number;
  items: Recommendation[];
}

export interface GroupPayload {
  group_id: string;
  representative_id: string;
  members: WorkbookCard[];
}

export interface DetailResponse {
  workbook: WorkbookMeta;
  recommendations: Record<FacetName, Recommendation[]>;
  group: GroupPayload | null;
}

export interface SearchRow {
  workbook: WorkbookCard;
  score: number;
  match: "author" | "text";
}

export interface SearchResponse {
  query: string;
  items: SearchRow[];
}

export interface TagEntry {
  tag: string;
  weight: number;
  workbook_ids: string[];
}

export interface TagsResponse {
  items: TagEntry[];
}

export interface TagWorkbooksResponse {
  tag: string;
  items: WorkbookCard[];
}

export interface HealthResponse {
  status: string;
  workbooks: number;
}
