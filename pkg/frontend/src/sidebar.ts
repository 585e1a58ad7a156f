import type { DetailResponse, Recommendation } from "./types";
import { FACETS, FACET_LABELS } from "./types";

export interface SidebarHandlers {
  onOpenDetail(id: string): void;
  onClose(): void;
}

function miniStrip(
  label: string,
  items: Recommendation[],
  onOpen: (id: string) => void,
): HTMLElement {
  const section = document.createElement("section");
  section.className = "sidebar-strip";

  const heading = document.createElement("h4");
  heading.textContent = label;
  section.append(heading);

  if (items.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no recommendations in this facet";
    section.append(empty);
    return section;
  }
  const list = document.createElement("ul");
  for (const item of items) {
    const row = document.createElement("li");
    row.className = "sidebar-rec";
    row.dataset.id = item.workbook.id;
    row.textContent = `${item.workbook.title} — ${item.workbook.author}`;
    row.addEventListener("click", () => onOpen(item.workbook.id));
    list.append(row);
  }
  section.append(list);
  return section;
}

/** Quick view: metadata plus the head of every recommendation facet. */
export function renderSidebar(
  container: HTMLElement,
  detail: DetailResponse,
  handlers: SidebarHandlers,
): void {
  container.replaceChildren();
  container.classList.add("sidebar-open");

  const close = document.createElement("button");
  close.className = "sidebar-close";
  close.textContent = "×";
  close.addEventListener("click", handlers.onClose);

  const title = document.createElement("h2");
  title.textContent = detail.workbook.title;

  const meta = document.createElement("p");
  meta.className = "sidebar-meta";
  meta.textContent = `${detail.workbook.author} · ${detail.workbook.modified_date} · ${detail.workbook.language}`;

  const open = document.createElement("button");
  open.className = "sidebar-open-detail";
  open.textContent = "Open detail view";
  open.addEventListener("click", () => handlers.onOpenDetail(detail.workbook.id));

  container.append(close, title, meta, open);

  for (const facet of FACETS) {
    container.append(
      miniStrip(
        FACET_LABELS[facet],
        detail.recommendations[facet] ?? [],
        handlers.onOpenDetail,
      ),
    );
  }

  if (detail.group !== null) {
    const group = document.createElement("section");
    group.className = "sidebar-group";
    const heading = document.createElement("h4");
    heading.textContent = "Duplicate group";
    const note = document.createElement("p");
    note.textContent = `${detail.group.members.length} near-identical workbooks; latest: ${detail.group.representative_id}`;
    group.append(heading, note);
    container.append(group);
  }
}

export function clearSidebar(container: HTMLElement): void {
  container.replaceChildren();
  container.classList.remove("sidebar-open");
}
