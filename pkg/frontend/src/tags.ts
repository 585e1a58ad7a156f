import type { TagEntry } from "./types";

export function renderTagStrip(
  container: HTMLElement,
  tags: TagEntry[],
  activeTag: string | null,
  onTagClick: (tag: string) => void,
): void {
  container.replaceChildren();
  for (const entry of tags) {
    const button = document.createElement("button");
    button.className = entry.tag === activeTag ? "tag tag-active" : "tag";
    button.dataset.tag = entry.tag;
    button.textContent = entry.tag;
    button.title = `${entry.workbook_ids.length} workbooks`;
    button.addEventListener("click", () => onTagClick(entry.tag));
    container.append(button);
  }
}
