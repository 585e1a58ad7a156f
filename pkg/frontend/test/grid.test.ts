import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderErrorBanner, renderGrid } from "../src/grid";
import { ALL_CARDS, W1 } from "./stub";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<main id='grid'></main>";
  container = document.getElementById("grid") as HTMLElement;
});

describe("grid rendering", () => {
  it("shows one card per workbook with title, author, and date", () => {
    renderGrid(container, ALL_CARDS, { onSelect: () => {}, onOpen: () => {} });
    const cards = container.querySelectorAll(".card");
    expect(cards).toHaveLength(4);
    const first = cards[0] as HTMLElement;
    expect(first.querySelector(".card-title")?.textContent).toBe("Quarterly Sales");
    expect(first.querySelector(".card-byline")?.textContent).toBe("Avery Stone");
    expect(first.querySelector(".card-date")?.textContent).toBe("2024-03-01");
    expect(first.querySelector(".card-glyph")?.textContent).not.toBe("");
  });

  it("fires select on click and open on double click", () => {
    const onSelect = vi.fn();
    const onOpen = vi.fn();
    renderGrid(container, [W1], { onSelect, onOpen });
    const card = container.querySelector(".card") as HTMLElement;
    card.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(onSelect).toHaveBeenCalledWith("w1");
    card.dispatchEvent(new MouseEvent("dblclick", { bubbles: true }));
    expect(onOpen).toHaveBeenCalledWith("w1");
  });

  it("renders an empty-state message instead of cards", () => {
    renderGrid(container, [], { onSelect: () => {}, onOpen: () => {} }, "Nothing here.");
    expect(container.querySelectorAll(".card")).toHaveLength(0);
    expect(container.querySelector(".empty-state")?.textContent).toBe("Nothing here.");
  });

  it("replaces earlier content on re-render", () => {
    renderGrid(container, ALL_CARDS, { onSelect: () => {}, onOpen: () => {} });
    renderGrid(container, [W1], { onSelect: () => {}, onOpen: () => {} });
    expect(container.querySelectorAll(".card")).toHaveLength(1);
  });
});

describe("error banner", () => {
  it("shows the message and retries on demand", () => {
    const onRetry = vi.fn();
    renderErrorBanner(container, "service unavailable", onRetry);
    expect(container.querySelector(".error-banner")?.textContent).toContain(
      "service unavailable",
    );
    (container.querySelector(".retry-button") as HTMLButtonElement).click();
    expect(onRetry).toHaveBeenCalledTimes(1);
  });
});
