import { ApiClient } from "./api";
import { App } from "./app";

declare global {
  interface Window {
    VIZREC_API_BASE?: string;
  }
}

const DEFAULT_BASE = "http://127.0.0.1:8000";

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root !== null) {
    const base = window.VIZREC_API_BASE ?? DEFAULT_BASE;
    const app = new App(root, new ApiClient(base));
    window.addEventListener("hashchange", () => void app.handleHashChange());
    void app.start();
  }
}
