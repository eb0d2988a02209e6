import { ApiClient } from "./api.js";
import { App } from "./app.js";

function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const app = new App(root, new ApiClient());
  window.addEventListener("hashchange", () => void app.route(location.hash));
  void app.route(location.hash);
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}
