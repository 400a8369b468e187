import { AnnotationApp } from "./ui.js";

// served by the annotation service itself, so same-origin by default;
// ?service= overrides for a UI hosted elsewhere, ?worker= sets the identity
const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "";
const workerId = params.get("worker") ?? "anonymous";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

new AnnotationApp(root, baseUrl, workerId).start().catch((error) => {
  root.textContent = `failed to start: ${error}`;
});
