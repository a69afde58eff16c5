import { mount } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const params = new URLSearchParams(window.location.search);
  mount(root, params.get("api") ?? "http://localhost:8080");
}
