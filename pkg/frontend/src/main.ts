import { ApiClient } from "./api.js";
import { App } from "./ui.js";

const root = document.getElementById("app");
if (root) {
  new App(root, new ApiClient(""));
}
