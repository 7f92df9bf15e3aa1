import { createApp } from "./app.js";

declare global {
  interface Window {
    CLARITY_SERVICE_URL?: string;
  }
}

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app container");
}
createApp(root, {
  serviceUrl: window.CLARITY_SERVICE_URL ?? "http://127.0.0.1:8123",
});
