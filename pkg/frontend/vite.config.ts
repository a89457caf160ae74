import { defineConfig } from "vitest/config";

// The dev server proxies API calls to a locally running annotation
// service, so the page can be served from vite while the backend stays
// on its own port.
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8417",
      "/healthz": "http://127.0.0.1:8417",
    },
  },
  test: {
    environment: "jsdom",
  },
});
