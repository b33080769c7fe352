import './style.css';
import { ApiClient } from './api';
import { App } from './app';

const root = document.getElementById('app');
if (root) {
  const app = new App(root, new ApiClient());
  app.start().catch((error: unknown) => {
    const banner = document.getElementById('error-banner');
    if (banner) {
      banner.textContent = `engine unreachable: ${String(error)}`;
      banner.hidden = false;
    }
  });
}
