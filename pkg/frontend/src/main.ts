/**
 * Entry point: read configuration from the page URL and mount either the
 * judging flow or the summary view.
 *
 *   ?session=S&evaluator=E&dimension=D            judge
 *   ?session=S&view=summary[&partial=1]           summary
 *
 * The API base defaults to the page origin (the service serves this UI).
 */

import { ApiClient } from "./api.js";
import { JudgeController } from "./judge.js";
import { SummaryView } from "./summary.js";

export interface AppHandles {
  judge?: JudgeController;
  summary?: SummaryView;
}

export async function mount(root: HTMLElement, location: Location, win: Window): Promise<AppHandles> {
  const params = new URLSearchParams(location.search);
  const server = params.get("server") ?? location.origin;
  const session = params.get("session");
  if (!session) {
    root.innerHTML = `<p id="config-error">missing ?session= in the URL</p>`;
    return {};
  }
  const api = new ApiClient(server, session);

  if (params.get("view") === "summary") {
    const summary = new SummaryView(api, root, params.get("partial") === "1");
    await summary.render();
    return { summary };
  }

  const evaluator = params.get("evaluator");
  const dimension = params.get("dimension");
  if (!evaluator || !dimension) {
    root.innerHTML = `<p id="config-error">missing ?evaluator= or ?dimension= in the URL</p>`;
    return {};
  }
  const judge = new JudgeController(api, root, { evaluator, dimension });
  judge.attachKeyboard(win);
  await judge.start();
  return { judge };
}

declare const window: Window & { document: Document };

if (typeof window !== "undefined" && typeof window.document !== "undefined") {
  const root = window.document.getElementById("app");
  if (root) {
    void mount(root, window.location, window);
  }
}
