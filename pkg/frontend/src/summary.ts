/**
 * Session summary view: per-dimension good/same/bad bars, exclusions,
 * and the win rate (good / (good + bad)) as a whole percent.
 */

import { ApiClient, DimensionSummary } from "./api.js";

export function formatWinRate(rate: number | null): string {
  if (rate === null) return "n/a";
  return `${Math.round(rate * 100)}%`;
}

function bar(kind: string, count: number, total: number): string {
  const width = total > 0 ? Math.round((count / total) * 100) : 0;
  return `
    <div class="bar-row">
      <span class="bar-label">${kind}</span>
      <div class="bar ${kind}" style="width:${width}%"></div>
      <span class="bar-count">${count}</span>
    </div>`;
}

export function renderDimension(name: string, summary: DimensionSummary): string {
  const judged = summary.good + summary.same + summary.bad;
  return `
    <section class="dimension" data-dimension="${name}">
      <h3>${name}</h3>
      ${bar("good", summary.good, judged)}
      ${bar("same", summary.same, judged)}
      ${bar("bad", summary.bad, judged)}
      <p class="win-rate">win rate <strong>${formatWinRate(summary.win_rate)}</strong>
        <span class="excluded">(${summary.excluded} excluded)</span></p>
    </section>`;
}

export class SummaryView {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly allowPartial = false,
  ) {}

  async render(): Promise<void> {
    let summary;
    try {
      summary = await this.api.fetchSummary(this.allowPartial);
    } catch (err) {
      this.root.innerHTML = `<p id="summary-error">summary unavailable: ${
        err instanceof Error ? err.message : String(err)
      }</p>`;
      return;
    }
    const dimensions = Object.entries(summary.dimensions);
    const conclusive = dimensions.some(([, d]) => d.good + d.same + d.bad > 0);
    if (!conclusive) {
      this.root.innerHTML = `<p id="summary-empty">no conclusive items yet</p>`;
      return;
    }
    this.root.innerHTML = `
      <h2>session ${summary.session_id}</h2>
      ${dimensions.map(([name, d]) => renderDimension(name, d)).join("\n")}
      <p class="incomplete">${summary.incomplete_items} incomplete items</p>`;
  }
}
