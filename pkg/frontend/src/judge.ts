/**
 * Judging flow controller: fetch the next blinded pair, render it,
 * record exactly one left/right/same choice per displayed item, advance.
 *
 * Keyboard map (1:1 with the buttons): ArrowLeft = left image wins,
 * ArrowRight = right image wins, ArrowDown = same. A busy flag guards
 * against double submission; a server 409 (duplicate) advances without
 * double counting. No state lives here that the server cannot restore:
 * reloading the page resumes at the first unjudged item.
 */

import { ApiClient, Choice, DuplicateJudgmentError, QueueItem, QueueResponse } from "./api.js";

export interface JudgeConfig {
  evaluator: string;
  dimension: string;
}

const KEY_TO_CHOICE: Record<string, Choice> = {
  ArrowLeft: "left",
  ArrowRight: "right",
  ArrowDown: "same",
};

export class JudgeController {
  private current: QueueItem | null = null;
  private busy = false;
  private submitted = 0;
  private keyHandler: ((event: KeyboardEvent) => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly config: JudgeConfig,
  ) {}

  get currentItem(): QueueItem | null {
    return this.current;
  }

  get submittedCount(): number {
    return this.submitted;
  }

  async start(): Promise<void> {
    this.renderShell();
    await this.advance();
  }

  attachKeyboard(target: Window): void {
    this.keyHandler = (event: KeyboardEvent) => {
      const choice = KEY_TO_CHOICE[event.key];
      if (choice) {
        event.preventDefault();
        void this.choose(choice);
      }
    };
    target.addEventListener("keydown", this.keyHandler as EventListener);
  }

  detachKeyboard(target: Window): void {
    if (this.keyHandler) target.removeEventListener("keydown", this.keyHandler as EventListener);
    this.keyHandler = null;
  }

  async choose(choice: Choice): Promise<void> {
    if (this.busy || !this.current) return;
    this.busy = true;
    this.setButtonsEnabled(false);
    const item = this.current;
    try {
      await this.api.submitJudgment(this.config.evaluator, item.item_id, this.config.dimension, choice);
      this.submitted += 1;
    } catch (err) {
      if (!(err instanceof DuplicateJudgmentError)) {
        this.busy = false;
        this.setButtonsEnabled(true);
        this.showError(err instanceof Error ? err.message : String(err));
        return;
      }
      // duplicate: the server already has this item; just advance
    }
    await this.advance();
    this.busy = false;
  }

  private async advance(): Promise<void> {
    let queue: QueueResponse;
    try {
      queue = await this.api.fetchQueue(this.config.evaluator, this.config.dimension);
    } catch (err) {
      this.current = null;
      this.showError(err instanceof Error ? err.message : String(err));
      return;
    }
    this.hideError();
    if (queue.done) {
      this.current = null;
      this.renderDone(queue.judged, queue.total);
      return;
    }
    this.current = queue;
    this.renderItem(queue);
    this.setButtonsEnabled(true);
    void this.preloadFollowing();
  }

  /** Warm the cache for the pair after the one on screen. */
  private async preloadFollowing(): Promise<void> {
    try {
      const next = await this.api.fetchQueue(this.config.evaluator, this.config.dimension, 1);
      if (!next.done) {
        for (const url of [next.left_image_url, next.right_image_url]) {
          const img = new Image();
          img.src = url;
        }
      }
    } catch {
      // preloading is best-effort only
    }
  }

  // -- rendering ---------------------------------------------------------

  private el<T extends HTMLElement>(id: string): T {
    const node = this.root.querySelector(`#${id}`);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <div id="judge-screen">
        <header>
          <span id="dimension"></span>
          <span id="progress" aria-live="polite"></span>
        </header>
        <p id="prompt"></p>
        <div id="error" hidden></div>
        <div class="pair">
          <img id="left-image" alt="left option" />
          <img id="right-image" alt="right option" />
        </div>
        <div class="choices">
          <button id="choose-left" type="button">left is better (&#8592;)</button>
          <button id="choose-same" type="button">same (&#8595;)</button>
          <button id="choose-right" type="button">right is better (&#8594;)</button>
        </div>
      </div>
      <div id="done-screen" hidden></div>
    `;
    this.el<HTMLButtonElement>("choose-left").addEventListener("click", () => void this.choose("left"));
    this.el<HTMLButtonElement>("choose-same").addEventListener("click", () => void this.choose("same"));
    this.el<HTMLButtonElement>("choose-right").addEventListener("click", () => void this.choose("right"));
  }

  private renderItem(item: QueueItem): void {
    this.el("judge-screen").hidden = false;
    this.el("done-screen").hidden = true;
    this.el("dimension").textContent = item.dimension;
    this.el("progress").textContent = `${item.position} / ${item.total}`;
    this.el("prompt").textContent = item.prompt;
    this.el<HTMLImageElement>("left-image").src = item.left_image_url;
    this.el<HTMLImageElement>("right-image").src = item.right_image_url;
  }

  private renderDone(judged: number, total: number): void {
    this.el("judge-screen").hidden = true;
    const done = this.el("done-screen");
    done.hidden = false;
    done.innerHTML = `
      <h2>queue complete</h2>
      <p id="done-counts">${judged} of ${total} pairs judged. Thank you.</p>
    `;
  }

  private setButtonsEnabled(enabled: boolean): void {
    for (const id of ["choose-left", "choose-same", "choose-right"]) {
      this.el<HTMLButtonElement>(id).disabled = !enabled;
    }
  }

  private showError(message: string): void {
    const banner = this.el("error");
    banner.hidden = false;
    banner.textContent = `connection trouble: ${message} - your progress is safe, retry when ready`;
  }

  private hideError(): void {
    this.el("error").hidden = true;
  }
}
