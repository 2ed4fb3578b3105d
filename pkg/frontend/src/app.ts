import { ApiClient, ApiError } from './api.js';
import type { Category, ScoreTable, SessionItem } from './types.js';

export interface AppConfig {
  apiBase: string;
  sessionId: string;
  annotatorId: string;
}

type Phase = 'loading' | 'annotating' | 'load-failed' | 'done';

const NOT_FLAWED = true;

function formatScore(value: number): string {
  return value.toFixed(2);
}

/**
 * Keyboard-first annotation loop: digits 1-9 toggle the categories in
 * their fixed order, Enter submits (or retries after a failure). The
 * server is the source of truth for progress and scores; the client only
 * holds the in-flight toggle state.
 */
export class AnnotationApp {
  readonly client: ApiClient;

  private categories: Category[] = [];
  private toggles: boolean[] = [];
  private item: SessionItem | null = null;
  private completed = 0;
  private total = 0;
  private phase: Phase = 'loading';
  private busy = false;
  private pending: Promise<void> = Promise.resolve();
  private readonly keyListener: (event: KeyboardEvent) => void;

  constructor(
    private readonly root: HTMLElement,
    private readonly config: AppConfig,
    private readonly doc: Document,
  ) {
    this.client = new ApiClient(config.apiBase);
    this.keyListener = (event) => this.handleKey(event);
  }

  /** Resolves once every operation started so far has finished. */
  settle(): Promise<void> {
    return this.pending;
  }

  start(): Promise<void> {
    this.renderSkeleton();
    this.doc.addEventListener('keydown', this.keyListener);
    this.pending = (async () => {
      try {
        this.categories = await this.client.categories();
        this.toggles = this.categories.map(() => NOT_FLAWED);
        this.renderToggles();
        await this.loadNext();
      } catch (error) {
        this.phase = 'load-failed';
        this.showError(error, 'press Enter to retry');
      }
    })();
    return this.pending;
  }

  dispose(): void {
    this.doc.removeEventListener('keydown', this.keyListener);
  }

  private track(work: () => Promise<void>): void {
    if (this.busy) {
      return;
    }
    this.busy = true;
    this.pending = work().finally(() => {
      this.busy = false;
    });
  }

  private handleKey(event: KeyboardEvent): void {
    if (event.key >= '1' && event.key <= '9') {
      const index = Number(event.key) - 1;
      if (this.phase === 'annotating' && index < this.toggles.length) {
        this.toggles[index] = !this.toggles[index];
        this.renderToggles();
      }
      event.preventDefault();
      return;
    }
    if (event.key === 'Enter') {
      event.preventDefault();
      if (this.phase === 'annotating' && this.item !== null) {
        this.track(() => this.submit());
      } else if (this.phase === 'load-failed') {
        this.phase = 'loading';
        this.clearError();
        this.track(() => this.loadNext());
      }
    }
  }

  private async loadNext(): Promise<void> {
    try {
      const next = await this.client.next(this.config.sessionId, this.config.annotatorId);
      this.completed = next.completed;
      this.total = next.total;
      if (next.status === 'done') {
        this.item = null;
        this.phase = 'done';
        this.renderProgress();
        await this.renderScores();
        return;
      }
      this.item = next.item ?? null;
      this.toggles = this.categories.map(() => NOT_FLAWED);
      this.phase = 'annotating';
      this.clearError();
      this.renderItem();
      this.renderToggles();
      this.renderProgress();
    } catch (error) {
      this.phase = 'load-failed';
      this.showError(error, 'press Enter to retry');
    }
  }

  private async submit(): Promise<void> {
    if (this.item === null) {
      return;
    }
    const judgments: Record<string, number> = {};
    this.categories.forEach((category, i) => {
      judgments[category.key] = this.toggles[i] ? 1 : 0;
    });
    try {
      const ack = await this.client.submit(this.config.sessionId, {
        sentence_id: this.item.sentence_id,
        annotator_id: this.config.annotatorId,
        timestamp: new Date().toISOString(),
        judgments,
      });
      this.setText('live-score', formatScore(ack.sentence_score));
      this.clearError();
      await this.loadNext();
    } catch (error) {
      // Keep the toggle state so a retry resubmits exactly what is shown.
      this.showError(error, 'press Enter to retry');
    }
  }

  // --- rendering ---------------------------------------------------------

  private element(id: string): HTMLElement {
    const found = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!found) {
      throw new Error(`missing element #${id}`);
    }
    return found;
  }

  private setText(id: string, text: string): void {
    this.element(id).textContent = text;
  }

  private renderSkeleton(): void {
    this.root.innerHTML = `
      <header>
        <h1>Grammar annotation</h1>
        <p id="progress"></p>
      </header>
      <section id="sentence-panel">
        <dl>
          <dt>Source</dt><dd id="source"></dd>
          <dt>Reference</dt><dd id="reference"></dd>
          <dt>Translation</dt><dd id="candidate"></dd>
        </dl>
      </section>
      <ol id="toggles"></ol>
      <p id="hint">Keys 1-9 toggle a category, Enter submits.</p>
      <p>Last sentence score: <strong id="live-score">-</strong></p>
      <p id="error" role="alert" hidden></p>
      <section id="scores" hidden></section>
    `;
  }

  private renderItem(): void {
    if (this.item === null) {
      return;
    }
    this.setText('source', this.item.source_text);
    this.setText('reference', this.item.reference_text);
    this.setText('candidate', this.item.candidate_text);
  }

  private renderProgress(): void {
    const state = this.phase === 'done' ? 'session complete' : `sentence ${this.completed + 1}`;
    this.setText('progress', `${state} - ${this.completed}/${this.total} annotated`);
  }

  private renderToggles(): void {
    const list = this.element('toggles');
    list.innerHTML = '';
    this.categories.forEach((category, i) => {
      const entry = this.doc.createElement('li');
      entry.id = `toggle-${category.key}`;
      entry.title = category.criterion;
      entry.dataset.flawed = this.toggles[i] ? '0' : '1';
      entry.className = this.toggles[i] ? 'ok' : 'flawed';
      const shortcut = this.doc.createElement('kbd');
      shortcut.textContent = String(i + 1);
      const label = this.doc.createElement('span');
      label.textContent = ` ${category.label}: `;
      const state = this.doc.createElement('strong');
      state.textContent = this.toggles[i] ? 'not flawed' : 'flawed';
      entry.append(shortcut, label, state);
      list.append(entry);
    });
  }

  private async renderScores(): Promise<void> {
    const scores = await this.client.scores(this.config.sessionId);
    const table = scores.per_annotator[this.config.annotatorId] ?? scores.pooled;
    const panel = this.element('scores');
    panel.hidden = false;
    if (!table) {
      panel.textContent = 'No scores yet.';
      return;
    }
    panel.innerHTML = '';
    const heading = this.doc.createElement('h2');
    heading.textContent = `Scores (${table.sentence_count} sentences)`;
    panel.append(heading, this.scoreTable(table));
  }

  private scoreTable(table: ScoreTable): HTMLTableElement {
    const element = this.doc.createElement('table');
    const row = (id: string | null, label: string, value: string): HTMLTableRowElement => {
      const tr = this.doc.createElement('tr');
      if (id) {
        tr.id = id;
      }
      for (const content of [label, value]) {
        const td = this.doc.createElement('td');
        td.textContent = content;
        tr.append(td);
      }
      return tr;
    };
    for (const category of this.categories) {
      element.append(row(null, category.label, formatScore(table.category_scores[category.key])));
    }
    element.append(row('model-score-row', 'Model score', formatScore(table.model_score)));
    return element;
  }

  private showError(error: unknown, advice: string): void {
    const box = this.element('error');
    const message = error instanceof ApiError ? error.message : String(error);
    box.textContent = `${message} (${advice})`;
    box.hidden = false;
  }

  private clearError(): void {
    const box = this.element('error');
    box.textContent = '';
    box.hidden = true;
  }
}

export function mountAnnotationApp(
  root: HTMLElement,
  config: AppConfig,
  doc: Document = document,
): AnnotationApp {
  const app = new AnnotationApp(root, config, doc);
  void app.start();
  return app;
}
