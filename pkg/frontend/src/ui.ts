import { AnnotationClient, ServiceError } from "./api.js";
import { ComposerState, pairKind, pairName } from "./composer.js";
import { buildTrees, visibleUnderPrefix, type TreeNode } from "./tree.js";
import { JUDGMENTS, type Judgment, type Pos, type SynsetView } from "./types.js";

const JUDGMENT_LABELS: Record<Judgment, string> = {
  positive: "Positive",
  negative: "Negative",
  neutral: "Neutral",
  cant_judge: "Can't Judge",
};

type Slot = "modifier" | "noun";

/** Wires the composer to the page.  One instance per browser tab/session. */
export class AnnotationApp {
  private readonly client: AnnotationClient;
  private readonly workerId: string;
  private synsets: SynsetView[] = [];
  private trees = new Map<Pos, TreeNode>();
  private state: ComposerState | null = null;
  private issueByPosition = new Map<number, string>();

  constructor(private readonly root: HTMLElement, baseUrl: string, workerId: string) {
    this.client = new AnnotationClient(baseUrl);
    this.workerId = workerId;
  }

  async start(): Promise<void> {
    this.synsets = await this.client.forest();
    this.trees = buildTrees(this.synsets);
    this.renderShell();
    await this.loadNextTask();
  }

  private async loadNextTask(): Promise<void> {
    const task = await this.client.nextTask(this.workerId);
    this.issueByPosition.clear();
    this.state = task ? new ComposerState(task) : null;
    this.renderTask();
    await this.renderProgress();
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <header>
        <h1>GIF annotation</h1>
        <span id="worker-badge"></span>
        <span id="progress"></span>
      </header>
      <main>
        <section id="gif-panel">
          <img id="gif-view" alt="current GIF loops continuously">
          <div id="task-meta"></div>
        </section>
        <section id="composer-panel">
          <div class="slots">
            <div class="slot" id="slot-modifier">
              <h3>Modifier <small>(adjective or verb)</small></h3>
              <input type="search" id="search-modifier" placeholder="prefix search">
              <div class="tree" id="tree-modifier"></div>
              <div class="chosen" id="chosen-modifier">nothing selected</div>
            </div>
            <div class="slot" id="slot-noun">
              <h3>Noun</h3>
              <input type="search" id="search-noun" placeholder="prefix search">
              <div class="tree" id="tree-noun"></div>
              <div class="chosen" id="chosen-noun">nothing selected</div>
            </div>
          </div>
          <button id="add-pair" disabled>Add pair to sequence</button>
          <h3>SentiPair sequence <small>(occurrence order)</small></h3>
          <ol id="sequence"></ol>
          <h3>Overall judgment</h3>
          <div id="judgments"></div>
          <button id="submit" disabled>Submit annotation</button>
          <div id="form-error" role="alert"></div>
        </section>
      </main>
      <div id="done-note" hidden>No more tasks for you. Thank you!</div>
    `;
    const badge = this.el("worker-badge");
    badge.textContent = `worker: ${this.workerId}`;
    this.el<HTMLButtonElement>("add-pair").addEventListener("click", () => {
      this.state?.addPair();
      this.renderComposer();
    });
    this.el<HTMLButtonElement>("submit").addEventListener("click", () => {
      void this.submit();
    });
    for (const slot of ["modifier", "noun"] as const) {
      this.el<HTMLInputElement>(`search-${slot}`).addEventListener("input", () => {
        this.renderTreesFor(slot);
      });
    }
    const judgments = this.el("judgments");
    for (const judgment of JUDGMENTS) {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "judgment";
      radio.value = judgment;
      radio.addEventListener("change", () => {
        this.state?.setJudgment(judgment);
        this.renderComposer();
      });
      label.append(radio, ` ${JUDGMENT_LABELS[judgment]}`);
      judgments.append(label);
    }
  }

  private renderTask(): void {
    const done = this.el("done-note");
    const main = this.root.querySelector("main") as HTMLElement;
    if (!this.state) {
      main.hidden = true;
      done.hidden = false;
      return;
    }
    main.hidden = false;
    done.hidden = true;
    const task = this.state.task;
    this.el<HTMLImageElement>("gif-view").src = task.gif_uri;
    this.el("task-meta").textContent =
      `${task.gif_id}: ${task.completed_workers}/${task.required_workers} workers done`;
    this.renderTreesFor("modifier");
    this.renderTreesFor("noun");
    this.renderComposer();
  }

  private renderTreesFor(slot: Slot): void {
    const container = this.el(`tree-${slot}`);
    container.innerHTML = "";
    const prefix = this.el<HTMLInputElement>(`search-${slot}`).value.trim();
    // the slot decides which trees are browsable at all: pos-invalid picks
    // cannot be expressed, not merely rejected
    const poses: Pos[] = slot === "modifier" ? ["adjective", "verb"] : ["noun"];
    for (const pos of poses) {
      const rootNode = this.trees.get(pos);
      if (!rootNode) continue;
      const visible = visibleUnderPrefix(rootNode, prefix);
      if (!visible.has(rootNode.synset.id)) continue;
      const caption = document.createElement("div");
      caption.className = "tree-caption";
      caption.textContent = pos;
      container.append(caption, this.renderNode(rootNode, slot, visible));
    }
  }

  private renderNode(node: TreeNode, slot: Slot, visible: Set<string>): HTMLElement {
    const details = document.createElement("details");
    details.open = true;
    const summary = document.createElement("summary");
    const button = document.createElement("button");
    button.type = "button";
    button.className = "synset";
    button.textContent = `${node.synset.lemma}#${node.synset.sense}`;
    button.title = node.synset.gloss;
    button.addEventListener("click", () => {
      if (!this.state) return;
      if (slot === "modifier") this.state.selectModifier(node.synset);
      else this.state.selectNoun(node.synset);
      this.renderComposer();
    });
    summary.append(button);
    details.append(summary);
    for (const child of node.children) {
      if (visible.has(child.synset.id)) {
        details.append(this.renderNode(child, slot, visible));
      }
    }
    return details;
  }

  private renderComposer(): void {
    if (!this.state) return;
    const chosenModifier = this.el("chosen-modifier");
    const chosenNoun = this.el("chosen-noun");
    chosenModifier.textContent = this.state.modifier
      ? `${this.state.modifier.lemma}#${this.state.modifier.sense} (${this.state.modifier.pos})`
      : "nothing selected";
    chosenNoun.textContent = this.state.noun
      ? `${this.state.noun.lemma}#${this.state.noun.sense}`
      : "nothing selected";
    this.el<HTMLButtonElement>("add-pair").disabled = !this.state.canAddPair;
    this.el<HTMLButtonElement>("submit").disabled = !this.state.canSubmit;

    const list = this.el("sequence");
    list.innerHTML = "";
    this.state.pairs.forEach((pair, index) => {
      const item = document.createElement("li");
      if (this.issueByPosition.has(index)) {
        item.className = "invalid";
        item.title = this.issueByPosition.get(index) ?? "";
      }
      const badge = document.createElement("span");
      badge.className = `badge ${pairKind(pair).toLowerCase()}`;
      badge.textContent = pairKind(pair);
      item.append(`${pairName(pair)} `, badge);
      item.append(
        this.sequenceButton("up", index > 0, () => {
          this.state?.movePair(index, index - 1);
          this.renderComposer();
        }),
        this.sequenceButton("down", index < this.state!.pairs.length - 1, () => {
          this.state?.movePair(index, index + 1);
          this.renderComposer();
        }),
        this.sequenceButton("remove", true, () => {
          this.state?.removePair(index);
          this.issueByPosition.clear();
          this.renderComposer();
        }),
      );
      list.append(item);
    });
  }

  private sequenceButton(label: string, enabled: boolean, onClick: () => void): HTMLButtonElement {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = label;
    button.disabled = !enabled;
    button.addEventListener("click", onClick);
    return button;
  }

  private async submit(): Promise<void> {
    if (!this.state || !this.state.canSubmit) return;
    if (
      this.state.needsEmptySequenceConfirmation &&
      !window.confirm("Submit with an empty SentiPair sequence?")
    ) {
      return;
    }
    const errorBox = this.el("form-error");
    errorBox.textContent = "";
    this.issueByPosition.clear();
    try {
      await this.client.submit(this.state.buildPayload(this.workerId));
      await this.loadNextTask();
    } catch (error) {
      if (error instanceof ServiceError) {
        for (const issue of error.positions) {
          this.issueByPosition.set(issue.position, `${issue.error}: ${issue.message}`);
        }
        errorBox.textContent = `${error.code}: ${error.message}`;
        this.renderComposer();
      } else {
        errorBox.textContent = String(error);
      }
    }
  }

  private async renderProgress(): Promise<void> {
    const stats = await this.client.stats();
    this.el("progress").textContent =
      `tasks done ${stats.tasks.done}/${stats.task_total}`;
  }

  private el<T extends HTMLElement = HTMLElement>(id: string): T {
    const node = this.root.querySelector(`#${id}`);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }
}
