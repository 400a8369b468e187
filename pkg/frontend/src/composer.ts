import type {
  AnnotationPayload,
  Judgment,
  SynsetView,
  TaskView,
} from "./types.js";

export interface DraftPair {
  modifier: SynsetView;
  noun: SynsetView;
}

export function pairKind(pair: DraftPair): "ANP" | "VNP" {
  return pair.modifier.pos === "adjective" ? "ANP" : "VNP";
}

/** Display convention: adjective pairs read modifier-first ("cute dog"),
 *  verb pairs noun-first ("girl frown"). */
export function pairName(pair: DraftPair): string {
  return pairKind(pair) === "ANP"
    ? `${pair.modifier.lemma} ${pair.noun.lemma}`
    : `${pair.noun.lemma} ${pair.modifier.lemma}`;
}

export function modifierOptions(synsets: SynsetView[]): SynsetView[] {
  return synsets.filter((s) => s.pos === "adjective" || s.pos === "verb");
}

export function nounOptions(synsets: SynsetView[]): SynsetView[] {
  return synsets.filter((s) => s.pos === "noun");
}

/**
 * Draft state for one task: two pos-filtered slots, the ordered pair
 * sequence, and the overall judgment.  The slot setters refuse synsets of
 * the wrong part of speech, so no payload this state can produce is ever
 * rejected by the service for pos validity.
 */
export class ComposerState {
  readonly task: TaskView;
  private modifierSlot: SynsetView | null = null;
  private nounSlot: SynsetView | null = null;
  private sequence: DraftPair[] = [];
  private judgment: Judgment | null = null;

  constructor(task: TaskView) {
    this.task = task;
  }

  get modifier(): SynsetView | null {
    return this.modifierSlot;
  }

  get noun(): SynsetView | null {
    return this.nounSlot;
  }

  get pairs(): readonly DraftPair[] {
    return this.sequence;
  }

  get judgmentValue(): Judgment | null {
    return this.judgment;
  }

  selectModifier(synset: SynsetView): void {
    if (synset.pos !== "adjective" && synset.pos !== "verb") {
      throw new Error(`modifier slot takes adjectives or verbs, not ${synset.pos}`);
    }
    this.modifierSlot = synset;
  }

  selectNoun(synset: SynsetView): void {
    if (synset.pos !== "noun") {
      throw new Error(`noun slot takes nouns, not ${synset.pos}`);
    }
    this.nounSlot = synset;
  }

  get canAddPair(): boolean {
    return this.modifierSlot !== null && this.nounSlot !== null;
  }

  /** Append the slot pair at the end of the sequence and clear the slots. */
  addPair(): DraftPair {
    if (!this.modifierSlot || !this.nounSlot) {
      throw new Error("both slots must be filled before adding a pair");
    }
    const pair: DraftPair = { modifier: this.modifierSlot, noun: this.nounSlot };
    this.sequence.push(pair);
    this.modifierSlot = null;
    this.nounSlot = null;
    return pair;
  }

  removePair(index: number): void {
    if (index < 0 || index >= this.sequence.length) {
      throw new Error(`no pair at position ${index}`);
    }
    this.sequence.splice(index, 1);
  }

  /** Explicit reorder control; all other edits preserve insertion order. */
  movePair(from: number, to: number): void {
    const n = this.sequence.length;
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw new Error(`cannot move ${from} -> ${to} in a ${n}-pair sequence`);
    }
    const [pair] = this.sequence.splice(from, 1);
    this.sequence.splice(to, 0, pair as DraftPair);
  }

  setJudgment(judgment: Judgment): void {
    this.judgment = judgment;
  }

  /** Submit gate: a judgment is mandatory; an empty sequence merely asks
   *  for confirmation in the UI. */
  get canSubmit(): boolean {
    return this.judgment !== null;
  }

  get needsEmptySequenceConfirmation(): boolean {
    return this.sequence.length === 0;
  }

  buildPayload(workerId: string): AnnotationPayload {
    if (!this.judgment) {
      throw new Error("select an overall judgment before submitting");
    }
    return {
      worker_id: workerId,
      gif_id: this.task.gif_id,
      sequence: this.sequence.map((pair) => ({
        modifier: pair.modifier.id,
        noun: pair.noun.id,
      })),
      judgment: this.judgment,
    };
  }

  /** Rebuild the draft from a previously submitted payload, so rendering
   *  an old annotation and resubmitting reproduces identical bytes. */
  static fromPayload(
    task: TaskView,
    payload: AnnotationPayload,
    lookup: Map<string, SynsetView>,
  ): ComposerState {
    const state = new ComposerState(task);
    for (const ids of payload.sequence) {
      const modifier = lookup.get(ids.modifier);
      const noun = lookup.get(ids.noun);
      if (!modifier || !noun) {
        throw new Error(`payload references unknown synsets ${ids.modifier}|${ids.noun}`);
      }
      state.selectModifier(modifier);
      state.selectNoun(noun);
      state.addPair();
    }
    state.setJudgment(payload.judgment);
    return state;
  }
}
