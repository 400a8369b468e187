export type Pos = "adjective" | "verb" | "noun";

export type Judgment = "positive" | "negative" | "neutral" | "cant_judge";

export const JUDGMENTS: readonly Judgment[] = [
  "positive",
  "negative",
  "neutral",
  "cant_judge",
];

export interface SynsetView {
  id: string;
  lemma: string;
  sense: number;
  pos: Pos;
  score: number | null;
  gloss: string;
  parent: string | null;
}

export interface TaskView {
  gif_id: string;
  gif_uri: string;
  status: "open" | "in_progress" | "done";
  required_workers: number;
  completed_workers: number;
}

export interface PairIds {
  modifier: string;
  noun: string;
}

/** Wire shape of POST /annotations; field order matters for nobody,
 *  array order is the occurrence order and matters for everybody. */
export interface AnnotationPayload {
  worker_id: string;
  gif_id: string;
  sequence: PairIds[];
  judgment: Judgment;
}

export interface SubmitAck {
  status: "ok";
  task: TaskView;
}

export interface PositionIssue {
  position: number;
  error: string;
  message: string;
}

export interface ConsolidatedView {
  gif_id: string;
  label: Judgment;
  votes: Record<string, number>;
  sequence: PairIds[];
}

export interface ServiceStats {
  tasks: { open: number; in_progress: number; done: number };
  task_total: number;
  annotations: number;
  workers: string[];
}
