// Wire schema shared with the game service.  Field names are frozen;
// every message carries the schema version.

export const ACTIONS = {
  up: 0,
  down: 1,
  left: 2,
  right: 3,
  interact: 4,
  wait: 5,
} as const;

export type ActionCode = (typeof ACTIONS)[keyof typeof ACTIONS];

export interface WirePlayer {
  pos: [number, number];
  orientation: "N" | "S" | "E" | "W";
  holding: string | null;
}

export interface WirePot {
  pos: [number, number];
  onions: number;
  cook_timer: number;
}

export interface WirePrediction {
  warming_up: boolean;
  actions: number[];
  cells: [number, number][];
  orientations?: string[];
  confidence: number[];
}

export interface StateMessage {
  type: "state";
  schema: number;
  tick: number;
  players: WirePlayer[];
  pots: WirePot[];
  counters: [[number, number], string][];
  score: number;
  time_left_ticks: number;
  prediction: WirePrediction | null;
}

export interface EpisodeStartMessage {
  type: "episode_start";
  schema: number;
  episode: number;
  tutorial: boolean;
  layout: { name: string; width: number; height: number; tiles: string[] };
  agent_style: string | null;
  group: string;
  ticks_per_episode: number;
  tick_rate: number;
}

export interface EpisodeEndMessage {
  type: "episode_end";
  schema: number;
  reward: number;
  delivery_reward: number;
  episode: number;
}

export interface QuestionnaireRequestMessage {
  type: "questionnaire_request";
  schema: number;
  items: string[];
}

export type ServerMessage =
  | StateMessage
  | EpisodeStartMessage
  | EpisodeEndMessage
  | QuestionnaireRequestMessage
  | { type: "questionnaire_ack"; schema: number }
  | { type: "tutorial_passed"; schema: number; final_reward: number }
  | { type: "tutorial_retry"; schema: number; final_reward: number }
  | { type: "session_done"; schema: number }
  | { type: "error"; schema: number; code: string; message?: string };

export type ClientMessage =
  | { type: "ready" }
  | { type: "action"; action: number }
  | { type: "questionnaire"; answers: number[] };
