// Session driver: connects the WebSocket, applies server messages at
// message order, forwards one input per tick, and walks the
// tutorial / playing / questionnaire / done phases.

import { InputTracker } from "./input.js";
import { ClientMessage, ServerMessage, StateMessage } from "./protocol.js";
import { ITEM_LABELS, QuestionnaireFlow } from "./questionnaire.js";
import { GameView } from "./view.js";

export type Phase = "connecting" | "tutorial" | "playing" | "questionnaire" | "done";

export interface ClientHooks {
  onPhase?: (phase: Phase) => void;
  onStatus?: (text: string) => void;
  onQuestionnaire?: (flow: QuestionnaireFlow) => void;
}

export class GameClient {
  phase: Phase = "connecting";
  private flow: QuestionnaireFlow | null = null;

  constructor(
    private socket: WebSocket,
    private view: GameView,
    private input: InputTracker,
    private hooks: ClientHooks = {},
  ) {
    socket.onopen = () => this.send({ type: "ready" });
    socket.onmessage = (event) => this.handle(JSON.parse(event.data) as ServerMessage);
  }

  send(message: ClientMessage): void {
    this.socket.send(JSON.stringify(message));
  }

  submitQuestionnaire(): boolean {
    if (!this.flow || !this.flow.complete) return false;
    this.send(this.flow.payload());
    return true;
  }

  get questionnaire(): QuestionnaireFlow | null {
    return this.flow;
  }

  private setPhase(phase: Phase): void {
    this.phase = phase;
    this.hooks.onPhase?.(phase);
  }

  private handle(message: ServerMessage): void {
    switch (message.type) {
      case "episode_start": {
        this.view.setLayout(message.layout);
        this.input.clear();
        this.setPhase(message.tutorial ? "tutorial" : "playing");
        this.hooks.onStatus?.(
          message.tutorial
            ? "Tutorial: deliver one soup to continue."
            : `Episode ${message.episode + 1}`,
        );
        break;
      }
      case "state": {
        this.view.render(message as StateMessage);
        const action = this.input.actionForTick();
        if (action !== null && (this.phase === "playing" || this.phase === "tutorial")) {
          this.send({ type: "action", action });
        }
        break;
      }
      case "episode_end": {
        this.hooks.onStatus?.(`Episode finished: ${message.reward.toFixed(1)} points.`);
        break;
      }
      case "questionnaire_request": {
        this.flow = new QuestionnaireFlow(message.items);
        this.setPhase("questionnaire");
        this.hooks.onQuestionnaire?.(this.flow);
        break;
      }
      case "questionnaire_ack": {
        this.flow = null;
        break;
      }
      case "tutorial_passed": {
        this.hooks.onStatus?.("Tutorial passed.");
        break;
      }
      case "tutorial_retry": {
        this.hooks.onStatus?.("Tutorial: deliver one soup to continue.");
        break;
      }
      case "session_done": {
        this.setPhase("done");
        this.hooks.onStatus?.("All episodes finished. Thank you!");
        break;
      }
      case "error": {
        this.hooks.onStatus?.(`Server error: ${message.code}`);
        break;
      }
    }
  }
}

export { ITEM_LABELS };
