// Post-episode questionnaire flow: every applicable item needs an
// integer 1..7 before submission unlocks.  Client-side validation
// mirrors the server's OutOfRangeAnswer rule.

export const ITEM_LABELS: Record<string, string> = {
  partner_satisfaction: "How satisfied are you with your AI teammate?",
  predictor_satisfaction: "How satisfied are you with the predictor?",
  situational_awareness: "To what extent can you predict the intention of your AI teammate?",
  cooperation_efficiency: "How would you rate the efficiency of cooperation?",
};

export class QuestionnaireFlow {
  readonly items: string[];
  private answers = new Map<string, number>();

  constructor(items: string[]) {
    this.items = [...items];
  }

  setAnswer(item: string, value: number): boolean {
    if (!this.items.includes(item)) return false;
    if (!Number.isInteger(value) || value < 1 || value > 7) return false;
    this.answers.set(item, value);
    return true;
  }

  answerFor(item: string): number | undefined {
    return this.answers.get(item);
  }

  get complete(): boolean {
    return this.items.every((item) => this.answers.has(item));
  }

  payload(): { type: "questionnaire"; answers: number[] } {
    if (!this.complete) {
      throw new Error("questionnaire incomplete");
    }
    return {
      type: "questionnaire",
      answers: this.items.map((item) => this.answers.get(item)!),
    };
  }
}
