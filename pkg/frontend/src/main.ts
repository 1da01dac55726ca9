// Page bootstrap: create a session over HTTP, open the socket, wire
// the keyboard and the questionnaire form.

import { GameClient } from "./client.js";
import { InputTracker, bindKeyboard } from "./input.js";
import { ITEM_LABELS, QuestionnaireFlow } from "./questionnaire.js";
import { GameView } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function start(): Promise<void> {
  const status = el<HTMLDivElement>("status");
  const form = el<HTMLDivElement>("questionnaire");
  const canvas = el<HTMLCanvasElement>("board");

  const participant =
    new URLSearchParams(location.search).get("participant") ??
    `p-${Math.random().toString(36).slice(2, 8)}`;
  const response = await fetch("/sessions", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ participant_id: participant }),
  });
  if (!response.ok) {
    status.textContent = `Could not create a session (${response.status}).`;
    return;
  }
  const session = await response.json();
  const protocol = location.protocol === "https:" ? "wss" : "ws";
  const socket = new WebSocket(`${protocol}://${location.host}/ws/${session.session_id}`);

  const view = new GameView(canvas);
  const input = new InputTracker();
  bindKeyboard(input);

  const renderQuestionnaire = (flow: QuestionnaireFlow) => {
    form.innerHTML = "";
    for (const item of flow.items) {
      const row = document.createElement("div");
      row.className = "q-row";
      const label = document.createElement("label");
      label.textContent = ITEM_LABELS[item] ?? item;
      const select = document.createElement("select");
      select.appendChild(new Option("--", ""));
      for (let v = 1; v <= 7; v += 1) select.appendChild(new Option(String(v), String(v)));
      select.onchange = () => {
        flow.setAnswer(item, Number(select.value));
        submit.disabled = !flow.complete;
      };
      row.append(label, select);
      form.appendChild(row);
    }
    const submit = document.createElement("button");
    submit.textContent = "Submit";
    submit.disabled = true;
    submit.onclick = () => {
      if (client.submitQuestionnaire()) form.innerHTML = "";
    };
    form.appendChild(submit);
  };

  const client = new GameClient(socket, view, input, {
    onStatus: (text) => {
      status.textContent = text;
    },
    onPhase: (phase) => {
      document.body.dataset.phase = phase;
      if (phase !== "questionnaire") form.innerHTML = "";
    },
    onQuestionnaire: renderQuestionnaire,
  });
}

start().catch((error) => {
  const status = document.getElementById("status");
  if (status) status.textContent = String(error);
});
