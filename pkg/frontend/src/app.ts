// Browser bootstrap: wires the websocket, canvas, gesture events and the
// quiz/SART panels together. Configuration via URL query:
//   ?endpoint=ws://host:port&participant=p01
// All testable logic lives in the other modules; this file is DOM glue.

import { CanvasGeometry } from "./geom.js";
import { GestureRecognizer } from "./gestures.js";
import { parseEngineMessage, WIRE_VERSION } from "./protocol.js";
import type { ConsoleMessage } from "./protocol.js";
import { renderBlackout, renderLive } from "./render.js";
import { ConsoleState } from "./state.js";
import { IDK_LABEL, NA_LABEL } from "./quiz.js";
import { ANCHORS, SCALE_MAX, SCALE_MIN } from "./sart.js";

function query(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

export function startConsole(): void {
  const canvas = document.getElementById("world") as HTMLCanvasElement;
  const panel = document.getElementById("panel") as HTMLDivElement;
  const ctx = canvas.getContext("2d")!;
  const state = new ConsoleState();
  const recognizer = new GestureRecognizer();
  let geom: CanvasGeometry | null = null;

  const endpoint = query("endpoint", "ws://127.0.0.1:8765");
  const participant = query("participant", "anonymous");
  document.title = `Swarm operator console - ${participant}`;
  const socket = new WebSocket(endpoint);

  const send = (msg: ConsoleMessage) => socket.send(JSON.stringify(msg));

  socket.onopen = () => send({ type: "Hello", version: WIRE_VERSION });
  socket.onmessage = (event) => {
    const msg = parseEngineMessage(String(event.data));
    if (!msg) return;
    state.handleMessage(msg, performance.now());
    if (msg.type === "Welcome") {
      geom = new CanvasGeometry(canvas.width, canvas.height,
                                msg.grid.width, msg.grid.height,
                                msg.grid.cell_size);
    }
    if (msg.type === "QueryPrompt" || msg.type === "PauseBegin"
        || msg.type === "PauseEnd" || msg.type === "SartForm"
        || msg.type === "SessionEnd") {
      renderPanel();
    }
  };

  // no back navigation during the survey: swallow history pops
  history.pushState(null, "", window.location.href);
  window.addEventListener("popstate", () => {
    history.pushState(null, "", window.location.href);
  });

  canvas.addEventListener("pointerdown", (e) =>
    recognizer.pointerDown(e.offsetX, e.offsetY, performance.now()));
  canvas.addEventListener("pointermove", (e) =>
    recognizer.pointerMove(e.offsetX, e.offsetY, performance.now()));
  canvas.addEventListener("pointerup", (e) => {
    const gesture = recognizer.pointerUp(e.offsetX, e.offsetY, performance.now());
    if (!gesture || !geom) return;
    if (state.mode === "blackout-quiz" && state.quiz && gesture.kind === "tap") {
      // during a cell-marking question, taps toggle cells on the quiz grid
      state.quiz.toggleCell(geom.pixelToCell(gesture.x, gesture.y));
      renderPanel();
      return;
    }
    const msg = state.handleGesture(gesture, geom);
    if (msg) send(msg);
  });

  function renderPanel(): void {
    panel.innerHTML = "";
    if (state.mode === "blackout-quiz" && state.quiz) {
      const screen = state.quiz.screen();
      if (!screen) return;
      const title = document.createElement("p");
      title.textContent = `Question ${screen.index} of ${screen.total}: ${screen.prompt}`;
      panel.appendChild(title);
      screen.controls.forEach((label, i) => {
        const button = document.createElement("button");
        button.textContent = label;
        button.onclick = () => {
          const now = performance.now();
          let msg: ConsoleMessage | null = null;
          if (screen.kind === "MCQ") {
            msg = state.quiz!.answerOption(i, now);
          } else if (label === NA_LABEL) {
            msg = state.quiz!.answerNotApplicable(now);
          } else {
            msg = state.quiz!.answerCells(now);
          }
          if (msg) send(msg);
          panel.innerHTML = "<p>Waiting for the next question...</p>";
        };
        panel.appendChild(button);
      });
      void IDK_LABEL; // MCQ option lists already include it via the controller
    } else if (state.mode === "sart" && state.sart) {
      const form = state.sart;
      const note = document.createElement("p");
      note.textContent = `Rate each construct (${ANCHORS.low}, ${ANCHORS.high})`;
      panel.appendChild(note);
      form.constructs.forEach((name, i) => {
        const row = document.createElement("div");
        const label = document.createElement("span");
        label.textContent = name;
        row.appendChild(label);
        for (let v = SCALE_MIN; v <= SCALE_MAX; v++) {
          const b = document.createElement("button");
          b.textContent = String(v);
          b.onclick = () => {
            form.setRating(i, v);
            if (form.complete) {
              const msg = form.submitMessage();
              if (msg) {
                send(msg);
                panel.innerHTML = "<p>Submitted.</p>";
              }
            }
          };
          row.appendChild(b);
        }
        panel.appendChild(row);
      });
    } else if (state.mode === "done") {
      panel.textContent = "Session complete.";
    }
  }

  function frame(): void {
    if (geom) {
      if (state.mode === "live" && state.welcome) {
        renderLive({ welcome: state.welcome, snapshot: state.snapshot,
                     alerts: state.alerts, stale: state.isStale(performance.now()) },
                   ctx, geom);
      } else if (state.mode !== "connecting") {
        renderBlackout(ctx, geom);
      }
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

startConsole();
