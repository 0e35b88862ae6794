import type { ConsoleStore, TurnEntry, ViewState } from "./store.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function renderBubble(turn: TurnEntry): HTMLElement {
  const bubble = el("div", `bubble ${turn.speaker}`);
  bubble.appendChild(el("div", "bubble-text", turn.text));
  if (turn.badge) {
    const badge = el(
      "details",
      `badge badge-${turn.badge.kind.replace(" ", "-")}${turn.badge.alerted ? " alerted" : ""}`,
    );
    badge.appendChild(el("summary", "", turn.badge.kind));
    // justification comes pre-rendered as an indented proof tree with
    // "assuming not" prefixes; keep the whitespace
    badge.appendChild(el("pre", "justification", turn.badge.justification || turn.badge.text));
    bubble.appendChild(badge);
  }
  return bubble;
}

function renderChatPane(state: ViewState, store: ConsoleStore): HTMLElement {
  const pane = el("section", "pane chat-pane");
  pane.appendChild(el("h2", "", "Chat"));
  const log = el("div", "chat-log");
  for (const turn of state.transcript) log.appendChild(renderBubble(turn));
  pane.appendChild(log);

  const form = el("form", "chat-form");
  const input = el("input");
  input.placeholder = "Ask the agent…";
  const send = el("button", "", "Send");
  form.append(input, send);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    void store.chatSend(text);
  });
  pane.appendChild(form);
  return pane;
}

function renderQueuePane(state: ViewState, store: ConsoleStore): HTMLElement {
  const pane = el("section", "pane queue-pane");
  pane.appendChild(el("h2", "", "Pending cases"));
  if (!state.pendingCases.length) pane.appendChild(el("p", "empty", "queue empty"));
  for (const pending of state.pendingCases) {
    const card = el("div", "case-card");
    card.appendChild(el("h3", "", pending.caseId));
    card.appendChild(el("pre", "facts", pending.facts.join("\n")));
    const targets = el("select");
    for (const candidate of pending.candidates) {
      const option = el("option", "", candidate);
      option.value = candidate;
      targets.appendChild(option);
    }
    const actions = el("div", "label-actions");
    for (const label of ["unethical", "ethical"] as const) {
      const button = el("button", `label-${label}`, `label ${label}`);
      button.addEventListener("click", () => {
        void store.labelCase(pending.caseId, label, targets.value);
      });
      actions.appendChild(button);
    }
    card.append(targets, actions);
    pane.appendChild(card);
  }
  if (state.lastLearnedRules) {
    pane.appendChild(el("h3", "", "Learned rules"));
    pane.appendChild(el("pre", "rules", state.lastLearnedRules));
  }
  return pane;
}

function renderKbPane(state: ViewState, store: ConsoleStore): HTMLElement {
  const pane = el("section", "pane kb-pane");
  pane.appendChild(el("h2", "", `Knowledge base${state.kb ? ` v${state.kb.version}` : ""}`));
  const sections: [string, string][] = state.kb
    ? [
        ["Ontology facts", state.kb.ontology],
        ["Code rules", state.kb.codeRules],
        ["Learned rules", state.kb.learnedRules],
      ]
    : [];
  for (const [title, body] of sections) {
    pane.appendChild(el("h3", "", title));
    pane.appendChild(el("pre", "rules", body || "(none)"));
  }

  const form = el("form", "fact-form");
  const input = el("input");
  input.placeholder = "ground atom, e.g. relevant(environmentally_friendly(productX))";
  const add = el("button", "", "Add fact");
  const remove = el("button", "", "Remove fact");
  remove.type = "button";
  form.append(input, add, remove);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void store.editFact(input.value, "add");
  });
  remove.addEventListener("click", () => void store.editFact(input.value, "remove"));
  pane.appendChild(form);
  return pane;
}

export function render(store: ConsoleStore, root: HTMLElement): void {
  const state = store.state;
  root.textContent = "";
  if (state.lastError) root.appendChild(el("div", "toast error", state.lastError));
  const panes = el("div", "panes");
  panes.append(
    renderChatPane(state, store),
    renderQueuePane(state, store),
    renderKbPane(state, store),
  );
  root.appendChild(panes);
  root.appendChild(el("footer", "cursor", `event cursor: ${state.eventCursor}`));
}
