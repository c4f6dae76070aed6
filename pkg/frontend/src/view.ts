// DOM rendering: the view is a pure function of the view model.

import { Snapshot } from "./protocol.js";
import { ConnectionStatus } from "./connection.js";

export interface ViewModel {
    connection: ConnectionStatus;
    snapshot: Snapshot | null;
    spokenHistory: string[][];
    replay: "idle" | "running";
    statusText: string;
    loudText: string; // shown big when the platform cannot speak aloud
}

export function initialModel(): ViewModel {
    return {
        connection: "connecting",
        snapshot: null,
        spokenHistory: [],
        replay: "idle",
        statusText: "",
        loudText: "",
    };
}

function el(tag: string, className: string, text?: string): HTMLElement {
    const node = document.createElement(tag);
    node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

function renderRegion(
    name: Snapshot["region"],
    items: string[],
    snapshot: Snapshot,
    keyClass: string,
): HTMLElement {
    const active = snapshot.region === name;
    const region = el("div", `region region-${name}${active ? " active" : ""}`);
    region.dataset.region = name;
    items.forEach((label, index) => {
        const key = el("div", keyClass, label);
        if (active && index === snapshot.highlight_index) {
            key.className += " highlight";
        }
        region.appendChild(key);
    });
    return region;
}

export function render(model: ViewModel, root: HTMLElement): void {
    root.textContent = "";

    const status = el("div", `status status-${model.connection}`);
    status.appendChild(el("span", "conn", model.connection));
    if (model.replay === "running") status.appendChild(el("span", "replay", "replay running"));
    if (model.statusText) status.appendChild(el("span", "toast", model.statusText));
    root.appendChild(status);

    if (model.loudText) {
        root.appendChild(el("div", "loud", model.loudText));
    }

    const snapshot = model.snapshot;
    if (snapshot === null) {
        root.appendChild(el("div", "waiting", "waiting for session…"));
        return;
    }

    const board = el("div", `board layout-${snapshot.layout}`);
    board.appendChild(renderRegion("keypad", snapshot.keypad, snapshot, "key"));

    const word = el("div", "current-word", snapshot.current_word);
    board.appendChild(word);

    board.appendChild(renderRegion("suggestions", snapshot.suggestions, snapshot, "suggestion"));
    board.appendChild(renderRegion("backspace", ["⌫ backspace"], snapshot, "key control"));
    board.appendChild(
        renderRegion("phrase", [snapshot.phrase.join(" ") || "(empty phrase)"], snapshot, "phrase-box"),
    );
    root.appendChild(board);

    const dwell = el("div", "dwell");
    const bar = el("div", "dwell-bar");
    const fraction = snapshot.dwell_ms > 0 ? snapshot.dwell_remaining_ms / snapshot.dwell_ms : 0;
    bar.style.width = `${Math.max(0, Math.min(1, fraction)) * 100}%`;
    dwell.appendChild(bar);
    root.appendChild(dwell);

    const history = el("div", "history");
    history.appendChild(el("h3", "", "spoken"));
    for (const words of model.spokenHistory) {
        history.appendChild(el("div", "history-item", words.join(" ")));
    }
    root.appendChild(history);

    const help = el("div", "help",
        "b double blink · j double jaw clench · 1 T9 · 2 ABC · r replay demo");
    root.appendChild(help);
}
