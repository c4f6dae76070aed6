// Session protocol, version 1. Mirrors the gateway's JSON wire format.

export const PROTOCOL_VERSION = 1;

export interface Snapshot {
    layout: "t9" | "abc";
    region: "keypad" | "suggestions" | "backspace" | "phrase";
    highlight_index: number;
    keypad: string[];
    current_word: string;
    suggestions: string[];
    phrase: string[];
    dwell_ms: number;
    dwell_remaining_ms: number;
    clock_ms: number;
}

export interface SnapshotMsg { v: number; type: "snapshot"; snapshot: Snapshot }
export interface SpokenMsg { v: number; type: "spoken"; words: string[] }
export interface ReplayEndedMsg { v: number; type: "replay_ended" }
export interface ErrorMsg { v: number; type: "error"; text: string }

export type ServerMsg = SnapshotMsg | SpokenMsg | ReplayEndedMsg | ErrorMsg;

export type GestureKind = "Blink" | "JawClench";

export interface ClientEvent {
    kind: GestureKind;
    count: number;
}

export function injectEvent(event: ClientEvent): object {
    return { v: PROTOCOL_VERSION, type: "inject_event", event };
}

export function setLayout(layout: "t9" | "abc"): object {
    return { v: PROTOCOL_VERSION, type: "set_layout", layout };
}

export function startReplay(fixture: string): object {
    return { v: PROTOCOL_VERSION, type: "start_replay", fixture };
}

export function reset(): object {
    return { v: PROTOCOL_VERSION, type: "reset" };
}

export function parseServerMsg(raw: string): ServerMsg | null {
    let parsed: unknown;
    try {
        parsed = JSON.parse(raw);
    } catch {
        return null;
    }
    if (typeof parsed !== "object" || parsed === null) return null;
    const msg = parsed as ServerMsg;
    if (msg.v !== PROTOCOL_VERSION) return null;
    switch (msg.type) {
        case "snapshot":
        case "spoken":
        case "replay_ended":
        case "error":
            return msg;
        default:
            return null;
    }
}
