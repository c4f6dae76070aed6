// Application wiring: one connection, one view model, key bindings.

import { SessionConnection, ConnectionStatus } from "./connection.js";
import { injectEvent, ServerMsg, setLayout, startReplay } from "./protocol.js";
import { speak } from "./speech.js";
import { initialModel, render, ViewModel } from "./view.js";

export class App {
    readonly model: ViewModel = initialModel();
    readonly connection: SessionConnection;

    constructor(url: string, private root: HTMLElement) {
        this.connection = new SessionConnection(url, {
            onMessage: (msg) => this.onMessage(msg),
            onStatus: (status) => this.onStatus(status),
        });
        this.render();
    }

    private render(): void {
        render(this.model, this.root);
    }

    private onStatus(status: ConnectionStatus): void {
        this.model.connection = status;
        this.render();
    }

    private onMessage(msg: ServerMsg): void {
        switch (msg.type) {
            case "snapshot":
                this.model.snapshot = msg.snapshot;
                break;
            case "spoken":
                this.model.spokenHistory.push(msg.words);
                if (!speak(msg.words)) {
                    this.model.loudText = msg.words.join(" ");
                }
                break;
            case "replay_ended":
                this.model.replay = "idle";
                break;
            case "error":
                this.model.statusText = msg.text;
                break;
        }
        this.render();
    }

    /** Keyboard-simulated gestures; each press sends exactly one message. */
    handleKey(key: string): void {
        switch (key) {
            case "b":
                this.connection.send(injectEvent({ kind: "Blink", count: 2 }));
                break;
            case "j":
                this.connection.send(injectEvent({ kind: "JawClench", count: 2 }));
                break;
            case "1":
                this.connection.send(setLayout("t9"));
                break;
            case "2":
                this.connection.send(setLayout("abc"));
                break;
            case "r":
                this.model.replay = "running";
                this.render();
                this.connection.send(startReplay("demo"));
                break;
            default:
                break; // unbound keys send nothing
        }
    }

    bindKeys(target: { addEventListener: Window["addEventListener"] }): void {
        target.addEventListener("keydown", (event: Event) => {
            this.handleKey((event as KeyboardEvent).key);
        });
    }
}
