// WebSocket session wrapper with automatic reconnect and backoff.

import { parseServerMsg, ServerMsg } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "retrying";

export interface ConnectionHandlers {
    onMessage(msg: ServerMsg): void;
    onStatus(status: ConnectionStatus): void;
}

export class SessionConnection {
    private ws: WebSocket | null = null;
    private attempts = 0;
    private closed = false;

    constructor(private url: string, private handlers: ConnectionHandlers) {
        this.open();
    }

    private open(): void {
        this.handlers.onStatus(this.attempts === 0 ? "connecting" : "retrying");
        this.ws = new WebSocket(this.url);
        this.ws.onopen = () => {
            this.attempts = 0;
            this.handlers.onStatus("connected");
        };
        this.ws.onmessage = (event: MessageEvent) => {
            const msg = parseServerMsg(String(event.data));
            if (msg !== null) this.handlers.onMessage(msg);
        };
        this.ws.onclose = () => this.scheduleReconnect();
        this.ws.onerror = () => { /* close follows; reconnect handles it */ };
    }

    private scheduleReconnect(): void {
        if (this.closed) return;
        this.handlers.onStatus("retrying");
        const delay = Math.min(500 * 2 ** this.attempts, 15000);
        this.attempts += 1;
        setTimeout(() => {
            if (!this.closed) this.open();
        }, delay);
    }

    send(msg: object): void {
        if (this.ws !== null && this.ws.readyState === WebSocket.OPEN) {
            this.ws.send(JSON.stringify(msg));
        }
    }

    close(): void {
        this.closed = true;
        this.ws?.close();
    }
}
