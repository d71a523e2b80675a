/** WebSocket wrapper: auto-reconnect with backoff, message fan-in. */

import { parseServerMessage, type AckMsg, type ControlCmd, type ServerMsg } from "./protocol.js";

export interface ConnectionHooks {
  onOpen(): void;
  onClose(): void;
  onServerMessage(msg: ServerMsg): void;
  onAck(ack: AckMsg): void;
}

export class ScopeConnection {
  private socket: WebSocket | null = null;
  private closed = false;
  private retryMs = 500;

  constructor(
    private readonly url: string,
    private readonly hooks: ConnectionHooks,
  ) {}

  start(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.retryMs = 500;
      this.hooks.onOpen();
    };
    socket.onmessage = (event: MessageEvent) => {
      const msg = parseServerMessage(String(event.data));
      if (msg === null) return;
      if (msg.kind === "ack") this.hooks.onAck(msg);
      else this.hooks.onServerMessage(msg);
    };
    socket.onclose = () => {
      this.hooks.onClose();
      if (this.closed) return;
      setTimeout(() => this.open(), this.retryMs);
      this.retryMs = Math.min(this.retryMs * 2, 5000);
    };
    socket.onerror = () => socket.close();
  }

  send(cmd: ControlCmd): boolean {
    if (this.socket === null || this.socket.readyState !== WebSocket.OPEN) return false;
    this.socket.send(JSON.stringify(cmd));
    return true;
  }

  stop(): void {
    this.closed = true;
    this.socket?.close();
  }
}
