/**
 * Socket plumbing. The app talks to a Transport so tests can swap in a
 * scripted fake; the real one is a WebSocket with exponential backoff and
 * a state resync on every (re)connect.
 */

export interface Transport {
  send(frame: string): void;
  readonly connected: boolean;
}

export interface TransportEvents {
  onFrame: (line: string) => void;
  onStatus: (connected: boolean) => void;
}

export class WebSocketTransport implements Transport {
  private socket: WebSocket | null = null;
  private backoffMs = 500;
  private closed = false;
  connected = false;

  constructor(
    private readonly url: string,
    private readonly events: TransportEvents,
  ) {
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.backoffMs = 500;
      this.events.onStatus(true);
    };
    socket.onmessage = (event) => {
      for (const line of String(event.data).split("\n")) {
        if (line.trim()) this.events.onFrame(line);
      }
    };
    socket.onclose = () => {
      this.connected = false;
      this.events.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.connect(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, 10_000);
      }
    };
    socket.onerror = () => socket.close();
  }

  send(frame: string): void {
    if (this.connected && this.socket?.readyState === WebSocket.OPEN) {
      this.socket.send(frame);
    }
    // disconnected state queues nothing: stale touches must not fire later
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
