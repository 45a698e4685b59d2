/**
 * Thin WebSocket wrapper for the gateway's /session endpoint.
 * Frames go out only while the view is not awaiting a reply; loss of the
 * connection surfaces through onStatus so the page can show a reconnect
 * banner.
 */

import type { ClientFrame } from './protocol';

export type ConnectionStatus = 'connecting' | 'open' | 'closed';

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: unknown }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export class GatewayConnection {
  private socket: SocketLike | null = null;

  constructor(
    private readonly onFrame: (frame: unknown) => void,
    private readonly onStatus: (status: ConnectionStatus) => void,
    private readonly makeSocket: (url: string) => SocketLike = (url) =>
      new WebSocket(url) as unknown as SocketLike,
  ) {}

  connect(url: string): void {
    this.onStatus('connecting');
    const socket = this.makeSocket(url);
    socket.onopen = () => this.onStatus('open');
    socket.onclose = () => {
      this.socket = null;
      this.onStatus('closed');
    };
    socket.onmessage = (event) => {
      try {
        this.onFrame(JSON.parse(String(event.data)));
      } catch {
        this.onFrame({ type: 'error', code: 'bad_frame', message: 'unparseable frame' });
      }
    };
    this.socket = socket;
  }

  send(frame: ClientFrame): boolean {
    if (this.socket === null) {
      return false;
    }
    this.socket.send(JSON.stringify(frame));
    return true;
  }

  close(): void {
    this.socket?.close();
  }
}

export function sessionUrl(location: { protocol: string; host: string }): string {
  const scheme = location.protocol === 'https:' ? 'wss' : 'ws';
  return `${scheme}://${location.host}/session`;
}
