// WebSocket client with auto-retry; every received line becomes a ServerEvent.

import { parseServerEvent, ServerEvent } from "./protocol";
import { ConnectionStatus } from "./state";

export interface SessionClient {
  send(message: string): void;
  close(): void;
}

export function connectSession(
  url: string,
  onEvent: (event: ServerEvent) => void,
  onStatus: (status: ConnectionStatus) => void,
  onOpen: () => void,
): SessionClient {
  let ws: WebSocket | null = null;
  let closed = false;
  let retryMs = 1000;

  const open = () => {
    onStatus("connecting");
    ws = new WebSocket(url);

    ws.onopen = () => {
      retryMs = 1000;
      onStatus("open");
      onOpen(); // push the current control-strip config first
    };

    ws.onmessage = (message) => {
      const text = typeof message.data === "string" ? message.data : "";
      for (const line of text.split("\n")) {
        if (!line.trim()) continue;
        const event = parseServerEvent(line);
        if (event) onEvent(event);
      }
    };

    ws.onclose = () => {
      onStatus("closed");
      if (!closed) {
        setTimeout(open, retryMs);
        retryMs = Math.min(retryMs * 2, 8000);
      }
    };

    ws.onerror = () => {
      // onclose follows and drives the retry.
    };
  };

  open();

  return {
    send(message: string) {
      if (ws && ws.readyState === WebSocket.OPEN) ws.send(message);
    },
    close() {
      closed = true;
      ws?.close();
    },
  };
}
