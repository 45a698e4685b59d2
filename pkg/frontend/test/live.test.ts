/**
 * Live round trip against a locally served gateway: spawns the Python
 * gateway, drives the same dialog the recorded fixture captures, and runs
 * the resulting frames through the console view.  Skipped when the gateway
 * executable is unavailable.
 */

import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { connect } from 'node:net';
import WebSocket from 'ws';

import { replayLog } from '../src/view';

const PYTHON = process.env.VOICESHIM_PYTHON ?? 'python3';

function gatewayAvailable(): boolean {
  const probe = spawnSync(PYTHON, ['-c', 'import voiceshim.gateway'], {
    timeout: 30_000,
  });
  return probe.status === 0;
}

function waitForPort(port: number, timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  return new Promise((resolve, reject) => {
    const attempt = () => {
      const socket = connect({ port, host: '127.0.0.1' }, () => {
        socket.destroy();
        resolve();
      });
      socket.on('error', () => {
        socket.destroy();
        if (Date.now() > deadline) {
          reject(new Error('gateway did not come up'));
        } else {
          setTimeout(attempt, 150);
        }
      });
    };
    attempt();
  });
}

const available = gatewayAvailable();
const PORT = 8700 + Math.floor(Math.random() * 900);

describe.skipIf(!available)('live gateway round trip', () => {
  let server: ChildProcess;

  beforeAll(async () => {
    server = spawn(PYTHON, ['-m', 'voiceshim.cli', 'serve', '--port', String(PORT)], {
      stdio: 'ignore',
    });
    await waitForPort(PORT);
  }, 30_000);

  afterAll(() => {
    server.kill();
  });

  it('select apple on a three-apple buffer renders three candidates, and '
     + 'answering the clarification completes the insert', async () => {
    const frames: unknown[] = [];
    const socket = new WebSocket(`ws://127.0.0.1:${PORT}/session`);
    const send = (frame: unknown) => socket.send(JSON.stringify(frame));
    const dialog: unknown[] = [
      { type: 'utter', text: 'select apple' },
      { type: 'utter', text: 'choose 2' },
      { type: 'utter', text: 'insert before apple pie' },
      { type: 'answer', text: 'in the morning' },
    ];

    await new Promise<void>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error('dialog timed out')), 20_000);
      socket.on('open', () =>
        send({ type: 'open', initial_text: 'apple pie apple tart apple' }));
      socket.on('message', (data) => {
        const frame = JSON.parse(String(data));
        frames.push(frame);
        const ready =
          frame.type === 'session_opened' ||
          (frame.type === 'listening' && frame.on === true);
        if (ready) {
          const next = dialog.shift();
          if (next === undefined) {
            clearTimeout(timer);
            socket.close();
            resolve();
          } else {
            send(next);
          }
        }
      });
      socket.on('error', (err) => {
        clearTimeout(timer);
        reject(err);
      });
    });

    const view = replayLog(frames);
    const outcomes = frames.filter(
      (f) => (f as { type?: string }).type === 'vui_outcome');
    const first = outcomes[0] as {
      outcome: { candidates: { number: number }[] };
    };
    expect(first.outcome.candidates.map((c) => c.number)).toEqual([1, 2, 3]);
    expect(view.buffer.join(' ')).toBe('in the morning apple pie apple tart apple');
    expect(view.history[0]).toBe('INSERT in the morning BEFORE apple pie');
  }, 40_000);
});
