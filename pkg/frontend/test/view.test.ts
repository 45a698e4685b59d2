/** View-model reduction over the recorded gateway log. */

import { describe, expect, it } from 'vitest';

import recorded from './fixtures/recorded-frames.json';
import { applyFrame, initialView, replayLog, type ConsoleView } from '../src/view';

interface LogEntry {
  direction: 'send' | 'recv';
  frame: Record<string, unknown>;
}

const LOG = recorded as LogEntry[];
const RECEIVED = LOG.filter((e) => e.direction === 'recv').map((e) => e.frame);

function upTo(type: string, occurrence = 1): unknown[] {
  const frames: unknown[] = [];
  let seen = 0;
  for (const frame of RECEIVED) {
    frames.push(frame);
    if ((frame as { type?: string }).type === type) {
      seen += 1;
      if (seen === occurrence) {
        break;
      }
    }
  }
  return frames;
}

describe('recorded-log replay', () => {
  it('opens with the three-apple buffer', () => {
    const view = replayLog(upTo('session_opened'));
    expect(view.buffer).toEqual(['apple', 'pie', 'apple', 'tart', 'apple']);
    expect(view.sessionId).not.toBeNull();
  });

  it('select apple yields three numbered candidates at the right words', () => {
    const view = replayLog(upTo('vui_outcome', 1));
    expect(view.candidates.map((c) => c.number)).toEqual([1, 2, 3]);
    expect(view.candidates.map((c) => c.start)).toEqual([0, 2, 4]);
    expect(view.candidates.every((c) => c.label === 'apple')).toBe(true);
  });

  it('choose 2 resolves the selection and clears the badges', () => {
    const view = replayLog(upTo('vui_outcome', 2));
    expect(view.candidates).toEqual([]);
    expect(view.selection).toEqual({ start: 2, end: 3 });
  });

  it('clarification question is rendered verbatim and answering completes the insert', () => {
    const asked = replayLog(upTo('clarification_asked'));
    expect(asked.clarification).toEqual({
      question: 'What should I insert before apple pie?',
      focusAnswer: true,
    });
    const done = replayLog(RECEIVED);
    expect(done.buffer.join(' ')).toBe(
      'in the morning apple pie apple tart apple',
    );
    expect(done.clarification).toBeNull();
    expect(done.history[0]).toBe('INSERT in the morning BEFORE apple pie');
  });

  it('view determinism: replaying the log twice gives identical views', () => {
    const first = replayLog(RECEIVED);
    const second = replayLog(RECEIVED);
    expect(second).toEqual(first);
  });

  it('view is a pure function of the stream: prefix replays agree', () => {
    let running = initialView();
    for (let i = 0; i < RECEIVED.length; i += 1) {
      running = applyFrame(running, RECEIVED[i]);
      expect(replayLog(RECEIVED.slice(0, i + 1))).toEqual(running);
    }
  });

  it('event log stores frames verbatim for download', () => {
    const view = replayLog(RECEIVED);
    expect(view.eventLog).toEqual(RECEIVED);
  });
});

describe('frame handling details', () => {
  it('unknown frame type surfaces a toast and preserves state', () => {
    const before = replayLog(upTo('vui_outcome', 1));
    const after = applyFrame(before, { type: 'dance', tempo: 'fast' });
    expect(after.errorToast).toBe("unknown frame type 'dance'");
    expect({ ...after, errorToast: null, eventLog: [] }).toEqual({
      ...before,
      errorToast: null,
      eventLog: [],
    });
  });

  it('malformed frame surfaces a toast', () => {
    const view = applyFrame(initialView(), 42);
    expect(view.errorToast).toBe('malformed frame from gateway');
  });

  it('failed outcome shows a banner and leaves the buffer alone', () => {
    const opened = replayLog(upTo('session_opened'));
    const failed = applyFrame(opened, {
      type: 'vui_outcome',
      outcome: { status: 'failed', reason: 'unrecognized' },
      selection: null,
    });
    expect(failed.failureBanner).toBe('command failed: unrecognized');
    expect(failed.buffer).toEqual(opened.buffer);
  });

  it('history is capped at five, most recent first', () => {
    let view: ConsoleView = initialView();
    for (let i = 1; i <= 7; i += 1) {
      view = applyFrame(view, { type: 'relayed', command: `SELECT w${i}` });
    }
    expect(view.history).toEqual([
      'SELECT w7', 'SELECT w6', 'SELECT w5', 'SELECT w4', 'SELECT w3',
    ]);
  });

  it('transcript keeps both live and discarded utterances', () => {
    let view = applyFrame(initialView(), { type: 'transcript', text: 'select apple' });
    view = applyFrame(view, { type: 'utterance_discarded', tokens: ['insert', 'law'] });
    expect(view.transcript).toEqual([
      { text: 'select apple', discarded: false },
      { text: 'insert law', discarded: true },
    ]);
  });

  it('awaiting-reply toggles with transcript and listening frames', () => {
    let view = applyFrame(initialView(), { type: 'transcript', text: 'x' });
    expect(view.awaitingReply).toBe(true);
    view = applyFrame(view, { type: 'listening', on: true });
    expect(view.awaitingReply).toBe(false);
  });
});
