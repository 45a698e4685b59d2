/**
 * Browser-level test: the recorded gateway frames (captured against a
 * locally served gateway; see scripts/record_frames.py) replayed through
 * the real DOM renderer.
 */

import { beforeEach, describe, expect, it } from 'vitest';

import recorded from './fixtures/recorded-frames.json';
import { applyFrame, initialView, replayLog, type ConsoleView } from '../src/view';
import { render, renderHtml } from '../src/render';

interface LogEntry {
  direction: 'send' | 'recv';
  frame: Record<string, unknown>;
}

const RECEIVED = (recorded as LogEntry[])
  .filter((e) => e.direction === 'recv')
  .map((e) => e.frame);

function replayIntoDom(root: HTMLElement, frames: readonly unknown[]): ConsoleView {
  let view = initialView();
  render(view, root);
  for (const frame of frames) {
    view = applyFrame(view, frame);
    render(view, root);
  }
  return view;
}

function framesUntil(predicate: (frame: Record<string, unknown>) => boolean): unknown[] {
  const out: unknown[] = [];
  for (const frame of RECEIVED) {
    out.push(frame);
    if (predicate(frame)) {
      break;
    }
  }
  return out;
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="console"></div>';
  root = document.getElementById('console') as HTMLElement;
});

describe('console rendering of the recorded session', () => {
  it('renders three numbered candidate badges over the matching words', () => {
    replayIntoDom(root, framesUntil(
      (f) => f.type === 'vui_outcome'));
    const badges = [...root.querySelectorAll('.badge')];
    expect(badges.map((b) => b.textContent)).toEqual(['1', '2', '3']);
    // Each badge sits immediately before an occurrence of "apple".
    for (const badge of badges) {
      expect(badge.nextElementSibling?.textContent).toBe('apple');
    }
  });

  it('focuses the answer box when the clarification is asked', () => {
    replayIntoDom(root, framesUntil((f) => f.type === 'clarification_asked'));
    const question = root.querySelector('#clarification p');
    expect(question?.textContent).toBe('What should I insert before apple pie?');
    const answer = root.querySelector<HTMLInputElement>('#answer');
    expect(answer).not.toBeNull();
    expect(document.activeElement).toBe(answer);
  });

  it('answering the clarification completes the insert in the buffer', () => {
    replayIntoDom(root, RECEIVED);
    const words = [...root.querySelectorAll('.word')].map((w) => w.textContent);
    expect(words).toEqual([
      'in', 'the', 'morning', 'apple', 'pie', 'apple', 'tart', 'apple',
    ]);
    expect(root.querySelector('#clarification')).toBeNull();
    const history = [...root.querySelectorAll('#history code')].map(
      (c) => c.textContent,
    );
    expect(history[0]).toBe('INSERT in the morning BEFORE apple pie');
  });

  it('selection highlight follows the chosen candidate', () => {
    const relayedIndex = RECEIVED.findIndex(
      (f) => f.type === 'relayed' && f.command === 'CHOOSE 2');
    expect(relayedIndex).toBeGreaterThan(-1);
    // The next frame carries the outcome with the selection range.
    replayIntoDom(root, RECEIVED.slice(0, relayedIndex + 2));
    const selected = [...root.querySelectorAll('.word.selected')];
    expect(selected.map((w) => w.getAttribute('data-index'))).toEqual(['2']);
  });

  it('rendering is deterministic: two replays produce identical markup', () => {
    const first = renderHtml(replayLog(RECEIVED));
    const second = renderHtml(replayLog(RECEIVED));
    expect(second).toBe(first);
    replayIntoDom(root, RECEIVED);
    const live = root.innerHTML;
    replayIntoDom(root, RECEIVED);
    expect(root.innerHTML).toBe(live);
  });

  it('escapes text content from the wire', () => {
    const view = applyFrame(initialView(), {
      type: 'error', code: 'x', message: '<script>alert(1)</script>',
    });
    render(view, root);
    expect(root.querySelector('#toast')?.innerHTML).not.toContain('<script>');
  });
});
