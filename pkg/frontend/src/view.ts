/**
 * Console view model: a pure reduction of the received frame stream.
 *
 * The console never interprets or edits text itself; every piece of state
 * below is copied from server frames, so replaying a recorded log yields
 * exactly the view of the live run.
 */

import type { Candidate, SelectionRange, ServerFrame } from './protocol';

export const HISTORY_LIMIT = 5;

export interface TranscriptEntry {
  text: string;
  discarded: boolean;
}

export interface NormalizedInfo {
  kind: string;
  command: string | null;
  confidence: number | null;
  repairs: string[];
}

export interface ConsoleView {
  sessionId: string | null;
  buffer: readonly string[];
  selection: SelectionRange | null;
  candidates: readonly Candidate[];
  transcript: readonly TranscriptEntry[];
  normalized: NormalizedInfo | null;
  lastOutcome: string | null;
  suggestions: readonly { text: string; reason: string }[];
  clarification: { question: string; focusAnswer: boolean } | null;
  listening: boolean;
  awaitingReply: boolean;
  history: readonly string[]; // most recent first, capped at HISTORY_LIMIT
  failureBanner: string | null;
  errorToast: string | null;
  eventLog: readonly unknown[]; // verbatim frames, for download
}

export function initialView(): ConsoleView {
  return {
    sessionId: null,
    buffer: [],
    selection: null,
    candidates: [],
    transcript: [],
    normalized: null,
    lastOutcome: null,
    suggestions: [],
    clarification: null,
    listening: true,
    awaitingReply: false,
    history: [],
    failureBanner: null,
    errorToast: null,
    eventLog: [],
  };
}

/** Apply one received frame; unknown frames surface a toast and change
 * nothing else. */
export function applyFrame(view: ConsoleView, frame: unknown): ConsoleView {
  const logged: ConsoleView = { ...view, eventLog: [...view.eventLog, frame] };
  if (
    typeof frame !== 'object' ||
    frame === null ||
    typeof (frame as { type?: unknown }).type !== 'string'
  ) {
    return { ...logged, errorToast: 'malformed frame from gateway' };
  }
  const server = frame as ServerFrame;
  switch (server.type) {
    case 'session_opened':
      return {
        ...logged,
        sessionId: server.id,
        buffer: splitWords(server.buffer),
        selection: null,
        candidates: [],
        failureBanner: null,
        errorToast: null,
      };
    case 'transcript':
      return {
        ...logged,
        transcript: [...view.transcript, { text: server.text, discarded: false }],
        normalized: null,
        suggestions: [],
        errorToast: null,
        awaitingReply: true,
      };
    case 'listening':
      return {
        ...logged,
        listening: server.on,
        awaitingReply: server.on ? false : logged.awaitingReply,
      };
    case 'normalized':
      return {
        ...logged,
        normalized: {
          kind: server.kind,
          command: server.command ?? null,
          confidence: server.confidence ?? null,
          repairs: server.repairs ?? [],
        },
      };
    case 'relayed':
      return {
        ...logged,
        history: [server.command, ...view.history].slice(0, HISTORY_LIMIT),
      };
    case 'vui_outcome': {
      const next: ConsoleView = {
        ...logged,
        selection: server.selection,
        clarification: null,
      };
      switch (server.outcome.status) {
        case 'applied':
          return {
            ...next,
            buffer: splitWords(server.outcome.buffer),
            candidates: [],
            failureBanner: null,
            lastOutcome: server.outcome.description,
          };
        case 'pending_disambiguation':
          return {
            ...next,
            candidates: server.outcome.candidates,
            failureBanner: null,
            lastOutcome: `say CHOOSE 1..${server.outcome.candidates.length}`,
          };
        case 'failed':
          return {
            ...next,
            failureBanner: `command failed: ${server.outcome.reason}`,
            lastOutcome: null,
          };
        default: {
          const exhaustive: never = server.outcome;
          void exhaustive;
          return next;
        }
      }
    }
    case 'clarification_asked':
      return {
        ...logged,
        clarification: { question: server.question, focusAnswer: true },
      };
    case 'suggestion_shown':
      return { ...logged, suggestions: server.suggestions, clarification: null };
    case 'utterance_discarded':
      return {
        ...logged,
        transcript: [
          ...view.transcript,
          { text: server.tokens.join(' '), discarded: true },
        ],
      };
    case 'error':
      return { ...logged, errorToast: `${server.code}: ${server.message}` };
    default: {
      const unknown = server as { type: string };
      return { ...logged, errorToast: `unknown frame type '${unknown.type}'` };
    }
  }
}

export function replayLog(frames: readonly unknown[]): ConsoleView {
  return frames.reduce(applyFrame, initialView());
}

function splitWords(text: string): string[] {
  return text.split(/\s+/).filter((w) => w.length > 0);
}
