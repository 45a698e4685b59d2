/**
 * Frame types spoken on the gateway's /session WebSocket.
 * Single JSON objects per frame, mirrored from the server's event schema.
 */

export interface OpenFrame {
  type: 'open';
  initial_text: string;
  config?: { window_ms?: number };
}

export interface UtterFrame {
  type: 'utter';
  text: string;
}

export interface AnswerFrame {
  type: 'answer';
  text: string;
}

export interface CloseFrame {
  type: 'close';
}

export type ClientFrame = OpenFrame | UtterFrame | AnswerFrame | CloseFrame;

export interface SessionOpenedFrame {
  type: 'session_opened';
  id: string;
  buffer: string;
}

export interface TranscriptFrame {
  type: 'transcript';
  text: string;
}

export interface ListeningFrame {
  type: 'listening';
  on: boolean;
}

export interface NormalizedFrame {
  type: 'normalized';
  kind: 'pass_through' | 'corrected' | 'clarify' | 'suggest';
  command?: string;
  confidence?: number;
  repairs?: string[];
}

export interface RelayedFrame {
  type: 'relayed';
  command: string;
}

export interface Candidate {
  number: number;
  label: string;
  start: number | null;
  end: number | null;
}

export interface SelectionRange {
  start: number;
  end: number;
}

export type Outcome =
  | { status: 'applied'; description: string; buffer: string }
  | { status: 'pending_disambiguation'; candidates: Candidate[] }
  | { status: 'failed'; reason: string };

export interface VuiOutcomeFrame {
  type: 'vui_outcome';
  outcome: Outcome;
  selection: SelectionRange | null;
}

export interface ClarificationFrame {
  type: 'clarification_asked';
  question: string;
}

export interface SuggestionFrame {
  type: 'suggestion_shown';
  code: string;
  suggestions: { text: string; reason: string }[];
}

export interface DiscardedFrame {
  type: 'utterance_discarded';
  tokens: string[];
}

export interface ErrorFrame {
  type: 'error';
  code: string;
  message: string;
}

export type ServerFrame =
  | SessionOpenedFrame
  | TranscriptFrame
  | ListeningFrame
  | NormalizedFrame
  | RelayedFrame
  | VuiOutcomeFrame
  | ClarificationFrame
  | SuggestionFrame
  | DiscardedFrame
  | ErrorFrame;

const SERVER_FRAME_TYPES = new Set([
  'session_opened', 'transcript', 'listening', 'normalized', 'relayed',
  'vui_outcome', 'clarification_asked', 'suggestion_shown',
  'utterance_discarded', 'error',
]);

export function isServerFrame(value: unknown): value is ServerFrame {
  return (
    typeof value === 'object' &&
    value !== null &&
    'type' in value &&
    SERVER_FRAME_TYPES.has((value as { type: unknown }).type as string)
  );
}
