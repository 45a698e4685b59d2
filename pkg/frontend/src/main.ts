/**
 * Page wiring: connection, inputs, speech toggle, event-log download.
 *
 * Typing is the primary channel.  Browser speech capture is an optional
 * enhancement behind a toggle and only when the engine exists; it feeds the
 * same submit path as the text box.
 */

import { GatewayConnection, sessionUrl } from './connection';
import { applyFrame, initialView, type ConsoleView } from './view';
import { render } from './render';

interface SpeechRecognitionLike {
  lang: string;
  onresult: ((event: { results: { 0: { 0: { transcript: string } } } }) => void) | null;
  start(): void;
  stop(): void;
}

function speechEngine(): (new () => SpeechRecognitionLike) | null {
  const w = window as unknown as Record<string, unknown>;
  return (w['SpeechRecognition'] ?? w['webkitSpeechRecognition'] ?? null) as
    | (new () => SpeechRecognitionLike)
    | null;
}

export function bootstrap(root: HTMLElement): void {
  let view: ConsoleView = initialView();
  const viewRoot = root.querySelector<HTMLElement>('#console');
  const statusBar = root.querySelector<HTMLElement>('#status');
  const input = root.querySelector<HTMLInputElement>('#utterance');
  const sendButton = root.querySelector<HTMLButtonElement>('#send');
  const downloadButton = root.querySelector<HTMLButtonElement>('#download');
  const speechToggle = root.querySelector<HTMLInputElement>('#speech');
  const initialText = root.querySelector<HTMLInputElement>('#initial-text');
  if (!viewRoot || !statusBar || !input || !sendButton || !downloadButton) {
    throw new Error('console markup is incomplete');
  }

  const redraw = () => {
    render(view, viewRoot);
    input.disabled = view.awaitingReply;
    const answer = viewRoot.querySelector<HTMLInputElement>('#answer');
    if (answer) {
      answer.addEventListener('keydown', (event) => {
        if (event.key === 'Enter' && answer.value.trim()) {
          submitAnswer(answer.value);
          answer.value = '';
        }
      });
    }
  };

  const connection = new GatewayConnection(
    (frame) => {
      view = applyFrame(view, frame);
      redraw();
    },
    (status) => {
      statusBar.textContent =
        status === 'closed' ? 'connection lost; reload to reconnect' : status;
      statusBar.className = status;
      if (status === 'open') {
        connection.send({
          type: 'open',
          initial_text: initialText?.value ?? '',
        });
      }
    },
  );

  function submitUtterance(text: string): void {
    if (view.awaitingReply || !text.trim()) {
      return;
    }
    connection.send({ type: 'utter', text });
  }

  function submitAnswer(text: string): void {
    connection.send({ type: 'answer', text });
  }

  sendButton.addEventListener('click', () => {
    submitUtterance(input.value);
    input.value = '';
  });
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') {
      submitUtterance(input.value);
      input.value = '';
    }
  });

  downloadButton.addEventListener('click', () => {
    const blob = new Blob([JSON.stringify(view.eventLog, null, 2)], {
      type: 'application/json',
    });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'voiceshim-events.json';
    link.click();
    URL.revokeObjectURL(link.href);
  });

  const Engine = speechEngine();
  if (speechToggle && Engine) {
    let recognizer: SpeechRecognitionLike | null = null;
    speechToggle.addEventListener('change', () => {
      if (speechToggle.checked) {
        recognizer = new Engine();
        recognizer.lang = 'en-US';
        recognizer.onresult = (event) => {
          submitUtterance(event.results[0][0].transcript);
        };
        recognizer.start();
      } else {
        recognizer?.stop();
        recognizer = null;
      }
    });
  } else if (speechToggle) {
    speechToggle.disabled = true;
  }

  connection.connect(sessionUrl(window.location));
  redraw();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap(document.getElementById('app') as HTMLElement);
}
