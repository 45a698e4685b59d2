/**
 * Deterministic DOM rendering: the view model in, one full re-render out.
 * Candidate numbers and selection highlights are drawn exactly where the
 * server frames put them (word indices; numbering is the server's, 1-based).
 */

import type { ConsoleView } from './view';

function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

function bufferHtml(view: ConsoleView): string {
  const parts: string[] = [];
  view.buffer.forEach((word, index) => {
    for (const candidate of view.candidates) {
      if (candidate.start === index) {
        parts.push(`<sup class="badge" data-number="${candidate.number}">${candidate.number}</sup>`);
      }
    }
    const selected =
      view.selection !== null &&
      index >= view.selection.start &&
      index < view.selection.end;
    parts.push(
      `<span class="word${selected ? ' selected' : ''}" data-index="${index}">${escapeHtml(word)}</span>`,
    );
  });
  return parts.join(' ');
}

export function renderHtml(view: ConsoleView): string {
  const sections: string[] = [];
  sections.push(
    `<div id="listening" class="${view.listening ? 'on' : 'off'}">` +
      `${view.listening ? 'listening' : 'processing'}</div>`,
  );
  sections.push(`<div id="buffer">${bufferHtml(view)}</div>`);
  if (view.failureBanner !== null) {
    sections.push(`<div id="failure" class="banner">${escapeHtml(view.failureBanner)}</div>`);
  }
  if (view.errorToast !== null) {
    sections.push(`<div id="toast" class="toast">${escapeHtml(view.errorToast)}</div>`);
  }
  const transcript = view.transcript
    .map(
      (entry) =>
        `<li class="${entry.discarded ? 'discarded' : ''}">${escapeHtml(entry.text)}</li>`,
    )
    .join('');
  sections.push(`<ol id="transcript">${transcript}</ol>`);
  if (view.normalized !== null) {
    const n = view.normalized;
    const detail =
      n.command !== null
        ? `${escapeHtml(n.command)}` +
          (n.confidence !== null ? ` (confidence ${n.confidence})` : '')
        : n.kind;
    const repairs = n.repairs.length
      ? `<span class="repairs">${escapeHtml(n.repairs.join(', '))}</span>`
      : '';
    sections.push(`<div id="normalized" data-kind="${n.kind}">${detail}${repairs}</div>`);
  }
  if (view.lastOutcome !== null) {
    sections.push(`<div id="outcome">${escapeHtml(view.lastOutcome)}</div>`);
  }
  if (view.suggestions.length > 0) {
    const items = view.suggestions
      .map(
        (s) =>
          `<li><code>${escapeHtml(s.text)}</code> <span>${escapeHtml(s.reason)}</span></li>`,
      )
      .join('');
    sections.push(`<ul id="suggestions">${items}</ul>`);
  }
  if (view.clarification !== null) {
    sections.push(
      `<div id="clarification"><p>${escapeHtml(view.clarification.question)}</p>` +
        `<input id="answer" type="text" placeholder="answer with a phrase" /></div>`,
    );
  }
  const history = view.history
    .map((command) => `<li><code>${escapeHtml(command)}</code></li>`)
    .join('');
  sections.push(`<ol id="history">${history}</ol>`);
  return sections.join('\n');
}

export function render(view: ConsoleView, root: HTMLElement): void {
  root.innerHTML = renderHtml(view);
  if (view.clarification?.focusAnswer) {
    const answer = root.querySelector<HTMLInputElement>('#answer');
    answer?.focus();
  }
}
