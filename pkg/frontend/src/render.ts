/**
 * DOM rendering for the explorer.  Takes view-model objects and writes them
 * into the page; no service data is transformed here beyond text layout.
 */

import type {
  ArgWidget,
  BoardRow,
  DiagnosticsPanel,
  LogRow,
  OutcomeView,
  PaletteEntry,
} from './viewmodel.js';
import { indicatorGlyph } from './viewmodel.js';

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function renderStateChips(
  container: HTMLElement,
  states: string[],
  current: string | null,
): void {
  clear(container);
  for (const s of states) {
    container.appendChild(el('span', 'chip' + (s === current ? ' chip-current' : ''), s));
  }
}

export function renderPalette(
  container: HTMLElement,
  entries: PaletteEntry[],
  selected: string | null,
  onSelect: (name: string) => void,
  onPreview: (name: string) => void,
): void {
  clear(container);
  for (const entry of entries) {
    const row = el('div', 'palette-row' + (entry.name === selected ? ' selected' : ''));
    row.appendChild(
      el('span', 'dot ' + (entry.callableNow ? 'dot-ok' : 'dot-blocked')),
    );
    row.appendChild(el('span', 'fn-name', entry.name));
    row.appendChild(el('span', 'fn-meta', `${entry.ftype} ${entry.level}`));
    if (entry.verdict && !entry.callableNow) {
      row.title = entry.verdictDetail;
    }
    row.addEventListener('click', () => onSelect(entry.name));
    row.addEventListener('mouseenter', () => onPreview(entry.name));
    container.appendChild(row);
  }
}

export function renderBoard(container: HTMLElement, rows: BoardRow[]): void {
  clear(container);
  const table = el('table', 'board');
  const head = el('tr');
  for (const h of ['element', 'a d v', 'value', 'type']) {
    head.appendChild(el('th', '', h));
  }
  table.appendChild(head);
  for (const row of rows) {
    const tr = el('tr', row.changed ? 'row-changed' : '');
    tr.appendChild(el('td', 'elem-name', row.element));
    tr.appendChild(
      el(
        'td',
        'indicators',
        indicatorGlyph({
          element: row.element,
          allocated: row.allocated,
          defined: row.defined,
          valued: row.valued,
          value: row.value,
        }),
      ),
    );
    tr.appendChild(el('td', 'value', row.value === null ? '' : String(row.value)));
    const type = el('td', 'dtype', row.dtype);
    if (row.restriction) type.title = row.restriction;
    tr.appendChild(type);
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderOutcome(container: HTMLElement, view: OutcomeView | null): void {
  clear(container);
  if (view === null) {
    container.appendChild(el('p', 'muted', 'No call yet.'));
    return;
  }
  const badgeClass =
    view.kind === 'COMPLETED' ? 'ok' : view.kind === 'SPEC_ERROR' ? 'specerr' : 'exc';
  const header = el('div', 'outcome-header');
  header.appendChild(el('span', `badge badge-${badgeClass}`, view.badge));
  header.appendChild(el('span', 'fn-name', view.function));
  if (view.stateAfter) header.appendChild(el('span', 'fn-meta', `state ${view.stateAfter}`));
  container.appendChild(header);
  for (const text of view.effects) {
    container.appendChild(el('p', 'effect-text', text));
  }
  for (const detail of view.details) {
    container.appendChild(el('p', 'exception-detail', detail));
  }
  if (view.deltas.length > 0) {
    const list = el('div', 'deltas');
    for (const d of view.deltas) {
      const beforeValue = d.before.value === null ? '' : ` = ${d.before.value}`;
      const afterValue = d.after.value === null ? '' : ` = ${d.after.value}`;
      list.appendChild(
        el(
          'div',
          'delta',
          `${d.element}: ${indicatorGlyph(d.before)}${beforeValue} → ` +
            `${indicatorGlyph(d.after)}${afterValue}`,
        ),
      );
    }
    container.appendChild(list);
  }
}

export function renderPreview(container: HTMLElement, view: OutcomeView | null): void {
  clear(container);
  if (view === null) return;
  const badgeClass =
    view.kind === 'COMPLETED' ? 'ok' : view.kind === 'SPEC_ERROR' ? 'specerr' : 'exc';
  container.appendChild(el('span', 'muted', 'what-if: '));
  container.appendChild(el('span', `badge badge-${badgeClass}`, view.badge));
  if (view.kind === 'EXCEPTION' && view.details.length > 0) {
    container.appendChild(el('span', 'preview-detail', view.details.join('; ')));
  }
}

export function renderLog(container: HTMLElement, rows: LogRow[]): void {
  clear(container);
  for (const row of [...rows].reverse()) {
    const div = el('div', 'log-row');
    div.appendChild(el('span', 'log-index', `#${row.index + 1}`));
    div.appendChild(el('span', 'fn-name', row.function));
    const badgeClass =
      row.kind === 'COMPLETED' ? 'ok' : row.kind === 'SPEC_ERROR' ? 'specerr' : 'exc';
    div.appendChild(el('span', `badge badge-${badgeClass}`, row.badge));
    container.appendChild(div);
  }
}

export function renderDiagnostics(container: HTMLElement, panel: DiagnosticsPanel): void {
  clear(container);
  if (panel.count === 0) {
    container.appendChild(el('p', 'muted', 'No findings.'));
    return;
  }
  for (const row of panel.rows) {
    const div = el('div', `diag diag-${row.severity}`);
    div.appendChild(el('span', 'diag-code', row.code));
    div.appendChild(el('span', 'diag-subject', row.subject));
    div.appendChild(el('span', 'diag-message', row.message));
    if (row.related.length > 0) {
      div.appendChild(el('span', 'diag-related', `related: ${row.related.join(', ')}`));
    }
    container.appendChild(div);
  }
}

export function renderArgForm(
  container: HTMLElement,
  widgets: ArgWidget[],
  onSubmit: (args: Record<string, number | string>) => void,
): void {
  clear(container);
  const form = el('form', 'arg-form');
  const inputs = new Map<string, HTMLInputElement | HTMLSelectElement>();
  for (const w of widgets) {
    const label = el('label');
    label.appendChild(el('span', 'arg-name', w.element));
    if (w.kind === 'select') {
      const select = el('select');
      select.appendChild(el('option', '', '(omit)'));
      for (const option of w.options) {
        select.appendChild(el('option', '', option));
      }
      inputs.set(w.element, select);
      label.appendChild(select);
    } else if (w.kind !== 'none') {
      const input = el('input');
      input.type = w.kind === 'number' ? 'number' : 'text';
      input.placeholder = w.hint;
      inputs.set(w.element, input);
      label.appendChild(input);
    } else {
      label.appendChild(el('span', 'muted', `(${w.hint}; no literal input)`));
    }
    form.appendChild(label);
  }
  const button = el('button', 'invoke', 'invoke');
  button.type = 'submit';
  form.appendChild(button);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const args: Record<string, number | string> = {};
    for (const [name, input] of inputs) {
      const raw = input.value.trim();
      if (!raw || raw === '(omit)') continue;
      args[name] = input instanceof HTMLInputElement && input.type === 'number' ? Number(raw) : raw;
    }
    onSubmit(args);
  });
  container.appendChild(form);
}
