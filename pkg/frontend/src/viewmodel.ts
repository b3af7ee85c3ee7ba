/**
 * Pure view-model assembly.
 *
 * Everything rendered by the explorer is built here from service response
 * bodies, verbatim: these functions select and arrange fields but never
 * compute verdicts, deltas or indicator values themselves.  Tests replay
 * recorded responses through this module and compare field by field.
 */

import type {
  DataElementRow,
  Delta,
  DiagnosticRow,
  FunctionRow,
  IndicatorRow,
  Outcome,
  Snapshot,
} from './api.js';

export type Ordering = 'name' | 'type' | 'level' | 'state' | 'decl';

export const ORDERINGS: Ordering[] = ['decl', 'name', 'type', 'level', 'state'];

export interface PaletteEntry {
  name: string;
  ftype: string;
  level: string;
  states: string[];
  callableNow: boolean;
  verdict: Outcome | null; // latest dry-run outcome for the current snapshot
  verdictDetail: string;
}

/** Callability is taken from a dry-run outcome: only X101/X106 mean "not callable". */
export function paletteEntry(fn: FunctionRow, verdict: Outcome | null): PaletteEntry {
  const blocked =
    verdict !== null &&
    verdict.kind === 'EXCEPTION' &&
    verdict.codes.some((c) => c === 'X101' || c === 'X106');
  let detail = '';
  if (verdict !== null) {
    // Exceptions keep the service's evidence (current state, valid states,
    // level mismatch) verbatim; other kinds show the badge text.
    detail =
      verdict.kind === 'EXCEPTION' && verdict.details.length > 0
        ? verdict.details.join('; ')
        : describeOutcome(verdict);
  }
  return {
    name: fn.name,
    ftype: fn.type,
    level: fn.level,
    states: fn.states,
    callableNow: !blocked,
    verdict,
    verdictDetail: detail,
  };
}

export function sortPalette(
  entries: PaletteEntry[],
  ordering: Ordering,
  stateOrder: string[],
  levelOrder: string[],
): PaletteEntry[] {
  const out = [...entries];
  const stateIndex = (e: PaletteEntry) =>
    Math.min(...e.states.map((s) => indexOr(stateOrder, s)), stateOrder.length);
  if (ordering === 'name') {
    out.sort((a, b) => cmp(a.name, b.name));
  } else if (ordering === 'type') {
    out.sort((a, b) => cmp(a.ftype, b.ftype) || cmp(a.name, b.name));
  } else if (ordering === 'level') {
    out.sort((a, b) => indexOr(levelOrder, a.level) - indexOr(levelOrder, b.level) || cmp(a.name, b.name));
  } else if (ordering === 'state') {
    out.sort((a, b) => stateIndex(a) - stateIndex(b) || cmp(a.name, b.name));
  }
  return out; // 'decl' keeps service order
}

function indexOr(order: string[], item: string): number {
  const i = order.indexOf(item);
  return i === -1 ? order.length : i;
}

function cmp(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

export interface BoardRow {
  element: string;
  dtype: string;
  restriction: string | null;
  allocated: boolean;
  defined: boolean;
  valued: boolean;
  value: number | string | null;
  changed: boolean; // element appeared in the latest call's deltas
}

export function buildBoard(
  snapshot: Snapshot,
  elements: DataElementRow[],
  lastDeltas: Delta[],
): BoardRow[] {
  const types = new Map(elements.map((e) => [e.name, e]));
  const changed = new Set(lastDeltas.map((d) => d.element));
  return snapshot.indicators.map((row) => ({
    element: row.element,
    dtype: types.get(row.element)?.dtype ?? '',
    restriction: types.get(row.element)?.restriction ?? null,
    allocated: row.allocated,
    defined: row.defined,
    valued: row.valued,
    value: row.value,
    changed: changed.has(row.element),
  }));
}

export interface OutcomeView {
  function: string;
  kind: Outcome['kind'];
  badge: string; // COMPLETED | "error n" | "X102+X104"
  number: number | null;
  codes: string[];
  details: string[];
  effects: string[]; // effect texts, verbatim
  deltas: Delta[]; // verbatim from the response
  stateAfter: string | null;
}

export function describeOutcome(outcome: Outcome): string {
  if (outcome.kind === 'COMPLETED') return 'COMPLETED';
  if (outcome.kind === 'SPEC_ERROR') return `error ${outcome.number}`;
  return outcome.codes.join('+');
}

export function buildOutcomeView(outcome: Outcome): OutcomeView {
  return {
    function: outcome.function,
    kind: outcome.kind,
    badge: describeOutcome(outcome),
    number: outcome.number,
    codes: outcome.codes,
    details: outcome.details,
    effects: outcome.effects,
    deltas: outcome.deltas,
    stateAfter: outcome.state_after,
  };
}

export interface ArgWidget {
  element: string;
  restriction: string | null;
  kind: 'select' | 'number' | 'text' | 'none';
  options: string[]; // membership values for selects
  hint: string;
}

/**
 * Derive an input widget from the element's declared type and restriction.
 * Enum/state elements become selects over their membership values; integers
 * become number fields with a range hint; points and structures take no
 * argument at all.
 */
export function argWidget(element: DataElementRow): ArgWidget {
  const restriction = element.restriction;
  const membership = restriction?.match(/^in \{ (.+) \}$/);
  if (membership !== null && membership !== undefined) {
    return {
      element: element.name,
      restriction,
      kind: 'select',
      options: membership[1]!.split(' '),
      hint: restriction ?? '',
    };
  }
  if (element.dtype === 'integer') {
    return {
      element: element.name,
      restriction,
      kind: 'number',
      options: [],
      hint: restriction ?? 'integer',
    };
  }
  if (element.dtype === 'name' || element.dtype === 'string') {
    return { element: element.name, restriction, kind: 'text', options: [], hint: element.dtype };
  }
  if (element.dtype.startsWith('enum ')) {
    // Enum without a membership restriction: free identifier entry.
    return { element: element.name, restriction, kind: 'text', options: [], hint: element.dtype };
  }
  return { element: element.name, restriction, kind: 'none', options: [], hint: element.dtype };
}

export interface DiagnosticsPanel {
  count: number;
  errorCount: number;
  rows: DiagnosticRow[];
}

export function buildDiagnosticsPanel(rows: DiagnosticRow[]): DiagnosticsPanel {
  return {
    count: rows.length,
    errorCount: rows.filter((r) => r.severity === 'error').length,
    rows,
  };
}

export interface LogRow {
  index: number;
  function: string;
  badge: string;
  kind: Outcome['kind'];
}

export function buildLogRows(log: { index: number; function: string; outcome: Outcome }[]): LogRow[] {
  return log.map((entry) => ({
    index: entry.index,
    function: entry.function,
    badge: describeOutcome(entry.outcome),
    kind: entry.outcome.kind,
  }));
}

/** Indicator cell text: dot pattern mirrors allocated/defined/valued flags. */
export function indicatorGlyph(row: IndicatorRow): string {
  const dot = (b: boolean) => (b ? '●' : '○');
  return `${dot(row.allocated)}${dot(row.defined)}${dot(row.valued)}`;
}
