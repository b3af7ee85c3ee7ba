/**
 * Explorer wiring: one session per tab, all mutation through sequential
 * service requests, every displayed value sourced from response bodies.
 */

import { ApiClient, ApiError } from './api.js';
import type { DataElementRow, FunctionDetail, FunctionRow, Outcome } from './api.js';
import {
  ORDERINGS,
  argWidget,
  buildBoard,
  buildDiagnosticsPanel,
  buildLogRows,
  buildOutcomeView,
  paletteEntry,
  sortPalette,
} from './viewmodel.js';
import type { Ordering, PaletteEntry } from './viewmodel.js';
import {
  el,
  renderArgForm,
  renderBoard,
  renderDiagnostics,
  renderLog,
  renderOutcome,
  renderPalette,
  renderPreview,
  renderStateChips,
} from './render.js';

const api = new ApiClient('');

interface AppState {
  sessionId: string;
  states: string[];
  levels: string[];
  functions: FunctionRow[];
  elements: DataElementRow[];
  elementsByName: Map<string, DataElementRow>;
  ordering: Ordering;
  selected: string | null;
  selectedDetail: FunctionDetail | null;
  palette: PaletteEntry[];
  lastOutcome: Outcome | null;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function refreshPalette(app: AppState): Promise<void> {
  // Callable-now badges always reflect dry runs against the current snapshot.
  const verdicts = await Promise.all(
    app.functions.map(async (fn) => {
      try {
        return await api.dryRun(app.sessionId, fn.name);
      } catch {
        return null;
      }
    }),
  );
  app.palette = app.functions.map((fn, i) => paletteEntry(fn, verdicts[i] ?? null));
  drawPalette(app);
}

function drawPalette(app: AppState): void {
  const sorted = sortPalette(app.palette, app.ordering, app.states, app.levels);
  renderPalette(
    byId('palette'),
    sorted,
    app.selected,
    (name) => void selectFunction(app, name),
    (name) => void preview(app, name),
  );
}

async function refreshBoard(app: AppState): Promise<void> {
  const snapshot = await api.snapshot(app.sessionId);
  renderStateChips(byId('state-chips'), app.states, snapshot.state);
  renderBoard(byId('board'), buildBoard(snapshot, app.elements, app.lastOutcome?.deltas ?? []));
  byId('session-meta').textContent =
    `session ${snapshot.id} · level ${snapshot.level} · ${snapshot.log_length} calls`;
  const log = await api.log(app.sessionId);
  renderLog(byId('log'), buildLogRows(log));
}

async function preview(app: AppState, name: string): Promise<void> {
  try {
    const outcome = await api.dryRun(app.sessionId, name);
    renderPreview(byId('preview'), buildOutcomeView(outcome));
  } catch (e) {
    renderPreview(byId('preview'), null);
  }
}

async function selectFunction(app: AppState, name: string): Promise<void> {
  app.selected = name;
  app.selectedDetail = await api.functionDetail(name);
  drawPalette(app);
  const detail = app.selectedDetail;
  byId('call-title').textContent = detail.name;
  byId('call-meta').textContent =
    `${detail.type} · level ${detail.level} · states ${detail.states.join(' ')}` +
    (detail.errors.length > 0 ? ` · errors ${detail.errors.join(', ')}` : '');
  const effects = byId('call-effects');
  effects.textContent = '';
  for (const effect of detail.effects) {
    effects.appendChild(el('p', 'effect-text', `[${effect.class}] ${effect.text}`));
  }
  const externals = detail.params.filter(
    (p) => p.direction === 'in' && p.locality === 'external',
  );
  const widgets = externals.map((p) => {
    const element = app.elementsByName.get(p.element);
    const base = element ?? { name: p.element, dtype: '', restriction: null, initial: null };
    // A parameter override narrows the element's own restriction.
    return argWidget({ ...base, restriction: p.restriction ?? base.restriction });
  });
  renderArgForm(byId('call-form'), widgets, (args) => void invoke(app, name, args));
  await preview(app, name);
}

async function invoke(
  app: AppState,
  name: string,
  args: Record<string, number | string>,
): Promise<void> {
  try {
    const outcome = await api.call(app.sessionId, name, args);
    app.lastOutcome = outcome;
    renderOutcome(byId('outcome'), buildOutcomeView(outcome));
    byId('call-error').textContent = '';
  } catch (e) {
    byId('call-error').textContent = e instanceof ApiError ? `${e.status}: ${e.message}` : String(e);
    return;
  }
  await refreshBoard(app);
  await refreshPalette(app);
}

async function resetSession(app: AppState): Promise<void> {
  await api.reset(app.sessionId);
  app.lastOutcome = null;
  renderOutcome(byId('outcome'), null);
  await refreshBoard(app);
  await refreshPalette(app);
}

async function boot(): Promise<void> {
  const banner = byId('banner');
  try {
    const summary = await api.spec();
    const [functions, elements, diagnostics] = await Promise.all([
      api.functions(),
      api.dataElements(),
      api.diagnostics(),
    ]);
    byId('spec-title').textContent =
      `${summary.counts.functions} functions · ${summary.counts.data_elements} data elements · ` +
      `${summary.counts.errors} errors`;
    const panel = buildDiagnosticsPanel(diagnostics);
    byId('diag-badge').textContent = String(panel.count);
    renderDiagnostics(byId('diagnostics'), panel);

    const app: AppState = {
      sessionId: '',
      states: summary.states,
      levels: summary.levels,
      functions,
      elements,
      elementsByName: new Map(elements.map((e) => [e.name, e])),
      ordering: 'decl',
      selected: null,
      selectedDetail: null,
      palette: functions.map((fn) => paletteEntry(fn, null)),
      lastOutcome: null,
    };
    const orderingSelect = byId('ordering') as HTMLSelectElement;
    for (const ordering of ORDERINGS) {
      orderingSelect.appendChild(el('option', '', ordering));
    }
    orderingSelect.addEventListener('change', () => {
      app.ordering = orderingSelect.value as Ordering;
      drawPalette(app);
    });
    // Spec views render with or without a live session.
    drawPalette(app);
    renderStateChips(byId('state-chips'), app.states, null);
    if (summary.has_errors) {
      banner.textContent =
        'Specification has ERROR findings; sessions are disabled until they are fixed.';
      banner.className = 'banner banner-error';
      return;
    }
    try {
      const session = await api.createSession();
      app.sessionId = session.id;
    } catch (e) {
      banner.textContent =
        e instanceof ApiError ? `Sessions unavailable: ${e.message}` : String(e);
      banner.className = 'banner banner-error';
      return;
    }
    byId('reset').addEventListener('click', () => void resetSession(app));
    banner.textContent = '';
    banner.className = 'banner';
    await refreshBoard(app);
    await refreshPalette(app);
  } catch (e) {
    banner.textContent = `Service unreachable: ${String(e)} — retry?`;
    banner.className = 'banner banner-error';
    const retry = el('button', 'invoke', 'retry');
    retry.addEventListener('click', () => void boot());
    banner.appendChild(retry);
  }
}

void boot();
