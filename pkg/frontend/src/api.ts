/**
 * Typed client for the svsp validation service.
 *
 * Every method returns the parsed response body untouched; the rest of the
 * explorer must not derive semantic information anywhere else, so these
 * shapes are the single source of truth for what the UI may display.
 */

export interface SpecSummary {
  counts: {
    functions: number;
    data_elements: number;
    bundles: number;
    groups: number;
    errors: number;
    enums: number;
  };
  states: string[];
  initial_state: string | null;
  levels: string[];
  state_element: string | null;
  diagnostic_count: number;
  has_errors: boolean;
}

export interface FunctionRow {
  name: string;
  type: string;
  level: string;
  states: string[];
}

export interface ParamInfo {
  element: string;
  direction: 'in' | 'out';
  locality: 'internal' | 'external';
  restriction: string | null;
  via_bundle: string | null;
}

export interface FunctionDetail extends FunctionRow {
  params: ParamInfo[];
  effects: { class: string; text: string }[];
  references: string[];
  errors: number[];
}

export interface DataElementRow {
  name: string;
  dtype: string;
  restriction: string | null;
  initial: number | string | null;
}

export interface DiagnosticRow {
  code: string;
  severity: 'error' | 'warning';
  file: string;
  line: number;
  col: number;
  subject: string;
  message: string;
  related: string[];
}

export interface IndicatorRow {
  element: string;
  allocated: boolean;
  defined: boolean;
  valued: boolean;
  value: number | string | null;
}

export interface Snapshot {
  id: string;
  level: string;
  state: string | null;
  indicators: IndicatorRow[];
  log_length: number;
}

export interface Delta {
  element: string;
  before: IndicatorRow;
  after: IndicatorRow;
}

export interface Outcome {
  function: string;
  kind: 'COMPLETED' | 'SPEC_ERROR' | 'EXCEPTION';
  number: number | null;
  numbers: number[];
  codes: string[];
  details: string[];
  effects: string[];
  deltas: Delta[];
  state_after: string | null;
}

export interface LogEntry {
  index: number;
  function: string;
  args: Record<string, number | string>;
  outcome: Outcome;
}

export type ArgMap = Record<string, number | string>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json();
    if (!resp.ok) {
      const detail =
        payload && typeof payload === 'object' && 'error' in payload
          ? String((payload as { error: unknown }).error)
          : resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return payload as T;
  }

  spec(): Promise<SpecSummary> {
    return this.request('GET', '/api/spec');
  }

  functions(): Promise<FunctionRow[]> {
    return this.request('GET', '/api/spec/functions');
  }

  functionDetail(name: string): Promise<FunctionDetail> {
    return this.request('GET', `/api/spec/functions/${encodeURIComponent(name)}`);
  }

  dataElements(): Promise<DataElementRow[]> {
    return this.request('GET', '/api/spec/data-elements');
  }

  diagnostics(): Promise<DiagnosticRow[]> {
    return this.request('GET', '/api/diagnostics');
  }

  createSession(level?: string): Promise<{ id: string; level: string }> {
    return this.request('POST', '/api/sessions', level ? { level } : {});
  }

  snapshot(id: string): Promise<Snapshot> {
    return this.request('GET', `/api/sessions/${encodeURIComponent(id)}`);
  }

  call(id: string, fn: string, args: ArgMap): Promise<Outcome> {
    return this.request('POST', `/api/sessions/${encodeURIComponent(id)}/calls`, {
      function: fn,
      args,
    });
  }

  dryRun(id: string, fn: string, args: ArgMap = {}): Promise<Outcome> {
    return this.request('POST', `/api/sessions/${encodeURIComponent(id)}/dry-run`, {
      function: fn,
      args,
    });
  }

  reset(id: string): Promise<Snapshot> {
    return this.request('POST', `/api/sessions/${encodeURIComponent(id)}/reset`);
  }

  log(id: string): Promise<LogEntry[]> {
    return this.request('GET', `/api/sessions/${encodeURIComponent(id)}/log`);
  }
}
