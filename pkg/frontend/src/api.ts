// Typed client for the local threatsmith service. The UI renders only what
// these endpoints return; counts and percentages are never recomputed here.

export interface KindInfo {
  name: string;
  keywords: string[];
}

export interface ComponentDoc {
  id: string;
  kind: { name: string; description: string; custom: boolean };
  label: string;
  keywords: string[];
}

export interface ScopeDoc {
  name: string;
  created: string;
  components: ComponentDoc[];
}

export interface ThreatRow {
  cwe: string;
  title: string;
  count: number;
  percent: number;
  cves: string[];
  mitigations: string[];
}

export interface ComponentReport {
  label: string;
  kind: string;
  total_cves?: number;
  unmapped_cves?: number;
  threats?: ThreatRow[];
  top5?: ThreatRow[];
  missing_data?: { keywords: string[] };
}

export interface ReportDoc {
  scope: string;
  generated_at: string;
  snapshot_stamp: string | null;
  components: ComponentReport[];
}

export interface ChartSlice {
  label: string;
  count: number;
  percent: number;
}

export interface ChartDoc {
  component_label: string;
  slices: ChartSlice[];
  other_count: number;
}

export interface LibraryStatus {
  state: 'idle' | 'running' | 'failed' | 'done';
  completed: number;
  total: number;
  reason: string;
  fetched_at: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public violations: string[],
  ) {
    super(`API error ${status}: ${violations.join('; ')}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(base + path, init);
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const violations = (body && (body.violations ?? [body.error])) || [`status ${resp.status}`];
    throw new ApiError(resp.status, violations.filter(Boolean));
  }
  return body as T;
}

export class ThreatsmithApi {
  constructor(private base: string) {}

  kinds(): Promise<{ kinds: KindInfo[] }> {
    return request(this.base, '/components/kinds');
  }

  getScope(): Promise<ScopeDoc> {
    return request(this.base, '/scope');
  }

  putScope(scope: ScopeDoc): Promise<ScopeDoc> {
    return request(this.base, '/scope', {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(scope),
    });
  }

  analyze(): Promise<ReportDoc> {
    return request(this.base, '/analyze', { method: 'POST' });
  }

  results(view: 'all' | 'top5'): Promise<ReportDoc> {
    return request(this.base, `/results?view=${view}`);
  }

  chart(componentId: string): Promise<ChartDoc> {
    return request(this.base, `/chart/${componentId}`);
  }

  startUpdate(keywords?: string[]): Promise<{ state: string; total: number }> {
    return request(this.base, '/library/update', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(keywords ? { keywords } : {}),
    });
  }

  updateStatus(): Promise<LibraryStatus> {
    return request(this.base, '/library/status');
  }

  ackUpdate(): Promise<{ state: string }> {
    return request(this.base, '/library/ack', { method: 'POST' });
  }
}
