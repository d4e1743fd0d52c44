// Session wiring: scope editing, analyze, charts and tables, library update.

import { ApiError, ThreatsmithApi } from './api.js';
import type { KindInfo, ReportDoc, ScopeDoc } from './api.js';
import { pieSvg } from './pie.js';
import { componentRectangles, componentSection, updateStatusLine } from './render.js';
import { ScopeDraft } from './state.js';

const api = new ThreatsmithApi('');

const el = (id: string) => document.getElementById(id) as HTMLElement;
const input = (id: string) => document.getElementById(id) as HTMLInputElement;
const select = (id: string) => document.getElementById(id) as HTMLSelectElement;
const button = (id: string) => document.getElementById(id) as HTMLButtonElement;

let draft = new ScopeDraft();
let serverScope: ScopeDoc | null = null;
let kinds: KindInfo[] = [];
let view: 'all' | 'top5' = 'top5';
let lastReport: ReportDoc | null = null;
let statusTimer: number | null = null;

function setError(message: string): void {
  el('error').textContent = message;
}

function refreshScopeView(): void {
  el('scope-canvas').innerHTML = componentRectangles(draft.components);
  const list = draft.components
    .map(
      (c) =>
        `<li>${c.label} <small>[${c.keywords.join(', ')}]</small> ` +
        `<button class="remove" data-id="${c.id}">remove</button></li>`,
    )
    .join('');
  el('component-list').innerHTML = `<ul>${list}</ul>`;
  for (const btn of el('component-list').querySelectorAll('button.remove')) {
    btn.addEventListener('click', () => {
      draft.remove((btn as HTMLElement).dataset.id!);
      refreshScopeView();
    });
  }
  button('save-scope').disabled = !draft.canSubmit();
  button('analyze').disabled = !draft.canAnalyze();
}

async function saveScope(): Promise<void> {
  if (!draft.canSubmit() || !serverScope) return;
  try {
    serverScope = await api.putScope(draft.toScope(serverScope.name, serverScope.created));
    draft.markSaved();
    setError('');
  } catch (err) {
    setError(err instanceof ApiError ? err.violations.join('; ') : String(err));
  }
  refreshScopeView();
}

async function analyze(): Promise<void> {
  setError('');
  try {
    lastReport = await api.analyze();
  } catch (err) {
    setError(err instanceof ApiError ? err.violations.join('; ') : String(err));
    return;
  }
  await renderResults();
}

async function renderResults(): Promise<void> {
  if (!lastReport || !serverScope) return;
  const report = await api.results(view);
  const sections: string[] = [];
  for (const [i, comp] of report.components.entries()) {
    const componentId = serverScope.components[i]?.id;
    let chartSvg = '';
    if (!comp.missing_data && componentId) {
      try {
        chartSvg = pieSvg(await api.chart(componentId));
      } catch {
        chartSvg = '';
      }
    }
    sections.push(`<div class="result">${chartSvg}${componentSection(comp, view)}</div>`);
  }
  el('results').innerHTML = sections.join('');
}

async function pollUpdateStatus(): Promise<void> {
  const status = await api.updateStatus();
  el('update-status').textContent = updateStatusLine(status);
  if (status.state === 'running') return;
  if (statusTimer !== null) {
    window.clearInterval(statusTimer);
    statusTimer = null;
  }
  if (status.state === 'done' || status.state === 'failed') {
    await api.ackUpdate();
  }
  button('update-library').disabled = false;
}

async function startUpdate(): Promise<void> {
  button('update-library').disabled = true;
  try {
    await api.startUpdate();
  } catch (err) {
    setError(err instanceof ApiError ? err.violations.join('; ') : String(err));
    button('update-library').disabled = false;
    return;
  }
  statusTimer = window.setInterval(pollUpdateStatus, 500);
}

async function init(): Promise<void> {
  kinds = (await api.kinds()).kinds;
  select('kind-select').innerHTML = kinds
    .map((k) => `<option value="${k.name}">${k.name}</option>`)
    .join('');
  serverScope = await api.getScope();
  draft = ScopeDraft.fromScope(serverScope);
  refreshScopeView();

  button('add-builtin').addEventListener('click', () => {
    const kind = kinds.find((k) => k.name === select('kind-select').value);
    if (!kind) return;
    draft.addBuiltin(kind.name, kind.keywords);
    setError('');
    refreshScopeView();
  });

  button('add-custom').addEventListener('click', () => {
    const result = draft.addCustom(input('custom-name').value, input('custom-desc').value);
    if (!result.ok) {
      // Blocked client-side: no server call happens for duplicates.
      setError(result.error ?? 'invalid custom component');
      return;
    }
    input('custom-name').value = '';
    input('custom-desc').value = '';
    setError('');
    refreshScopeView();
  });

  button('save-scope').addEventListener('click', () => void saveScope());
  button('analyze').addEventListener('click', () => void analyze());
  button('update-library').addEventListener('click', () => void startUpdate());

  for (const radio of document.querySelectorAll('input[name="view"]')) {
    radio.addEventListener('change', () => {
      view = (radio as HTMLInputElement).value as 'all' | 'top5';
      void renderResults();
    });
  }
}

void init();
