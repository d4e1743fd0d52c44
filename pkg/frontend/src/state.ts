// Client-side scope draft. Mirrors the server's validation rules so bad
// submissions are blocked before any network call, and tracks unsaved edits.

import type { ComponentDoc, ScopeDoc } from './api.js';

export interface DraftResult {
  ok: boolean;
  error?: string;
}

export class ScopeDraft {
  components: ComponentDoc[] = [];
  dirty = false;
  private nextId = 1;

  static fromScope(scope: ScopeDoc): ScopeDraft {
    const draft = new ScopeDraft();
    draft.components = scope.components.map((c) => ({ ...c, keywords: [...c.keywords] }));
    draft.nextId = scope.components.length + 1;
    return draft;
  }

  private freshId(): string {
    const used = new Set(this.components.map((c) => c.id));
    while (used.has(`c${this.nextId}`)) this.nextId += 1;
    return `c${this.nextId}`;
  }

  addBuiltin(kind: string, keywords: string[]): DraftResult {
    this.components.push({
      id: this.freshId(),
      kind: { name: kind, description: '', custom: false },
      label: kind,
      keywords: [...keywords],
    });
    this.dirty = true;
    return { ok: true };
  }

  addCustom(name: string, description: string): DraftResult {
    const trimmed = name.trim();
    if (!trimmed) {
      return { ok: false, error: 'custom component name must not be empty' };
    }
    const key = trimmed.toLowerCase();
    const duplicate = this.components.some(
      (c) => c.kind.custom && c.kind.name.trim().toLowerCase() === key,
    );
    if (duplicate) {
      return { ok: false, error: `duplicate custom name: ${trimmed}` };
    }
    this.components.push({
      id: this.freshId(),
      kind: { name: trimmed, description, custom: true },
      label: trimmed,
      keywords: [trimmed],
    });
    this.dirty = true;
    return { ok: true };
  }

  remove(id: string): void {
    const before = this.components.length;
    this.components = this.components.filter((c) => c.id !== id);
    if (this.components.length !== before) this.dirty = true;
  }

  // Submit (PUT /scope) must stay disabled while the draft is invalid.
  canSubmit(): boolean {
    return this.components.length > 0 && this.violations().length === 0;
  }

  // Analyze requires a non-empty, saved scope.
  canAnalyze(): boolean {
    return this.components.length > 0 && !this.dirty;
  }

  violations(): string[] {
    const out: string[] = [];
    const seenIds = new Set<string>();
    const seenCustom = new Set<string>();
    for (const c of this.components) {
      if (seenIds.has(c.id)) out.push(`duplicate component id: ${c.id}`);
      seenIds.add(c.id);
      if (c.kind.custom) {
        const key = c.kind.name.trim().toLowerCase();
        if (seenCustom.has(key)) out.push(`duplicate custom name: ${c.kind.name.trim()}`);
        seenCustom.add(key);
      }
    }
    return out;
  }

  toScope(name: string, created: string): ScopeDoc {
    return { name, created, components: this.components };
  }

  markSaved(): void {
    this.dirty = false;
  }
}
