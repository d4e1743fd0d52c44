// Boots the fixture-backed Python service once for the end-to-end tests.

import { type ChildProcess, spawn } from 'node:child_process';
import { mkdtempSync, copyFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { execSync } from 'node:child_process';

export const BASE_URL = 'http://127.0.0.1:8791';

let server: ChildProcess | undefined;

async function waitForHealth(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${url}/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error('threatsmith service did not come up');
}

export async function setup(): Promise<void> {
  const workdir = mkdtempSync(join(tmpdir(), 'threatsmith-ui-'));
  const bundled = execSync(
    'python3 -c "from threatsmith.analysis import bundled_snapshot_path; print(bundled_snapshot_path())"',
  )
    .toString()
    .trim();
  const snapshot = join(workdir, 'snapshot.json');
  copyFileSync(bundled, snapshot);
  server = spawn(
    'python3',
    [
      '-m', 'threatsmith.cli', 'serve',
      '--port', '8791',
      '--snapshot', snapshot,
      '--scope', join(workdir, 'scope.json'),
    ],
    { stdio: 'ignore' },
  );
  await waitForHealth(BASE_URL, 30000);
}

export async function teardown(): Promise<void> {
  server?.kill();
}
