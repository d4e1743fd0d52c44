// HTML fragments for the session views. Pure string builders so they are
// testable without a DOM; main.ts injects the results into the page.

import type { ComponentDoc, ComponentReport, LibraryStatus, ThreatRow } from './api.js';

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

// Components drawn as labeled rectangles on the scope canvas.
export function componentRectangles(components: ComponentDoc[]): string {
  const boxes = components.map((c, i) => {
    const x = 16 + (i % 4) * 170;
    const y = 16 + Math.floor(i / 4) * 90;
    const kind = c.kind.custom ? 'custom' : c.kind.name;
    return `<g class="component-box" data-id="${esc(c.id)}" transform="translate(${x}, ${y})">` +
      `<rect width="150" height="70" rx="6" fill="#eef3fa" stroke="#4e79a7" stroke-width="2"/>` +
      `<text x="75" y="30" text-anchor="middle" font-size="14" font-weight="bold">${esc(c.label)}</text>` +
      `<text x="75" y="50" text-anchor="middle" font-size="11" fill="#666">${esc(kind)}</text>` +
      `</g>`;
  });
  const rows = Math.max(1, Math.ceil(components.length / 4));
  return `<svg width="700" height="${rows * 90 + 20}">${boxes.join('')}</svg>`;
}

export function threatTableRows(rows: ThreatRow[]): string[] {
  return rows.map(
    (t) =>
      `<tr><td>${esc(t.cwe)}</td><td>${esc(t.title)}</td>` +
      `<td class="num">${t.count}</td><td class="num">${t.percent}%</td></tr>`,
  );
}

export function componentSection(report: ComponentReport, view: 'all' | 'top5'): string {
  if (report.missing_data) {
    return `<section class="component"><h3>${esc(report.label)} ` +
      `<span class="badge missing">missing data</span></h3>` +
      `<p>No snapshot entry for: ${esc(report.missing_data.keywords.join(', '))}</p></section>`;
  }
  const rows = view === 'all' ? (report.threats ?? []) : (report.top5 ?? []);
  const heading = view === 'all' ? 'All threats' : 'Top 5 threats';
  return `<section class="component"><h3>${esc(report.label)} (${esc(report.kind)})</h3>` +
    `<p>${report.total_cves} CVE entries, ${report.unmapped_cves} without a mapped weakness.</p>` +
    `<h4>${heading}</h4>` +
    `<table><thead><tr><th>CWE</th><th>Title</th><th>CVEs</th><th>Share</th></tr></thead>` +
    `<tbody>${threatTableRows(rows).join('')}</tbody></table></section>`;
}

export function updateStatusLine(status: LibraryStatus): string {
  switch (status.state) {
    case 'running':
      return `Updating threat library: ${status.completed}/${status.total} keywords`;
    case 'failed':
      return `Update failed: ${status.reason}`;
    case 'done':
      return 'Threat library updated.';
    default:
      return `Threat library as of ${status.fetched_at}`;
  }
}
