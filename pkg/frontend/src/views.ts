/** Pure render functions: gateway JSON in, HTML string out.
 *
 * The console does no model computation; every text node below is a
 * field of a gateway response (or a fixed label). That property is what
 * the contract tests pin down. */

import type {
  EventResult,
  GatewayErrorBody,
  PageDoc,
  SessionInfo,
  SlotDoc,
  StatsReport,
  TemplateDoc,
} from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function asText(value: unknown): string {
  return typeof value === 'string' ? value : JSON.stringify(value);
}

function renderGrid(rows: unknown): string {
  if (!Array.isArray(rows) || rows.length === 0) {
    return '<table class="grid"></table>';
  }
  const first = rows[0] as Record<string, unknown>;
  const columns = Object.keys(first);
  const head = columns.map((c) => `<th>${escapeHtml(c)}</th>`).join('');
  const body = rows
    .map((row) => {
      const cells = columns
        .map((c) => `<td>${escapeHtml(asText((row as Record<string, unknown>)[c] ?? ''))}</td>`)
        .join('');
      return `<tr>${cells}</tr>`;
    })
    .join('');
  return `<table class="grid"><tr>${head}</tr>${body}</table>`;
}

export function renderSlot(slot: SlotDoc): string {
  const attr = `data-slot="${escapeHtml(slot.name)}" data-kind="${escapeHtml(slot.kind)}"`;
  switch (slot.kind) {
    case 'title':
      return `<h1 ${attr}>${escapeHtml(asText(slot.value))}</h1>`;
    case 'header':
      return `<header ${attr}>${escapeHtml(asText(slot.value))}</header>`;
    case 'footer':
      return `<footer ${attr}>${escapeHtml(asText(slot.value))}</footer>`;
    case 'static_image': {
      const asset = (slot.value ?? {}) as Record<string, unknown>;
      const uri = escapeHtml(asText(asset['uri'] ?? ''));
      const alt = escapeHtml(asText(asset['id'] ?? slot.name));
      return `<img ${attr} src="${uri}" alt="${alt}"/>`;
    }
    case 'video_clip': {
      const asset = (slot.value ?? {}) as Record<string, unknown>;
      return `<video ${attr} src="${escapeHtml(asText(asset['uri'] ?? ''))}"></video>`;
    }
    case 'grid':
      return `<div ${attr}>${renderGrid(slot.value)}</div>`;
    case 'url_meta': {
      const url = escapeHtml(asText(slot.value));
      return `<a ${attr} href="${url}">${url}</a>`;
    }
    default:
      return `<div ${attr}>${escapeHtml(asText(slot.value))}</div>`;
  }
}

/** The browse pane: the structured page exactly as the gateway sent it. */
export function renderPage(page: PageDoc): string {
  const slots = page.slots.map(renderSlot).join('\n');
  return [
    `<article data-nav="${escapeHtml(page.nav_point)}" data-url="${escapeHtml(page.url)}" data-seq="${page.built_at_seq}">`,
    slots,
    `</article>`,
  ].join('\n');
}

/** Gateway error bodies are shown verbatim, never rephrased. */
export function renderErrorBanner(status: number, err: GatewayErrorBody): string {
  const where =
    err.section !== undefined
      ? ` <span class="error-where">${escapeHtml(err.section)}/${escapeHtml(err.id ?? '')}</span>`
      : '';
  return (
    `<div class="banner error" data-status="${status}" data-error="${escapeHtml(err.error)}">` +
    `<strong>${escapeHtml(err.error)}</strong> ${escapeHtml(err.detail)}${where}</div>`
  );
}

/** Role denial (403) is presented distinctly from validation failure. */
export function renderSaveOutcome(result: { ok: boolean; status: number; body: unknown }): string {
  if (result.ok) {
    const template = result.body as TemplateDoc;
    return `<div class="banner saved" data-template="${escapeHtml(template.id)}">saved ${escapeHtml(template.id)}</div>`;
  }
  const err = result.body as GatewayErrorBody;
  const flavour = result.status === 403 ? 'denied' : 'invalid';
  return `<div class="banner ${flavour}">${renderErrorBanner(result.status, err)}</div>`;
}

export function renderSessionBadge(user: string, info: SessionInfo): string {
  return `<span class="session" data-session="${escapeHtml(info.session)}">${escapeHtml(user)} (${escapeHtml(info.role)})</span>`;
}

export function renderTemplateEditor(template: TemplateDoc): string {
  const body = escapeHtml(JSON.stringify(template, null, 2));
  return [
    `<h2 data-template="${escapeHtml(template.id)}">${escapeHtml(template.id)}</h2>`,
    `<textarea id="template-draft" rows="24" spellcheck="false">${body}</textarea>`,
  ].join('\n');
}

export function renderEventResult(result: EventResult): string {
  const rebuilt = result.rebuilt.map((nav) => escapeHtml(nav)).join(', ');
  return `<div class="banner rebuilt" data-seq="${result.seq}">event ${result.seq} rebuilt: ${rebuilt || '(nothing)'}</div>`;
}

export function renderStats(report: StatsReport): string {
  const rows = report.rows
    .map(
      (row) =>
        `<tr><td>${escapeHtml(row.nav_point)}</td><td>${escapeHtml(row.role)}</td><td>${row.views}</td></tr>`,
    )
    .join('');
  return [
    '<table class="stats"><tr><th>nav point</th><th>role</th><th>views</th></tr>',
    rows,
    `</table><p class="totals">total views: <span data-total>${report.totals.views}</span></p>`,
  ].join('');
}
