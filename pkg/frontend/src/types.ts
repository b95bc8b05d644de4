/** Wire types of the gateway API. The console renders these verbatim. */

export interface SlotDoc {
  name: string;
  kind: string;
  value: unknown;
}

export interface PageDoc {
  nav_point: string;
  url: string;
  slots: SlotDoc[];
  built_at_seq: number;
}

export interface SessionInfo {
  session: string;
  role: string;
}

export interface StatsRow {
  nav_point: string;
  role: string;
  views: number;
}

export interface StatsReport {
  rows: StatsRow[];
  totals: { by_nav_point: Record<string, number>; views: number };
}

export interface TemplateSlotDoc {
  name: string;
  kind: string;
  binding: Record<string, unknown>;
  min_access: number | 'public';
}

export interface TemplateDoc {
  id: string;
  type: string;
  slots: TemplateSlotDoc[];
}

export interface GatewayErrorBody {
  error: string;
  detail: string;
  section?: string;
  id?: string;
}

export interface EventResult {
  seq: number;
  rebuilt: string[];
}

/** Discriminated result: either the payload or the gateway's error body, untouched. */
export type ApiResult<T> =
  | { ok: true; status: number; body: T }
  | { ok: false; status: number; body: GatewayErrorBody };
