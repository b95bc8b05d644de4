/** Thin fetch client for the gateway. No model computation happens here:
 * every method returns the gateway's JSON body as-is, success or error. */

import type {
  ApiResult,
  EventResult,
  PageDoc,
  SessionInfo,
  StatsReport,
  TemplateDoc,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<ApiResult<T>> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json();
    if (response.ok) {
      return { ok: true, status: response.status, body: body as T };
    }
    return { ok: false, status: response.status, body };
  }

  private post<T>(path: string, payload: unknown): Promise<ApiResult<T>> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  openSession(user: string): Promise<ApiResult<SessionInfo>> {
    return this.post<SessionInfo>('/api/sessions', { user });
  }

  closeSession(session: string): Promise<ApiResult<{ session: string; closed: boolean }>> {
    return this.request(`/api/sessions/${encodeURIComponent(session)}`, { method: 'DELETE' });
  }

  getPage(navPoint: string, session: string): Promise<ApiResult<PageDoc>> {
    return this.request<PageDoc>(
      `/api/pages/${encodeURIComponent(navPoint)}?session=${encodeURIComponent(session)}`,
    );
  }

  getTemplate(id: string, session: string): Promise<ApiResult<TemplateDoc>> {
    return this.request<TemplateDoc>(
      `/api/admin/templates/${encodeURIComponent(id)}?session=${encodeURIComponent(session)}`,
    );
  }

  putTemplate(id: string, session: string, draft: TemplateDoc): Promise<ApiResult<TemplateDoc>> {
    return this.request<TemplateDoc>(
      `/api/admin/templates/${encodeURIComponent(id)}?session=${encodeURIComponent(session)}`,
      {
        method: 'PUT',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(draft),
      },
    );
  }

  postSourceEvent(
    sourceId: string,
    session: string,
    key: unknown,
    change: { op: 'upsert'; fields: Record<string, unknown> } | { op: 'delete' },
  ): Promise<ApiResult<EventResult>> {
    return this.post<EventResult>(
      `/api/sources/${encodeURIComponent(sourceId)}/events?session=${encodeURIComponent(session)}`,
      { key, change },
    );
  }

  getStats(session: string): Promise<ApiResult<StatsReport>> {
    return this.request<StatsReport>(`/api/stats?session=${encodeURIComponent(session)}`);
  }
}
