/** Console state machine: three panes driven purely by gateway responses.
 *
 * Kept DOM-free so the contract tests can drive it with recorded
 * responses and inspect the exact HTML each pane would show. */

import { GatewayClient } from './api.js';
import type { ApiResult, GatewayErrorBody, PageDoc, SessionInfo, StatsReport, TemplateDoc } from './types.js';
import {
  renderErrorBanner,
  renderEventResult,
  renderPage,
  renderSaveOutcome,
  renderSessionBadge,
  renderStats,
  renderTemplateEditor,
} from './views.js';

export interface ViewModel {
  user: string;
  session: SessionInfo | null;
  navPoint: string;
  page: PageDoc | null;
  stats: StatsReport | null;
  draft: TemplateDoc | null;
}

export interface Panes {
  session: string;
  browse: string;
  admin: string;
  adminOutcome: string;
  stats: string;
}

export class Console {
  readonly model: ViewModel = {
    user: '',
    session: null,
    navPoint: 'press-room',
    page: null,
    stats: null,
    draft: null,
  };

  private panes: Panes = { session: '', browse: '', admin: '', adminOutcome: '', stats: '' };

  constructor(private readonly client: GatewayClient) {}

  snapshot(): Panes {
    return { ...this.panes };
  }

  private showError(pane: keyof Panes, result: { status: number; body: GatewayErrorBody }): void {
    this.panes[pane] = renderErrorBanner(result.status, result.body);
  }

  /** Open a session as `user`, ending the previous one, then re-fetch. */
  async switchProfile(user: string): Promise<void> {
    if (this.model.session) {
      await this.client.closeSession(this.model.session.session);
      this.model.session = null;
      this.model.page = null;
    }
    const result = await this.client.openSession(user);
    if (!result.ok) {
      this.showError('session', result);
      return;
    }
    this.model.user = user;
    this.model.session = result.body;
    this.panes.session = renderSessionBadge(user, result.body);
    await this.browse(this.model.navPoint);
  }

  /** Fetch and show a page; what is shown is always the latest GET. */
  async browse(navPoint: string): Promise<void> {
    if (!this.model.session) {
      return;
    }
    this.model.navPoint = navPoint;
    const result = await this.client.getPage(navPoint, this.model.session.session);
    if (!result.ok) {
      this.model.page = null;
      this.showError('browse', result);
      return;
    }
    this.model.page = result.body;
    this.panes.browse = renderPage(result.body);
  }

  async loadTemplate(id: string): Promise<void> {
    if (!this.model.session) {
      return;
    }
    const result = await this.client.getTemplate(id, this.model.session.session);
    if (!result.ok) {
      this.model.draft = null;
      this.showError('admin', result);
      return;
    }
    this.model.draft = result.body;
    this.panes.admin = renderTemplateEditor(result.body);
  }

  /** PUT the draft; on success the browse pane refreshes once. */
  async saveTemplate(draftText: string): Promise<ApiResult<TemplateDoc> | null> {
    if (!this.model.session) {
      return null;
    }
    let draft: TemplateDoc;
    try {
      draft = JSON.parse(draftText) as TemplateDoc;
    } catch (exc) {
      this.panes.adminOutcome = renderErrorBanner(0, {
        error: 'DraftNotJson',
        detail: String(exc),
      });
      return null;
    }
    const result = await this.client.putTemplate(draft.id, this.model.session.session, draft);
    this.panes.adminOutcome = renderSaveOutcome(result);
    if (result.ok) {
      this.model.draft = result.body;
      await this.browse(this.model.navPoint);
    }
    return result;
  }

  async pushEvent(
    sourceId: string,
    key: unknown,
    change: { op: 'upsert'; fields: Record<string, unknown> } | { op: 'delete' },
  ): Promise<void> {
    if (!this.model.session) {
      return;
    }
    const result = await this.client.postSourceEvent(sourceId, this.model.session.session, key, change);
    if (!result.ok) {
      this.showError('adminOutcome', result);
      return;
    }
    this.panes.adminOutcome = renderEventResult(result.body);
    await this.browse(this.model.navPoint);
  }

  async refreshStats(): Promise<void> {
    if (!this.model.session) {
      return;
    }
    const result = await this.client.getStats(this.model.session.session);
    if (!result.ok) {
      this.showError('stats', result);
      return;
    }
    this.model.stats = result.body;
    this.panes.stats = renderStats(result.body);
  }
}
