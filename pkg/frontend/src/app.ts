/** DOM bootstrap: binds the console state machine to the page. */

import { GatewayClient } from './api.js';
import { Console } from './console.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function repaint(console_: Console): void {
  const panes = console_.snapshot();
  el('session-pane').innerHTML = panes.session;
  el('browse-pane').innerHTML = panes.browse;
  const admin = el('admin-pane');
  if (panes.admin && admin.dataset.rendered !== panes.admin) {
    admin.innerHTML = panes.admin;
    admin.dataset.rendered = panes.admin;
  }
  el('admin-outcome').innerHTML = panes.adminOutcome;
  el('stats-pane').innerHTML = panes.stats;
}

export function boot(): void {
  const client = new GatewayClient('');
  const console_ = new Console(client);

  const run = (work: () => Promise<unknown>) => {
    void work().then(() => repaint(console_));
  };

  el<HTMLButtonElement>('profile-apply').addEventListener('click', () =>
    run(() => console_.switchProfile(el<HTMLInputElement>('profile-user').value.trim())),
  );
  el<HTMLButtonElement>('browse-go').addEventListener('click', () =>
    run(() => console_.browse(el<HTMLInputElement>('browse-nav').value.trim())),
  );
  el<HTMLButtonElement>('template-load').addEventListener('click', () =>
    run(() => console_.loadTemplate(el<HTMLInputElement>('template-id').value.trim())),
  );
  el<HTMLButtonElement>('template-save').addEventListener('click', () =>
    run(async () => {
      const draft = document.getElementById('template-draft') as HTMLTextAreaElement | null;
      if (draft) {
        await console_.saveTemplate(draft.value);
      }
    }),
  );
  el<HTMLButtonElement>('event-send').addEventListener('click', () =>
    run(async () => {
      const source = el<HTMLInputElement>('event-source').value.trim();
      const rawKey = el<HTMLInputElement>('event-key').value.trim();
      const key = /^-?\d+$/.test(rawKey) ? Number(rawKey) : rawKey;
      const op = el<HTMLSelectElement>('event-op').value;
      if (op === 'delete') {
        await console_.pushEvent(source, key, { op: 'delete' });
        return;
      }
      const fields = JSON.parse(el<HTMLTextAreaElement>('event-fields').value || '{}');
      await console_.pushEvent(source, key, { op: 'upsert', fields });
    }),
  );
  el<HTMLButtonElement>('stats-refresh').addEventListener('click', () =>
    run(() => console_.refreshStats()),
  );

  run(() => console_.switchProfile(el<HTMLInputElement>('profile-user').value.trim()));
}

if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', boot);
}
