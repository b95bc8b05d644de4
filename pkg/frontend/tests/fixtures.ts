/** Helpers for the recorded gateway responses used by the contract tests. */

import { readFileSync } from 'fs';
import { dirname, join } from 'path';
import { fileURLToPath } from 'url';

export interface Recorded<T = unknown> {
  status: number;
  body: T;
}

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T = unknown>(name: string): Recorded<T> {
  const raw = readFileSync(join(here, 'fixtures', `${name}.json`), 'utf-8');
  return JSON.parse(raw) as Recorded<T>;
}

/** A fetch implementation that replays recorded responses per (method, path prefix). */
export function replayFetch(routes: Array<[string, string, Recorded | Recorded[]]>) {
  const cursors = new Map<number, number>();
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const method = (init?.method ?? 'GET').toUpperCase();
    for (let i = 0; i < routes.length; i += 1) {
      const [routeMethod, prefix, recorded] = routes[i];
      if (routeMethod === method && url.startsWith(prefix)) {
        let hit: Recorded;
        if (Array.isArray(recorded)) {
          const cursor = cursors.get(i) ?? 0;
          hit = recorded[Math.min(cursor, recorded.length - 1)];
          cursors.set(i, cursor + 1);
        } else {
          hit = recorded;
        }
        return new Response(JSON.stringify(hit.body), {
          status: hit.status,
          headers: { 'content-type': 'application/json' },
        });
      }
    }
    throw new Error(`no recorded route for ${method} ${url}`);
  };
}
