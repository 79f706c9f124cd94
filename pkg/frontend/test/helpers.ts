/** Shared test scaffolding: the real canonical schema plus a tiny in-memory
 * fake of the annotation service behind a mocked fetch. */

import { vi } from 'vitest';

import type { Annotation, Finding, Schema, ValidationReport } from '../src/types';
import schemaJson from './schema.json';

export const schema = schemaJson as unknown as Schema;

export function emptyTestAnnotation(id = 'ui-test'): Annotation {
  return {
    id,
    image_ref: 'test.png',
    annotator_id: 'webui',
    created_at: '2026-01-01T00:00:00Z',
    schema_version: schema.version,
    regions: [],
    assignments: [],
    propositions: [],
    narrative: [],
    notes: '',
    revision: 0,
  };
}

/** Server-side validation, reduced to what the UI tests exercise: the
 * exclusive sibling check. Mirrors the real service's report shape. */
export function fakeValidate(ann: Annotation): ValidationReport {
  const byId = new Map(schema.nodes.map((n) => [n.id, n]));
  const assigned = new Set(ann.assignments.map((a) => a.node_id));
  const findings: Finding[] = [];
  const seen = new Set<string>();
  for (const nodeId of assigned) {
    const node = byId.get(nodeId);
    if (!node || !node.parent_id) continue;
    const parent = byId.get(node.parent_id);
    if (!parent || parent.child_selection !== 'exclusive' || seen.has(parent.id)) continue;
    seen.add(parent.id);
    const chosen = schema.nodes
      .filter((n) => n.parent_id === parent.id && assigned.has(n.id))
      .map((n) => n.id)
      .sort();
    for (let i = 0; i < chosen.length; i += 1) {
      for (let j = i + 1; j < chosen.length; j += 1) {
        findings.push({
          severity: 'error',
          code: 'EXCLUSIVE_CONFLICT',
          subject: `${chosen[i]}|${chosen[j]}`,
          message: `both chosen under exclusive group '${parent.id}'`,
        });
      }
    }
  }
  return { findings };
}

export interface FakeServer {
  store: Map<string, Annotation>;
}

/** Installs a fetch mock emulating /schema, /annotations CRUD and
 * /annotations/{id}/validate. Returns the backing store for assertions. */
export function installFakeServer(): FakeServer {
  const store = new Map<string, Annotation>();

  const json = (body: unknown, status = 200) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });

  vi.stubGlobal(
    'fetch',
    vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = typeof input === 'string' ? input : input.toString();
      const method = init?.method ?? 'GET';

      if (url.endsWith('/schema')) return json(schema);

      if (url.endsWith('/annotations') && method === 'GET') {
        return json({ annotations: [...store.keys()].sort() });
      }

      if (url.endsWith('/annotations') && method === 'POST') {
        const ann = JSON.parse(String(init?.body)) as Annotation;
        const report = fakeValidate(ann);
        if (report.findings.some((f) => f.severity === 'error')) {
          return json(report, 422);
        }
        const current = store.get(ann.id);
        if (current && current.revision !== ann.revision) {
          return json({ error: 'revision conflict' }, 409);
        }
        const stored = { ...ann, revision: current ? current.revision + 1 : 0 };
        store.set(ann.id, stored);
        return json(stored, current ? 200 : 201);
      }

      const validateMatch = url.match(/\/annotations\/([^/]+)\/validate$/);
      if (validateMatch && method === 'POST') {
        const ann = JSON.parse(String(init?.body)) as Annotation;
        return json(fakeValidate(ann));
      }

      const getMatch = url.match(/\/annotations\/([^/]+)$/);
      if (getMatch && method === 'GET') {
        const ann = store.get(decodeURIComponent(getMatch[1]));
        return ann ? json(ann) : json({ error: 'not found' }, 404);
      }

      if (url.endsWith('/images')) return json({ images: [] });

      return json({ error: `unhandled ${method} ${url}` }, 404);
    }),
  );

  return { store };
}
