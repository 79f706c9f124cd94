/**
 * Collapsible schema tree pane: bilingual labels, cultural-origin badges,
 * substring search over both names, inline validation badges and label
 * toggling. Selection here highlights in the canvas and findings panes.
 */

import { AnnotationState } from './state';
import type { Schema, SchemaNode } from './types';

const ORIGIN_BADGES: Record<string, string> = {
  western: '西',
  chinese: '中',
  fused: '融',
  universal: '',
};

export interface TreeOptions {
  /** Called when the user toggles a label node. */
  onToggle?: (node: SchemaNode) => void;
}

export function childrenByParent(schema: Schema): Map<string, SchemaNode[]> {
  const byParent = new Map<string, SchemaNode[]>();
  for (const node of schema.nodes) {
    if (!node.parent_id) continue;
    const bucket = byParent.get(node.parent_id) ?? [];
    bucket.push(node);
    byParent.set(node.parent_id, bucket);
  }
  return byParent;
}

export function dimensionRoots(schema: Schema): SchemaNode[] {
  return schema.nodes.filter((n) => n.level === 1);
}

/** Node ids whose Chinese or English name contains the query, plus all of
 * their ancestors so matches stay reachable in the collapsed tree. An
 * empty query matches everything. */
export function searchMatches(schema: Schema, query: string): Set<string> {
  const trimmed = query.trim().toLowerCase();
  const all = new Set(schema.nodes.map((n) => n.id));
  if (!trimmed) return all;

  const byId = new Map(schema.nodes.map((n) => [n.id, n]));
  const hits = new Set<string>();
  for (const node of schema.nodes) {
    const haystack = `${node.name_zh} ${node.name_en}`.toLowerCase();
    if (!haystack.includes(trimmed)) continue;
    let current: SchemaNode | undefined = node;
    while (current && !hits.has(current.id)) {
      hits.add(current.id);
      current = current.parent_id ? byId.get(current.parent_id) : undefined;
    }
  }
  return hits;
}

function renderNode(
  node: SchemaNode,
  byParent: Map<string, SchemaNode[]>,
  visible: Set<string>,
  state: AnnotationState,
  options: TreeOptions,
): HTMLElement {
  const li = document.createElement('li');
  li.className = `tree-node tree-${node.kind}`;
  li.dataset.nodeId = node.id;

  const row = document.createElement('div');
  row.className = 'tree-row';
  if (state.hasAssignment(node.id)) row.classList.add('assigned');
  if (state.selectedNodeId === node.id) row.classList.add('selected');

  const name = document.createElement('span');
  name.className = 'tree-name';
  name.textContent = `${node.name_zh} · ${node.name_en}`;
  name.title = node.definition;
  row.appendChild(name);

  const badge = ORIGIN_BADGES[node.cultural_origin];
  if (badge) {
    const origin = document.createElement('span');
    origin.className = `origin-badge origin-${node.cultural_origin}`;
    origin.textContent = badge;
    row.appendChild(origin);
  }

  const errors = state.findingsForNode(node.id);
  if (errors.length > 0) {
    const flag = document.createElement('span');
    flag.className = 'finding-badge';
    flag.textContent = errors[0].code;
    flag.title = errors.map((f) => f.message).join('\n');
    row.appendChild(flag);
  }

  row.addEventListener('click', () => {
    state.selectedNodeId = node.id;
    if (node.kind !== 'dimension') {
      state.toggleAssignment(node.id, state.selectedRegionId ?? undefined);
    }
    options.onToggle?.(node);
  });
  li.appendChild(row);

  const children = (byParent.get(node.id) ?? []).filter((c) => visible.has(c.id));
  if (children.length > 0) {
    const ul = document.createElement('ul');
    ul.className = 'tree-children';
    for (const child of children) {
      ul.appendChild(renderNode(child, byParent, visible, state, options));
    }
    li.appendChild(ul);
  }
  return li;
}

export function renderSchemaTree(
  container: HTMLElement,
  schema: Schema,
  state: AnnotationState,
  query = '',
  options: TreeOptions = {},
): void {
  const byParent = childrenByParent(schema);
  const visible = searchMatches(schema, query);
  container.innerHTML = '';

  const ul = document.createElement('ul');
  ul.className = 'tree-roots';
  for (const root of dimensionRoots(schema)) {
    if (!visible.has(root.id)) continue;
    ul.appendChild(renderNode(root, byParent, visible, state, options));
  }
  container.appendChild(ul);
}
