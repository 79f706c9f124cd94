/**
 * Suggestion panel: feature-driven label chips. Chips are advisory and
 * never auto-applied; clicking one creates a normal assignment.
 */

import { AnnotationState } from './state';
import type { Schema, Suggestion } from './types';

export function renderSuggestions(
  container: HTMLElement,
  suggestions: Suggestion[],
  schema: Schema,
  state: AnnotationState,
): void {
  container.innerHTML = '';
  container.classList.add('suggest-pane');

  if (suggestions.length === 0) return;

  const byId = new Map(schema.nodes.map((n) => [n.id, n]));
  for (const suggestion of suggestions) {
    const node = byId.get(suggestion.node_id);
    if (!node) continue;
    const chip = document.createElement('button');
    chip.className = 'suggest-chip';
    chip.dataset.nodeId = suggestion.node_id;
    chip.textContent = `${node.name_zh} (${Math.round(suggestion.score * 100)}%)`;
    chip.title = `satisfied: ${suggestion.satisfied_criteria.join(', ')}`;
    if (state.hasAssignment(suggestion.node_id)) chip.disabled = true;
    chip.addEventListener('click', () => {
      if (!state.hasAssignment(suggestion.node_id)) {
        state.toggleAssignment(suggestion.node_id);
      }
    });
    container.appendChild(chip);
  }
}
