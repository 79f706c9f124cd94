/**
 * Entry point: wires the three synchronized panes (schema tree, canvas,
 * findings) plus the suggestion panel to one AnnotationState and the
 * service client. Selection in any pane re-renders the others.
 */

import { ApiClient, ApiError, RevisionConflictError } from './api';
import { renderCanvas } from './canvas';
import { clearBanner, renderFindings, showBanner } from './findings';
import { AnnotationState, emptyAnnotation } from './state';
import { renderSuggestions } from './suggest';
import { renderSchemaTree } from './tree';
import type { Schema, Suggestion } from './types';

const VALIDATE_DEBOUNCE_MS = 400;

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id} in index.html`);
  return el;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}

async function init() {
  const api = new ApiClient('');
  const treePane = byId('tree');
  const canvasPane = byId('canvas');
  const findingsPane = byId('findings');
  const suggestPane = byId('suggestions');
  const searchBox = byId('search') as HTMLInputElement;
  const saveButton = byId('save') as HTMLButtonElement;
  const statusLine = byId('status');

  let schema: Schema;
  try {
    schema = await api.getSchema();
  } catch (error) {
    showBanner(findingsPane, `Cannot load schema from server: ${String(error)}`);
    return;
  }

  const images = await api.listImages().catch(() => [] as string[]);
  const imageRef = images[0] ?? 'untitled.png';

  const existing = await api.listAnnotations().catch(() => [] as string[]);
  const state = new AnnotationState(
    existing.length > 0
      ? await api.getAnnotation(existing[0])
      : emptyAnnotation(`webui-${imageRef.replace(/\.\w+$/, '')}`, imageRef, schema.version),
  );

  let suggestions: Suggestion[] = [];
  api
    .getFeatures(state.annotation.image_ref)
    .then((fv) => api.suggest(fv))
    .then((got) => {
      suggestions = got;
      renderAll();
    })
    .catch(() => {
      /* no image or extractor failure: suggestion panel stays empty */
    });

  const liveValidate = debounce(async () => {
    try {
      const report = await api.validateAnnotation(state.annotation);
      clearBanner(findingsPane);
      state.setReport(report);
    } catch (error) {
      // Server trouble must not block editing; keep local edits and report.
      showBanner(findingsPane, `Validation unavailable: ${String(error)}`);
    }
  }, VALIDATE_DEBOUNCE_MS);

  function renderAll() {
    renderSchemaTree(treePane, schema, state, searchBox.value);
    renderCanvas(
      canvasPane,
      state,
      images.length > 0 ? api.imageUrl(state.annotation.image_ref) : null,
    );
    renderFindings(findingsPane, state);
    renderSuggestions(suggestPane, suggestions, schema, state);
    statusLine.textContent = state.dirty
      ? `unsaved edits (rev ${state.annotation.revision})`
      : `saved (rev ${state.annotation.revision})`;
  }

  state.subscribe(() => {
    renderAll();
    if (state.dirty) liveValidate();
  });
  searchBox.addEventListener('input', renderAll);

  saveButton.addEventListener('click', async () => {
    try {
      const stored = await api.saveAnnotation(state.annotation);
      clearBanner(findingsPane);
      state.load(stored);
    } catch (error) {
      if (error instanceof RevisionConflictError) {
        showBanner(
          findingsPane,
          'Save conflict: the annotation changed on the server. Reload to merge.',
        );
      } else if (error instanceof ApiError && error.report) {
        state.setReport(error.report); // rejected save: show the server report
      } else {
        showBanner(findingsPane, `Save failed: ${String(error)}`);
      }
    }
  });

  renderAll();
}

// In the test environment the page is assembled by the test itself.
if (typeof document !== 'undefined' && document.getElementById('tree')) {
  void init();
}

export { init };
