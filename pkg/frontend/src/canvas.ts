/**
 * Annotation canvas: the painting with region rectangles drawn over it.
 * Dragging on the overlay creates a bbox region in unit coordinates;
 * clicking a rectangle selects it so tree clicks bind labels to it.
 */

import { AnnotationState, nextRegionId } from './state';
import type { BboxShape, Region } from './types';

export interface DragRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Convert a drag in unit coordinates to a normalized bbox, clamped to the
 * unit square. Returns null for degenerate drags. */
export function dragToBbox(drag: DragRect): BboxShape | null {
  const clamp = (v: number) => Math.min(1, Math.max(0, v));
  const x = clamp(Math.min(drag.x0, drag.x1));
  const y = clamp(Math.min(drag.y0, drag.y1));
  const w = clamp(Math.max(drag.x0, drag.x1)) - x;
  const h = clamp(Math.max(drag.y0, drag.y1)) - y;
  if (w <= 0 || h <= 0) return null;
  return { type: 'bbox', x, y, w, h };
}

export function regionFromDrag(drag: DragRect): Region | null {
  const shape = dragToBbox(drag);
  if (!shape) return null;
  return { id: nextRegionId(), shape };
}

function regionBox(region: Region): DOMRect | null {
  if (region.shape.type !== 'bbox') return null;
  const { x, y, w, h } = region.shape;
  return new DOMRect(x, y, w, h);
}

export function renderCanvas(
  container: HTMLElement,
  state: AnnotationState,
  imageUrl: string | null,
): void {
  container.innerHTML = '';
  container.classList.add('canvas-pane');

  if (imageUrl) {
    const img = document.createElement('img');
    img.className = 'canvas-image';
    img.src = imageUrl;
    img.draggable = false;
    container.appendChild(img);
  }

  const overlay = document.createElement('div');
  overlay.className = 'canvas-overlay';
  container.appendChild(overlay);

  for (const region of state.annotation.regions) {
    const box = regionBox(region);
    if (!box) continue;
    const el = document.createElement('div');
    el.className = 'region-box';
    el.dataset.regionId = region.id;
    if (state.selectedRegionId === region.id) el.classList.add('selected');
    el.style.left = `${box.x * 100}%`;
    el.style.top = `${box.y * 100}%`;
    el.style.width = `${box.width * 100}%`;
    el.style.height = `${box.height * 100}%`;
    el.addEventListener('click', (event) => {
      event.stopPropagation();
      state.selectedRegionId = region.id;
      state.setReport(state.report); // notify-only: re-render selection
    });

    const tag = document.createElement('span');
    tag.className = 'region-tag';
    const bound = state.annotation.assignments.filter((a) => a.region_id === region.id);
    tag.textContent = bound.length > 0 ? `${region.id} (${bound.length})` : region.id;
    el.appendChild(tag);
    overlay.appendChild(el);
  }

  attachDragHandlers(overlay, state);
}

function attachDragHandlers(overlay: HTMLElement, state: AnnotationState): void {
  let start: { x: number; y: number } | null = null;

  const toUnit = (event: MouseEvent) => {
    const rect = overlay.getBoundingClientRect();
    const width = rect.width || 1;
    const height = rect.height || 1;
    return {
      x: (event.clientX - rect.left) / width,
      y: (event.clientY - rect.top) / height,
    };
  };

  overlay.addEventListener('mousedown', (event) => {
    start = toUnit(event);
  });
  overlay.addEventListener('mouseup', (event) => {
    if (!start) return;
    const end = toUnit(event);
    const region = regionFromDrag({ x0: start.x, y0: start.y, x1: end.x, y1: end.y });
    start = null;
    if (region) state.addRegion(region);
  });
}
