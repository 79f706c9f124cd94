import { beforeEach, describe, expect, it } from 'vitest';

import { dragToBbox, regionFromDrag } from '../src/canvas';
import { AnnotationState, emptyAnnotation, resetRegionCounter } from '../src/state';
import type { Annotation } from '../src/types';

function freshAnnotation(): Annotation {
  return emptyAnnotation('t-1', 'img.png', '1.0.0');
}

describe('dragToBbox', () => {
  it('normalizes a drag regardless of direction', () => {
    const down = dragToBbox({ x0: 0.2, y0: 0.3, x1: 0.6, y1: 0.8 });
    const up = dragToBbox({ x0: 0.6, y0: 0.8, x1: 0.2, y1: 0.3 });
    expect(down).toEqual({
      type: 'bbox',
      x: 0.2,
      y: 0.3,
      w: expect.closeTo(0.4, 10),
      h: expect.closeTo(0.5, 10),
    });
    expect(up).toEqual(down);
  });

  it('clamps to the unit square', () => {
    const box = dragToBbox({ x0: -0.5, y0: 0.5, x1: 1.5, y1: 2.0 });
    expect(box).toEqual({ type: 'bbox', x: 0, y: 0.5, w: 1, h: 0.5 });
  });

  it('rejects degenerate drags', () => {
    expect(dragToBbox({ x0: 0.4, y0: 0.4, x1: 0.4, y1: 0.9 })).toBeNull();
    expect(dragToBbox({ x0: 0.1, y0: 0.2, x1: 0.1, y1: 0.2 })).toBeNull();
    expect(dragToBbox({ x0: -2, y0: 0.1, x1: -1, y1: 0.5 })).toBeNull();
  });
});

describe('regionFromDrag', () => {
  beforeEach(resetRegionCounter);

  it('mints sequential region ids', () => {
    const a = regionFromDrag({ x0: 0, y0: 0, x1: 0.5, y1: 0.5 });
    const b = regionFromDrag({ x0: 0, y0: 0, x1: 0.3, y1: 0.3 });
    expect(a?.id).toBe('r-1');
    expect(b?.id).toBe('r-2');
  });

  it('returns null (and burns no id) for a degenerate drag', () => {
    expect(regionFromDrag({ x0: 0.5, y0: 0.5, x1: 0.5, y1: 0.5 })).toBeNull();
    expect(regionFromDrag({ x0: 0, y0: 0, x1: 0.1, y1: 0.1 })?.id).toBe('r-1');
  });
});

describe('AnnotationState', () => {
  beforeEach(resetRegionCounter);

  it('toggleAssignment adds then removes, flagging dirty', () => {
    const state = new AnnotationState(freshAnnotation());
    expect(state.dirty).toBe(false);

    state.toggleAssignment('comp.type.geometric.s-curve');
    expect(state.hasAssignment('comp.type.geometric.s-curve')).toBe(true);
    expect(state.annotation.assignments[0].confidence).toBe(1.0);
    expect(state.dirty).toBe(true);

    state.toggleAssignment('comp.type.geometric.s-curve');
    expect(state.hasAssignment('comp.type.geometric.s-curve')).toBe(false);
  });

  it('binds assignments to a region when one is given', () => {
    const state = new AnnotationState(freshAnnotation());
    state.addRegion({ id: 'r-1', shape: { type: 'bbox', x: 0, y: 0, w: 1, h: 1 } });
    state.toggleAssignment('comp.fullness.full', 'r-1', 0.8);
    expect(state.annotation.assignments[0]).toEqual({
      node_id: 'comp.fullness.full',
      confidence: 0.8,
      region_id: 'r-1',
    });
  });

  it('removing a region leaves its assignments dangling, not deleted', () => {
    const state = new AnnotationState(freshAnnotation());
    state.addRegion({ id: 'r-1', shape: { type: 'bbox', x: 0, y: 0, w: 1, h: 1 } });
    state.toggleAssignment('comp.fullness.full', 'r-1');
    expect(state.danglingAssignments()).toHaveLength(0);

    state.removeRegion('r-1');
    expect(state.annotation.assignments).toHaveLength(1);
    expect(state.danglingAssignments().map((a) => a.node_id)).toEqual([
      'comp.fullness.full',
    ]);
    expect(state.selectedRegionId).toBeNull();
  });

  it('setConfidence updates an existing assignment only', () => {
    const state = new AnnotationState(freshAnnotation());
    state.toggleAssignment('comp.fullness.full');
    state.setConfidence('comp.fullness.full', 0.5);
    state.setConfidence('comp.fullness.liubai', 0.5);
    expect(state.annotation.assignments).toEqual([
      { node_id: 'comp.fullness.full', confidence: 0.5 },
    ]);
  });

  it('notifies subscribers once per mutation', () => {
    const state = new AnnotationState(freshAnnotation());
    let calls = 0;
    state.subscribe(() => {
      calls += 1;
    });
    state.toggleAssignment('comp.fullness.full');
    state.setReport({ findings: [] });
    expect(calls).toBe(2);
  });

  it('load replaces the annotation and clears dirty and selection', () => {
    const state = new AnnotationState(freshAnnotation());
    state.addRegion({ id: 'r-1', shape: { type: 'bbox', x: 0, y: 0, w: 1, h: 1 } });
    expect(state.dirty).toBe(true);
    expect(state.selectedRegionId).toBe('r-1');

    const stored = { ...freshAnnotation(), revision: 3 };
    state.load(stored);
    expect(state.dirty).toBe(false);
    expect(state.selectedRegionId).toBeNull();
    expect(state.annotation.revision).toBe(3);
  });

  it('findingsForNode matches direct and pair subjects', () => {
    const state = new AnnotationState(freshAnnotation());
    state.setReport({
      findings: [
        {
          severity: 'error',
          code: 'EXCLUSIVE_CONFLICT',
          subject: 'comp.fullness.full|comp.fullness.liubai',
          message: 'both chosen',
        },
        {
          severity: 'warning',
          code: 'RULE_VIOLATION',
          subject: 'light.direction.backlight',
          message: 'implied label missing',
        },
      ],
    });
    expect(state.findingsForNode('comp.fullness.full')).toHaveLength(1);
    expect(state.findingsForNode('comp.fullness.liubai')).toHaveLength(1);
    expect(state.findingsForNode('light.direction.backlight')).toHaveLength(1);
    expect(state.findingsForNode('comp.fullness')).toHaveLength(0);
  });

  it('reorderNarrative moves a segment and renumbers order', () => {
    const state = new AnnotationState(freshAnnotation());
    state.annotation.narrative = [
      { order: 0, region_id: 'r-1', assignment_ids: [] },
      { order: 1, region_id: 'r-2', assignment_ids: [] },
      { order: 2, region_id: 'r-3', assignment_ids: [] },
    ];
    state.reorderNarrative(2, 0);
    expect(state.annotation.narrative.map((s) => s.region_id)).toEqual([
      'r-3',
      'r-1',
      'r-2',
    ]);
    expect(state.annotation.narrative.map((s) => s.order)).toEqual([0, 1, 2]);

    state.reorderNarrative(5, 0);
    state.reorderNarrative(0, -1);
    expect(state.annotation.narrative.map((s) => s.region_id)).toEqual([
      'r-3',
      'r-1',
      'r-2',
    ]);
  });
});
