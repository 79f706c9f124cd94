/**
 * Editing state for one annotation. Pure data operations live here so the
 * panes (tree, canvas, findings) stay thin; every mutation notifies
 * subscribers once.
 */

import type { Annotation, LabelAssignment, Region, ValidationReport } from './types';

export type Listener = () => void;

let regionCounter = 0;

export function nextRegionId(): string {
  regionCounter += 1;
  return `r-${regionCounter}`;
}

export function resetRegionCounter(): void {
  regionCounter = 0;
}

export function emptyAnnotation(
  id: string,
  imageRef: string,
  schemaVersion: string,
  annotatorId = 'webui',
): Annotation {
  return {
    id,
    image_ref: imageRef,
    annotator_id: annotatorId,
    created_at: new Date().toISOString().replace(/\.\d{3}Z$/, 'Z'),
    schema_version: schemaVersion,
    regions: [],
    assignments: [],
    propositions: [],
    narrative: [],
    notes: '',
    revision: 0,
  };
}

export class AnnotationState {
  annotation: Annotation;
  report: ValidationReport = { findings: [] };
  selectedRegionId: string | null = null;
  selectedNodeId: string | null = null;
  dirty = false;

  private listeners: Listener[] = [];

  constructor(annotation: Annotation) {
    this.annotation = annotation;
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn();
  }

  /** Replace the whole annotation (load or post-save confirm). */
  load(ann: Annotation): void {
    this.annotation = ann;
    this.dirty = false;
    this.selectedRegionId = null;
    this.notify();
  }

  addRegion(region: Region): void {
    this.annotation.regions.push(region);
    this.selectedRegionId = region.id;
    this.dirty = true;
    this.notify();
  }

  /** Remove a region; assignments pointing at it become dangling and are
   * surfaced by validation rather than silently deleted. */
  removeRegion(regionId: string): void {
    this.annotation.regions = this.annotation.regions.filter((r) => r.id !== regionId);
    if (this.selectedRegionId === regionId) this.selectedRegionId = null;
    this.dirty = true;
    this.notify();
  }

  danglingAssignments(): LabelAssignment[] {
    const known = new Set(this.annotation.regions.map((r) => r.id));
    return this.annotation.assignments.filter(
      (a) => a.region_id !== undefined && !known.has(a.region_id),
    );
  }

  hasAssignment(nodeId: string): boolean {
    return this.annotation.assignments.some((a) => a.node_id === nodeId);
  }

  /** Attach a label, optionally bound to a region; repeat calls toggle off. */
  toggleAssignment(nodeId: string, regionId?: string, confidence = 1.0): void {
    if (this.hasAssignment(nodeId)) {
      this.annotation.assignments = this.annotation.assignments.filter(
        (a) => a.node_id !== nodeId,
      );
    } else {
      const assignment: LabelAssignment = { node_id: nodeId, confidence };
      if (regionId !== undefined) assignment.region_id = regionId;
      this.annotation.assignments.push(assignment);
    }
    this.dirty = true;
    this.notify();
  }

  setConfidence(nodeId: string, confidence: number): void {
    const hit = this.annotation.assignments.find((a) => a.node_id === nodeId);
    if (!hit) return;
    hit.confidence = confidence;
    this.dirty = true;
    this.notify();
  }

  setReport(report: ValidationReport): void {
    this.report = report;
    this.notify();
  }

  /** Error findings whose subject involves the given node id. The rule
   * engine writes pair subjects as "first|second". */
  findingsForNode(nodeId: string) {
    return this.report.findings.filter(
      (f) => f.subject === nodeId || f.subject.split('|').includes(nodeId),
    );
  }

  reorderNarrative(fromIndex: number, toIndex: number): void {
    const segments = this.annotation.narrative;
    if (fromIndex < 0 || fromIndex >= segments.length) return;
    if (toIndex < 0 || toIndex >= segments.length) return;
    const [moved] = segments.splice(fromIndex, 1);
    segments.splice(toIndex, 0, moved);
    segments.forEach((seg, i) => {
      seg.order = i;
    });
    this.dirty = true;
    this.notify();
  }
}
