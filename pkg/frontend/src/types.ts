/**
 * Mirrors of the JSON payloads served by the annotation service.
 * The Python package is the single source of truth for these shapes.
 */

export interface MeasurableCriterion {
  feature_key: string;
  comparator: 'ge' | 'le' | 'in_range';
  threshold: number | [number, number];
  note?: string;
}

export interface SchemaNode {
  id: string;
  name_zh: string;
  name_en: string;
  level: number;
  kind: 'dimension' | 'category' | 'label';
  parent_id?: string;
  definition: string;
  scenarios: string[];
  criteria: MeasurableCriterion[];
  cultural_origin: 'western' | 'chinese' | 'fused' | 'universal';
  child_selection: 'exclusive' | 'multiple';
}

export interface ConsistencyRule {
  id: string;
  kind: 'mutually_exclusive' | 'implies' | 'requires_any';
  nodes: string[];
  severity: 'error' | 'warning';
  provenance: string;
  suppressed_by?: string[];
}

export interface Schema {
  version: string;
  nodes: SchemaNode[];
  rules: ConsistencyRule[];
}

export interface BboxShape {
  type: 'bbox';
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface PolygonShape {
  type: 'polygon';
  points: [number, number][];
}

export interface Region {
  id: string;
  shape: BboxShape | PolygonShape;
}

export interface LabelAssignment {
  node_id: string;
  confidence: number;
  region_id?: string;
  id?: string;
}

export interface SpatialRelation {
  subject: string;
  relation: string;
  object: string;
}

export interface NarrativeSegment {
  order: number;
  region_id: string;
  assignment_ids: string[];
}

export interface Annotation {
  id: string;
  image_ref: string;
  annotator_id: string;
  created_at: string;
  schema_version: string;
  regions: Region[];
  assignments: LabelAssignment[];
  propositions: SpatialRelation[];
  narrative: NarrativeSegment[];
  notes: string;
  revision: number;
}

export interface Finding {
  severity: 'error' | 'warning';
  code: string;
  subject: string;
  message: string;
}

export interface ValidationReport {
  findings: Finding[];
}

export type FeatureVector = Record<string, number>;

export interface Suggestion {
  node_id: string;
  satisfied_criteria: string[];
  score: number;
}
