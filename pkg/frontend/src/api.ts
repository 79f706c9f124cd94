/**
 * Thin typed client for the annotation service. All persistence goes
 * through here; the UI never touches files directly.
 */

import type {
  Annotation,
  FeatureVector,
  Schema,
  Suggestion,
  ValidationReport,
} from './types';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly report?: ValidationReport,
  ) {
    super(message);
  }
}

/** Save was refused because the stored revision moved on (HTTP 409). */
export class RevisionConflictError extends ApiError {}

async function parseError(resp: Response): Promise<ApiError> {
  let body: unknown = null;
  try {
    body = await resp.json();
  } catch {
    // non-JSON error body; fall through with the status line only
  }
  const asRecord = (body ?? {}) as Record<string, unknown>;
  const report = Array.isArray(asRecord.findings)
    ? (body as ValidationReport)
    : undefined;
  const message =
    typeof asRecord.error === 'string' ? asRecord.error : `HTTP ${resp.status}`;
  if (resp.status === 409) return new RevisionConflictError(resp.status, message);
  return new ApiError(resp.status, message, report);
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.base + path);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async getSchema(): Promise<Schema> {
    return this.getJson<Schema>('/schema');
  }

  async listAnnotations(): Promise<string[]> {
    const body = await this.getJson<{ annotations: string[] }>('/annotations');
    return body.annotations;
  }

  async getAnnotation(id: string): Promise<Annotation> {
    return this.getJson<Annotation>(`/annotations/${encodeURIComponent(id)}`);
  }

  /** POST-then-confirm save; resolves to the stored copy (bumped revision). */
  async saveAnnotation(ann: Annotation): Promise<Annotation> {
    const resp = await fetch(`${this.base}/annotations`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(ann),
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as Annotation;
  }

  /** Validate without persisting; a clean report has zero findings. */
  async validateAnnotation(ann: Annotation): Promise<ValidationReport> {
    const resp = await fetch(
      `${this.base}/annotations/${encodeURIComponent(ann.id)}/validate`,
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(ann),
      },
    );
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as ValidationReport;
  }

  async listImages(): Promise<string[]> {
    const body = await this.getJson<{ images: string[] }>('/images');
    return body.images;
  }

  imageUrl(name: string): string {
    return `${this.base}/images/${encodeURIComponent(name)}`;
  }

  async getFeatures(name: string): Promise<FeatureVector> {
    return this.getJson<FeatureVector>(`/features/${encodeURIComponent(name)}`);
  }

  async suggest(features: FeatureVector): Promise<Suggestion[]> {
    const resp = await fetch(`${this.base}/suggest`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(features),
    });
    if (!resp.ok) throw await parseError(resp);
    const body = (await resp.json()) as { suggestions: Suggestion[] };
    return body.suggestions;
  }
}
