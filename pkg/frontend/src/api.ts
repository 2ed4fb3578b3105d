import type {
  AnnotationPayload,
  Category,
  NextResponse,
  ScoresResponse,
  SessionMeta,
  SubmitAck,
} from './types.js';

export class ApiError extends Error {
  constructor(message: string, readonly status: number | null) {
    super(message);
    this.name = 'ApiError';
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (error) {
    throw new ApiError(`network failure: ${String(error)}`, null);
  }
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (body && body.detail !== undefined) {
        detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(detail, response.status);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path;
  }

  categories(): Promise<Category[]> {
    return request<Category[]>(this.url('/categories'));
  }

  sessionMeta(sessionId: string): Promise<SessionMeta> {
    return request<SessionMeta>(this.url(`/sessions/${encodeURIComponent(sessionId)}`));
  }

  next(sessionId: string, annotatorId: string): Promise<NextResponse> {
    const query = `?annotator=${encodeURIComponent(annotatorId)}`;
    return request<NextResponse>(this.url(`/sessions/${encodeURIComponent(sessionId)}/next${query}`));
  }

  submit(sessionId: string, payload: AnnotationPayload): Promise<SubmitAck> {
    return request<SubmitAck>(this.url(`/sessions/${encodeURIComponent(sessionId)}/annotations`), {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  scores(sessionId: string): Promise<ScoresResponse> {
    return request<ScoresResponse>(this.url(`/sessions/${encodeURIComponent(sessionId)}/scores`));
  }
}
