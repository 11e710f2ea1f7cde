import {
  CameraJson,
  CriticalPointsResponse,
  MeshJson,
  SelectOptions,
  SelectionJson,
  SessionInfo,
  StreamlineJson,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServerError extends Error {
  constructor(
    public status: number,
    public error: string,
    public detail: string,
  ) {
    super(`${error}: ${detail}`);
  }
}

/** Thin typed wrapper over the geometry server routes. The fetch function is
 * injectable so tests can mock the network. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ServerError(resp.status, body.error ?? "error", body.detail ?? "");
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createSession(
    path: string,
    scalarField: string,
    vectorField: string,
  ): Promise<SessionInfo> {
    return this.post("/sessions", {
      path,
      scalar_field: scalarField,
      vector_field: vectorField,
    });
  }

  addIsosurface(sid: string, isovalue: number, opacity: number) {
    return this.post<{ surface_index: number; triangle_count: number }>(
      `/sessions/${sid}/isosurfaces`,
      { isovalue, opacity },
    );
  }

  buildCandidates(sid: string, params: Record<string, number>) {
    return this.post<{ candidate_count: number }>(
      `/sessions/${sid}/candidates`,
      params,
    );
  }

  select(
    sid: string,
    camera: CameraJson,
    options: SelectOptions,
  ): Promise<SelectionJson> {
    return this.post(`/sessions/${sid}/select`, { camera, ...options });
  }

  getMeshes(sid: string): Promise<MeshJson[]> {
    return this.request(`/sessions/${sid}/geometry?what=meshes`);
  }

  getStreamlines(sid: string): Promise<StreamlineJson[]> {
    return this.request(`/sessions/${sid}/geometry?what=streamlines`);
  }

  getCriticalPoints(sid: string): Promise<CriticalPointsResponse> {
    return this.request(`/sessions/${sid}/criticalpoints`);
  }

  deleteSession(sid: string) {
    return this.request<{ deleted: string }>(`/sessions/${sid}`, {
      method: "DELETE",
    });
  }
}
