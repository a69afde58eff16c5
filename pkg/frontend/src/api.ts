/** Typed client for the facetforge gateway. Every call maps 1:1 to one
 * endpoint; the UI never derives data these calls can return. */

export type FacetPair = [string, string];

export interface PortletCard {
  id: string;
  kind: string;
  payload_ref: string;
  tags: string[];
  facets: FacetPair[];
  children: string[];
}

export interface ViewPayload {
  members: string[];
  constraints: FacetPair[];
  zoom_stack: string[];
  histograms: Record<string, Record<string, number>>;
  groups: Record<string, string[]>;
  portlets: PortletCard[];
}

export interface ResolvePayload {
  viewer: string;
  speaker: string;
  portlet: string;
  label: string;
  labels: string[];
}

export interface UserInfo {
  id: string;
  interests: string[];
}

export class GatewayError extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
    this.name = "GatewayError";
  }
}

export class Api {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const error = (payload as { error?: { code?: string; message?: string } }).error;
      throw new GatewayError(error?.code ?? "unknown", error?.message ?? response.statusText);
    }
    return payload as T;
  }

  async users(): Promise<UserInfo[]> {
    const body = await this.request<{ users: UserInfo[] }>("GET", "/users");
    return body.users;
  }

  view(user: string): Promise<ViewPayload> {
    return this.request("GET", `/views/${encodeURIComponent(user)}`);
  }

  filter(user: string, facet: string, value: string): Promise<ViewPayload> {
    return this.request("POST", `/views/${encodeURIComponent(user)}/filter`, { facet, value });
  }

  zoom(user: string, facet: string): Promise<ViewPayload> {
    return this.request("POST", `/views/${encodeURIComponent(user)}/zoom`, { facet });
  }

  unzoom(user: string): Promise<ViewPayload> {
    return this.request("POST", `/views/${encodeURIComponent(user)}/zoom`, { unzoom: true });
  }

  reset(user: string): Promise<ViewPayload> {
    return this.request("POST", `/views/${encodeURIComponent(user)}/reset`, {});
  }

  resolve(viewer: string, portlet: string, speaker?: string): Promise<ResolvePayload> {
    const query = speaker ? `?speaker=${encodeURIComponent(speaker)}` : "";
    return this.request(
      "GET",
      `/views/${encodeURIComponent(viewer)}/${encodeURIComponent(portlet)}${query}`,
    );
  }

  seedDemo(): Promise<unknown> {
    return this.request("POST", "/seed-demo", {});
  }
}
