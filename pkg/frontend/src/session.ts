/** One browser session: the chosen identity plus the latest server
 * snapshots. Actions queue behind each other; each one issues a gateway
 * call and republishes state from the response. Optimistic updates are
 * deliberately absent, and failures leave the last good state in place. */

import { Api, ResolvePayload, UserInfo, ViewPayload } from "./api.js";

export interface SessionState {
  user: string;
  users: UserInfo[];
  view: ViewPayload | null;
  /** portlet id -> label the server resolved for the current identity */
  labels: Record<string, string>;
  error: string | null;
}

export type Listener = (state: SessionState) => void;

export class Session {
  state: SessionState = { user: "guest", users: [], view: null, labels: {}, error: null };
  private queue: Promise<void> = Promise.resolve();

  constructor(private api: Api, private listener: Listener) {}

  /** Resolves when every action queued so far has been applied. */
  settled(): Promise<void> {
    return this.queue;
  }

  start(): Promise<void> {
    return this.run(async () => {
      const users = await this.api.users();
      const user = users.length > 0 ? users[0].id : "guest";
      this.state = { ...this.state, users, user };
      await this.refresh();
    });
  }

  switchIdentity(user: string): Promise<void> {
    return this.run(async () => {
      this.state = { ...this.state, user };
      await this.refresh();
    });
  }

  filter(facet: string, value: string): Promise<void> {
    return this.run(async () => {
      await this.takeView(this.api.filter(this.state.user, facet, value));
    });
  }

  zoom(facet: string): Promise<void> {
    return this.run(async () => {
      await this.takeView(this.api.zoom(this.state.user, facet));
    });
  }

  unzoom(): Promise<void> {
    return this.run(async () => {
      await this.takeView(this.api.unzoom(this.state.user));
    });
  }

  reset(): Promise<void> {
    return this.run(async () => {
      await this.takeView(this.api.reset(this.state.user));
    });
  }

  private async refresh(): Promise<void> {
    await this.takeView(this.api.view(this.state.user));
  }

  private async takeView(pending: Promise<ViewPayload>): Promise<void> {
    const view = await pending;
    const labels = await this.resolveLabels(view);
    this.state = { ...this.state, view, labels, error: null };
  }

  private async resolveLabels(view: ViewPayload): Promise<Record<string, string>> {
    const labels: Record<string, string> = {};
    const cards = view.portlets.filter((p) => p.tags.length > 0);
    const resolved = await Promise.all(
      cards.map((p) =>
        this.api.resolve(this.state.user, p.id).catch(() => null as ResolvePayload | null),
      ),
    );
    cards.forEach((p, i) => {
      const answer = resolved[i];
      if (answer && answer.label) {
        labels[p.id] = answer.label;
      }
    });
    return labels;
  }

  private run(action: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(async () => {
      try {
        await action();
      } catch (error) {
        this.state = { ...this.state, error: error instanceof Error ? error.message : String(error) };
      }
      this.listener(this.state);
    });
    return this.queue;
  }
}
