/** Wires api, session, and renderer together. Kept separate from main.ts so
 * tests can mount the full app against any base URL. */

import { Api } from "./api.js";
import { Actions, render } from "./render.js";
import { Session } from "./session.js";

export interface App {
  api: Api;
  session: Session;
}

export function mount(root: HTMLElement, baseUrl: string): App {
  const api = new Api(baseUrl);
  const session: Session = new Session(api, (state) => render(root, state, actions));
  const actions: Actions = {
    switchIdentity: (user) => void session.switchIdentity(user),
    filter: (facet, value) => void session.filter(facet, value),
    zoom: (facet) => void session.zoom(facet),
    unzoom: () => void session.unzoom(),
    reset: () => void session.reset(),
  };
  render(root, session.state, actions);
  void session.start();
  return { api, session };
}
