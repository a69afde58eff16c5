/** DOM rendering. Pure projection of SessionState: every count and label
 * comes straight out of the last server payload. */

import { PortletCard } from "./api.js";
import { SessionState } from "./session.js";

export interface Actions {
  switchIdentity(user: string): void;
  filter(facet: string, value: string): void;
  zoom(facet: string): void;
  unzoom(): void;
  reset(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function header(state: SessionState, actions: Actions): HTMLElement {
  const bar = el("header", "topbar");
  bar.append(el("h1", "title", "facetforge"));

  const picker = el("label", "identity", "identity ");
  const select = el("select");
  select.id = "identity";
  const ids = state.users.map((u) => u.id);
  if (!ids.includes(state.user)) ids.unshift(state.user);
  for (const id of ids) {
    const option = el("option", undefined, id);
    option.value = id;
    option.selected = id === state.user;
    select.append(option);
  }
  select.addEventListener("change", () => actions.switchIdentity(select.value));
  picker.append(select);
  bar.append(picker);
  return bar;
}

function positionIndicator(state: SessionState): HTMLElement {
  const parts: string[] = [];
  for (const [name, value] of state.view?.constraints ?? []) {
    parts.push(`${name} = ${value}`);
  }
  for (const facet of state.view?.zoom_stack ?? []) {
    parts.push(`grouped by ${facet}`);
  }
  return el("p", "position", parts.length > 0 ? parts.join(" and ") : "all items");
}

function sidebar(state: SessionState, actions: Actions): HTMLElement {
  const view = state.view!;
  const aside = el("aside", "sidebar");

  for (const facet of Object.keys(view.histograms).sort()) {
    const section = el("section", "facet-group");
    const head = el("h3", undefined, facet);
    const grouping = el("button", "zoom-toggle", "group");
    grouping.dataset.facet = facet;
    if (view.zoom_stack.includes(facet)) {
      grouping.disabled = true;
      grouping.textContent = "grouping";
    }
    grouping.addEventListener("click", () => actions.zoom(facet));
    head.append(grouping);
    section.append(head);

    const values = view.histograms[facet];
    for (const value of Object.keys(values).sort()) {
      const row = el("button", "facet-value");
      row.dataset.facet = facet;
      row.dataset.value = value;
      row.append(el("span", "facet-value-name", value));
      row.append(el("span", "facet-value-count", String(values[value])));
      row.addEventListener("click", () => actions.filter(facet, value));
      section.append(row);
    }
    aside.append(section);
  }

  const controls = el("div", "controls");
  const ungroup = el("button", "unzoom", "ungroup");
  ungroup.disabled = view.zoom_stack.length === 0;
  ungroup.addEventListener("click", () => actions.unzoom());
  const clear = el("button", "reset", "clear filters");
  clear.addEventListener("click", () => actions.reset());
  controls.append(ungroup, clear);
  aside.append(controls);
  return aside;
}

function card(portlet: PortletCard, state: SessionState): HTMLElement {
  const node = el("article", "portlet");
  node.dataset.id = portlet.id;
  const head = el("h4", undefined, portlet.id);
  head.append(el("span", "kind", portlet.kind));
  node.append(head);

  const label = state.labels[portlet.id];
  if (label) {
    node.append(el("span", "label-chip", label));
  }
  if (portlet.tags.length > 0) {
    node.append(el("p", "tags", portlet.tags.map((t) => `#${t}`).join(" ")));
  }
  if (portlet.facets.length > 0) {
    node.append(el("p", "facets", portlet.facets.map(([n, v]) => `${n}:${v}`).join(" ")));
  }
  if (portlet.children.length > 0) {
    node.append(el("p", "children", `composed of ${portlet.children.join(", ")}`));
  }
  return node;
}

function grid(state: SessionState): HTMLElement {
  const view = state.view!;
  const main = el("main", "content");
  main.append(positionIndicator(state));

  if (view.members.length === 0) {
    main.append(el("p", "empty-state", "Nothing to show yet. Add portlets or load the demo seed."));
    return main;
  }

  const byId = new Map(view.portlets.map((p) => [p.id, p]));
  const renderInto = (target: HTMLElement, ids: string[]) => {
    for (const id of ids) {
      const portlet = byId.get(id);
      if (portlet) target.append(card(portlet, state));
    }
  };

  if (view.zoom_stack.length === 0) {
    const flat = el("div", "grid");
    renderInto(flat, view.members);
    main.append(flat);
    return main;
  }

  const grouped = new Set<string>();
  for (const value of Object.keys(view.groups).sort()) {
    const section = el("section", "group");
    section.append(el("h3", "group-name", value));
    const box = el("div", "grid");
    renderInto(box, view.groups[value]);
    section.append(box);
    main.append(section);
    view.groups[value].forEach((id) => grouped.add(id));
  }
  const leftover = view.members.filter((id) => !grouped.has(id));
  if (leftover.length > 0) {
    const section = el("section", "group");
    const facet = view.zoom_stack[view.zoom_stack.length - 1];
    section.append(el("h3", "group-name", `(no ${facet})`));
    const box = el("div", "grid");
    renderInto(box, leftover);
    section.append(box);
    main.append(section);
  }
  return main;
}

export function render(root: HTMLElement, state: SessionState, actions: Actions): void {
  root.replaceChildren();
  root.append(header(state, actions));
  if (state.error) {
    root.append(el("div", "banner", `service trouble: ${state.error}`));
  }
  if (!state.view) {
    root.append(el("p", "loading", "loading..."));
    return;
  }
  const layout = el("div", "layout");
  layout.append(sidebar(state, actions), grid(state));
  root.append(layout);
}
