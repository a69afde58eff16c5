// End-to-end: mount the real app against a real gateway process seeded with
// the demo fixture, then drive it the way a person would. Displayed labels
// are compared against direct gateway answers, never re-derived here.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { Api } from "../src/api.js";
import { App, mount } from "../src/app.js";

interface Gateway {
  proc: ChildProcess;
  base: string;
}

function startGateway(): Promise<Gateway> {
  const dir = mkdtempSync(join(tmpdir(), "facetforge-ui-"));
  const proc = spawn(
    "facetforge",
    ["--data", join(dir, "store.nt"), "serve", "--port", "0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("gateway did not start in time")), 20000);
    let buffer = "";
    proc.stdout!.on("data", (chunk: Buffer) => {
      buffer += String(chunk);
      const match = buffer.match(/serving on port (\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve({ proc, base: `http://127.0.0.1:${match[1]}` });
      }
    });
    proc.on("error", reject);
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`gateway exited before it was ready (code ${code})`));
    });
  });
}

function gridIds(root: HTMLElement): string[] {
  return [...root.querySelectorAll<HTMLElement>(".portlet")].map((card) => card.dataset.id!);
}

function chip(root: HTMLElement, portlet: string): string | null {
  const node = root.querySelector(`[data-id="${portlet}"] .label-chip`);
  return node ? node.textContent : null;
}

async function mountAndSettle(root: HTMLElement, base: string): Promise<App> {
  const app = mount(root, base);
  await app.session.settled();
  return app;
}

describe("against a live seeded gateway", () => {
  let gateway: Gateway;
  let api: Api;
  let root: HTMLElement;

  beforeAll(async () => {
    gateway = await startGateway();
    api = new Api(gateway.base);
    await api.seedDemo();
  });

  afterAll(() => {
    gateway.proc.kill();
  });

  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
  });

  it("shows the speaker's own label and re-resolves on identity switch", async () => {
    const app = await mountAndSettle(root, gateway.base);

    await app.session.switchIdentity("u0");
    expect(chip(root, "p1")).toBe("ferrari");

    await app.session.switchIdentity("audienceA");
    expect(chip(root, "p1")).toBe("sport car");

    await app.session.switchIdentity("audienceB");
    expect(chip(root, "p1")).toBe("expensive car");

    // golden: the chip is exactly what the gateway reports, not a local guess
    const direct = await api.resolve("audienceB", "p1");
    expect(chip(root, "p1")).toBe(direct.label);
  });

  it("identity switcher changes labels through the DOM control too", async () => {
    const app = await mountAndSettle(root, gateway.base);
    await app.session.switchIdentity("u0");

    const select = root.querySelector<HTMLSelectElement>("#identity")!;
    select.value = "audienceA";
    select.dispatchEvent(new Event("change"));
    await app.session.settled();

    expect(chip(root, "p1")).toBe("sport car");
  });

  it("a facet-value click never enlarges the grid", async () => {
    const app = await mountAndSettle(root, gateway.base);
    await app.session.switchIdentity("u0");
    const before = gridIds(root);

    const red = root.querySelector<HTMLButtonElement>(
      '.facet-value[data-facet="color"][data-value="red"]',
    )!;
    red.click();
    await app.session.settled();

    const after = gridIds(root);
    expect(after.length).toBeLessThan(before.length); // strictly shrinks on the demo
    expect(before).toEqual(expect.arrayContaining(after));

    // golden: the grid is exactly the server's member list
    const direct = await api.view("u0");
    expect(after).toEqual(direct.members);
  });

  it("unzoom restores the pre-zoom grid", async () => {
    const app = await mountAndSettle(root, gateway.base);
    await app.session.switchIdentity("fresh-zoomer");
    const before = gridIds(root);

    const group = root.querySelector<HTMLButtonElement>('.zoom-toggle[data-facet="brand"]')!;
    group.click();
    await app.session.settled();
    expect([...root.querySelectorAll(".group-name")].length).toBeGreaterThan(0);

    const ungroup = root.querySelector<HTMLButtonElement>(".unzoom")!;
    ungroup.click();
    await app.session.settled();

    expect(gridIds(root)).toEqual(before);
    expect(root.querySelectorAll(".group-name").length).toBe(0);
  });

  it("surfaces server errors inline and keeps the last good view", async () => {
    const app = await mountAndSettle(root, gateway.base);
    await app.session.switchIdentity("u0");
    const before = gridIds(root);

    await app.session.zoom("color");
    await app.session.zoom("color"); // second zoom on the same facet is rejected

    expect(root.querySelector(".banner")).not.toBeNull();
    expect(gridIds(root).sort()).toEqual(before.sort()); // members unchanged
  });
});

describe("against an empty store", () => {
  let gateway: Gateway;

  beforeAll(async () => {
    gateway = await startGateway();
  });

  afterAll(() => {
    gateway.proc.kill();
  });

  it("renders the empty state instead of crashing", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    await mountAndSettle(root, gateway.base);
    expect(root.querySelector(".empty-state")).not.toBeNull();
    expect(root.querySelectorAll(".portlet").length).toBe(0);
  });
});

describe("with no service at all", () => {
  it("shows a connection banner", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    await mountAndSettle(root, "http://127.0.0.1:9");
    expect(root.querySelector(".banner")).not.toBeNull();
  });
});
