/**
 * Integration tests against the real engine process: spawn
 * `python3 -m incite serve --stdio --replay ...` on a throwaway copy of
 * the sample project and drive it exactly the way the extension does.
 */

import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";
import { EngineClient, formatCandidate } from "../src/client";
import { applyTexEdit, byteOffsetOf } from "../src/offsets";
import { RpcError } from "../src/protocol";

const REPO_ROOT = path.resolve(__dirname, "..", "..");
const REPLAY_DIR = path.join(REPO_ROOT, "tests", "fixtures", "replay");
const PROJECT_DIR = path.join(REPO_ROOT, "tests", "fixtures", "project");
const FIXTURE_BIBCODE = "2025ApJ...985...10S";

let workDir: string;
let client: EngineClient;

function makeClient(config?: Record<string, string>): EngineClient {
  return new EngineClient({
    command: "python3",
    args: ["-m", "incite"],
    cwd: workDir,
    replayDir: REPLAY_DIR,
    config,
    requestTimeoutMs: 30000,
  });
}

function readProject(name: string): string {
  return fs.readFileSync(path.join(workDir, name), "utf8");
}

function placeholderOffset(text: string): number {
  return byteOffsetOf(text, text.indexOf("Shariat25"));
}

beforeEach(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "incite-ext-"));
  for (const name of fs.readdirSync(PROJECT_DIR)) {
    fs.copyFileSync(path.join(PROJECT_DIR, name), path.join(workDir, name));
  }
  client = makeClient();
});

afterEach(() => {
  client.dispose();
  fs.rmSync(workDir, { recursive: true, force: true });
});

describe("resolve through the replay engine", () => {
  it("lists the fixture paper first in the quick pick", async () => {
    const text = readProject("main.tex");
    const result = await client.resolve({ text, offset: placeholderOffset(text) });
    expect(result.candidates[0].bibcode).toBe(FIXTURE_BIBCODE);
    expect(result.cue.surname).toBe("Shariat");
    const label = formatCandidate(result.candidates[0]);
    expect(label).toContain("Wide Stellar Triples Drive White Dwarf Mergers");
    expect(label).toContain("Shariat, C. et al. (2025)");
    expect(label).toContain("citations");
  });

  it("is a thin client: identical responses give identical popup content", async () => {
    const text = readProject("main.tex");
    const first = await client.resolve({ text, offset: placeholderOffset(text) });
    const second = await client.resolve({ text, offset: placeholderOffset(text) });
    expect(second).toEqual(first);
    expect(second.candidates.map(formatCandidate)).toEqual(
      first.candidates.map(formatCandidate)
    );
  });

  it("maps cursor-outside-citation to RpcError -32001", async () => {
    const text = readProject("main.tex");
    await expect(client.resolve({ text, offset: 0 })).rejects.toMatchObject({
      name: "RpcError",
      code: -32001,
    });
    try {
      await client.resolve({ text, offset: 0 });
    } catch (error) {
      expect((error as RpcError).friendlyMessage).toContain("citation command");
    }
  });
});

describe("select through the replay engine", () => {
  it("edits the buffer to the final key and writes the bibliography", async () => {
    const text = readProject("main.tex");
    const offset = placeholderOffset(text);
    const selection = await client.select({ text, offset, bibcode: FIXTURE_BIBCODE });

    expect(selection.final_key).toBe("Shariat2025");
    // the tex edit comes back for the editor to apply to its buffer
    const buffer = applyTexEdit(text, selection.edits.tex_edit);
    expect(buffer).toContain("\\citep{Shariat2025}");
    expect(buffer).not.toContain("\\citep{Shariat25}");
    // the manuscript file on disk is untouched (editor owns the buffer)
    expect(readProject("main.tex")).toBe(text);
    // the bibliography was written engine-side
    expect(readProject("refs.bib")).toContain("@ARTICLE{Shariat2025");
  });

  it("cancel path: no select call leaves buffer and bib unchanged", async () => {
    const text = readProject("main.tex");
    const bibBefore = readProject("refs.bib");
    await client.resolve({ text, offset: placeholderOffset(text) });
    // the user pressed escape: the extension never calls select
    expect(readProject("main.tex")).toBe(text);
    expect(readProject("refs.bib")).toBe(bibBefore);
  });

  it("reuses the existing entry on repeat selection", async () => {
    const text = readProject("main.tex");
    const offset = placeholderOffset(text);
    const first = await client.select({ text, offset, bibcode: FIXTURE_BIBCODE });
    expect(first.edits.reused_existing).toBe(false);
    const bibAfterFirst = readProject("refs.bib");
    const second = await client.select({ text, offset, bibcode: FIXTURE_BIBCODE });
    expect(second.edits.reused_existing).toBe(true);
    expect(readProject("refs.bib")).toBe(bibAfterFirst);
  });

  it("forwards settings: key style produces a lowercase key", async () => {
    client.dispose();
    client = makeClient({ key_style: "authoryear" });
    const text = readProject("main.tex");
    const selection = await client.select({
      text,
      offset: placeholderOffset(text),
      bibcode: FIXTURE_BIBCODE,
    });
    expect(selection.final_key).toBe("shariat2025");
  });
});

describe("engine lifecycle", () => {
  it("restarts once after a crash", async () => {
    const text = readProject("main.tex");
    await client.resolve({ text, offset: placeholderOffset(text) });
    client.killForTesting();
    const result = await client.resolve({ text, offset: placeholderOffset(text) });
    expect(result.candidates[0].bibcode).toBe(FIXTURE_BIBCODE);
    expect(client.running).toBe(true);
  });
});
