/**
 * Engine client: spawns `... serve --stdio`, frames one JSON-RPC message
 * per line, and matches responses to requests by id.
 *
 * The extension performs no ranking, parsing, or key generation of its
 * own; everything flows through this client, so byte-identical engine
 * responses always yield identical popup content.
 */

import { ChildProcessWithoutNullStreams, spawn } from "child_process";
import {
  Candidate,
  EngineConfig,
  ResolveParams,
  ResolveResult,
  RpcError,
  SelectParams,
  SelectResult,
} from "./protocol";

export interface EngineOptions {
  /** executable to launch, e.g. "incite" or "python3" */
  command: string;
  /** arguments placed before `serve --stdio`, e.g. ["-m", "incite"] */
  args?: string[];
  cwd?: string;
  /** replay fixtures directory; offline when set */
  replayDir?: string;
  /** session settings forwarded via overcite/config right after launch */
  config?: EngineConfig;
  requestTimeoutMs?: number;
}

interface Pending {
  resolve: (value: unknown) => void;
  reject: (error: Error) => void;
  timer: NodeJS.Timeout;
}

export class EngineCrashed extends Error {
  constructor(detail: string) {
    super(`citation engine exited unexpectedly: ${detail}`);
    this.name = "EngineCrashed";
  }
}

export class EngineClient {
  private child: ChildProcessWithoutNullStreams | null = null;
  private pending = new Map<number, Pending>();
  private nextId = 1;
  private buffer = "";
  private stderrTail = "";
  private configured = false;

  constructor(private readonly options: EngineOptions) {}

  private serveArgs(): string[] {
    const args = [...(this.options.args ?? []), "serve", "--stdio"];
    if (this.options.replayDir) {
      args.push("--replay", this.options.replayDir);
    }
    return args;
  }

  private ensureProcess(): ChildProcessWithoutNullStreams {
    if (this.child && this.child.exitCode === null && !this.child.killed) {
      return this.child;
    }
    const child = spawn(this.options.command, this.serveArgs(), {
      cwd: this.options.cwd,
      stdio: ["pipe", "pipe", "pipe"],
    });
    child.stdout.setEncoding("utf8");
    child.stderr.setEncoding("utf8");
    child.stdout.on("data", (chunk: string) => this.onData(chunk));
    child.stderr.on("data", (chunk: string) => {
      this.stderrTail = (this.stderrTail + chunk).slice(-2000);
    });
    child.on("exit", () => this.failPending());
    child.on("error", () => this.failPending());
    this.child = child;
    this.buffer = "";
    this.configured = false;
    return child;
  }

  private onData(chunk: string): void {
    this.buffer += chunk;
    let newline = this.buffer.indexOf("\n");
    while (newline !== -1) {
      const line = this.buffer.slice(0, newline).trim();
      this.buffer = this.buffer.slice(newline + 1);
      if (line) {
        this.dispatch(line);
      }
      newline = this.buffer.indexOf("\n");
    }
  }

  private dispatch(line: string): void {
    let message: any;
    try {
      message = JSON.parse(line);
    } catch {
      return; // stray output; the engine only writes JSON-RPC lines
    }
    const entry = this.pending.get(message?.id);
    if (!entry) {
      return;
    }
    this.pending.delete(message.id);
    clearTimeout(entry.timer);
    if (message.error) {
      entry.reject(new RpcError(message.error.code, message.error.message, message.error.data));
    } else {
      entry.resolve(message.result);
    }
  }

  private failPending(): void {
    const crash = new EngineCrashed(this.stderrTail.trim() || "no stderr output");
    for (const [, entry] of this.pending) {
      clearTimeout(entry.timer);
      entry.reject(crash);
    }
    this.pending.clear();
  }

  private send(method: string, params: unknown): Promise<unknown> {
    const child = this.ensureProcess();
    const id = this.nextId++;
    const timeoutMs = this.options.requestTimeoutMs ?? 30000;
    return new Promise<unknown>((resolve, reject) => {
      const timer = setTimeout(() => {
        this.pending.delete(id);
        reject(new Error(`engine request ${method} timed out after ${timeoutMs}ms`));
      }, timeoutMs);
      this.pending.set(id, { resolve, reject, timer });
      const frame = JSON.stringify({ jsonrpc: "2.0", id, method, params });
      child.stdin.write(frame + "\n", (error) => {
        if (error) {
          this.pending.delete(id);
          clearTimeout(timer);
          reject(new EngineCrashed(error.message));
        }
      });
    });
  }

  /** One automatic restart on crash; a second failure propagates. */
  private async request(method: string, params: unknown): Promise<unknown> {
    await this.forwardConfigOnce();
    try {
      return await this.send(method, params);
    } catch (error) {
      if (error instanceof EngineCrashed) {
        this.child = null;
        this.configured = false;
        await this.forwardConfigOnce();
        return await this.send(method, params);
      }
      throw error;
    }
  }

  private async forwardConfigOnce(): Promise<void> {
    if (this.configured) {
      return;
    }
    this.configured = true; // before sending: config uses the raw channel
    const config = this.options.config ?? {};
    const set = Object.fromEntries(
      Object.entries(config).filter(([, value]) => value !== undefined && value !== "")
    );
    if (Object.keys(set).length > 0) {
      await this.send("overcite/config", { set });
    }
  }

  resolve(params: ResolveParams): Promise<ResolveResult> {
    return this.request("overcite/resolve", params) as Promise<ResolveResult>;
  }

  select(params: SelectParams): Promise<SelectResult> {
    return this.request("overcite/select", params) as Promise<SelectResult>;
  }

  scan(text: string): Promise<unknown> {
    return this.request("overcite/scan", { text });
  }

  getConfig(): Promise<Record<string, unknown>> {
    return this.request("overcite/config", {}) as Promise<Record<string, unknown>>;
  }

  get running(): boolean {
    return this.child !== null && this.child.exitCode === null && !this.child.killed;
  }

  /** test hook: hard-kill the child to simulate a crash */
  killForTesting(): void {
    this.child?.kill("SIGKILL");
  }

  dispose(): void {
    if (this.child) {
      this.child.stdin.end();
      this.child.kill();
      this.child = null;
    }
    this.failPending();
  }
}

/** Quick-pick main label: Title — First Author et al. (Year), Venue · N citations */
export function formatCandidate(candidate: Candidate): string {
  const first = candidate.authors[0] ?? "(anonymous)";
  const etAl = candidate.authors.length > 1 ? " et al." : "";
  const venue = candidate.pub ? `, ${candidate.pub}` : "";
  return `${candidate.title} — ${first}${etAl} (${candidate.year})${venue} · ${candidate.citation_count} citations`;
}

export function formatScore(candidate: Candidate): string {
  const c = candidate.score_components;
  return (
    `score ${candidate.score_total.toFixed(1)} ` +
    `(author ${c.author}, year ${c.year}, initial ${c.initial}, ` +
    `context ${c.context.toFixed(1)}, popularity ${c.popularity.toFixed(1)})`
  );
}
