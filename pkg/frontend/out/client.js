"use strict";
/**
 * Engine client: spawns `... serve --stdio`, frames one JSON-RPC message
 * per line, and matches responses to requests by id.
 *
 * The extension performs no ranking, parsing, or key generation of its
 * own; everything flows through this client, so byte-identical engine
 * responses always yield identical popup content.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.EngineClient = exports.EngineCrashed = void 0;
exports.formatCandidate = formatCandidate;
exports.formatScore = formatScore;
const child_process_1 = require("child_process");
const protocol_1 = require("./protocol");
class EngineCrashed extends Error {
    constructor(detail) {
        super(`citation engine exited unexpectedly: ${detail}`);
        this.name = "EngineCrashed";
    }
}
exports.EngineCrashed = EngineCrashed;
class EngineClient {
    options;
    child = null;
    pending = new Map();
    nextId = 1;
    buffer = "";
    stderrTail = "";
    configured = false;
    constructor(options) {
        this.options = options;
    }
    serveArgs() {
        const args = [...(this.options.args ?? []), "serve", "--stdio"];
        if (this.options.replayDir) {
            args.push("--replay", this.options.replayDir);
        }
        return args;
    }
    ensureProcess() {
        if (this.child && this.child.exitCode === null && !this.child.killed) {
            return this.child;
        }
        const child = (0, child_process_1.spawn)(this.options.command, this.serveArgs(), {
            cwd: this.options.cwd,
            stdio: ["pipe", "pipe", "pipe"],
        });
        child.stdout.setEncoding("utf8");
        child.stderr.setEncoding("utf8");
        child.stdout.on("data", (chunk) => this.onData(chunk));
        child.stderr.on("data", (chunk) => {
            this.stderrTail = (this.stderrTail + chunk).slice(-2000);
        });
        child.on("exit", () => this.failPending());
        child.on("error", () => this.failPending());
        this.child = child;
        this.buffer = "";
        this.configured = false;
        return child;
    }
    onData(chunk) {
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
    dispatch(line) {
        let message;
        try {
            message = JSON.parse(line);
        }
        catch {
            return; // stray output; the engine only writes JSON-RPC lines
        }
        const entry = this.pending.get(message?.id);
        if (!entry) {
            return;
        }
        this.pending.delete(message.id);
        clearTimeout(entry.timer);
        if (message.error) {
            entry.reject(new protocol_1.RpcError(message.error.code, message.error.message, message.error.data));
        }
        else {
            entry.resolve(message.result);
        }
    }
    failPending() {
        const crash = new EngineCrashed(this.stderrTail.trim() || "no stderr output");
        for (const [, entry] of this.pending) {
            clearTimeout(entry.timer);
            entry.reject(crash);
        }
        this.pending.clear();
    }
    send(method, params) {
        const child = this.ensureProcess();
        const id = this.nextId++;
        const timeoutMs = this.options.requestTimeoutMs ?? 30000;
        return new Promise((resolve, reject) => {
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
    async request(method, params) {
        await this.forwardConfigOnce();
        try {
            return await this.send(method, params);
        }
        catch (error) {
            if (error instanceof EngineCrashed) {
                this.child = null;
                this.configured = false;
                await this.forwardConfigOnce();
                return await this.send(method, params);
            }
            throw error;
        }
    }
    async forwardConfigOnce() {
        if (this.configured) {
            return;
        }
        this.configured = true; // before sending: config uses the raw channel
        const config = this.options.config ?? {};
        const set = Object.fromEntries(Object.entries(config).filter(([, value]) => value !== undefined && value !== ""));
        if (Object.keys(set).length > 0) {
            await this.send("overcite/config", { set });
        }
    }
    resolve(params) {
        return this.request("overcite/resolve", params);
    }
    select(params) {
        return this.request("overcite/select", params);
    }
    scan(text) {
        return this.request("overcite/scan", { text });
    }
    getConfig() {
        return this.request("overcite/config", {});
    }
    get running() {
        return this.child !== null && this.child.exitCode === null && !this.child.killed;
    }
    /** test hook: hard-kill the child to simulate a crash */
    killForTesting() {
        this.child?.kill("SIGKILL");
    }
    dispose() {
        if (this.child) {
            this.child.stdin.end();
            this.child.kill();
            this.child = null;
        }
        this.failPending();
    }
}
exports.EngineClient = EngineClient;
/** Quick-pick main label: Title — First Author et al. (Year), Venue · N citations */
function formatCandidate(candidate) {
    const first = candidate.authors[0] ?? "(anonymous)";
    const etAl = candidate.authors.length > 1 ? " et al." : "";
    const venue = candidate.pub ? `, ${candidate.pub}` : "";
    return `${candidate.title} — ${first}${etAl} (${candidate.year})${venue} · ${candidate.citation_count} citations`;
}
function formatScore(candidate) {
    const c = candidate.score_components;
    return (`score ${candidate.score_total.toFixed(1)} ` +
        `(author ${c.author}, year ${c.year}, initial ${c.initial}, ` +
        `context ${c.context.toFixed(1)}, popularity ${c.popularity.toFixed(1)})`);
}
//# sourceMappingURL=client.js.map