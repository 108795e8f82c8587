"use strict";
/**
 * VS Code glue: one command that resolves the citation placeholder at the
 * cursor, shows ranked candidates in a quick pick (with a mode-toggle
 * row), and applies the selection.
 *
 * The buffer is only modified after an explicit selection, and only
 * through the editor edit API; the bibliography file is written by the
 * engine and reloaded here if it is open.
 */
var __createBinding = (this && this.__createBinding) || (Object.create ? (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    var desc = Object.getOwnPropertyDescriptor(m, k);
    if (!desc || ("get" in desc ? !m.__esModule : desc.writable || desc.configurable)) {
      desc = { enumerable: true, get: function() { return m[k]; } };
    }
    Object.defineProperty(o, k2, desc);
}) : (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    o[k2] = m[k];
}));
var __setModuleDefault = (this && this.__setModuleDefault) || (Object.create ? (function(o, v) {
    Object.defineProperty(o, "default", { enumerable: true, value: v });
}) : function(o, v) {
    o["default"] = v;
});
var __importStar = (this && this.__importStar) || (function () {
    var ownKeys = function(o) {
        ownKeys = Object.getOwnPropertyNames || function (o) {
            var ar = [];
            for (var k in o) if (Object.prototype.hasOwnProperty.call(o, k)) ar[ar.length] = k;
            return ar;
        };
        return ownKeys(o);
    };
    return function (mod) {
        if (mod && mod.__esModule) return mod;
        var result = {};
        if (mod != null) for (var k = ownKeys(mod), i = 0; i < k.length; i++) if (k[i] !== "default") __createBinding(result, mod, k[i]);
        __setModuleDefault(result, mod);
        return result;
    };
})();
Object.defineProperty(exports, "__esModule", { value: true });
exports.activate = activate;
exports.deactivate = deactivate;
const fs = __importStar(require("fs"));
const path = __importStar(require("path"));
const vscode = __importStar(require("vscode"));
const client_1 = require("./client");
const offsets_1 = require("./offsets");
const protocol_1 = require("./protocol");
let engine = null;
let activePick = null;
const MODE_CYCLE = ["contextual", "simple", "ads"];
function settings() {
    return vscode.workspace.getConfiguration("incite");
}
function engineCommand(context) {
    const configured = settings().get("enginePath", "");
    const args = settings().get("engineArgs", []);
    if (configured) {
        return { command: configured, args };
    }
    const bundled = context.asAbsolutePath(path.join("bin", "incite"));
    if (fs.existsSync(bundled)) {
        return { command: bundled, args: [] };
    }
    return { command: "incite", args: [] };
}
function workspaceRoot(document) {
    const folder = vscode.workspace.getWorkspaceFolder(document.uri);
    return folder?.uri.fsPath ?? path.dirname(document.uri.fsPath);
}
function getEngine(context, document) {
    if (engine) {
        return engine;
    }
    const { command, args } = engineCommand(context);
    const cfg = settings();
    engine = new client_1.EngineClient({
        command,
        args,
        cwd: workspaceRoot(document),
        replayDir: cfg.get("replayDir", "") || undefined,
        config: {
            key_style: cfg.get("keyStyle", "AuthorYear"),
            order_policy: cfg.get("orderPolicy", "Append"),
            target_bib: cfg.get("targetBib", "") || undefined,
            default_mode: cfg.get("defaultMode", "contextual"),
            api_base: cfg.get("apiBase", "") || undefined,
        },
    });
    return engine;
}
function candidateItems(candidates, mode, widened) {
    const next = MODE_CYCLE[(MODE_CYCLE.indexOf(mode) + 1) % MODE_CYCLE.length];
    const toggle = {
        row: "mode",
        nextMode: next,
        label: `$(arrow-swap) Mode: ${mode} — switch to ${next}`,
        description: widened ? "search was widened" : undefined,
        alwaysShow: true,
    };
    const rows = candidates.map((candidate) => ({
        row: "candidate",
        candidate,
        label: (0, client_1.formatCandidate)(candidate),
        detail: (0, client_1.formatScore)(candidate),
        alwaysShow: true,
    }));
    return [toggle, ...rows];
}
function showPick(items, title) {
    activePick?.dispose(); // a new trigger cancels the pending popup
    const pick = vscode.window.createQuickPick();
    activePick = pick;
    pick.items = items;
    pick.title = title;
    pick.placeholder = "Select the intended paper";
    pick.matchOnDetail = true;
    return new Promise((resolve) => {
        let settled = false;
        pick.onDidAccept(() => {
            settled = true;
            resolve(pick.selectedItems[0]);
            pick.hide();
        });
        pick.onDidHide(() => {
            if (!settled) {
                resolve(undefined);
            }
            pick.dispose();
            if (activePick === pick) {
                activePick = null;
            }
        });
        pick.show();
    });
}
async function reloadBibIfOpen(bibPath) {
    const target = path.resolve(bibPath);
    for (const document of vscode.workspace.textDocuments) {
        if (path.resolve(document.uri.fsPath) === target && !document.isDirty) {
            await vscode.commands.executeCommand("workbench.action.files.revert", document.uri);
            return;
        }
    }
}
async function resolveAtCursor(context) {
    const editor = vscode.window.activeTextEditor;
    if (!editor || !editor.document.fileName.endsWith(".tex")) {
        vscode.window.showWarningMessage("Open a .tex document to resolve citations.");
        return;
    }
    const document = editor.document;
    const client = getEngine(context, document);
    let mode = settings().get("defaultMode", "contextual");
    try {
        // the popup re-resolves when the mode row is picked
        for (;;) {
            const text = document.getText();
            const offset = (0, offsets_1.byteOffsetOf)(text, document.offsetAt(editor.selection.active));
            const result = await client.resolve({ text, offset, mode });
            const picked = await showPick(candidateItems(result.candidates, result.cue.mode, result.widened), `Candidates for ${result.cue.raw}`);
            if (!picked) {
                return; // cancelled: no changes anywhere
            }
            if (picked.row === "mode") {
                mode = picked.nextMode;
                continue;
            }
            const selection = await client.select({
                text,
                offset,
                bibcode: picked.candidate.bibcode,
            });
            const texEdit = selection.edits.tex_edit;
            const range = new vscode.Range(document.positionAt((0, offsets_1.charOffsetOf)(text, texEdit.start)), document.positionAt((0, offsets_1.charOffsetOf)(text, texEdit.end)));
            const workspaceEdit = new vscode.WorkspaceEdit();
            workspaceEdit.replace(document.uri, range, texEdit.replacement);
            await vscode.workspace.applyEdit(workspaceEdit);
            if (selection.edits.bib_edit) {
                await reloadBibIfOpen(selection.edits.bib_edit.path);
            }
            const note = selection.edits.reused_existing
                ? `Reused existing entry: ${selection.final_key}`
                : `Inserted ${selection.final_key}`;
            vscode.window.setStatusBarMessage(`Incite: ${note}`, 5000);
            return;
        }
    }
    catch (error) {
        if (error instanceof protocol_1.RpcError) {
            vscode.window.showWarningMessage(`Incite: ${error.friendlyMessage}`);
        }
        else {
            vscode.window.showErrorMessage(`Incite: ${error.message}`);
        }
    }
}
function activate(context) {
    context.subscriptions.push(vscode.commands.registerCommand("incite.resolveCitation", () => resolveAtCursor(context)), vscode.workspace.onDidChangeConfiguration((event) => {
        if (event.affectsConfiguration("incite")) {
            engine?.dispose(); // restart with fresh settings on next use
            engine = null;
        }
    }), new vscode.Disposable(() => engine?.dispose()));
}
function deactivate() {
    engine?.dispose();
    engine = null;
}
//# sourceMappingURL=extension.js.map