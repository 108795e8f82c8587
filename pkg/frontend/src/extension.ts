/**
 * VS Code glue: one command that resolves the citation placeholder at the
 * cursor, shows ranked candidates in a quick pick (with a mode-toggle
 * row), and applies the selection.
 *
 * The buffer is only modified after an explicit selection, and only
 * through the editor edit API; the bibliography file is written by the
 * engine and reloaded here if it is open.
 */

import * as fs from "fs";
import * as path from "path";
import * as vscode from "vscode";
import { EngineClient, formatCandidate, formatScore } from "./client";
import { byteOffsetOf, charOffsetOf } from "./offsets";
import { Candidate, RpcError, SearchMode } from "./protocol";

let engine: EngineClient | null = null;
let activePick: vscode.QuickPick<CandidateItem> | null = null;

interface CandidateItem extends vscode.QuickPickItem {
  row: "candidate" | "mode";
  candidate?: Candidate;
  nextMode?: SearchMode;
}

const MODE_CYCLE: SearchMode[] = ["contextual", "simple", "ads"];

function settings() {
  return vscode.workspace.getConfiguration("incite");
}

function engineCommand(context: vscode.ExtensionContext): { command: string; args: string[] } {
  const configured = settings().get<string>("enginePath", "");
  const args = settings().get<string[]>("engineArgs", []);
  if (configured) {
    return { command: configured, args };
  }
  const bundled = context.asAbsolutePath(path.join("bin", "incite"));
  if (fs.existsSync(bundled)) {
    return { command: bundled, args: [] };
  }
  return { command: "incite", args: [] };
}

function workspaceRoot(document: vscode.TextDocument): string | undefined {
  const folder = vscode.workspace.getWorkspaceFolder(document.uri);
  return folder?.uri.fsPath ?? path.dirname(document.uri.fsPath);
}

function getEngine(context: vscode.ExtensionContext, document: vscode.TextDocument): EngineClient {
  if (engine) {
    return engine;
  }
  const { command, args } = engineCommand(context);
  const cfg = settings();
  engine = new EngineClient({
    command,
    args,
    cwd: workspaceRoot(document),
    replayDir: cfg.get<string>("replayDir", "") || undefined,
    config: {
      key_style: cfg.get<string>("keyStyle", "AuthorYear"),
      order_policy: cfg.get<string>("orderPolicy", "Append"),
      target_bib: cfg.get<string>("targetBib", "") || undefined,
      default_mode: cfg.get<SearchMode>("defaultMode", "contextual"),
      api_base: cfg.get<string>("apiBase", "") || undefined,
    },
  });
  return engine;
}

function candidateItems(candidates: Candidate[], mode: SearchMode, widened: boolean): CandidateItem[] {
  const next = MODE_CYCLE[(MODE_CYCLE.indexOf(mode) + 1) % MODE_CYCLE.length];
  const toggle: CandidateItem = {
    row: "mode",
    nextMode: next,
    label: `$(arrow-swap) Mode: ${mode} — switch to ${next}`,
    description: widened ? "search was widened" : undefined,
    alwaysShow: true,
  };
  const rows = candidates.map<CandidateItem>((candidate) => ({
    row: "candidate",
    candidate,
    label: formatCandidate(candidate),
    detail: formatScore(candidate),
    alwaysShow: true,
  }));
  return [toggle, ...rows];
}

function showPick(items: CandidateItem[], title: string): Promise<CandidateItem | undefined> {
  activePick?.dispose(); // a new trigger cancels the pending popup
  const pick = vscode.window.createQuickPick<CandidateItem>();
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

async function reloadBibIfOpen(bibPath: string): Promise<void> {
  const target = path.resolve(bibPath);
  for (const document of vscode.workspace.textDocuments) {
    if (path.resolve(document.uri.fsPath) === target && !document.isDirty) {
      await vscode.commands.executeCommand("workbench.action.files.revert", document.uri);
      return;
    }
  }
}

async function resolveAtCursor(context: vscode.ExtensionContext): Promise<void> {
  const editor = vscode.window.activeTextEditor;
  if (!editor || !editor.document.fileName.endsWith(".tex")) {
    vscode.window.showWarningMessage("Open a .tex document to resolve citations.");
    return;
  }
  const document = editor.document;
  const client = getEngine(context, document);
  let mode = settings().get<SearchMode>("defaultMode", "contextual");

  try {
    // the popup re-resolves when the mode row is picked
    for (;;) {
      const text = document.getText();
      const offset = byteOffsetOf(text, document.offsetAt(editor.selection.active));
      const result = await client.resolve({ text, offset, mode });
      const picked = await showPick(
        candidateItems(result.candidates, result.cue.mode, result.widened),
        `Candidates for ${result.cue.raw}`
      );
      if (!picked) {
        return; // cancelled: no changes anywhere
      }
      if (picked.row === "mode") {
        mode = picked.nextMode!;
        continue;
      }

      const selection = await client.select({
        text,
        offset,
        bibcode: picked.candidate!.bibcode,
      });
      const texEdit = selection.edits.tex_edit;
      const range = new vscode.Range(
        document.positionAt(charOffsetOf(text, texEdit.start)),
        document.positionAt(charOffsetOf(text, texEdit.end))
      );
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
  } catch (error) {
    if (error instanceof RpcError) {
      vscode.window.showWarningMessage(`Incite: ${error.friendlyMessage}`);
    } else {
      vscode.window.showErrorMessage(`Incite: ${(error as Error).message}`);
    }
  }
}

export function activate(context: vscode.ExtensionContext): void {
  context.subscriptions.push(
    vscode.commands.registerCommand("incite.resolveCitation", () => resolveAtCursor(context)),
    vscode.workspace.onDidChangeConfiguration((event) => {
      if (event.affectsConfiguration("incite")) {
        engine?.dispose(); // restart with fresh settings on next use
        engine = null;
      }
    }),
    new vscode.Disposable(() => engine?.dispose())
  );
}

export function deactivate(): void {
  engine?.dispose();
  engine = null;
}
