"""Command-line front door: scan/audit, one-shot resolve with a terminal
picker, config management, and the stdio server.

Exit codes: 0 ok, 1 user/domain error, 2 io, 3 auth, 4 rate limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .ads import AdsClient, ReplayTransport
from .config import (
    CONFIG_FILENAME,
    InciteConfig,
    find_project_root,
    load_config,
    parse_key_style,
    parse_mode,
    parse_order_policy,
    save_config,
)
from .edit import apply_edits
from .errors import (
    AuthFailed,
    InciteError,
    MalformedResponse,
    RateLimited,
    TransportError,
)
from .pipeline import plan_selection, resolve, unresolved_keys, _cite_commands
from .rank import ScoredCandidate
from .server import StdioServer, _candidate_payload, _edit_payload
from .texscan import SourceDocument, list_bib_targets, scan_document

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_AUTH = 3
EXIT_RATE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incite",
        description="Resolve rough LaTeX citation placeholders against the "
        "ADS/SciX literature service and insert the chosen BibTeX entry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="list citation sites and unresolved keys")
    p_scan.add_argument("paths", nargs="+", help=".tex files or directories")
    p_scan.add_argument("--json", action="store_true", help="machine-readable output")
    p_scan.add_argument("--bib", help="check keys against this bibliography file")

    p_resolve = sub.add_parser("resolve", help="resolve the placeholder at a position")
    p_resolve.add_argument("file", help=".tex file")
    p_resolve.add_argument("--line", type=int, required=True, help="1-based line")
    p_resolve.add_argument("--col", type=int, required=True, help="1-based byte column")
    p_resolve.add_argument("--mode", choices=["contextual", "simple", "ads"])
    p_resolve.add_argument("--bib", help="target bibliography file")
    p_resolve.add_argument("--key-style", dest="key_style")
    p_resolve.add_argument("--order", dest="order_policy")
    p_resolve.add_argument("--max-results", type=int, default=8)
    p_resolve.add_argument("--pick", type=int, help="preselect candidate N (1-based)")
    p_resolve.add_argument("--dry-run", action="store_true", help="plan only, write nothing")
    p_resolve.add_argument("--json", action="store_true", help="machine-readable output")
    p_resolve.add_argument("--replay", help="replay fixtures directory (offline)")

    p_config = sub.add_parser("config", help="get or set project configuration")
    p_config.add_argument("action", choices=["get", "set"])
    p_config.add_argument("args", nargs="*", help="KEY [VALUE] or KEY=VALUE")
    p_config.add_argument("--dir", default=".", help="project directory")

    p_serve = sub.add_parser("serve", help="run the editor-facing JSON-RPC service")
    p_serve.add_argument("--stdio", action="store_true", required=True)
    p_serve.add_argument("--replay", help="replay fixtures directory (offline)")
    p_serve.add_argument("--root", default=".", help="project root for bib paths")

    return parser


def _make_client(config: InciteConfig, replay: Optional[str]) -> AdsClient:
    if replay:
        return AdsClient(transport=ReplayTransport(replay))
    return AdsClient(token=config.api_token, base_url=config.api_base)


def _offset_from_line_col(text: str, line: int, col: int) -> int:
    lines = text.split("\n")
    if not 1 <= line <= len(lines):
        raise ValueError(f"line {line} outside file (1..{len(lines)})")
    prefix = "\n".join(lines[: line - 1])
    offset = len(prefix.encode("utf-8")) + (1 if line > 1 else 0)
    return offset + max(0, col - 1)


# ---- scan ------------------------------------------------------------


def _tex_files(paths: Sequence[str]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if not path.exists():
            raise FileNotFoundError(f"no such path: {raw}")
        if path.is_dir():
            files.extend(sorted(path.rglob("*.tex")))
        else:
            files.append(path)
    return files


def _bib_keys_for(doc: SourceDocument, tex_path: Path, explicit_bib: Optional[str]) -> set[str]:
    from .bib import parse_bib

    targets = [explicit_bib] if explicit_bib else list_bib_targets(doc)
    keys: set[str] = set()
    for target in targets:
        bib_path = Path(target)
        if not bib_path.is_absolute():
            bib_path = tex_path.parent / bib_path
        if bib_path.exists():
            keys.update(e.key for e in parse_bib(bib_path.read_text(encoding="utf-8")))
    return keys


def cmd_scan(args: argparse.Namespace) -> int:
    files = _tex_files(args.paths)
    config = load_config(find_project_root(files[0] if files else Path(".")))
    commands = _cite_commands(config)
    report = []
    total_unresolved = 0
    for tex_path in files:
        text = tex_path.read_text(encoding="utf-8")
        doc = SourceDocument(uri=str(tex_path), text=text)
        sites = scan_document(doc, commands)
        bib_keys = _bib_keys_for(doc, tex_path, args.bib)
        missing = unresolved_keys(doc, bib_keys, commands)
        total_unresolved += len(missing)
        report.append(
            {
                "path": str(tex_path),
                "sites": [
                    {
                        "command": site.command,
                        "span": [site.span.start, site.span.end],
                        "keys": [
                            {
                                "raw": key.raw_key,
                                "span": [key.span.start, key.span.end],
                                "resolved": key.raw_key in bib_keys,
                            }
                            for key in site.keys
                        ],
                    }
                    for site in sites
                ],
                "unresolved": missing,
            }
        )
    if args.json:
        print(json.dumps({"files": report, "total_unresolved": total_unresolved}, indent=2))
    else:
        for entry in report:
            print(f"{entry['path']}: {len(entry['sites'])} citation site(s)")
            for site in entry["sites"]:
                for key in site["keys"]:
                    status = "ok" if key["resolved"] else "UNRESOLVED"
                    print(
                        f"  @{site['span'][0]:<7} \\{site['command']:<12} "
                        f"{key['raw']:<28} {status}"
                    )
        print(f"unresolved keys: {total_unresolved}")
    return EXIT_OK if total_unresolved == 0 else EXIT_DOMAIN


# ---- resolve ---------------------------------------------------------


def _format_candidate(index: int, candidate: ScoredCandidate) -> str:
    record = candidate.record
    first = record.authors[0] if record.authors else "(anonymous)"
    suffix = " et al." if len(record.authors) > 1 else ""
    venue = f", {record.pub}" if record.pub else ""
    return (
        f"{index:>2}. {record.title} — {first}{suffix} ({record.year}){venue} "
        f"· {record.citation_count} citations · score {candidate.total:.1f}"
    )


def _pick_interactively(count: int) -> Optional[int]:
    while True:
        sys.stdout.write(f"select 1-{count} (empty to cancel): ")
        sys.stdout.flush()
        answer = sys.stdin.readline()
        if not answer or not answer.strip():
            return None
        answer = answer.strip()
        if answer.isdigit() and 1 <= int(answer) <= count:
            return int(answer)
        print(f"please enter a number between 1 and {count}")


def cmd_resolve(args: argparse.Namespace) -> int:
    tex_path = Path(args.file)
    text = tex_path.read_text(encoding="utf-8")
    root = find_project_root(tex_path)
    config = load_config(root)
    client = _make_client(config, args.replay)
    mode = parse_mode(args.mode) if args.mode else None
    key_style = parse_key_style(args.key_style) if args.key_style else None
    order_policy = parse_order_policy(args.order_policy) if args.order_policy else None

    offset = _offset_from_line_col(text, args.line, args.col)
    outcome = resolve(
        text,
        offset,
        client=client,
        config=config,
        mode=mode,
        max_results=args.max_results,
        uri=str(tex_path),
    )

    if args.json:
        print(
            json.dumps(
                {
                    "cue": {"raw": outcome.cue.raw, "mode": outcome.cue.mode.value},
                    "widened": outcome.widened,
                    "candidates": [_candidate_payload(c) for c in outcome.candidates],
                },
                indent=2,
            )
        )
    else:
        for i, candidate in enumerate(outcome.candidates, start=1):
            print(_format_candidate(i, candidate))
        if outcome.widened:
            print("(query was widened to find these)")

    if args.pick is not None:
        if not 1 <= args.pick <= len(outcome.candidates):
            raise ValueError(
                f"--pick {args.pick} outside 1..{len(outcome.candidates)}"
            )
        choice = args.pick
    elif sys.stdin.isatty() and not args.json:
        choice = _pick_interactively(len(outcome.candidates))
        if choice is None:
            print("cancelled")
            return EXIT_OK
    else:
        return EXIT_OK  # listing only

    selected = outcome.candidates[choice - 1].record
    edit = plan_selection(
        text,
        offset,
        selected.bibcode,
        client=client,
        config=config,
        base_dir=tex_path.parent,
        key_style=key_style,
        order_policy=order_policy,
        target_bib=args.bib,
        tex_path=tex_path,
    )
    if args.dry_run:
        print(json.dumps({"plan": _edit_payload(edit)}, indent=2))
        return EXIT_OK
    report = apply_edits(edit, write_tex=True)
    if args.json:
        print(json.dumps({"applied": _edit_payload(edit, report)}, indent=2))
    else:
        touched = ", ".join(report.paths_touched) or "nothing (entry reused)"
        print(f"final key: {report.final_key}")
        print(f"updated: {touched}")
    return EXIT_OK


# ---- config ----------------------------------------------------------


def cmd_config(args: argparse.Namespace) -> int:
    root = Path(args.dir)
    config = load_config(root)
    if args.action == "get":
        visible = config.to_dict()
        if not args.args:
            print(json.dumps(visible, indent=2))
            return EXIT_OK
        key = args.args[0]
        if key not in visible:
            raise ValueError(f"unknown config key: {key}")
        value = visible[key]
        print(value if value is not None else "")
        return EXIT_OK

    if not args.args:
        raise ValueError("config set needs KEY VALUE or KEY=VALUE")
    if len(args.args) == 1 and "=" in args.args[0]:
        key, _, value = args.args[0].partition("=")
    elif len(args.args) == 2:
        key, value = args.args
    else:
        raise ValueError("config set needs KEY VALUE or KEY=VALUE")
    updated = config.with_values({key: value})
    save_config(root, updated)
    print(f"{key} = {value}")
    return EXIT_OK


# ---- serve -----------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    root = Path(args.root)
    config = load_config(root)
    client = _make_client(config, args.replay)
    StdioServer(client=client, root=root, config=config).serve_forever()
    return EXIT_OK


# ---- entry point -----------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "scan": cmd_scan,
        "resolve": cmd_resolve,
        "config": cmd_config,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except AuthFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AUTH
    except RateLimited as exc:
        print(f"error: {exc} (resets at {exc.reset_at})", file=sys.stderr)
        return EXIT_RATE
    except (TransportError, MalformedResponse) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InciteError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
