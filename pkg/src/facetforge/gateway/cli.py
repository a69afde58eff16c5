"""Command-line entry point. Mirrors the HTTP service: both call the same
AppState methods, so a command and its endpoint return the same data.

Exit codes: 0 success, 1 runtime failure (message on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .state import AppState, DEFAULT_DATA, DEFAULT_PORT
from .service import serve
from .demo import seed
from ..errors import FacetForgeError


def _fmt(value: float) -> str:
    return format(value, "g")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facetforge",
        description="Collaborative faceted content engine: store, tag, match, resolve, browse.",
    )
    parser.add_argument(
        "--data",
        default=os.environ.get("FACETFORGE_DATA", DEFAULT_DATA),
        help="store file path (env FACETFORGE_DATA)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="merge a triples file into the store")
    p.add_argument("file", help="triples file to merge")

    p = sub.add_parser("tag", help="attach a tag to a portlet")
    p.add_argument("--portlet", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--owner", required=True)

    p = sub.add_parser("learn", help="fit matcher weights from labeled concept pairs")
    p.add_argument("--training", required=True, help="CSV of conceptA,conceptB,{0|1}")
    p.add_argument("--config", help="key=value learning settings")

    p = sub.add_parser("match", help="show tag matches or the current superconcepts")
    p.add_argument("--tag", help="a tag label to match against the ontology")

    p = sub.add_parser("resolve", help="label a portlet as one viewer sees it")
    p.add_argument("--speaker", required=True)
    p.add_argument("--viewer", required=True)
    p.add_argument("--portlet", required=True)

    p = sub.add_parser("navigate", help="shortest way from a node to the nearest goal")
    p.add_argument("--start", required=True)
    p.add_argument("--goal", action="append", required=True)

    p = sub.add_parser("eval", help="score a task matrix file")
    p.add_argument("file", help="matrix CSV: task header, then name,score,weight rows")

    p = sub.add_parser("serve", help="run the HTTP JSON service")
    p.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("FACETFORGE_PORT", DEFAULT_PORT)),
        help="listen port (env FACETFORGE_PORT)",
    )
    p.add_argument("--verbose", action="store_true", help="log requests to stderr")

    sub.add_parser("seed-demo", help="load the built-in demonstration fixture")

    return parser


def _run(args: argparse.Namespace, out) -> int:
    if args.command == "serve":
        server = serve(port=args.port, data_path=args.data, quiet=not args.verbose)
        print(f"serving on port {server.server_port}, store {args.data}", file=out, flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
        return 0

    state = AppState(args.data)

    if args.command == "ingest":
        added = state.ingest_text(Path(args.file).read_text(encoding="utf-8"))
        print(f"ingested {added} new triples into {state.path}", file=out)
        return 0

    if args.command == "tag":
        tag = state.add_tag(args.portlet, args.label, args.owner)
        print(f"tagged {args.portlet} with {tag.label!r} (owner {tag.owner})", file=out)
        return 0

    if args.command == "learn":
        config_text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        result = state.learn(Path(args.training).read_text(encoding="utf-8"), config_text)
        weights = ",".join(_fmt(v) for v in result.weights.values)
        print(
            f"weights={weights} threshold={_fmt(result.threshold)} "
            f"train_accuracy={_fmt(result.train_accuracy)} "
            f"heldout_accuracy={_fmt(result.heldout_accuracy)}",
            file=out,
        )
        return 0

    if args.command == "match":
        if args.tag:
            matches = state.match_tag(args.tag)
            if not matches:
                print("no matches", file=out)
            for concept_id, confidence in matches:
                print(f"{concept_id} {_fmt(confidence)}", file=out)
            return 0
        for sc in state.superconcepts():
            labels = ", ".join(sorted(sc.member_labels))
            tags = ", ".join(sorted(t.label for t in sc.matched_tags)) or "-"
            print(f"[{labels}] <= tags: {tags}", file=out)
        return 0

    if args.command == "resolve":
        result = state.resolve(args.viewer, args.portlet, speaker_id=args.speaker)
        print(", ".join(result["labels"]) if result["labels"] else "(no labels)", file=out)
        return 0

    if args.command == "navigate":
        path = state.navigate(args.start, args.goal)
        print(" -> ".join(path) if path else "(already at a goal)", file=out)
        return 0

    if args.command == "eval":
        result = state.evaluate_csv(Path(args.file).read_text(encoding="utf-8"))
        print(f"average={_fmt(result['average'])} weighted={_fmt(result['weighted'])}", file=out)
        return 0

    if args.command == "seed-demo":
        summary = seed(state)
        print(
            f"seeded demo store at {summary['store']} "
            f"({summary['triples']} triples, {summary['users']} users, "
            f"{summary['portlets']} portlets)",
            file=out,
        )
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")  # pragma: no cover


def main(argv: list[str] | None = None, out=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args, out if out is not None else sys.stdout)
    except FacetForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
