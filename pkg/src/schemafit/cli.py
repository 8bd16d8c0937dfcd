"""Command-line front end: match, eval, gen, serve, report."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .errors import DomainError, GroundTruthError, SchemafitError
from .evalbench import (
    load_ground_truth,
    render_text_table,
    run_accumulated,
    run_year_by_year,
    write_ground_truth,
)
from .ingest import load_table, split_columns, write_table
from .matcher import (
    MatchConfig,
    classification_labels,
    classify_changes,
    column_match,
    rank_candidates,
)
from .synth import SyntheticSpec, generate_synthetic

STORE_ENV = "SCHEMAFIT_STORE"
UI_ENV = "SCHEMAFIT_UI"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

TESTS = ("ks", "ad", "welch", "f")


def _render_json(obj, out: list[str]):
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant digits."""
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format(obj, ".17g"))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _render_json(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(",")
            _render_json(value, out)
        out.append("]")
    else:
        raise DomainError(f"cannot serialize {type(obj).__name__}")


def dumps_report(obj) -> str:
    parts: list[str] = []
    _render_json(obj, parts)
    return "".join(parts)


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation errors, not I/O: map them to exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_match_flags(p):
    p.add_argument("--test", choices=TESTS, default="ks")
    p.add_argument("--p-thresh", type=float, default=0.9)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--outlier-factor", type=float, default=1.5)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schemafit", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("match", help="match one release pair and emit a JSON report")
    p.add_argument("--base", required=True)
    p.add_argument("--new", required=True)
    _add_match_flags(p)
    p.add_argument("--out", help="report path (default: stdout)")

    p = sub.add_parser("eval", help="score matching accuracy against ground truth")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--mode", choices=("yearly", "accumulated"), default="yearly")
    p.add_argument("--tests", default="ks")
    _add_match_flags(p)
    p.add_argument("--out", help="JSON rows path (default: text table on stdout only)")

    p = sub.add_parser("gen", help="generate a synthetic multi-year dataset")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the review session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", default=None, help=f"session dir (default: ${STORE_ENV})")
    p.add_argument("--ui-dir", default=None, help=f"static UI bundle (default: ${UI_ENV})")

    p = sub.add_parser("report", help="re-render a match report")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _config(args) -> MatchConfig:
    return MatchConfig(
        test=getattr(args, "test", "ks"),
        p_thresh=args.p_thresh,
        bins=args.bins,
        outlier_factor=args.outlier_factor,
        top_k=args.top_k,
    )


def _write_or_print(text: str, out_path):
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        print(text)


def build_report(base_table, new_table, config: MatchConfig) -> dict:
    base_cols, unscored_base = split_columns(base_table)
    new_cols, unscored_new = split_columns(new_table)
    result = column_match(
        base_cols,
        new_cols,
        config,
        unscored_base=unscored_base,
        unscored_new=unscored_new,
    )
    counts = classify_changes(result)
    base_labels, new_labels = classification_labels(result)
    candidates = {
        col.name: [
            {
                "new": c.new_column,
                "p_value": c.p_value,
                "statistic": c.statistic,
                "rank": i + 1,
            }
            for i, c in enumerate(rank_candidates(col, new_cols, config)[: config.top_k])
        ]
        for col in base_cols
    }
    return {
        "config": asdict(config),
        "pairs": [
            {"base": p.base, "new": p.new, "p_value": p.p_value, "statistic": p.statistic}
            for p in result.pairs
        ],
        "candidates": candidates,
        "classification": {
            "changed": counts.changed,
            "added": counts.added,
            "removed": counts.removed,
            "base_labels": base_labels,
            "new_labels": new_labels,
        },
        "unscored": {"base": list(unscored_base), "new": list(unscored_new)},
    }


def _cmd_match(args) -> int:
    report = build_report(load_table(args.base), load_table(args.new), _config(args))
    _write_or_print(dumps_report(report), args.out)
    return EXIT_OK


def _release_sort_key(path: Path):
    stem = path.stem
    return (0, int(stem), "") if stem.isdigit() else (1, 0, stem)


def _cmd_eval(args) -> int:
    tests = tuple(t.strip() for t in args.tests.split(",") if t.strip())
    for t in tests:
        if t not in TESTS:
            raise DomainError(f"unknown test {t!r}")
    data_dir = Path(args.data_dir)
    paths = sorted(data_dir.glob("*.csv"), key=_release_sort_key)
    if not paths:
        raise GroundTruthError(f"no CSV releases in {data_dir}")
    releases = [load_table(p) for p in paths]
    gts = []
    for prev, curr in zip(releases, releases[1:]):
        gt_path = Path(args.gt_dir) / f"{prev.name}__{curr.name}.csv"
        if not gt_path.exists():
            raise GroundTruthError(f"missing ground truth {gt_path.name}")
        gts.append(load_ground_truth(gt_path, prev.name, curr.name))
    run = run_year_by_year if args.mode == "yearly" else run_accumulated
    rows = run(releases, gts, _config(args), tests)
    print(render_text_table(rows, tests, args.top_k), end="")
    if args.out:
        payload = [
            {
                "release": r.release,
                "changes": None
                if r.changes is None
                else {"changed": r.changes[0], "added": r.changes[1], "removed": r.changes[2]},
                "top1": r.top1,
                "topk": r.topk,
            }
            for r in rows
        ]
        Path(args.out).write_text(dumps_report(payload), encoding="utf-8")
    return EXIT_OK


def _cmd_gen(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        raw = json.load(fh)
    raw["seed"] = args.seed
    spec = SyntheticSpec.from_dict(raw)
    releases, gts = generate_synthetic(spec)
    out = Path(args.out)
    (out / "data").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    for table in releases:
        write_table(table, out / "data" / f"{table.name}.csv")
    for gt in gts:
        write_ground_truth(gt, out / "gt" / f"{gt.release_from}__{gt.release_to}.csv")
    print(f"wrote {len(releases)} releases and {len(gts)} ground truths to {out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = args.store or os.environ.get(STORE_ENV) or "./review-store"
    ui_dir = args.ui_dir or os.environ.get(UI_ENV)
    app = create_app(store, ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


REPORT_KEYS = ("config", "pairs", "candidates", "classification", "unscored")


def _cmd_report(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        report = json.load(fh)
    missing = [k for k in REPORT_KEYS if k not in report]
    if missing:
        raise DomainError(f"report missing keys: {', '.join(missing)}")
    if args.format == "json":
        print(dumps_report(report))
        return EXIT_OK
    cls = report["classification"]
    print(f"test={report['config']['test']}  p_thresh={report['config']['p_thresh']}")
    print(f"changed={cls['changed']}  added={cls['added']}  removed={cls['removed']}")
    for pair in report["pairs"]:
        base = pair["base"] if pair["base"] is not None else "-"
        new = pair["new"] if pair["new"] is not None else "-"
        if pair["p_value"] is None:
            print(f"{base} -> {new}")
        else:
            print(f"{base} -> {new}  p={pair['p_value']:.4g}")
    unscored = report["unscored"]
    if unscored["base"] or unscored["new"]:
        print(f"unscored: base={unscored['base']}  new={unscored['new']}")
    return EXIT_OK


_COMMANDS = {
    "match": _cmd_match,
    "eval": _cmd_eval,
    "gen": _cmd_gen,
    "serve": _cmd_serve,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        return _COMMANDS[args.cmd](args)
    except json.JSONDecodeError as exc:
        print(f"schemafit: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SchemafitError as exc:
        print(f"schemafit: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"schemafit: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
