"""Command-line interface: learn, insert, reorder, check, eval."""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .dtree import classify, dataset_to_csv
from .extract import Component, ParseError, SourceFile, child_context, compute_call_facts, parse_file
from .insert import (
    NoRegionError,
    apply_insertion,
    parse_snippet,
    plan_insertion,
    region_index_for,
    reorder_file,
)
from .learn import EmptyCorpus, LearnConfig, learn_model
from .model import CoverageError, SchemaError, read_model, write_model
from .props import ordering_attrs


def _err(message: str) -> None:
    print(f"ordo: {message}", file=sys.stderr)


def _warn(message: str) -> None:
    print(f"ordo: warning: {message}", file=sys.stderr)


def _load_model(path: str):
    try:
        return read_model(path)
    except FileNotFoundError:
        _err(f"model file {path} not found")
    except (SchemaError, CoverageError) as exc:
        _err(f"bad model {path}: {exc}")
    return None


def cmd_learn(args: argparse.Namespace) -> int:
    patterns = args.patterns or os.environ.get("ORDO_PATTERNS") or None
    cfg = LearnConfig(
        corpus_root=args.corpus,
        exclude_tests=not args.include_tests,
        patterns_file=patterns,
    )
    try:
        result = learn_model(cfg)
    except EmptyCorpus as exc:
        _err(str(exc))
        return 1
    except (FileNotFoundError, OSError) as exc:
        _err(str(exc))
        return 2
    try:
        write_model(result.model, args.out)
        if args.dump_samples:
            dump_dir = Path(args.dump_samples)
            dump_dir.mkdir(parents=True, exist_ok=True)
            (dump_dir / "category.csv").write_text(
                dataset_to_csv(result.category_dataset), encoding="utf-8"
            )
            (dump_dir / "ordering.csv").write_text(
                dataset_to_csv(result.ordering_dataset), encoding="utf-8"
            )
    except OSError as exc:
        _err(str(exc))
        return 2
    print(result.report.to_text())
    print(f"model written to {args.out}")
    return 0


def _resolve_container(file: SourceFile, dotted: str | None) -> Component | None:
    if not file.top_level:
        return None
    current = file.top_level[0]
    if not dotted:
        return current
    parts = dotted.split(".")
    if parts and parts[0] == current.name:
        parts = parts[1:]
    for part in parts:
        nxt = next(
            (ch for ch in current.children if ch.is_type() and ch.name == part), None
        )
        if nxt is None:
            return None
        current = nxt
    return current


def cmd_insert(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if model is None:
        return 2
    try:
        file = parse_file(args.file)
    except (ParseError, OSError) as exc:
        _err(f"cannot parse {args.file}: {exc}")
        return 1
    container = _resolve_container(file, args.container)
    if container is None:
        _err(f"container {args.container or '<top level>'} not found in {args.file}")
        return 1
    if args.snippet:
        try:
            source = Path(args.snippet).read_text(encoding="utf-8")
        except OSError as exc:
            _err(str(exc))
            return 1
    else:
        source = sys.stdin.read()
    try:
        comp, new_text = parse_snippet(source, container.kind)
    except (ParseError, ValueError) as exc:
        _err(f"cannot parse snippet: {exc}")
        return 1
    try:
        plan = plan_insertion(model, container, comp, file)
    except NoRegionError as exc:
        _err(str(exc))
        return 3
    if args.dry_run:
        print(f"position\t{plan.position}")
        print(f"region-ids\t{','.join(str(i) for i in plan.region.ids)}")
        print(f"region-index\t{plan.region_index}")
        print(f"prior\t{plan.prior.name if plan.prior else '-'}")
        print(f"next\t{plan.next.name if plan.next else '-'}")
        print(f"prepend\t{plan.prepend_text!r}")
        print(f"append\t{plan.append_text!r}")
        return 0
    out_text = apply_insertion(file, plan, new_text)
    if args.in_place:
        Path(args.file).write_text(out_text, encoding="utf-8")
    else:
        sys.stdout.write(out_text)
    return 0


def cmd_reorder(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if model is None:
        return 2
    if len(args.files) > 1 and not args.in_place:
        _err("reordering multiple files requires --in-place")
        return 2
    for path in args.files:
        try:
            file = parse_file(path)
        except (ParseError, OSError) as exc:
            _err(f"cannot parse {path}: {exc}")
            return 1
        try:
            out_text = reorder_file(model, file, keep_comments=args.keep_comments)
        except NoRegionError as exc:
            _err(str(exc))
            return 3
        if args.in_place:
            Path(path).write_text(out_text, encoding="utf-8")
        else:
            sys.stdout.write(out_text)
    return 0


def _display_name(comp: Component) -> str:
    if comp.kind == "CONSTRUCTOR":
        return "<init>"
    if comp.kind == "INITIALIZER":
        return "<clinit>" if "STATIC" in comp.modifiers else "<init>"
    return comp.name


def _each_member(file: SourceFile):
    """Yield (container, chain-of-type-names, member) over the first type."""
    if not file.top_level:
        return
    top = file.top_level[0]

    def walk(container: Component, chain: tuple[str, ...]):
        for comp in container.children:
            yield container, chain, comp
            if comp.is_type():
                yield from walk(comp, chain + (comp.name,))

    yield from walk(top, (top.name,))


def cmd_check(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if model is None:
        return 2
    violations = 0
    for path in args.files:
        try:
            file = parse_file(path)
        except (ParseError, OSError) as exc:
            _err(f"cannot parse {path}: {exc}")
            return 1
        if not file.top_level:
            continue
        facts = compute_call_facts(file.top_level[0])
        containers = []
        seen = set()
        for container, chain, _comp in _each_member(file):
            if id(container) not in seen:
                seen.add(id(container))
                containers.append((container, chain))
        for container, chain in containers:
            ctx = child_context(container)
            try:
                keyed = [
                    (region_index_for(model, ctx, ch)[0], ch) for ch in container.children
                ]
            except NoRegionError as exc:
                _err(str(exc))
                return 3
            best_idx = -1
            best_comp: Component | None = None
            prefix = ".".join(chain[1:] + ("",)) if len(chain) > 1 else ""
            for idx, ch in keyed:
                if idx < best_idx and best_comp is not None:
                    print(
                        f"{path}: {prefix}{_display_name(ch)} ({ch.kind}) belongs before "
                        f"{prefix}{_display_name(best_comp)} ({best_comp.kind})"
                    )
                    violations += 1
                if idx > best_idx:
                    best_idx = idx
                    best_comp = ch
            for i, (idx_a, a) in enumerate(keyed):
                for idx_b, b in keyed[i + 1:]:
                    if idx_a != idx_b:
                        continue
                    rgn = model.per_context[ctx][idx_a]
                    if rgn.ordering is None:
                        continue
                    row = ordering_attrs(model.patterns, str(rgn.ids[0]), facts, a, b)
                    if classify(rgn.ordering, row) == "AFTER":
                        print(
                            f"{path}: {prefix}{_display_name(a)} and {prefix}{_display_name(b)} "
                            f"are out of order within their region"
                        )
                        violations += 1
    return 4 if violations else 0


@dataclass
class EvalRow:
    file: str
    kind: str
    name: str
    delta: int
    region_end: bool


def _eval_one(
    model, file: SourceFile, container_chain: tuple[str, ...], comp: Component
) -> EvalRow | None:
    removed_text = file.text[:comp.leading_start] + file.text[comp.span[1]:]
    try:
        stripped = parse_file(file.path, removed_text)
    except ParseError:
        return None
    container = stripped.top_level[0] if stripped.top_level else None
    if container is None:
        return None
    for name in container_chain[1:]:
        container = next(
            (ch for ch in container.children if ch.is_type() and ch.name == name), None
        )
        if container is None:
            return None
    plan = plan_insertion(model, container, comp, stripped)
    delta = plan.position - comp.leading_start
    ctx = child_context(container)
    region_end = True
    for sib in container.children:
        if region_index_for(model, ctx, sib)[0] == plan.region_index \
                and sib.leading_start >= plan.position:
            region_end = False
            break
    qual = ".".join(container_chain[1:] + (_display_name(comp),))
    return EvalRow(Path(file.path).name, comp.kind, qual, delta, region_end)


def cmd_eval(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if model is None:
        return 2
    rows: list[EvalRow] = []
    for path in sorted(args.files):
        try:
            file = parse_file(path)
        except (ParseError, OSError) as exc:
            _warn(f"skipping {path}: {exc}")
            continue
        candidates = [
            (chain, comp)
            for container, chain, comp in _each_member(file)
            if len(container.children) > 1
        ]
        count = min(args.per_file, len(candidates))
        if count < args.per_file:
            _warn(f"{path}: only {count} removable components (wanted {args.per_file})")
        if count == 0:
            continue
        rng = random.Random(f"{args.seed}:{Path(path).name}")
        chosen = sorted(rng.sample(range(len(candidates)), count))
        for pick in chosen:
            chain, comp = candidates[pick]
            try:
                row = _eval_one(model, file, chain, comp)
            except NoRegionError as exc:
                _err(str(exc))
                return 3
            if row is not None:
                rows.append(row)
    if not rows:
        _err("no evaluation rows produced")
        return 1
    print("File\tType\tName\tDelta\tRegion End")
    for row in rows:
        end = "true" if row.region_end else "false"
        print(f"{row.file}\t{row.kind}\t{row.name}\t{row.delta}\t{end}")
    exact = sum(1 for r in rows if r.delta == 0)
    deltas = sorted(abs(r.delta) for r in rows)
    median = deltas[(len(deltas) - 1) // 2]
    at_end = sum(1 for r in rows if r.region_end)
    print(f"exact-position\t{exact}/{len(rows)}")
    print(f"median-abs-delta\t{median}")
    print(f"region-end\t{at_end}/{len(rows)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordo",
        description="Learn and apply models of how a codebase orders Java class members",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn an ordering model from a corpus")
    p.add_argument("--corpus", required=True, help="corpus root directory")
    p.add_argument("--out", default="ordermodel.xml", help="model output path")
    p.add_argument("--include-tests", action="store_true", help="keep test files")
    p.add_argument("--patterns", help="name-pattern property file (or $ORDO_PATTERNS)")
    p.add_argument("--dump-samples", metavar="DIR", help="write category.csv and ordering.csv")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("insert", help="insert a component into a file")
    p.add_argument("--model", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--snippet", help="declaration source (defaults to stdin)")
    p.add_argument("--container", help="dotted path of the target type")
    p.add_argument("--dry-run", action="store_true", help="print the plan, change nothing")
    p.add_argument("--in-place", action="store_true", help="rewrite the file")
    p.set_defaults(func=cmd_insert)

    p = sub.add_parser("reorder", help="rewrite files into model order")
    p.add_argument("--model", required=True)
    p.add_argument("--in-place", action="store_true")
    p.add_argument("--keep-comments", action="store_true",
                   help="keep each component's own leading comments")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_reorder)

    p = sub.add_parser("check", help="report components that violate the model")
    p.add_argument("--model", required=True)
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", help="remove-and-reinsert evaluation")
    p.add_argument("--model", required=True)
    p.add_argument("--files", nargs="+", required=True, help="held-out files")
    p.add_argument("--per-file", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
