"""End-to-end learning pipeline: corpus in, ordering model out.

Stages: parse the corpus, generate pairwise category samples, train and
clean the category tree, derive candidate regions and assign every
component, merge empty regions, prune the precedence graph and linearize
it per context, infer region comments, train and clean the within-region
ordering tree, and assemble the final model.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .comments import SLOTS, CommentSamples, CommentSpec, infer_comment
from .dtree import Dataset, DecisionTree, Leaf, train
from .dtree import cleanup_consistency, cleanup_significance
from .extract import (
    CallFacts,
    Component,
    SourceFile,
    child_context,
    compute_call_facts,
    resolve_overrides,
    scan_corpus,
    walk_containers,
)
from .model import ModelMeta, OrderModel, assemble_model
from .props import (
    CATEGORY_ATTRS,
    ORDERING_ATTRS,
    NamePatterns,
    category_attrs,
    category_domains,
    category_swap_map,
    default_patterns,
    load_patterns,
    ordering_attrs,
    ordering_domains,
    ordering_swap_map,
)
from .regions import (
    RegionTable,
    assign_regions,
    build_initial_regions,
    clean_graph,
    merge_empty_regions,
    top_sort_merge,
)


class EmptyCorpus(ValueError):
    pass


@dataclass
class LearnConfig:
    corpus_root: str | Path
    exclude_tests: bool = True
    patterns_file: str | Path | None = None
    min_mode: int = 4
    mode_fraction: float = 0.25
    min_arc: int = 4
    min_leaf_agree: int = 5


@dataclass
class LearnReport:
    files: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)
    excluded_tests: int = 0
    multiple_top_level: list[str] = field(default_factory=list)
    category_samples: int = 0
    ordering_samples: int = 0
    initial_regions: int = 0
    surviving_regions: int = 0
    groups_per_context: dict[str, int] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"files parsed: {self.files}",
            f"files skipped: {len(self.skipped)}",
            f"test files excluded: {self.excluded_tests}",
            f"files with extra top-level types: {len(self.multiple_top_level)}",
            f"category samples: {self.category_samples}",
            f"ordering samples: {self.ordering_samples}",
            f"candidate regions: {self.initial_regions}",
            f"surviving regions: {self.surviving_regions}",
        ]
        for ctx, count in self.groups_per_context.items():
            lines.append(f"region groups [{ctx}]: {count}")
        for stage, seconds in self.timings.items():
            lines.append(f"time [{stage}]: {seconds:.2f}s")
        for path, reason in self.skipped:
            lines.append(f"warning: skipped {path}: {reason}")
        return "\n".join(lines)


@dataclass
class LearnResult:
    model: OrderModel
    report: LearnReport
    category_dataset: Dataset
    ordering_dataset: Dataset


def build_category_samples(corpus: list[SourceFile], patterns: NamePatterns) -> Dataset:
    """One sample per ordered pair of siblings, plus EQUAL self-samples."""
    ds = Dataset(list(CATEGORY_ATTRS), category_domains())

    def build(container: Component) -> None:
        ctx = child_context(container)
        children = container.children
        for i, e1 in enumerate(children):
            if e1.is_type():
                build(e1)
            ds.add(category_attrs(patterns, ctx, e1, e1), "EQUAL")
            for j, e2 in enumerate(children):
                if i == j:
                    continue
                ds.add(category_attrs(patterns, ctx, e1, e2), "BEFORE" if i < j else "AFTER")

    for src in corpus:
        if src.top_level:
            build(src.top_level[0])
    return ds


def build_ordering_samples(
    table: RegionTable,
    corpus: list[SourceFile],
    assignment: dict[int, int],
    facts_by_file: dict[int, CallFacts],
    patterns: NamePatterns,
) -> Dataset:
    """Pairwise samples between co-region siblings, tagged with INDEX."""
    index_domain = tuple(str(r.rid) for r in sorted(table.regions, key=lambda r: r.rid))
    ds = Dataset(list(ORDERING_ATTRS), ordering_domains(index_domain))
    for src in corpus:
        if not src.top_level:
            continue
        facts = facts_by_file[id(src)]
        for container in walk_containers(src.top_level[0]):
            by_region: dict[int, list[Component]] = {}
            for comp in container.children:
                rid = assignment.get(id(comp))
                if rid is not None:
                    by_region.setdefault(rid, []).append(comp)
            for rid, comps in by_region.items():
                index = str(rid)
                for i, e1 in enumerate(comps):
                    ds.add(ordering_attrs(patterns, index, facts, e1, e1), "EQUAL")
                    for j, e2 in enumerate(comps):
                        if i == j:
                            continue
                        ds.add(
                            ordering_attrs(patterns, index, facts, e1, e2),
                            "BEFORE" if i < j else "AFTER",
                        )
    return ds


def _train_or_equal(ds: Dataset) -> DecisionTree:
    if not ds.rows:
        return DecisionTree(Leaf("EQUAL", (0, 0, 0)), dict(ds.domains))
    return train(ds)


def learn_model(cfg: LearnConfig) -> LearnResult:
    report = LearnReport()
    clock = time.perf_counter

    t0 = clock()
    scan = scan_corpus(cfg.corpus_root, cfg.exclude_tests)
    if not scan.files:
        raise EmptyCorpus(f"no usable Java files under {cfg.corpus_root}")
    resolve_overrides(scan.files)
    report.files = len(scan.files)
    report.skipped = scan.skipped
    report.excluded_tests = scan.excluded_tests
    report.multiple_top_level = scan.multiple_top_level
    report.timings["parse"] = clock() - t0

    patterns = (
        load_patterns(cfg.patterns_file) if cfg.patterns_file else default_patterns()
    )

    t0 = clock()
    cat_ds = build_category_samples(scan.files, patterns)
    report.category_samples = len(cat_ds.rows)
    cat_tree = _train_or_equal(cat_ds)
    cat_tree = cleanup_significance(cat_tree, min_agree=cfg.min_leaf_agree)
    cat_tree = cleanup_consistency(cat_tree, category_swap_map())
    report.timings["category tree"] = clock() - t0

    t0 = clock()
    table = build_initial_regions(cat_tree)
    report.initial_regions = len(table.regions)
    graph, samples, assignment = assign_regions(table, scan.files, patterns)
    table = merge_empty_regions(table)
    report.surviving_regions = len(table.regions)
    cleaned = clean_graph(graph, min_arc=cfg.min_arc)
    groups = top_sort_merge(cleaned, graph, table, min_arc=cfg.min_arc)
    report.groups_per_context = {ctx: len(gs) for ctx, gs in groups.items()}
    report.timings["regions"] = clock() - t0

    t0 = clock()
    facts_by_file = {
        id(src): compute_call_facts(src.top_level[0])
        for src in scan.files
        if src.top_level
    }
    ord_ds = build_ordering_samples(table, scan.files, assignment, facts_by_file, patterns)
    report.ordering_samples = len(ord_ds.rows)
    ord_tree = _train_or_equal(ord_ds)
    ord_tree = cleanup_significance(ord_tree, min_agree=cfg.min_leaf_agree)
    ord_tree = cleanup_consistency(ord_tree, ordering_swap_map())
    report.timings["ordering tree"] = clock() - t0

    t0 = clock()
    rows_by_index: dict[str, list] = {}
    for row in ord_ds.rows:
        rows_by_index.setdefault(row.values["INDEX"], []).append(row)
    comment_specs: dict[tuple[int, ...], dict[str, CommentSpec]] = {}
    rows_by_group: dict[tuple[int, ...], list] = {}
    for ctx, ctx_groups in groups.items():
        gaps = samples.gaps.get(ctx, [])
        for group in ctx_groups:
            ids = tuple(r.rid for r in group)
            comment_specs[ids] = {
                slot: infer_comment(
                    samples.blocks_for(list(ids), slot),
                    gaps,
                    min_mode=cfg.min_mode,
                    min_fraction=cfg.mode_fraction,
                )
                for slot in SLOTS
            }
            rows_by_group[ids] = [
                row for rid in ids for row in rows_by_index.get(str(rid), [])
            ]
    meta = ModelMeta(corpus=Path(cfg.corpus_root).name, file_count=len(scan.files))
    model = assemble_model(groups, comment_specs, ord_tree, rows_by_group, patterns, meta)
    report.timings["assemble"] = clock() - t0

    return LearnResult(model, report, cat_ds, ord_ds)
