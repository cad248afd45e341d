"""Region induction: candidate categories, assignment, merging, ordering.

Candidate regions come from the category tree: for every context and
component kind, one region per combination of the property values the tree
actually consults.  A corpus pass assigns every component to a region,
counts adjacent-region transitions into a weighted precedence graph, and
gathers comment samples.  Empty regions merge into single-difference
neighbors so coverage survives, the graph is pruned to statistically
significant arcs, and a cycle-tolerant topological sort linearizes each
context, unioning neighbors with no significant mutual order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .comments import CommentSamples, blank_line_gap, split_boundary_text
from .dtree import DecisionTree, used_attributes
from .extract import Component, SourceFile, child_context
from .props import CATEGORY_PROPS, CONTEXTS, KINDS, NamePatterns, category_prop_value

_PROP_ORDER = tuple(CATEGORY_PROPS)


@dataclass(frozen=True)
class Category:
    context: str
    types: frozenset[str]
    props: dict[str, frozenset[str]]

    def allowed(self, prop: str) -> frozenset[str]:
        return self.props.get(prop, frozenset(CATEGORY_PROPS[prop]))

    def matches(self, comp: Component, patterns: NamePatterns) -> bool:
        if comp.context != self.context or comp.kind not in self.types:
            return False
        for prop, values in self.props.items():
            if category_prop_value(patterns, comp, prop) not in values:
                return False
        return True

    def matches_values(self, kind: str, values: dict[str, str]) -> bool:
        if kind not in self.types:
            return False
        return all(values[p] in vs for p, vs in self.props.items() if p in values)


@dataclass(eq=False)
class Region:
    rid: int
    category: Category
    member_count: int = 0
    members: list[Component] = field(default_factory=list)


class RegionTable:
    def __init__(self, regions: list[Region]):
        self.regions = regions
        self._rebuild_index()

    def _rebuild_index(self) -> None:
        self._by_ctx_kind: dict[tuple[str, str], list[Region]] = {}
        for region in self.regions:
            for kind in region.category.types:
                key = (region.category.context, kind)
                self._by_ctx_kind.setdefault(key, []).append(region)
        for bucket in self._by_ctx_kind.values():
            # Most constrained first keeps lookups deterministic after merges.
            bucket.sort(key=lambda r: (-len(r.category.props), r.rid))

    def by_id(self, rid: int) -> Region:
        for region in self.regions:
            if region.rid == rid:
                return region
        raise KeyError(rid)

    def find_region(self, ctx: str, comp: Component, patterns: NamePatterns) -> Region:
        for region in self._by_ctx_kind.get((ctx, comp.kind), ()):
            if region.category.matches(comp, patterns):
                return region
        raise LookupError(f"no region for a {ctx} {comp.kind} component {comp.name!r}")


@dataclass
class RegionGraph:
    weights: dict[tuple[int, int], int] = field(default_factory=dict)

    def add_arc(self, src: int, dst: int) -> None:
        if src != dst:
            self.weights[(src, dst)] = self.weights.get((src, dst), 0) + 1

    def weight(self, src: int, dst: int) -> int:
        return self.weights.get((src, dst), 0)


def build_initial_regions(category_tree: DecisionTree) -> RegionTable:
    """One candidate region per value combination of the consulted props."""
    regions: list[Region] = []
    rid = 1
    for ctx in CONTEXTS:
        for kind in KINDS:
            used = used_attributes(category_tree, {"NESTED": ctx, "FromTYPE": kind})
            used |= used_attributes(category_tree, {"NESTED": ctx, "ToTYPE": kind})
            props = [
                p for p in _PROP_ORDER
                if f"From{p}" in used or f"To{p}" in used
            ]
            domains = [CATEGORY_PROPS[p] for p in props]
            for combo in product(*domains):
                cat = Category(
                    ctx,
                    frozenset((kind,)),
                    {p: frozenset((v,)) for p, v in zip(props, combo)},
                )
                regions.append(Region(rid, cat))
                rid += 1
    return RegionTable(regions)


def assign_regions(
    table: RegionTable,
    corpus: list[SourceFile],
    patterns: NamePatterns,
) -> tuple[RegionGraph, CommentSamples, dict[int, int]]:
    """Assign every corpus component to its region, one file at a time.

    Returns the transition graph, raw comment samples, and a map from
    component identity to region id.
    """
    graph = RegionGraph()
    samples = CommentSamples()
    assignment: dict[int, int] = {}

    def order_region(container: Component) -> None:
        ctx = child_context(container)
        prev_group: Region | None = None
        prev_comp: Component | None = None
        for comp in container.children:
            if comp.is_type():
                order_region(comp)
            region = table.find_region(ctx, comp, patterns)
            region.member_count += 1
            region.members.append(comp)
            assignment[id(comp)] = region.rid
            if prev_group is None:
                samples.record(region.rid, "PREFIX", comp.leading_text)
            elif region is not prev_group:
                graph.add_arc(prev_group.rid, region.rid)
                suffix, prefix = split_boundary_text(comp.leading_text)
                samples.record(prev_group.rid, "SUFFIX", suffix)
                samples.record(region.rid, "PREFIX", prefix)
            else:
                samples.record(region.rid, "BETWEEN", comp.leading_text)
            if prev_comp is not None:
                samples.record_gap(ctx, blank_line_gap(comp.leading_text))
            prev_group = region
            prev_comp = comp

    for src in corpus:
        if src.top_level:
            order_region(src.top_level[0])
    return graph, samples, assignment


def _differing_props(empty: Category, target: Category) -> list[str]:
    """Props where the empty category is not already covered by the target."""
    out = []
    for prop in _PROP_ORDER:
        if prop in empty.props or prop in target.props:
            if not empty.allowed(prop) <= target.allowed(prop):
                out.append(prop)
    return out


def merge_empty_regions(table: RegionTable) -> RegionTable:
    """Fold empty regions into single-difference non-empty neighbors.

    Runs merge passes to a fixed point so chains of one-property steps all
    resolve; a context/kind pair with no members at all collapses to one
    unconstrained region so the model still covers every component shape.
    """
    regions = table.regions

    def merge_value(target: Region, prop: str, values: frozenset[str]) -> None:
        merged = target.category.allowed(prop) | values
        props = dict(target.category.props)
        if merged >= frozenset(CATEGORY_PROPS[prop]):
            props.pop(prop, None)
        else:
            props[prop] = merged
        target.category = Category(target.category.context, target.category.types, props)

    # Collapse kinds that never occur into a single total region.
    surviving: list[Region] = []
    seen_keys: set[tuple[str, str]] = set()
    by_key: dict[tuple[str, str], list[Region]] = {}
    for region in regions:
        kind = next(iter(region.category.types))
        by_key.setdefault((region.category.context, kind), []).append(region)
    for region in regions:
        kind = next(iter(region.category.types))
        key = (region.category.context, kind)
        bucket = by_key[key]
        if all(r.member_count == 0 for r in bucket):
            if key not in seen_keys:
                seen_keys.add(key)
                surviving.append(
                    Region(bucket[0].rid, Category(key[0], frozenset((kind,)), {}))
                )
            continue
        surviving.append(region)
    regions = surviving

    changed = True
    while changed:
        changed = False
        for empty in list(regions):
            if empty.member_count > 0:
                continue
            covered = False
            best: tuple[float, int, Region, str] | None = None
            for cand in regions:
                if cand.member_count == 0 or cand is empty:
                    continue
                if cand.category.context != empty.category.context:
                    continue
                if cand.category.types != empty.category.types:
                    continue
                diffs = _differing_props(empty.category, cand.category)
                if not diffs:
                    covered = True
                    break
                if len(diffs) != 1:
                    continue
                prop = diffs[0]
                # Prefer the merge that leaves the partner most constrained:
                # smallest share of all property combinations post-merge.
                post = 1.0
                for p in _PROP_ORDER:
                    values = cand.category.allowed(p)
                    if p == prop:
                        values = values | empty.category.allowed(p)
                    post *= len(values) / len(CATEGORY_PROPS[p])
                key = (post, cand.rid)
                if best is None or key < best[:2]:
                    best = (*key, cand, prop)
            if covered:
                regions.remove(empty)
                changed = True
                continue
            if best is None:
                continue
            _, _, partner, prop = best
            merge_value(partner, prop, empty.category.allowed(prop))
            regions.remove(empty)
            changed = True

    regions = [
        r for r in regions
        if r.member_count > 0
        or all(o.member_count == 0 for o in regions
               if o.category.context == r.category.context
               and o.category.types == r.category.types)
    ]
    return RegionTable(regions)


def significant(a: int, b: int, graph: RegionGraph, *, min_arc: int = 4) -> bool:
    """True when a precedes b often enough to trust the direction."""
    w1 = graph.weight(a, b)
    w2 = graph.weight(b, a)
    n = w1 + w2
    return w1 >= min_arc and w1 > n / 2 + math.sqrt(n) / 2


def clean_graph(graph: RegionGraph, *, min_arc: int = 4) -> RegionGraph:
    kept = {
        arc: w
        for arc, w in graph.weights.items()
        if significant(arc[0], arc[1], graph, min_arc=min_arc)
    }
    return RegionGraph(kept)


def top_sort_merge(
    clean: RegionGraph,
    full: RegionGraph,
    table: RegionTable,
    *,
    min_arc: int = 4,
) -> dict[str, list[list[Region]]]:
    """Per-context region order with union groups.

    Kahn-style sort over the cleaned arcs; when a cycle blocks progress the
    node with the least incoming weight (ties by id) is released.  A region
    appended after a predecessor it does not significantly follow joins the
    predecessor's group.
    """
    out: dict[str, list[list[Region]]] = {}
    for ctx in CONTEXTS:
        regions = sorted(
            (r for r in table.regions if r.category.context == ctx), key=lambda r: r.rid
        )
        by_id = {r.rid: r for r in regions}
        ids = set(by_id)
        arcs = [
            (src, dst, w)
            for (src, dst), w in clean.weights.items()
            if src in ids and dst in ids
        ]
        remaining = set(ids)
        order: list[int] = []
        while remaining:
            blocked = {dst for src, dst, _ in arcs if src in remaining and dst in remaining}
            ready = sorted(rid for rid in remaining if rid not in blocked)
            if ready:
                nxt = ready[0]
            else:
                nxt = min(
                    remaining,
                    key=lambda rid: (
                        sum(w for src, dst, w in arcs if dst == rid and src in remaining),
                        rid,
                    ),
                )
            order.append(nxt)
            remaining.remove(nxt)

        groups: list[list[Region]] = []
        prev: int | None = None
        for rid in order:
            if prev is None or significant(prev, rid, full, min_arc=min_arc):
                groups.append([by_id[rid]])
            else:
                groups[-1].append(by_id[rid])
            prev = rid
        out[ctx] = groups
    return out
