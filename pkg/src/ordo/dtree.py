"""Decision-tree learning over purely nominal attributes.

Top-down induction in the C4.5 style: splits maximize gain ratio among
attributes whose information gain reaches the mean positive gain, branches
cover the full value domain, and the grown tree gets pessimistic-error
pruning at confidence 0.25.  Two cleanup passes then inject DONT-CARE
(EQUAL) verdicts: one drops leaves whose support is statistically weak,
the other drops leaves whose mirror-image prediction is not the opposite
verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from statistics import NormalDist
from typing import Iterable, Mapping, Union

from .props import LABELS, SwapMap

_EPS = 1e-9
_OPPOSITE = {"BEFORE": "AFTER", "AFTER": "BEFORE"}


class EmptyDatasetError(ValueError):
    pass


@dataclass
class Sample:
    values: dict[str, str]
    label: str


@dataclass
class Dataset:
    attr_names: list[str]
    domains: dict[str, tuple[str, ...]]
    rows: list[Sample] = field(default_factory=list)

    def add(self, values: Mapping[str, str], label: str) -> None:
        self.rows.append(Sample(dict(values), label))


@dataclass(frozen=True)
class Leaf:
    label: str
    counts: tuple[int, int, int]  # per LABELS order

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class Split:
    attr: str
    branches: dict[str, "Node"]


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class DecisionTree:
    root: Node
    domains: Mapping[str, tuple[str, ...]]


def _entropy(counts: Iterable[int], total: int) -> float:
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def _majority(counts: tuple[int, int, int]) -> str:
    best = 0
    for i in range(1, len(LABELS)):
        if counts[i] > counts[best]:
            best = i
    return LABELS[best]


_Z = NormalDist().inv_cdf(1 - 0.25)


def _added_errors(n: float, e: float, cf: float = 0.25) -> float:
    """Extra errors the pessimistic upper confidence bound adds."""
    if n <= 0:
        return 0.0
    if cf > 0.5:
        return 0.0
    if e < 1:
        base = n * (1 - cf ** (1 / n))
        if e == 0:
            return base
        return base + e * (_added_errors(n, 1, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = _Z if cf == 0.25 else NormalDist().inv_cdf(1 - cf)
    f = (e + 0.5) / n
    term = z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))
    r = (f + z * z / (2 * n) + term) / (1 + z * z / n)
    return r * n - e


def train(dataset: Dataset, *, min_leaf: int = 2, prune: bool = True) -> DecisionTree:
    """Grow (and by default prune) a tree predicting the sample label."""
    if not dataset.rows:
        raise EmptyDatasetError("cannot train on an empty dataset")
    attrs = list(dataset.attr_names)
    label_index = {lab: i for i, lab in enumerate(LABELS)}

    # Identical rows collapse to one weighted row; everything downstream
    # works on weights, which keeps large corpora cheap.
    weights: dict[tuple[tuple[str, ...], str], int] = {}
    for s in dataset.rows:
        key = (tuple(s.values[a] for a in attrs), s.label)
        weights[key] = weights.get(key, 0) + 1
    rows = [(vec, label_index[lab], w) for (vec, lab), w in weights.items()]

    domains = {a: tuple(dataset.domains[a]) for a in attrs}
    attr_pos = {a: i for i, a in enumerate(attrs)}

    def counts_of(subset) -> tuple[int, int, int]:
        c = [0, 0, 0]
        for _, li, w in subset:
            c[li] += w
        return tuple(c)

    def grow(subset, available: tuple[int, ...]) -> Node:
        counts = counts_of(subset)
        total = sum(counts)
        majority = _majority(counts)
        if sum(1 for c in counts if c > 0) <= 1 or total < 2 * min_leaf or not available:
            return Leaf(majority, counts)

        base = _entropy(counts, total)
        candidates = []  # (attr index, gain, gain ratio, partitions)
        for ai in available:
            parts: dict[str, list] = {}
            for row in subset:
                parts.setdefault(row[0][ai], []).append(row)
            if len(parts) < 2:
                continue
            part_stats = []
            big = 0
            for value, part in parts.items():
                pc = counts_of(part)
                pt = sum(pc)
                part_stats.append((pt, pc))
                if pt >= min_leaf:
                    big += 1
            if big < 2:
                continue
            gain = base
            split_info = 0.0
            for pt, pc in part_stats:
                frac = pt / total
                gain -= frac * _entropy(pc, pt)
                split_info -= frac * math.log2(frac)
            if gain <= _EPS or split_info <= _EPS:
                continue
            candidates.append((ai, gain, gain / split_info, parts))
        if not candidates:
            return Leaf(majority, counts)

        avg_gain = sum(c[1] for c in candidates) / len(candidates)
        eligible = [c for c in candidates if c[1] >= avg_gain - _EPS]
        best = eligible[0]
        for cand in eligible[1:]:
            if cand[2] > best[2] + _EPS:
                best = cand
        ai, _, _, parts = best
        rest = tuple(a for a in available if a != ai)
        branches: dict[str, Node] = {}
        for value in domains[attrs[ai]]:
            part = parts.get(value)
            if part:
                branches[value] = grow(part, rest)
            else:
                branches[value] = Leaf(majority, (0, 0, 0))
        return Split(attrs[ai], branches)

    root = grow(rows, tuple(range(len(attrs))))
    if prune:
        root = _prune(root)
    return DecisionTree(root, domains)


def _node_counts(node: Node) -> tuple[int, int, int]:
    if isinstance(node, Leaf):
        return node.counts
    totals = [0, 0, 0]
    for child in node.branches.values():
        for i, c in enumerate(_node_counts(child)):
            totals[i] += c
    return tuple(totals)


def _subtree_error(node: Node) -> float:
    if isinstance(node, Leaf):
        n = node.total
        wrong = n - node.counts[LABELS.index(node.label)]
        return wrong + _added_errors(n, wrong)
    return sum(_subtree_error(child) for child in node.branches.values())


def _prune(node: Node) -> Node:
    if isinstance(node, Leaf):
        return node
    pruned = Split(node.attr, {v: _prune(ch) for v, ch in node.branches.items()})
    counts = _node_counts(pruned)
    total = sum(counts)
    majority = _majority(counts)
    wrong = total - counts[LABELS.index(majority)]
    as_leaf = wrong + _added_errors(total, wrong)
    if as_leaf <= _subtree_error(pruned) + 0.1:
        return Leaf(majority, counts)
    return pruned


def _values_of(sample: Sample | Mapping[str, str]) -> Mapping[str, str]:
    return sample.values if isinstance(sample, Sample) else sample


def classify(tree: DecisionTree, sample: Sample | Mapping[str, str]) -> str:
    """Walk the tree; unseen split values fall to the heaviest branch."""
    values = _values_of(sample)
    node = tree.root
    while isinstance(node, Split):
        branch = node.branches.get(values.get(node.attr))
        if branch is None:
            branch = max(node.branches.values(), key=lambda ch: sum(_node_counts(ch)))
        node = branch
    return node.label


def _relabel(node: Node, targets: set[int]) -> Node:
    """Copy with the identified leaves relabeled EQUAL."""
    if isinstance(node, Leaf):
        if id(node) in targets:
            return replace(node, label="EQUAL")
        return node
    return Split(node.attr, {v: _relabel(ch, targets) for v, ch in node.branches.items()})


def cleanup_significance(tree: DecisionTree, *, min_agree: int = 5) -> DecisionTree:
    """Relabel leaves whose agreeing support is too weak to trust.

    A leaf with n rows and w agreeing rows keeps its verdict only when
    w >= min_agree and w exceeds n/2 by more than one standard deviation
    of a fair-coin null, i.e. w > n/2 + sqrt(n)/2.
    """
    targets: set[int] = set()

    def visit(node: Node) -> None:
        if isinstance(node, Leaf):
            if node.label == "EQUAL":
                return
            n = node.total
            w = node.counts[LABELS.index(node.label)]
            if w < min_agree or w <= n / 2 + math.sqrt(n) / 2:
                targets.add(id(node))
            return
        for child in node.branches.values():
            visit(child)

    visit(tree.root)
    return DecisionTree(_relabel(tree.root, targets), tree.domains)


def _reachable_labels(node: Node, constraints: dict[str, frozenset[str]]) -> set[str]:
    if isinstance(node, Leaf):
        return {node.label}
    allowed = constraints.get(node.attr)
    out: set[str] = set()
    for value, child in node.branches.items():
        if allowed is not None and value not in allowed:
            continue
        out |= _reachable_labels(child, constraints)
    return out


def cleanup_consistency(tree: DecisionTree, swap: SwapMap) -> DecisionTree:
    """Relabel leaves whose swapped prediction is not the opposite verdict.

    For each BEFORE/AFTER leaf, the path constraints are swapped through
    the attribute map and every completion of that swapped constraint set
    is evaluated; unless all reachable outcomes are the opposite label the
    leaf becomes EQUAL.  Runs to a fixed point since relabeling only ever
    moves verdicts toward EQUAL.
    """
    root = tree.root
    while True:
        targets: set[int] = set()

        def visit(node: Node, path: list[tuple[str, str]]) -> None:
            if isinstance(node, Leaf):
                if node.label == "EQUAL":
                    return
                swapped: dict[str, frozenset[str]] = {}
                for attr, value in path:
                    swapped[swap.swapped_attr(attr)] = swap.swapped_values(attr, value)
                outcomes = _reachable_labels(root, swapped)
                if outcomes != {_OPPOSITE[node.label]}:
                    targets.add(id(node))
                return
            for value, child in node.branches.items():
                visit(child, path + [(node.attr, value)])

        visit(root, [])
        if not targets:
            return DecisionTree(root, tree.domains)
        root = _relabel(root, targets)


def specialize(tree: DecisionTree, attr: str, value: str) -> DecisionTree:
    """Replace every split on attr with its branch for the given value."""

    def visit(node: Node) -> Node:
        if isinstance(node, Leaf):
            return node
        if node.attr == attr:
            branch = node.branches.get(value)
            if branch is None:
                branch = max(node.branches.values(), key=lambda ch: sum(_node_counts(ch)))
            return visit(branch)
        return Split(node.attr, {v: visit(ch) for v, ch in node.branches.items()})

    return DecisionTree(visit(tree.root), tree.domains)


def used_attributes(tree: DecisionTree, fixed: Mapping[str, str] | None = None) -> set[str]:
    """Attributes tested on any path compatible with the fixed values."""
    fixed = fixed or {}
    out: set[str] = set()

    def visit(node: Node) -> None:
        if isinstance(node, Leaf):
            return
        out.add(node.attr)
        pinned = fixed.get(node.attr)
        for value, child in node.branches.items():
            if pinned is not None and value != pinned:
                continue
            visit(child)

    visit(tree.root)
    return out


def classify_leaf(tree: DecisionTree, sample: Sample | Mapping[str, str]) -> Leaf:
    values = _values_of(sample)
    node = tree.root
    while isinstance(node, Split):
        branch = node.branches.get(values.get(node.attr))
        if branch is None:
            branch = max(node.branches.values(), key=lambda ch: sum(_node_counts(ch)))
        node = branch
    return node


def relabel_leaves_equal(tree: DecisionTree, leaves: set[int]) -> DecisionTree:
    """Copy of the tree with the identified leaf nodes relabeled EQUAL."""
    return DecisionTree(_relabel(tree.root, leaves), tree.domains)


def dataset_to_csv(dataset: Dataset) -> str:
    """Debug dump: one line per sample, attributes then the class label."""
    lines = [",".join(dataset.attr_names + ["class"])]
    for row in dataset.rows:
        lines.append(",".join([row.values[a] for a in dataset.attr_names] + [row.label]))
    return "\n".join(lines) + "\n"


def tree_to_text(tree: DecisionTree) -> str:
    lines: list[str] = []

    def visit(node: Node, indent: str) -> None:
        if isinstance(node, Leaf):
            counts = ",".join(str(c) for c in node.counts)
            lines.append(f"{indent}-> {node.label} ({counts})")
            return
        for value, child in node.branches.items():
            lines.append(f"{indent}{node.attr} = {value}")
            visit(child, indent + "  ")

    visit(tree.root, "")
    return "\n".join(lines) + "\n"
