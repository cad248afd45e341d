"""Independent brute-force oracles the tests check the library against.

Everything here is deliberately written from first principles (plain
counting, no shared code with the package) so a bug in the library cannot
hide in its own test."""

from __future__ import annotations

import math
from collections import Counter, defaultdict


def entropy_of(labels: list[str]) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    counts = Counter(labels)
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def gain_ratio_argmax(
    rows: list[tuple[dict, str]],
    attrs: list[str],
    min_leaf: int = 2,
) -> str | None:
    """Best split attribute under the C4.5 selection rule, or None.

    A split is admissible when at least two branches hold min_leaf rows;
    among admissible attributes with positive information gain, those with
    gain at least the mean positive gain compete on gain ratio, earliest
    attribute winning ties.
    """
    if len(rows) < 2 * min_leaf:
        return None
    base = entropy_of([label for _, label in rows])
    total = len(rows)
    stats: list[tuple[str, float, float]] = []
    for attr in attrs:
        parts: dict[str, list[str]] = defaultdict(list)
        for values, label in rows:
            parts[values[attr]].append(label)
        if len(parts) < 2:
            continue
        if sum(1 for p in parts.values() if len(p) >= min_leaf) < 2:
            continue
        gain = base - sum(len(p) / total * entropy_of(p) for p in parts.values())
        split_info = -sum(len(p) / total * math.log2(len(p) / total) for p in parts.values())
        if gain <= 1e-9 or split_info <= 1e-9:
            continue
        stats.append((attr, gain, gain / split_info))
    if not stats:
        return None
    avg = sum(g for _, g, _ in stats) / len(stats)
    eligible = [s for s in stats if s[1] >= avg - 1e-9]
    best = eligible[0]
    for cand in eligible[1:]:
        if cand[2] > best[2] + 1e-9:
            best = cand
    return best[0]


def lower_median_of(values: list[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]
