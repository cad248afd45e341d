"""Inferring region comment scaffolding from observed gap text.

Each region gets a prefix, separator, and suffix comment deduced from the
raw text blocks seen at the corresponding positions in the corpus.  A block
is adopted verbatim when its most frequent form dominates (the mode rule);
failing that the blocks are simplified to their shape, then deduplicated,
and as a last resort a run of blank lines is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

LITERAL = "LITERAL"
SHAPE = "SHAPE"
SHAPE_DEDUP = "SHAPE_DEDUP"
BLANK_LINES = "BLANK_LINES"

SLOTS = ("PREFIX", "BETWEEN", "SUFFIX")


@dataclass(frozen=True)
class CommentSpec:
    kind: str
    text: str = ""
    lines: int = 0

    def render(self) -> str:
        if self.kind == BLANK_LINES:
            return "\n" * self.lines
        return self.text


@dataclass
class CommentSamples:
    """Raw material gathered during region assignment."""

    blocks: dict[tuple[int, str], list[str]] = field(default_factory=dict)
    gaps: dict[str, list[int]] = field(default_factory=dict)

    def record(self, region_id: int, slot: str, text: str) -> None:
        self.blocks.setdefault((region_id, slot), []).append(text)

    def record_gap(self, context: str, lines: int) -> None:
        self.gaps.setdefault(context, []).append(lines)

    def blocks_for(self, region_ids: list[int], slot: str) -> list[str]:
        out: list[str] = []
        for rid in sorted(region_ids):
            out.extend(self.blocks.get((rid, slot), ()))
        return out


def _mode(samples: list[str]) -> tuple[str, int]:
    """Most frequent block; ties go to the block seen earliest."""
    counts: dict[str, int] = {}
    for block in samples:
        counts[block] = counts.get(block, 0) + 1
    best = samples[0]
    for block in samples:
        if counts[block] > counts[best]:
            best = block
    return best, counts[best]


def _passes(count: int, total: int, min_mode: int, min_fraction: float) -> bool:
    return count >= min_mode and count >= min_fraction * total


def shape_block(block: str) -> str:
    """Blank out comment text, keeping only comment structure characters."""
    out = []
    for line in block.split("\n"):
        kept = "".join(c if (c in "/*" or c.isspace()) else " " for c in line)
        out.append(kept.rstrip())
    return "\n".join(out)


def dedup_lines(block: str) -> str:
    out: list[str] = []
    for line in block.split("\n"):
        if not out or line != out[-1]:
            out.append(line)
    return "\n".join(out)


def lower_median(values: list[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def infer_comment(
    samples: list[str],
    fallback_gaps: list[int],
    *,
    min_mode: int = 4,
    min_fraction: float = 0.25,
) -> CommentSpec:
    """Pick the comment spec a sample multiset supports.

    Stage 1 tries the raw mode block, stage 2 the shape-simplified blocks,
    stage 3 additionally collapses duplicate adjacent lines.  When nothing
    dominates, the result is a run of blank lines sized by the median gap.
    """
    if samples:
        block, count = _mode(samples)
        if _passes(count, len(samples), min_mode, min_fraction):
            return CommentSpec(LITERAL, block)
        shaped = [shape_block(b) for b in samples]
        block, count = _mode(shaped)
        if _passes(count, len(samples), min_mode, min_fraction):
            return CommentSpec(SHAPE, block)
        deduped = [dedup_lines(b) for b in shaped]
        block, count = _mode(deduped)
        if _passes(count, len(samples), min_mode, min_fraction):
            return CommentSpec(SHAPE_DEDUP, block)
    if not fallback_gaps:
        return CommentSpec(BLANK_LINES, lines=1)
    return CommentSpec(BLANK_LINES, lines=lower_median(fallback_gaps))


def _comment_block_starts(text: str) -> list[int]:
    """Start offsets of comment blocks: /*..*/ spans and runs of // lines."""
    starts: list[int] = []
    i = 0
    n = len(text)
    in_line_run = False
    while i < n:
        if text.startswith("/*", i):
            starts.append(i)
            end = text.find("*/", i + 2)
            i = n if end < 0 else end + 2
            in_line_run = False
            continue
        if text.startswith("//", i):
            if not in_line_run:
                starts.append(i)
                in_line_run = True
            i = text.find("\n", i)
            if i < 0:
                break
            continue
        if text[i] == "\n":
            # A blank line ends a run of line comments.
            nxt = text.find("\n", i + 1)
            segment = text[i + 1: nxt if nxt >= 0 else n]
            if not segment.strip():
                in_line_run = False
        elif not text[i].isspace():
            in_line_run = False
        i += 1
    return starts


def split_boundary_text(text: str) -> tuple[str, str]:
    """Split a region-boundary gap into (suffix of prior, prefix of next).

    With two or more comment blocks the split lands at the start of the
    line holding the last block; otherwise the whole gap is the prefix.
    """
    starts = _comment_block_starts(text)
    if len(starts) < 2:
        return "", text
    line_start = text.rfind("\n", 0, starts[-1]) + 1
    return text[:line_start], text[line_start:]


def blank_line_gap(text: str) -> int:
    """Number of whole blank lines inside an inter-component gap."""
    segments = text.split("\n")
    if len(segments) <= 2:
        return 0
    return sum(1 for seg in segments[1:-1] if not seg.strip())
