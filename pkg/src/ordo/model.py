"""The ordering model: per-context region sequences serialized as XML.

A model lists, for each nesting context, the regions in file order.  Every
region carries the categories that select its members, the prefix, between,
and suffix comment specs, and optionally a decision tree ordering members
within the region.  The XML form is stable byte-for-byte for a given model
and is meant to be hand-editable; comment text is stored verbatim in
element text (control characters XML cannot carry are mapped into the
private-use plane and restored on read).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .comments import BLANK_LINES, CommentSpec
from .dtree import DecisionTree, Leaf, Node, Split, classify, classify_leaf, relabel_leaves_equal, specialize
from .props import (
    CATEGORY_PROPS,
    CONTEXTS,
    FLAGS,
    KINDS,
    LABELS,
    ORDERING_ATTRS,
    PATTERN_KEYS,
    PROTECTIONS,
    NamePatterns,
    default_patterns,
)
from .regions import Category, Region

_COMMENT_KIND_TO_XML = {
    "LITERAL": "literal",
    "SHAPE": "shape",
    "SHAPE_DEDUP": "shape-dedup",
    "BLANK_LINES": "blank",
}
_COMMENT_KIND_FROM_XML = {v: k for k, v in _COMMENT_KIND_TO_XML.items()}


class SchemaError(ValueError):
    def __init__(self, element: str, reason: str):
        super().__init__(f"<{element}>: {reason}")
        self.element = element
        self.reason = reason


class CoverageError(ValueError):
    def __init__(self, holes: list[tuple[str, str]]):
        names = ", ".join(f"{ctx}/{kind}" for ctx, kind in holes[:5])
        super().__init__(f"model does not cover every component shape (e.g. {names})")
        self.holes = holes


class InconsistentInput(ValueError):
    pass


@dataclass(frozen=True)
class RegionSpec:
    ids: tuple[int, ...]
    categories: tuple[Category, ...]
    prefix: CommentSpec
    between: CommentSpec
    suffix: CommentSpec
    ordering: DecisionTree | None = None

    def matches(self, comp, patterns: NamePatterns) -> bool:
        return any(cat.matches(comp, patterns) for cat in self.categories)


@dataclass(frozen=True)
class ModelMeta:
    corpus: str = ""
    file_count: int = 0
    created: str = ""


@dataclass
class OrderModel:
    per_context: dict[str, list[RegionSpec]]
    patterns: NamePatterns
    meta: ModelMeta = field(default_factory=ModelMeta)


def merge_group_ordering(
    order_tree: DecisionTree,
    ids: tuple[int, ...],
    group_rows,
) -> DecisionTree | None:
    """Specialize the shared ordering tree for one region group.

    Every member id yields a specialization; rows of the group on which
    the specializations disagree force the merged leaf to EQUAL.  A tree
    that leaves no directed pair decided is dropped entirely.
    """
    trees = [specialize(order_tree, "INDEX", str(rid)) for rid in ids]
    merged = trees[0]
    if len(trees) > 1:
        bad: set[int] = set()
        for row in group_rows:
            outcomes = {classify(t, row) for t in trees}
            if len(outcomes) > 1:
                bad.add(id(classify_leaf(merged, row)))
        if bad:
            merged = relabel_leaves_equal(merged, bad)
    pair_rows = [row for row in group_rows if row.label in ("BEFORE", "AFTER")]
    if not pair_rows:
        return None
    if all(classify(merged, row) == "EQUAL" for row in pair_rows):
        return None
    return DecisionTree(merged.root, {})


def assemble_model(
    groups: dict[str, list[list[Region]]],
    comment_specs: dict[tuple[int, ...], dict[str, CommentSpec]],
    order_tree: DecisionTree,
    order_rows_by_group: dict[tuple[int, ...], list],
    patterns: NamePatterns,
    meta: ModelMeta = ModelMeta(),
) -> OrderModel:
    """Build the final model from ordered region groups."""
    per_context: dict[str, list[RegionSpec]] = {}
    for ctx in CONTEXTS:
        specs: list[RegionSpec] = []
        for group in groups.get(ctx, []):
            ids = tuple(r.rid for r in group)
            slots = comment_specs.get(ids)
            if slots is None:
                raise InconsistentInput(f"no comment specs for region group {ids}")
            ordering = merge_group_ordering(
                order_tree, ids, order_rows_by_group.get(ids, [])
            )
            specs.append(
                RegionSpec(
                    ids=ids,
                    categories=tuple(r.category for r in group),
                    prefix=slots["PREFIX"],
                    between=slots["BETWEEN"],
                    suffix=slots["SUFFIX"],
                    ordering=ordering,
                )
            )
        per_context[ctx] = specs
    return OrderModel(per_context, patterns, meta)


# XML cannot represent most control characters even as entities; map them
# into the private-use plane on write and back on read.
def _encode_text(text: str) -> str:
    return "".join(
        chr(0xE000 + ord(c)) if ord(c) < 0x20 and c not in "\t\n\r" else c for c in text
    )


def _decode_text(text: str) -> str:
    return "".join(
        chr(ord(c) - 0xE000) if 0xE000 <= ord(c) < 0xE020 else c for c in text
    )


def _esc_text(text: str) -> str:
    return escape(_encode_text(text)).replace("\r", "&#13;")


def _comment_xml(tag: str, spec: CommentSpec) -> str:
    kind = _COMMENT_KIND_TO_XML[spec.kind]
    if spec.kind == BLANK_LINES:
        return f'<{tag} kind="{kind}" lines="{spec.lines}"/>'
    return f'<{tag} kind="{kind}">{_esc_text(spec.text)}</{tag}>'


def _tree_xml(node: Node, indent: str, out: list[str]) -> None:
    if isinstance(node, Leaf):
        counts = ",".join(str(c) for c in node.counts)
        out.append(f'{indent}<leaf label="{node.label}" counts="{counts}"/>')
        return
    out.append(f'{indent}<split attr={quoteattr(node.attr)}>')
    for value, child in node.branches.items():
        out.append(f'{indent}  <branch value={quoteattr(value)}>')
        _tree_xml(child, indent + "    ", out)
        out.append(f"{indent}  </branch>")
    out.append(f"{indent}</split>")


def dumps_model(model: OrderModel) -> str:
    out: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
    meta = model.meta
    attrs = f' version="1" corpus={quoteattr(meta.corpus)} files="{meta.file_count}"'
    if meta.created:
        attrs += f" created={quoteattr(meta.created)}"
    out.append(f"<ordermodel{attrs}>")
    out.append("  <patterns>")
    for key in PATTERN_KEYS:
        out.append(f'    <pattern key="{key}" regex={quoteattr(model.patterns.regexes[key])}/>')
    out.append("  </patterns>")
    for ctx in CONTEXTS:
        out.append(f'  <context name="{ctx}">')
        for spec in model.per_context.get(ctx, []):
            ids = ",".join(str(i) for i in spec.ids)
            out.append(f'    <region ids="{ids}">')
            for cat in spec.categories:
                types = ",".join(sorted(cat.types))
                if cat.props:
                    out.append(f'      <category types={quoteattr(types)}>')
                    for prop in CATEGORY_PROPS:
                        if prop in cat.props:
                            values = ",".join(
                                v for v in CATEGORY_PROPS[prop] if v in cat.props[prop]
                            )
                            out.append(
                                f'        <prop name="{prop}" values={quoteattr(values)}/>'
                            )
                    out.append("      </category>")
                else:
                    out.append(f'      <category types={quoteattr(types)}/>')
            for tag, cspec in (
                ("prefix", spec.prefix),
                ("between", spec.between),
                ("suffix", spec.suffix),
            ):
                out.append("      " + _comment_xml(tag, cspec))
            if spec.ordering is not None:
                out.append("      <ordering>")
                _tree_xml(spec.ordering.root, "        ", out)
                out.append("      </ordering>")
            out.append("    </region>")
        out.append("  </context>")
    out.append("</ordermodel>")
    return "\n".join(out) + "\n"


def write_model(model: OrderModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def _parse_comment(elem: ET.Element) -> CommentSpec:
    kind_attr = elem.get("kind")
    kind = _COMMENT_KIND_FROM_XML.get(kind_attr or "")
    if kind is None:
        raise SchemaError(elem.tag, f"unknown comment kind {kind_attr!r}")
    if kind == BLANK_LINES:
        raw = elem.get("lines", "")
        try:
            lines = int(raw)
        except ValueError:
            raise SchemaError(elem.tag, f"bad lines count {raw!r}") from None
        if lines < 0:
            raise SchemaError(elem.tag, "lines must be >= 0")
        return CommentSpec(kind, lines=lines)
    return CommentSpec(kind, _decode_text(elem.text or ""))


def _parse_tree_node(elem: ET.Element) -> Node:
    if elem.tag == "leaf":
        label = elem.get("label")
        if label not in LABELS:
            raise SchemaError("leaf", f"unknown label {label!r}")
        raw = elem.get("counts", "0,0,0")
        try:
            counts = tuple(int(x) for x in raw.split(","))
        except ValueError:
            raise SchemaError("leaf", f"bad counts {raw!r}") from None
        if len(counts) != len(LABELS):
            raise SchemaError("leaf", f"expected {len(LABELS)} counts")
        return Leaf(label, counts)
    if elem.tag == "split":
        attr = elem.get("attr", "")
        if attr == "INDEX":
            raise SchemaError("split", "region orderings may not test INDEX")
        if attr not in ORDERING_ATTRS:
            raise SchemaError("split", f"unknown ordering attribute {attr!r}")
        branches: dict[str, Node] = {}
        for child in elem:
            if child.tag != "branch":
                raise SchemaError(child.tag, "expected <branch> under <split>")
            value = child.get("value")
            if value is None:
                raise SchemaError("branch", "missing value")
            kids = list(child)
            if len(kids) != 1:
                raise SchemaError("branch", "expected exactly one child node")
            branches[value] = _parse_tree_node(kids[0])
        if not branches:
            raise SchemaError("split", "split with no branches")
        return Split(attr, branches)
    raise SchemaError(elem.tag, "expected <split> or <leaf>")


def _parse_category(elem: ET.Element, ctx: str) -> Category:
    types_attr = elem.get("types", "")
    types = tuple(t for t in types_attr.split(",") if t)
    if not types:
        raise SchemaError("category", "missing types")
    for t in types:
        if t not in KINDS:
            raise SchemaError("category", f"unknown component kind {t!r}")
    props: dict[str, frozenset[str]] = {}
    for child in elem:
        if child.tag != "prop":
            raise SchemaError(child.tag, "expected <prop> under <category>")
        name = child.get("name", "")
        if name not in CATEGORY_PROPS:
            raise SchemaError("prop", f"unknown property {name!r}")
        values = frozenset(v for v in child.get("values", "").split(",") if v)
        if not values:
            raise SchemaError("prop", f"property {name} has no values")
        domain = frozenset(CATEGORY_PROPS[name])
        if not values <= domain:
            raise SchemaError("prop", f"values {sorted(values - domain)} outside {name} domain")
        if values == domain:
            continue  # full-domain constraints are elided
        props[name] = values
    return Category(ctx, frozenset(types), props)


def check_coverage(model: OrderModel) -> list[tuple[str, str]]:
    """(context, kind) holes where some component shape matches no region."""
    holes: list[tuple[str, str]] = []
    for ctx in CONTEXTS:
        specs = model.per_context.get(ctx, [])
        for kind in KINDS:
            flag_domains = [FLAGS] * 4 if kind == "METHOD" else [("F",)] * 4
            covered = True
            for protect in PROTECTIONS:
                for static in FLAGS:
                    for access in flag_domains[0]:
                        for factory in flag_domains[1]:
                            for output in flag_domains[2]:
                                for main in flag_domains[3]:
                                    values = {
                                        "PROTECT": protect,
                                        "STATIC": static,
                                        "ACCESS": access,
                                        "FACTORY": factory,
                                        "OUTPUT": output,
                                        "MAIN": main,
                                    }
                                    if not any(
                                        cat.matches_values(kind, values)
                                        for spec in specs
                                        for cat in spec.categories
                                    ):
                                        covered = False
            if not covered:
                holes.append((ctx, kind))
    return holes


def loads_model(text: str) -> OrderModel:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise SchemaError("ordermodel", f"not well-formed XML: {exc}") from None
    if root.tag != "ordermodel":
        raise SchemaError(root.tag, "expected <ordermodel>")
    meta = ModelMeta(
        corpus=root.get("corpus", ""),
        file_count=int(root.get("files", "0")),
        created=root.get("created", ""),
    )

    regexes = dict(default_patterns().regexes)
    patterns_elem = root.find("patterns")
    if patterns_elem is not None:
        for pat in patterns_elem:
            key = pat.get("key", "")
            if key not in PATTERN_KEYS:
                raise SchemaError("pattern", f"unknown pattern key {key!r}")
            regexes[key] = pat.get("regex", "")
    patterns = NamePatterns(regexes, source="model")

    per_context: dict[str, list[RegionSpec]] = {}
    seen_ids: set[int] = set()
    for ctx_elem in root.findall("context"):
        ctx = ctx_elem.get("name", "")
        if ctx not in CONTEXTS:
            raise SchemaError("context", f"unknown context {ctx!r}")
        if ctx in per_context:
            raise SchemaError("context", f"duplicate context {ctx}")
        specs: list[RegionSpec] = []
        for region_elem in ctx_elem.findall("region"):
            raw_ids = region_elem.get("ids", "")
            try:
                ids = tuple(int(x) for x in raw_ids.split(",") if x)
            except ValueError:
                raise SchemaError("region", f"bad ids {raw_ids!r}") from None
            if not ids:
                raise SchemaError("region", "missing ids")
            dupes = [i for i in ids if i in seen_ids]
            if dupes:
                raise SchemaError("region", f"duplicate region ids {dupes}")
            seen_ids.update(ids)
            categories = tuple(
                _parse_category(c, ctx) for c in region_elem.findall("category")
            )
            if not categories:
                raise SchemaError("region", "region without categories")
            slots = {}
            for tag in ("prefix", "between", "suffix"):
                elem = region_elem.find(tag)
                if elem is None:
                    raise SchemaError("region", f"missing <{tag}>")
                slots[tag] = _parse_comment(elem)
            ordering = None
            ordering_elem = region_elem.find("ordering")
            if ordering_elem is not None:
                kids = list(ordering_elem)
                if len(kids) != 1:
                    raise SchemaError("ordering", "expected exactly one root node")
                ordering = DecisionTree(_parse_tree_node(kids[0]), {})
            specs.append(
                RegionSpec(ids, categories, slots["prefix"], slots["between"],
                           slots["suffix"], ordering)
            )
        per_context[ctx] = specs
    for ctx in CONTEXTS:
        per_context.setdefault(ctx, [])

    model = OrderModel(per_context, patterns, meta)
    holes = check_coverage(model)
    if holes:
        raise CoverageError(holes)
    return model


def read_model(path: str | Path) -> OrderModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))
