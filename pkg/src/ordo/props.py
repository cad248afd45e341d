"""Nominal attributes computed over components and component pairs.

Two attribute families drive the learner: category attributes describe a
pair of components by kind, protection, and name-convention flags, and
ordering attributes compare two components of the same region (name order,
call relations, parameter counts, ...).  All values are strings drawn from
small finite domains so they can feed a nominal decision tree directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from .extract import CallFacts, Component

CONTEXTS = ("CLASS", "INTERFACE", "INNER_CLASS", "INNER_INTERFACE")
KINDS = (
    "CLASS",
    "INTERFACE",
    "ENUM",
    "FIELD",
    "METHOD",
    "CONSTRUCTOR",
    "INITIALIZER",
    "ANNOTATION",
    "ANNOTATION_MEMBER",
)
PROTECTIONS = ("PUBLIC", "PROTECTED", "PACKAGE", "PRIVATE")
FLAGS = ("T", "F")
LABELS = ("BEFORE", "AFTER", "EQUAL")

PATTERN_KEYS = ("ACCESS", "FACTORY", "OUTPUT", "MAIN", "GETTER", "SETTER")

_DEFAULT_PATTERNS = {
    "ACCESS": "(get|is|set)[A-Z][A-Za-z0-9]*",
    "FACTORY": "(new|create)[A-Z][A-Za-z0-9]*",
    "OUTPUT": "toString",
    "MAIN": "main",
    "GETTER": "(get|is)[A-Z][A-Za-z0-9]*",
    "SETTER": "(set)[A-Z][A-Za-z0-9]*",
}

# Category properties that can constrain a region, with their value domains.
CATEGORY_PROPS = {
    "PROTECT": PROTECTIONS,
    "STATIC": FLAGS,
    "ACCESS": FLAGS,
    "FACTORY": FLAGS,
    "OUTPUT": FLAGS,
    "MAIN": FLAGS,
}

_ORDER3 = ("LSS", "EQL", "GTR")
_CALLERS = ("NA", "NONE", "ONE", "TWO", "MANY")


class UnknownPatternKey(ValueError):
    def __init__(self, key: str):
        super().__init__(f"unknown pattern key {key!r} (expected one of {', '.join(PATTERN_KEYS)})")
        self.key = key


class BadPattern(ValueError):
    def __init__(self, key: str, line: int, reason: str):
        super().__init__(f"bad regex for {key} at line {line}: {reason}")
        self.key = key
        self.line = line


@dataclass(frozen=True)
class NamePatterns:
    """The six name-convention regexes, full-match anchored."""

    regexes: Mapping[str, str]
    source: str = field(default="default", compare=False)
    _compiled: dict = field(default_factory=dict, compare=False, repr=False)

    def matches(self, key: str, name: str) -> bool:
        rx = self._compiled.get(key)
        if rx is None:
            rx = re.compile(self.regexes[key])
            self._compiled[key] = rx
        return rx.fullmatch(name) is not None

    def flag(self, key: str, comp: Component) -> str:
        # Name-convention flags classify methods; everything else reads F.
        if comp.kind != "METHOD":
            return "F"
        return "T" if self.matches(key, comp.name) else "F"


def default_patterns() -> NamePatterns:
    return NamePatterns(dict(_DEFAULT_PATTERNS))


def load_patterns(path: str | Path) -> NamePatterns:
    """Read a KEY=REGEX property file; unset keys keep their defaults."""
    regexes = dict(_DEFAULT_PATTERNS)
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise BadPattern(stripped, lineno, "expected KEY=REGEX")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in PATTERN_KEYS:
            raise UnknownPatternKey(key)
        try:
            re.compile(value)
        except re.error as exc:
            raise BadPattern(key, lineno, str(exc)) from None
        regexes[key] = value
    return NamePatterns(regexes, source=str(path))


def protection(comp: Component) -> str:
    for p in PROTECTIONS:
        if p in comp.modifiers:
            return p
    return "PACKAGE"


def _flag(comp: Component, modifier: str) -> str:
    return "T" if modifier in comp.modifiers else "F"


def category_prop_value(patterns: NamePatterns, comp: Component, prop: str) -> str:
    """Value of one category property (PROTECT, STATIC, or a name flag)."""
    if prop == "PROTECT":
        return protection(comp)
    if prop == "STATIC":
        return _flag(comp, "STATIC")
    return patterns.flag(prop, comp)


CATEGORY_ATTRS: tuple[str, ...] = ("NESTED",) + tuple(
    f"{side}{base}"
    for base in ("TYPE", "PROTECT", "STATIC", "ACCESS", "FACTORY", "OUTPUT", "MAIN")
    for side in ("From", "To")
)


def category_domains() -> dict[str, tuple[str, ...]]:
    domains: dict[str, tuple[str, ...]] = {"NESTED": CONTEXTS}
    for side in ("From", "To"):
        domains[f"{side}TYPE"] = KINDS
        domains[f"{side}PROTECT"] = PROTECTIONS
        for key in ("STATIC", "ACCESS", "FACTORY", "OUTPUT", "MAIN"):
            domains[f"{side}{key}"] = FLAGS
    return domains


def category_attrs(
    patterns: NamePatterns, ctx: str, e1: Component, e2: Component
) -> dict[str, str]:
    """Attribute vector used to learn which components group together."""
    row = {"NESTED": ctx}
    for side, comp in (("From", e1), ("To", e2)):
        row[f"{side}TYPE"] = comp.kind
        row[f"{side}PROTECT"] = protection(comp)
        row[f"{side}STATIC"] = _flag(comp, "STATIC")
        for key in ("ACCESS", "FACTORY", "OUTPUT", "MAIN"):
            row[f"{side}{key}"] = patterns.flag(key, comp)
    return row


ORDERING_ATTRS: tuple[str, ...] = (
    "INDEX",
    "ALPHAORDER",
    "CASEORDER",
    "FIELDORDER",
    "CALLORDER",
    "INTERFACEORDER",
    "MOREPARAMS",
    "LENGTHORDER",
) + tuple(
    f"{side}{base}"
    for base in ("PROTECT", "STATIC", "FINAL", "ABSTRACT", "CALLERS", "GETTER", "SETTER")
    for side in ("From", "To")
)


def ordering_domains(index_domain: tuple[str, ...]) -> dict[str, tuple[str, ...]]:
    domains: dict[str, tuple[str, ...]] = {
        "INDEX": index_domain,
        "ALPHAORDER": _ORDER3,
        "CASEORDER": _ORDER3,
        "FIELDORDER": _ORDER3 + ("NA",),
        "CALLORDER": ("NONE", "CALLS", "CALLEDBY", "BOTH", "NA"),
        "INTERFACEORDER": ("SAME", "PRIOR", "AFTER", "NA"),
        "MOREPARAMS": ("T", "F", "NA"),
        "LENGTHORDER": FLAGS,
    }
    for side in ("From", "To"):
        domains[f"{side}PROTECT"] = PROTECTIONS
        for key in ("STATIC", "FINAL", "ABSTRACT", "GETTER", "SETTER"):
            domains[f"{side}{key}"] = FLAGS
        domains[f"{side}CALLERS"] = _CALLERS
    return domains


def _cmp3(a, b) -> str:
    if a < b:
        return "LSS"
    if a > b:
        return "GTR"
    return "EQL"


_FIELD_PREFIXES = ("get", "set", "new", "is")


def _strip_field_prefix(name: str) -> str | None:
    for pre in _FIELD_PREFIXES:
        if name.startswith(pre):
            return name[len(pre):]
    return None


def _is_methodlike(comp: Component) -> bool:
    # Constructors take part in call and parameter comparisons.
    return comp.kind in ("METHOD", "CONSTRUCTOR")


def _callers_bucket(count: int) -> str:
    if count <= 0:
        return "NONE"
    if count == 1:
        return "ONE"
    if count == 2:
        return "TWO"
    return "MANY"


def ordering_attrs(
    patterns: NamePatterns,
    region_id: str,
    facts: CallFacts,
    e1: Component,
    e2: Component,
) -> dict[str, str]:
    """Attribute vector used to learn ordering within a region."""
    row: dict[str, str] = {"INDEX": region_id}
    row["ALPHAORDER"] = _cmp3(e1.name, e2.name)
    row["CASEORDER"] = _cmp3(e1.name.casefold(), e2.name.casefold())
    r1 = _strip_field_prefix(e1.name)
    r2 = _strip_field_prefix(e2.name)
    if r1 is None or r2 is None:
        row["FIELDORDER"] = "NA"
    else:
        row["FIELDORDER"] = _cmp3(r1.casefold(), r2.casefold())

    m1 = _is_methodlike(e1)
    m2 = _is_methodlike(e2)
    if not (m1 and m2):
        row["CALLORDER"] = "NA"
    else:
        fwd = facts.has_call(e1, e2)
        back = facts.has_call(e2, e1)
        if fwd and back:
            row["CALLORDER"] = "BOTH"
        elif fwd:
            row["CALLORDER"] = "CALLS"
        elif back:
            row["CALLORDER"] = "CALLEDBY"
        else:
            row["CALLORDER"] = "NONE"

    o1 = e1.overridden_from
    o2 = e2.overridden_from
    if o1 is None or o2 is None:
        row["INTERFACEORDER"] = "NA"
    elif o1[1] < o2[1]:
        row["INTERFACEORDER"] = "PRIOR"
    elif o1[1] > o2[1]:
        row["INTERFACEORDER"] = "AFTER"
    else:
        row["INTERFACEORDER"] = "SAME"

    if m1 and m2 and e1.name == e2.name:
        p1 = e1.param_count or 0
        p2 = e2.param_count or 0
        row["MOREPARAMS"] = "T" if p2 > p1 else "F"
    else:
        row["MOREPARAMS"] = "NA"

    row["LENGTHORDER"] = "T" if e1.body_lines >= 2 * max(1, e2.body_lines) else "F"

    for side, comp in (("From", e1), ("To", e2)):
        row[f"{side}PROTECT"] = protection(comp)
        row[f"{side}STATIC"] = _flag(comp, "STATIC")
        row[f"{side}FINAL"] = _flag(comp, "FINAL")
        row[f"{side}ABSTRACT"] = _flag(comp, "ABSTRACT")
        if _is_methodlike(comp):
            row[f"{side}CALLERS"] = _callers_bucket(facts.caller_count(comp))
        else:
            row[f"{side}CALLERS"] = "NA"
        row[f"{side}GETTER"] = patterns.flag("GETTER", comp)
        row[f"{side}SETTER"] = patterns.flag("SETTER", comp)
    return row


@dataclass(frozen=True)
class SwapMap:
    """How an attribute vector transforms when the two components swap.

    ``attrs`` maps each attribute to its counterpart (From/To pairs exchange,
    comparators map to themselves).  ``values`` maps an attribute and value
    to the set of values the swapped pair may take; most are singletons, but
    recomputed comparators (MOREPARAMS, LENGTHORDER) stay ambiguous on F.
    """

    attrs: Mapping[str, str]
    values: Mapping[str, Mapping[str, frozenset[str]]]

    def swapped_attr(self, attr: str) -> str:
        return self.attrs.get(attr, attr)

    def swapped_values(self, attr: str, value: str) -> frozenset[str]:
        table = self.values.get(attr)
        if table is None:
            return frozenset((value,))
        return table[value]

    def swap_sample(self, values: Mapping[str, str]) -> dict[str, str]:
        """Exact swapped vector; only valid when every mapping is a singleton."""
        out = {}
        for attr, value in values.items():
            mapped = self.swapped_values(attr, value)
            if len(mapped) != 1:
                raise ValueError(f"{attr}={value} has no unique swap; recompute instead")
            out[self.swapped_attr(attr)] = next(iter(mapped))
        return out


def _involution(*pairs: tuple[str, str], fixed: tuple[str, ...] = ()) -> dict[str, frozenset[str]]:
    table = {v: frozenset((v,)) for v in fixed}
    for a, b in pairs:
        table[a] = frozenset((b,))
        table[b] = frozenset((a,))
    return table


def _from_to_attr_map(attrs: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for attr in attrs:
        if attr.startswith("From"):
            out[attr] = "To" + attr[4:]
        elif attr.startswith("To"):
            out[attr] = "From" + attr[2:]
        else:
            out[attr] = attr
    return out


def category_swap_map() -> SwapMap:
    return SwapMap(_from_to_attr_map(CATEGORY_ATTRS), {})


def ordering_swap_map() -> SwapMap:
    values: dict[str, Mapping[str, frozenset[str]]] = {
        "ALPHAORDER": _involution(("LSS", "GTR"), fixed=("EQL",)),
        "CASEORDER": _involution(("LSS", "GTR"), fixed=("EQL",)),
        "FIELDORDER": _involution(("LSS", "GTR"), fixed=("EQL", "NA")),
        "CALLORDER": _involution(("CALLS", "CALLEDBY"), fixed=("NONE", "BOTH", "NA")),
        "INTERFACEORDER": _involution(("PRIOR", "AFTER"), fixed=("SAME", "NA")),
        # T means strictly-more / significantly-longer, so it flips to F; F is
        # ambiguous under recomputation (ties stay F, strict cases flip to T).
        "MOREPARAMS": {
            "T": frozenset(("F",)),
            "F": frozenset(("T", "F")),
            "NA": frozenset(("NA",)),
        },
        "LENGTHORDER": {"T": frozenset(("F",)), "F": frozenset(("T", "F"))},
    }
    return SwapMap(_from_to_attr_map(ORDERING_ATTRS), values)
