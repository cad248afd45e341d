"""Declaration-level Java extraction.

Files are tokenized and segmented into components (fields, methods,
constructors, initializers, nested types) with exact character spans, the
verbatim comment/blank-line text that precedes each declaration, and
best-effort call and interface relations gathered from method bodies.
Expressions are never analyzed beyond brace/paren matching, so the parser
stays fast and tolerant; anything it cannot segment raises ParseError.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple

KIND_CLASS = "CLASS"
KIND_INTERFACE = "INTERFACE"
KIND_ENUM = "ENUM"
KIND_FIELD = "FIELD"
KIND_METHOD = "METHOD"
KIND_CONSTRUCTOR = "CONSTRUCTOR"
KIND_INITIALIZER = "INITIALIZER"
KIND_ANNOTATION = "ANNOTATION"
KIND_ANNOTATION_MEMBER = "ANNOTATION_MEMBER"

TYPE_KINDS = (KIND_CLASS, KIND_INTERFACE, KIND_ENUM, KIND_ANNOTATION)
METHODLIKE_KINDS = (KIND_METHOD, KIND_CONSTRUCTOR)

_MODIFIER_WORDS = {
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "strictfp",
    "transient",
    "volatile",
    "synchronized",
    "native",
    "default",
    "sealed",
}
_TRACKED_MODIFIERS = {
    "public": "PUBLIC",
    "protected": "PROTECTED",
    "private": "PRIVATE",
    "static": "STATIC",
    "final": "FINAL",
    "abstract": "ABSTRACT",
}
_PRIMITIVES = {"void", "int", "long", "boolean", "char", "byte", "short", "float", "double"}
_NON_CALL_KEYWORDS = {
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "return",
    "synchronized",
    "assert",
    "throw",
    "this",
    "super",
    "new",
    "do",
    "else",
    "try",
    "case",
}


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(eq=False)
class Component:
    """One declaration, with its position and everything the model reads."""

    kind: str
    name: str
    modifiers: frozenset[str]
    span: tuple[int, int]
    leading_start: int
    leading_text: str
    context: str | None = None
    param_count: int | None = None
    children: list["Component"] = field(default_factory=list)
    body_span: tuple[int, int] | None = None
    body_lines: int = 0
    declared_interfaces: tuple[str, ...] = ()
    overridden_from: tuple[str, int] | None = None
    calls: tuple[tuple[str, int], ...] = ()

    def is_type(self) -> bool:
        return self.kind in TYPE_KINDS

    def is_methodlike(self) -> bool:
        return self.kind in METHODLIKE_KINDS


@dataclass(eq=False)
class SourceFile:
    path: str
    text: str
    top_level: list[Component]


@dataclass
class CallFacts:
    """Name-and-arity resolved call relation within one top-level type."""

    _calls: frozenset[tuple[int, int]]
    _caller_counts: dict[int, int]

    def has_call(self, caller: Component, callee: Component) -> bool:
        return (id(caller), id(callee)) in self._calls

    def caller_count(self, callee: Component) -> int:
        return self._caller_counts.get(id(callee), 0)


class _Token(NamedTuple):
    kind: str
    text: str
    start: int
    end: int


_TOKEN_RE = re.compile(
    r"""(?P<skip>\s+|//[^\n]*|/\*.*?\*/)
      | (?P<str>\"\"\".*?\"\"\"|"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
      | (?P<id>[A-Za-z_$][A-Za-z0-9_$]*)
      | (?P<num>\.?\d[\w$.]*)
      | (?P<punct>.)
    """,
    re.VERBOSE | re.DOTALL,
)


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "skip":
            continue
        toks.append(_Token(kind, m.group(), m.start(), m.end()))
    return toks


def child_context(container: Component) -> str:
    """Context that members of the given type component live in."""
    interface_like = container.kind in (KIND_INTERFACE, KIND_ANNOTATION)
    if container.context is None:
        return "INTERFACE" if interface_like else "CLASS"
    return "INNER_INTERFACE" if interface_like else "INNER_CLASS"


class _Parser:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.toks = _tokenize(text)

    def error(self, message: str, offset: int) -> ParseError:
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return ParseError(message, line, col)

    def tok(self, i: int) -> _Token:
        if i >= len(self.toks):
            raise self.error("unexpected end of file", len(self.text))
        return self.toks[i]

    def match_delim(self, i: int, open_text: str, close_text: str) -> int:
        """Index of the token closing the delimiter opened at i."""
        depth = 0
        toks = self.toks
        for j in range(i, len(toks)):
            t = toks[j].text
            if t == open_text:
                depth += 1
            elif t == close_text:
                depth -= 1
                if depth == 0:
                    return j
        raise self.error(f"unbalanced {open_text!r}", self.toks[i].start)

    def skip_angle(self, i: int) -> int:
        """Index just past a balanced <...> starting at i."""
        depth = 0
        toks = self.toks
        for j in range(i, len(toks)):
            t = toks[j].text
            if t == "<":
                depth += 1
            elif t == ">":
                depth -= 1
                if depth == 0:
                    return j + 1
        raise self.error("unbalanced '<'", toks[i].start)

    def parse(self) -> SourceFile:
        toks = self.toks
        i = 0
        prev_end = 0
        tops: list[Component] = []
        while i < len(toks):
            t = toks[i]
            if t.text in ("package", "import"):
                while i < len(toks) and toks[i].text != ";":
                    i += 1
                if i < len(toks):
                    prev_end = toks[i].end
                    i += 1
                continue
            if t.text == ";":
                if tops:
                    c = tops[-1]
                    c.span = (c.span[0], t.end)
                else:
                    prev_end = t.end
                i += 1
                continue
            comp, i = self.parse_type(i, prev_end)
            tops.append(comp)
            prev_end = comp.span[1]
        src = SourceFile(self.path, self.text, tops)
        for top in tops:
            _assign_contexts(top)
        return src

    def parse_modifiers(self, i: int) -> tuple[set[str], int]:
        mods: set[str] = set()
        toks = self.toks
        while i < len(toks):
            t = toks[i]
            if t.text == "@":
                if i + 1 < len(toks) and toks[i + 1].text == "interface":
                    break
                i += 2  # '@' and the annotation name
                while i + 1 < len(toks) and toks[i].text == "." and toks[i + 1].kind == "id":
                    i += 2
                if i < len(toks) and toks[i].text == "(":
                    i = self.match_delim(i, "(", ")") + 1
                continue
            if t.kind == "id" and t.text == "non" and i + 2 < len(toks) \
                    and toks[i + 1].text == "-" and toks[i + 2].text == "sealed":
                i += 3
                continue
            if t.kind == "id" and t.text in _MODIFIER_WORDS:
                tracked = _TRACKED_MODIFIERS.get(t.text)
                if tracked:
                    mods.add(tracked)
                i += 1
                continue
            break
        return mods, i

    def parse_type(self, i: int, leading_start: int) -> tuple[Component, int]:
        toks = self.toks
        start_off = toks[i].start if i < len(toks) else len(self.text)
        mods, j = self.parse_modifiers(i)
        t = self.tok(j)
        if t.text == "@" and self.tok(j + 1).text == "interface":
            kind = KIND_ANNOTATION
            j += 2
        elif t.text in ("class", "record"):
            kind = KIND_CLASS
            j += 1
        elif t.text == "interface":
            kind = KIND_INTERFACE
            j += 1
        elif t.text == "enum":
            kind = KIND_ENUM
            j += 1
        else:
            raise self.error(f"expected a type declaration, found {t.text!r}", t.start)
        name_tok = self.tok(j)
        if name_tok.kind != "id":
            raise self.error(f"expected a type name, found {name_tok.text!r}", name_tok.start)
        name = name_tok.text
        j += 1
        if j < len(toks) and toks[j].text == "<":
            j = self.skip_angle(j)
        if j < len(toks) and toks[j].text == "(":  # record header
            j = self.match_delim(j, "(", ")") + 1

        interfaces: list[str] = []
        wants = "extends" if kind in (KIND_INTERFACE, KIND_ANNOTATION) else "implements"
        while j < len(toks) and toks[j].text != "{":
            if toks[j].text == wants:
                j += 1
                j = self.collect_type_names(j, interfaces)
            else:
                j += 1
        if j >= len(toks):
            raise self.error(f"missing body for type {name}", name_tok.start)
        lb = j
        rb = self.match_delim(lb, "{", "}")
        comp = Component(
            kind=kind,
            name=name,
            modifiers=frozenset(mods),
            span=(start_off, toks[rb].end),
            leading_start=leading_start,
            leading_text=self.text[leading_start:start_off],
            body_span=(toks[lb].end, toks[rb].start),
            declared_interfaces=tuple(interfaces),
        )
        if kind == KIND_ENUM:
            comp.children = self.parse_enum_body(lb, rb, comp)
        else:
            comp.children = self.parse_members(lb, rb, comp)
        comp.body_lines = self.text.count("\n", comp.body_span[0], comp.body_span[1])
        return comp, rb + 1

    def collect_type_names(self, j: int, out: list[str]) -> int:
        """Comma-separated qualified type names; stores simple names."""
        toks = self.toks
        while j < len(toks):
            t = toks[j]
            if t.kind != "id":
                break
            simple = t.text
            j += 1
            while j + 1 < len(toks) and toks[j].text == "." and toks[j + 1].kind == "id":
                simple = toks[j + 1].text
                j += 2
            if j < len(toks) and toks[j].text == "<":
                j = self.skip_angle(j)
            out.append(simple)
            if j < len(toks) and toks[j].text == ",":
                j += 1
                continue
            break
        return j

    def parse_members(self, lb: int, rb: int, container: Component) -> list[Component]:
        toks = self.toks
        children: list[Component] = []
        prev_end = toks[lb].end
        i = lb + 1
        while i < rb:
            t = toks[i]
            if t.text == ";":
                if children:
                    c = children[-1]
                    c.span = (c.span[0], t.end)
                    prev_end = t.end
                i += 1
                continue
            comp, i = self.parse_member(i, container, prev_end)
            children.append(comp)
            prev_end = comp.span[1]
        return children

    def parse_enum_body(self, lb: int, rb: int, container: Component) -> list[Component]:
        toks = self.toks
        children: list[Component] = []
        prev_end = toks[lb].end
        i = lb + 1
        # Constant list runs until ';' or the closing brace.
        while i < rb:
            if toks[i].text == ";":
                prev_end = toks[i].end
                i += 1
                break
            start = i
            _, j = self.parse_modifiers(i)  # annotations on constants
            name_tok = self.tok(j)
            if name_tok.kind != "id":
                raise self.error(
                    f"expected an enum constant, found {name_tok.text!r}", name_tok.start
                )
            j += 1
            if j < rb and toks[j].text == "(":
                j = self.match_delim(j, "(", ")") + 1
            if j < rb and toks[j].text == "{":
                j = self.match_delim(j, "{", "}") + 1
            end = toks[j - 1].end
            took_comma = j < rb and toks[j].text == ","
            if took_comma:
                end = toks[j].end
                j += 1
            children.append(
                Component(
                    kind=KIND_FIELD,
                    name=name_tok.text,
                    modifiers=frozenset(("PUBLIC", "STATIC", "FINAL")),
                    span=(toks[start].start, end),
                    leading_start=prev_end,
                    leading_text=self.text[prev_end:toks[start].start],
                )
            )
            prev_end = end
            i = j
        # Ordinary members after the constants.
        while i < rb:
            t = toks[i]
            if t.text == ";":
                if children:
                    c = children[-1]
                    c.span = (c.span[0], t.end)
                    prev_end = t.end
                i += 1
                continue
            comp, i = self.parse_member(i, container, prev_end)
            children.append(comp)
            prev_end = comp.span[1]
        return children

    def parse_member(self, i: int, container: Component, leading_start: int) -> tuple[Component, int]:
        toks = self.toks
        start_off = toks[i].start
        mods, j = self.parse_modifiers(i)
        t = self.tok(j)

        if t.text == "{":
            rb2 = self.match_delim(j, "{", "}")
            comp = Component(
                kind=KIND_INITIALIZER,
                name="",
                modifiers=frozenset(mods),
                span=(start_off, toks[rb2].end),
                leading_start=leading_start,
                leading_text=self.text[leading_start:start_off],
                body_span=(toks[j].end, toks[rb2].start),
            )
            comp.body_lines = self.text.count("\n", *comp.body_span)
            self.finish_member(comp, container, has_body=True)
            return comp, rb2 + 1

        if t.text in ("class", "interface", "enum", "record") or (
            t.text == "@" and self.tok(j + 1).text == "interface"
        ):
            comp, nxt = self.parse_type(i, leading_start)
            self.finish_member(comp, container, has_body=True)
            return comp, nxt

        jj = j
        if self.tok(jj).text == "<":
            jj = self.skip_angle(jj)

        # Scan ahead for what ends the declarator head: a parameter list,
        # an initializer, another declarator, or the terminating semicolon.
        angle = bracket = 0
        name_tok: _Token | None = None
        k = jj
        hit: _Token | None = None
        while k < len(toks):
            t2 = toks[k]
            txt = t2.text
            if angle == 0 and bracket == 0 and txt in ("(", "=", ";", ","):
                hit = t2
                break
            if txt == "<":
                angle += 1
            elif txt == ">":
                angle = max(0, angle - 1)
            elif txt == "[":
                bracket += 1
            elif txt == "]":
                bracket = max(0, bracket - 1)
            elif t2.kind == "id" and angle == 0 and bracket == 0:
                name_tok = t2
            k += 1
        if hit is None:
            raise self.error("could not find the end of a declaration", start_off)

        if hit.text == "(":
            return self.parse_methodlike(i, start_off, mods, jj, k, container, leading_start)

        # Field declaration: runs to the ';' closing all declarators.
        if name_tok is None:
            raise self.error("field declaration without a name", start_off)
        end_idx = k if hit.text == ";" else self.scan_to_semicolon(k)
        comp = Component(
            kind=KIND_FIELD,
            name=name_tok.text,
            modifiers=frozenset(mods),
            span=(start_off, toks[end_idx].end),
            leading_start=leading_start,
            leading_text=self.text[leading_start:start_off],
        )
        comp.body_lines = self.text.count("\n", *comp.span)
        self.finish_member(comp, container, has_body=False)
        return comp, end_idx + 1

    def scan_to_semicolon(self, k: int) -> int:
        """Index of the next ';' at zero paren/brace/bracket depth."""
        toks = self.toks
        depth = 0
        while k < len(toks):
            txt = toks[k].text
            if txt in "([{":
                depth += 1
            elif txt in ")]}":
                depth -= 1
            elif txt == ";" and depth <= 0:
                return k
            k += 1
        raise self.error("unterminated declaration", toks[-1].start if toks else 0)

    def parse_methodlike(
        self,
        i: int,
        start_off: int,
        mods: set[str],
        jj: int,
        paren_idx: int,
        container: Component,
        leading_start: int,
    ) -> tuple[Component, int]:
        toks = self.toks
        name_tok = toks[paren_idx - 1]
        if name_tok.kind != "id":
            raise self.error(f"expected a method name, found {name_tok.text!r}", name_tok.start)
        if paren_idx - 1 == jj:
            kind = KIND_CONSTRUCTOR
        elif container.kind == KIND_ANNOTATION:
            kind = KIND_ANNOTATION_MEMBER
        else:
            kind = KIND_METHOD

        close = self.match_delim(paren_idx, "(", ")")
        params = self.count_params(paren_idx, close)

        # Walk past any throws clause or default value to the body or ';'.
        k = close + 1
        depth = 0
        body_range: tuple[int, int] | None = None
        end_idx: int | None = None
        while k < len(toks):
            txt = toks[k].text
            if depth == 0 and txt == "{":
                rb2 = self.match_delim(k, "{", "}")
                body_range = (k, rb2)
                end_idx = rb2
                break
            if depth == 0 and txt == ";":
                end_idx = k
                break
            if txt in "([":
                depth += 1
            elif txt in ")]":
                depth -= 1
            k += 1
        if end_idx is None:
            raise self.error(f"unterminated declaration of {name_tok.text}", start_off)

        comp = Component(
            kind=kind,
            name=name_tok.text,
            modifiers=frozenset(mods),
            span=(start_off, toks[end_idx].end),
            leading_start=leading_start,
            leading_text=self.text[leading_start:start_off],
            param_count=params if kind != KIND_ANNOTATION_MEMBER else 0,
        )
        if body_range is not None:
            lb, rb2 = body_range
            comp.body_span = (toks[lb].end, toks[rb2].start)
            comp.body_lines = self.text.count("\n", *comp.body_span)
            if kind in METHODLIKE_KINDS:
                comp.calls = self.extract_calls(lb + 1, rb2)
        self.finish_member(comp, container, has_body=body_range is not None)
        return comp, end_idx + 1

    def count_params(self, open_idx: int, close_idx: int) -> int:
        toks = self.toks
        if close_idx == open_idx + 1:
            return 0
        depth = 0
        angle = 0
        commas = 0
        for k in range(open_idx + 1, close_idx):
            txt = toks[k].text
            if txt in "([{":
                depth += 1
            elif txt in ")]}":
                depth -= 1
            elif txt == "<":
                angle += 1
            elif txt == ">":
                angle = max(0, angle - 1)
            elif txt == "," and depth == 0 and angle == 0:
                commas += 1
        return commas + 1

    def extract_calls(self, lo: int, hi: int) -> tuple[tuple[str, int], ...]:
        """Invocation identifiers (name, argument count) inside a body."""
        toks = self.toks
        out: list[tuple[str, int]] = []
        for k in range(lo, hi):
            t = toks[k]
            if t.kind != "id" or t.text in _NON_CALL_KEYWORDS or t.text in _PRIMITIVES:
                continue
            if k + 1 >= hi or toks[k + 1].text != "(":
                continue
            prev = toks[k - 1]
            if prev.text == "new":
                pass  # constructor call; keep it
            elif prev.kind == "id" or prev.text in (">", "]"):
                continue  # declaration or cast-like position
            close = self.match_delim(k + 1, "(", ")")
            argc = self.count_params(k + 1, close)
            out.append((t.text, argc))
        return tuple(out)

    def finish_member(self, comp: Component, container: Component, *, has_body: bool) -> None:
        """Apply the modifiers Java implies from the enclosing type."""
        mods = set(comp.modifiers)
        interface_like = container.kind in (KIND_INTERFACE, KIND_ANNOTATION)
        if interface_like:
            if not mods & {"PUBLIC", "PROTECTED", "PRIVATE"}:
                mods.add("PUBLIC")
            if comp.kind == KIND_FIELD:
                mods.update(("STATIC", "FINAL"))
            if comp.kind in (KIND_METHOD, KIND_ANNOTATION_MEMBER) and not has_body \
                    and "STATIC" not in mods:
                mods.add("ABSTRACT")
        if comp.kind in (KIND_INTERFACE, KIND_ENUM, KIND_ANNOTATION):
            mods.add("STATIC")
        if not mods & {"PUBLIC", "PROTECTED", "PRIVATE"}:
            mods.add("PACKAGE")
        comp.modifiers = frozenset(mods)


def _assign_contexts(top: Component) -> None:
    top.context = None
    if not top.modifiers & {"PUBLIC", "PROTECTED", "PRIVATE"}:
        top.modifiers = top.modifiers | {"PACKAGE"}

    def walk(container: Component) -> None:
        ctx = child_context(container)
        for ch in container.children:
            ch.context = ctx
            if ch.is_type():
                walk(ch)

    walk(top)


def parse_file(path: str | Path, text: str | None = None) -> SourceFile:
    """Parse one Java file into components; raises ParseError on failure."""
    if text is None:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
    return _Parser(text, str(path)).parse()


def iter_components(file: SourceFile) -> Iterator[Component]:
    stack = list(file.top_level)
    while stack:
        comp = stack.pop()
        yield comp
        stack.extend(comp.children)


def walk_containers(top: Component) -> Iterator[Component]:
    """The top-level type and every nested type under it, outside-in."""
    queue = [top]
    while queue:
        comp = queue.pop(0)
        yield comp
        queue.extend(ch for ch in comp.children if ch.is_type())


_JUNIT_RE = re.compile(r"@Test\b|@Before\b|@After\b|import\s+org\.junit")


def looks_like_test(path: Path, text: str) -> bool:
    if any(part.lower() in ("test", "tests") for part in path.parts[:-1]):
        return True
    return _JUNIT_RE.search(text) is not None


@dataclass
class CorpusScan:
    files: list[SourceFile]
    skipped: list[tuple[str, str]]
    excluded_tests: int
    multiple_top_level: list[str]


def scan_corpus(root: str | Path, exclude_tests: bool = True) -> CorpusScan:
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus root {root} is not a directory")
    files: list[SourceFile] = []
    skipped: list[tuple[str, str]] = []
    excluded = 0
    multi: list[str] = []
    for path in sorted(root.rglob("*.java")):
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            skipped.append((str(path), str(exc)))
            continue
        if exclude_tests and looks_like_test(path.relative_to(root), text):
            excluded += 1
            continue
        try:
            src = parse_file(path, text)
        except ParseError as exc:
            skipped.append((str(path), str(exc)))
            continue
        if len(src.top_level) > 1:
            multi.append(str(path))
        files.append(src)
    return CorpusScan(files, skipped, excluded, multi)


def collect_corpus(root: str | Path, exclude_tests: bool = True) -> list[SourceFile]:
    return scan_corpus(root, exclude_tests).files


def compute_call_facts(top: Component, extra: tuple[Component, ...] = ()) -> CallFacts:
    """Match invocations in bodies to method/constructor components.

    Matching is by simple name; the argument count only narrows the choice
    when it hits an exact declared arity.  Unresolvable calls are dropped.
    """
    pool: list[Component] = list(extra)
    for container in walk_containers(top):
        pool.extend(ch for ch in container.children if ch.is_methodlike())
    by_name: dict[str, list[Component]] = {}
    for comp in pool:
        by_name.setdefault(comp.name, []).append(comp)

    calls: set[tuple[int, int]] = set()
    callers: dict[int, set[int]] = {}
    for caller in pool:
        for name, argc in caller.calls:
            cands = by_name.get(name)
            if not cands:
                continue
            exact = [c for c in cands if c.param_count == argc]
            for target in exact or cands:
                calls.add((id(caller), id(target)))
                callers.setdefault(id(target), set()).add(id(caller))
    counts = {callee: len(srcs) for callee, srcs in callers.items()}
    return CallFacts(frozenset(calls), counts)


def resolve_overrides(files: list[SourceFile]) -> None:
    """Mark methods that match a member of an implemented corpus interface."""
    interfaces: dict[str, Component] = {}
    for src in files:
        for top in src.top_level:
            for container in walk_containers(top):
                if container.kind == KIND_INTERFACE and container.name not in interfaces:
                    interfaces[container.name] = container

    for src in files:
        for top in src.top_level:
            for container in walk_containers(top):
                if not container.declared_interfaces:
                    continue
                for member in container.children:
                    if member.kind != KIND_METHOD:
                        continue
                    for pos, iname in enumerate(container.declared_interfaces):
                        iface = interfaces.get(iname)
                        if iface is None:
                            continue
                        if any(m.name == member.name for m in iface.children):
                            member.overridden_from = (iname, pos)
                            break
