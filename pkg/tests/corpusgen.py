"""Synthetic Java corpus generator with a known (planted) ordering model.

Files follow a fixed member convention so tests can assert the learner
recovers it: constants (enums mixed with static fields), instance fields,
a static initializer, a constructor, public methods, private methods, and
inner classes; inner classes hold a data section then an ops section.
Every section has literal comment scaffolding.  Enum constants are laid
out exactly like inner-class fields so their shared region sees one
consistent comment.

Name pools are chosen so that sorted constants run static, static, enum,
enum, static (A < B < D < E < G initials): transitions between the two
constant regions balance out in both directions, which keeps them one
union group, while same-kind adjacency still yields separator samples.
Because the two regions alternate inside the group, the group prefix the
learner can see is the plain separator, so that is what gets planted (no
banner on the constants section).  No name matches the
get/set/is/new/toString/main conventions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from ordo.extract import Component

PREFIX = {
    "constants": "\n\n    ",
    "state": "\n\n    // ---- State ----\n\n    ",
    "init": "\n\n    // ---- Setup ----\n\n    ",
    "ctor": "\n\n    // ---- Construction ----\n\n    ",
    "api": "\n\n    // ---- Public behavior ----\n\n    ",
    "internal": "\n\n    // ---- Internals ----\n\n    ",
    "helpers": "\n\n    // ---- Helpers ----\n\n    ",
    "data": "\n\n        // -- data --\n\n        ",
    "ops": "\n\n        // -- ops --\n\n        ",
}
BETWEEN = "\n\n    "
INNER_BETWEEN = "\n\n        "

_STATIC_STEMS = ("ALPHA", "BRAVO", "GUARD")
_STATIC_SUFFIXES = ("BAND", "LIMIT", "SPAN", "STEP")
_ENUM_STEMS = ("Delta", "Entry")
_ENUM_SUFFIXES = ("Form", "Kind", "Mode")
_CONSTANT_NAMES = ("AMBER", "BASIL", "CEDAR", "IVORY", "OLIVE")
_FIELD_NAMES = (
    "budget", "cursor", "depth", "extent", "factor", "gauge",
    "margin", "quota", "ratio", "stride", "tally", "vector", "weight",
)
_METHOD_STEMS = (
    "apply", "bind", "drop", "emit", "fill", "fold", "mark", "merge",
    "pack", "pull", "push", "scan", "sync", "walk", "wire",
)
_METHOD_SUFFIXES = (
    "Batch", "Cache", "Delta", "Edges", "Frame", "Gauge", "Hooks", "Items",
    "Links", "Masks", "Nodes", "Parts", "Queue", "Range", "Slots", "Table",
)
_HELPER_NAMES = ("Carrier", "Drainer", "Emitter", "Joiner", "Keeper", "Loader")


def make_component(
    kind: str,
    name: str,
    modifiers: set[str],
    context: str,
    param_count: int | None = None,
    body_lines: int = 0,
) -> Component:
    """A free-standing component for matching against model categories."""
    mods = set(modifiers)
    if not mods & {"PUBLIC", "PROTECTED", "PRIVATE"}:
        mods.add("PACKAGE")
    return Component(
        kind=kind,
        name=name,
        modifiers=frozenset(mods),
        span=(0, 0),
        leading_start=0,
        leading_text="",
        context=context,
        param_count=param_count,
        body_lines=body_lines,
    )


@dataclass
class PlantedGroup:
    key: str
    context: str
    prefix: str
    between: str
    reps: list[Component]
    multi: bool  # several members per file, so "between" is observable


@dataclass
class Planted:
    root: Path
    files: list[Path]
    groups: dict[str, list[PlantedGroup]]
    total_lines: int = 0


def _planted_groups() -> dict[str, list[PlantedGroup]]:
    c = make_component
    return {
        "CLASS": [
            PlantedGroup(
                "constants", "CLASS", PREFIX["constants"], BETWEEN,
                [
                    c("FIELD", "ALPHA_SPAN", {"PRIVATE", "STATIC", "FINAL"}, "CLASS"),
                    c("ENUM", "DeltaKind", {"PRIVATE", "STATIC"}, "CLASS"),
                ],
                multi=True,
            ),
            PlantedGroup(
                "state", "CLASS", PREFIX["state"], BETWEEN,
                [c("FIELD", "cursor", {"PRIVATE"}, "CLASS")],
                multi=True,
            ),
            PlantedGroup(
                "init", "CLASS", PREFIX["init"], BETWEEN,
                [c("INITIALIZER", "", {"STATIC"}, "CLASS")],
                multi=False,
            ),
            PlantedGroup(
                "ctor", "CLASS", PREFIX["ctor"], BETWEEN,
                [c("CONSTRUCTOR", "Widget000", {"PUBLIC"}, "CLASS", param_count=1)],
                multi=False,
            ),
            PlantedGroup(
                "api", "CLASS", PREFIX["api"], BETWEEN,
                [c("METHOD", "applyBatch", {"PUBLIC"}, "CLASS", param_count=0)],
                multi=True,
            ),
            PlantedGroup(
                "internal", "CLASS", PREFIX["internal"], BETWEEN,
                [c("METHOD", "packFrame", {"PRIVATE"}, "CLASS", param_count=0)],
                multi=True,
            ),
            PlantedGroup(
                "helpers", "CLASS", PREFIX["helpers"], BETWEEN,
                [c("CLASS", "Carrier", {"PRIVATE"}, "CLASS")],
                multi=False,  # one helper per file, so no separator samples
            ),
        ],
        "INNER_CLASS": [
            PlantedGroup(
                "data", "INNER_CLASS", PREFIX["data"], INNER_BETWEEN,
                [
                    c("FIELD", "weight", {"PRIVATE"}, "INNER_CLASS"),
                    c("FIELD", "AMBER", {"PUBLIC", "STATIC", "FINAL"}, "INNER_CLASS"),
                ],
                multi=True,
            ),
            PlantedGroup(
                "ops", "INNER_CLASS", PREFIX["ops"], INNER_BETWEEN,
                [c("METHOD", "walkEdges", {"PUBLIC"}, "INNER_CLASS", param_count=0)],
                multi=True,
            ),
        ],
    }


def _method_body(rng: random.Random, lines: int, indent: str) -> str:
    if lines <= 0:
        return "{ }"
    stmts = "".join(
        f"{indent}    int r{j} = {rng.randrange(100)};\n" for j in range(lines)
    )
    return "{\n" + stmts + indent + "}"


def _arrange(rng: random.Random, names: list[str], ordered: bool) -> list[str]:
    out = sorted(names)
    if not ordered:
        rng.shuffle(out)
    return out


def _render_enum(rng: random.Random, name: str, ordered: bool) -> str:
    constants = _arrange(rng, rng.sample(_CONSTANT_NAMES, rng.choice((2, 3))), ordered)
    inner = PREFIX["data"] + ("," + INNER_BETWEEN).join(constants)
    return f"private enum {name} {{{inner}\n    }}"


def _method_names(rng: random.Random, count: int) -> list[str]:
    pool = [s + x for s in _METHOD_STEMS for x in _METHOD_SUFFIXES]
    return rng.sample(pool, count)


def _render_helper(rng: random.Random, name: str, ordered: bool, body_lines: int) -> str:
    fields = _arrange(rng, rng.sample(_FIELD_NAMES, 2), ordered)
    methods = _arrange(rng, _method_names(rng, 2), ordered)
    data = INNER_BETWEEN.join(f"private int {f};" for f in fields)
    body = _method_body(rng, body_lines, "        ")
    ops = INNER_BETWEEN.join(f"public void {m}() {body}" for m in methods)
    return (
        f"private class {name} {{"
        + PREFIX["data"] + data
        + PREFIX["ops"] + ops
        + "\n    }"
    )


def generate_file(
    rng: random.Random,
    index: int,
    *,
    ordered: bool = True,
    body_lines: int = 1,
    api_count: int = 3,
    internal_count: int = 2,
    state_count: int = 3,
    helper_count: int = 1,
) -> str:
    cls = f"Widget{index:03d}"

    statics = [
        f"{stem}_{suffix}"
        for stem, suffix in zip(_STATIC_STEMS, rng.sample(_STATIC_SUFFIXES, 3))
    ]
    enums = [
        stem + suffix
        for stem, suffix in zip(_ENUM_STEMS, rng.sample(_ENUM_SUFFIXES, 2))
    ]
    const_decls = {}
    for name in statics:
        const_decls[name] = f"private static final int {name} = {rng.randrange(50)};"
    for name in enums:
        const_decls[name] = _render_enum(rng, name, ordered)
    const_order = _arrange(rng, statics + enums, ordered)
    constants = [const_decls[n] for n in const_order]

    fields = _arrange(rng, rng.sample(_FIELD_NAMES, state_count), ordered)
    state = [f"private int {f};" for f in fields]

    init = ["static {\n        int boot = 1;\n    }"]
    ctor = [f"public {cls}(int seed) {{ }}"]

    method_names = _method_names(rng, api_count + internal_count)
    api_names = _arrange(rng, method_names[:api_count], ordered)
    internal_names = _arrange(rng, method_names[api_count:], ordered)
    api = [
        f"public void {m}() {_method_body(rng, body_lines, '    ')}" for m in api_names
    ]
    internal = [
        f"private void {m}() {_method_body(rng, body_lines, '    ')}"
        for m in internal_names
    ]

    helper_names = _arrange(rng, rng.sample(_HELPER_NAMES, helper_count), ordered)
    helpers = [_render_helper(rng, n, ordered, body_lines) for n in helper_names]

    body = "".join(
        PREFIX[key] + BETWEEN.join(members)
        for key, members in (
            ("constants", constants),
            ("state", state),
            ("init", init),
            ("ctor", ctor),
            ("api", api),
            ("internal", internal),
            ("helpers", helpers),
        )
    )
    return (
        f"package gen.w{index:03d};\n\npublic class {cls} {{" + body + "\n}\n"
    )


def generate_corpus(
    root: str | Path,
    n_files: int,
    seed: int,
    *,
    ordered: bool = True,
    body_lines: int = 1,
    api_count: int = 3,
    internal_count: int = 2,
    state_count: int = 3,
    helper_count: int = 1,
) -> Planted:
    root = Path(root)
    src = root / "src"
    src.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    files: list[Path] = []
    total = 0
    for i in range(n_files):
        text = generate_file(
            rng,
            i,
            ordered=ordered,
            body_lines=body_lines,
            api_count=api_count,
            internal_count=internal_count,
            state_count=state_count,
            helper_count=helper_count,
        )
        path = src / f"Widget{i:03d}.java"
        path.write_text(text, encoding="utf-8")
        files.append(path)
        total += text.count("\n")
    return Planted(root, files, _planted_groups(), total)
