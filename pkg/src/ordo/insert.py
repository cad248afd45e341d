"""Using a model: insertion-point planning and whole-file reordering.

Positions treat a component's leading comment text as attached to it, so
the slot after a component is the end of its declaration and the slot
before one is the start of its leading text.  Planning scans the existing
children once, tracking the nearest element the newcomer must follow and
the first it must precede, with a deliberate bias toward the end of the
region when no ordering information exists.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .dtree import classify
from .extract import Component, SourceFile, child_context, compute_call_facts, parse_file
from .model import OrderModel, RegionSpec
from .props import ordering_attrs


class NoRegionError(LookupError):
    """The model's categories do not cover this component (broken model)."""


class CycleWarning(UserWarning):
    """Ordering-tree verdicts over actual children formed a cycle."""


@dataclass
class InsertionPlan:
    position: int
    prepend_text: str
    append_text: str
    region: RegionSpec
    region_index: int
    prior: Component | None
    next: Component | None


def region_index_for(model: OrderModel, ctx: str, comp: Component) -> tuple[int, RegionSpec]:
    for idx, spec in enumerate(model.per_context.get(ctx, [])):
        if spec.matches(comp, model.patterns):
            return idx, spec
    raise NoRegionError(
        f"no region matches a {ctx} {comp.kind} component {comp.name!r}"
    )


def find_region_for(model: OrderModel, ctx: str, comp: Component) -> RegionSpec:
    """First region of the context whose category covers the component."""
    return region_index_for(model, ctx, comp)[1]


def plan_insertion(
    model: OrderModel,
    container: Component,
    new_e: Component,
    file: SourceFile,
) -> InsertionPlan:
    """Compute where a new component goes and what scaffolding it needs."""
    if container.body_span is None:
        raise ValueError(f"{container.name!r} has no body to insert into")
    ctx = child_context(container)
    if new_e.context != ctx:
        new_e.context = ctx
    idx, rgn = region_index_for(model, ctx, new_e)

    facts = compute_call_facts(file.top_level[0], extra=(new_e,)) if file.top_level else None
    index_value = str(rgn.ids[0])

    def verdict(e: Component) -> str:
        if rgn.ordering is None or facts is None:
            return "EQUAL"
        row = ordering_attrs(model.patterns, index_value, facts, e, new_e)
        return classify(rgn.ordering, row)

    child_region = {
        id(ch): region_index_for(model, ctx, ch)[0] for ch in container.children
    }

    prior: Component | None = None
    nxt: Component | None = None
    for child in container.children:
        eidx = child_region[id(child)]
        if eidx < idx:
            prior = child
        elif eidx == idx:
            v = verdict(child) if rgn.ordering is not None else "EQUAL"
            if rgn.ordering is not None and v == "AFTER":
                if nxt is None:
                    nxt = child
            elif rgn.ordering is not None and v == "BEFORE":
                prior = child
                nxt = None
            elif nxt is None:
                prior = child
        else:
            if nxt is None:
                nxt = child

    pos = container.body_span[0]
    if prior is not None:
        pos = prior.span[1]
        siblings = container.children
        at = siblings.index(prior)
        nxt = siblings[at + 1] if at + 1 < len(siblings) else None

    if prior is not None and child_region[id(prior)] == idx:
        prepend = rgn.between.render()
        append = ""
    elif nxt is not None and child_region[id(nxt)] == idx:
        pos = nxt.leading_start
        prepend = ""
        append = rgn.between.render()
    else:
        prepend = rgn.prefix.render()
        append = rgn.suffix.render()

    return InsertionPlan(pos, prepend, append, rgn, idx, prior, nxt)


def apply_insertion(file: SourceFile, plan: InsertionPlan, new_text: str) -> str:
    """Splice the new component into the file; no other byte changes."""
    pos = plan.position
    return file.text[:pos] + plan.prepend_text + new_text + plan.append_text + file.text[pos:]


def _order_region_run(
    model: OrderModel,
    rgn: RegionSpec,
    members: list[Component],
    facts,
) -> list[Component] | None:
    """Refine one region's members by tree verdicts; None signals a cycle."""
    if rgn.ordering is None or len(members) < 2 or facts is None:
        return members
    index_value = str(rgn.ids[0])
    order = {id(m): i for i, m in enumerate(members)}
    edges: dict[int, set[int]] = {id(m): set() for m in members}
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            row = ordering_attrs(model.patterns, index_value, facts, a, b)
            v = classify(rgn.ordering, row)
            if v == "BEFORE":
                edges[id(a)].add(id(b))
            elif v == "AFTER":
                edges[id(b)].add(id(a))
    result: list[Component] = []
    remaining = {id(m): m for m in members}
    while remaining:
        blocked = {dst for src in remaining for dst in edges[src] if dst in remaining}
        ready = [mid for mid in remaining if mid not in blocked]
        if not ready:
            return None
        ready.sort(key=lambda mid: order[mid])
        chosen = ready[0]
        result.append(remaining.pop(chosen))
    return result


def reorder_file(model: OrderModel, file: SourceFile, *, keep_comments: bool = False) -> str:
    """Rewrite every type body into model order.

    Children sort by region sequence, then by ordering-tree verdicts within
    a region (original order breaks ties).  Scaffolding text is regenerated
    from the region comment specs unless keep_comments is set, in which
    case each component keeps its own leading text.  Idempotent.
    """
    text = file.text
    facts = compute_call_facts(file.top_level[0]) if file.top_level else None

    def render(comp: Component) -> str:
        if not comp.is_type() or comp.body_span is None:
            return text[comp.span[0]:comp.span[1]]
        header = text[comp.span[0]:comp.body_span[0]]
        closer = text[comp.body_span[1]:comp.span[1]]
        children = comp.children
        if not children:
            return header + text[comp.body_span[0]:comp.body_span[1]] + closer
        ctx = child_context(comp)
        keyed = [(region_index_for(model, ctx, ch)[0], ch) for ch in children]
        keyed.sort(key=lambda pair: pair[0])  # stable: original order survives

        runs: list[tuple[int, list[Component]]] = []
        for idx, ch in keyed:
            if runs and runs[-1][0] == idx:
                runs[-1][1].append(ch)
            else:
                runs.append((idx, [ch]))

        ordered_runs: list[tuple[RegionSpec, list[Component]]] = []
        cyclic = False
        for idx, members in runs:
            rgn = model.per_context[ctx][idx]
            refined = _order_region_run(model, rgn, members, facts)
            if refined is None:
                cyclic = True
                refined = members
            ordered_runs.append((rgn, refined))
        if cyclic:
            warnings.warn(
                f"ordering verdicts cycle in {comp.name!r}; keeping region order only",
                CycleWarning,
                stacklevel=2,
            )
            ordered_runs = [
                (model.per_context[ctx][idx], members) for idx, members in runs
            ]

        trailer = text[children[-1].span[1]:comp.body_span[1]]
        if keep_comments:
            body = "".join(
                ch.leading_text + render(ch) for _, members in ordered_runs for ch in members
            )
        else:
            parts: list[str] = []
            for n, (rgn, members) in enumerate(ordered_runs):
                if n > 0:
                    parts.append(ordered_runs[n - 1][0].suffix.render())
                parts.append(rgn.prefix.render())
                between = rgn.between.render()
                for k, ch in enumerate(members):
                    if k > 0:
                        parts.append(between)
                    parts.append(render(ch))
            body = "".join(parts)
        return header + body + trailer + closer

    if not file.top_level:
        return text
    out: list[str] = []
    prev_end = 0
    for top in file.top_level:
        out.append(text[prev_end:top.leading_start])
        out.append(top.leading_text)
        out.append(render(top))
        prev_end = top.span[1]
    out.append(text[prev_end:])
    return "".join(out)


def parse_snippet(source: str, container_kind: str = "CLASS") -> tuple[Component, str]:
    """Parse one declaration fragment; returns the component and its text."""
    wrappers = {
        "CLASS": "class __Wrapper {\n%s\n}\n",
        "ENUM": "class __Wrapper {\n%s\n}\n",
        "INTERFACE": "interface __Wrapper {\n%s\n}\n",
        "ANNOTATION": "@interface __Wrapper {\n%s\n}\n",
    }
    wrapper = wrappers.get(container_kind, wrappers["CLASS"]) % source
    parsed = parse_file("<snippet>", wrapper)
    children = parsed.top_level[0].children if parsed.top_level else []
    if len(children) != 1:
        raise ValueError(f"expected exactly one declaration in snippet, found {len(children)}")
    comp = children[0]
    return comp, parsed.text[comp.span[0]:comp.span[1]]
