"""Rendering of flow errors: headline, one-line flow summary, and the
bulleted location listing with direction gutters and caret excerpts.

Compact mode reports only the outer flow, keeping variable endpoints at
direction reversals; verbose mode also expands constructor hops (both the
covariant provenance frames inside links and nested constructor flows) as
extra segments.  Function-parameter frames never expand: passing through a
parameter reverses the flow, and only the outer flow is reported.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import (
    Backward,
    Ctor,
    CtorLink,
    CtorStep,
    DataFlow,
    Forward,
    InferenceState,
    LocStep,
    Prim,
    Type,
    TypeVar,
)
from .surface import Location, SourceMap
from .unify import FlowError

ANSI_RED = "\033[31m"
ANSI_RESET = "\033[0m"

ARROWS = {"fwd": "--->", "bwd": "<---", "cfwd": "~~~>", "cbwd": "<~~~"}


@dataclass
class Segment:
    type_str: str
    role: str  # "comes from" | "is assumed for"
    locs: list[Location] = field(default_factory=list)
    depth: int = 0


@dataclass
class RenderPlan:
    headline: tuple[str, str]
    level: int
    segments: list[Segment]
    joins: list[str]  # between segment i and i+1: "fwd" | "bwd" | "cfwd" | "cbwd"

    @property
    def summary(self) -> str | None:
        if len(self.joins) < 2:
            return None
        out = [f"({self.segments[0].type_str})"]
        for join, seg in zip(self.joins, self.segments[1:]):
            out.append(ARROWS[join])
            out.append(f"({seg.type_str})")
        return " ".join(out)


class NameSupply:
    """?a..?z then ?a1, ?b1, ... assigned in order of first appearance."""

    def __init__(self):
        self.names: dict[int, str] = {}

    def assign(self, vid: int) -> str:
        if vid not in self.names:
            i = len(self.names)
            letter = chr(ord("a") + i % 26)
            suffix = str(i // 26) if i >= 26 else ""
            self.names[vid] = f"?{letter}{suffix}"
        return self.names[vid]

    def get(self, vid: int) -> str | None:
        return self.names.get(vid)


def display_type(
    t: Type,
    names: NameSupply,
    state: InferenceState | None = None,
    expand: bool = False,
    prec: int = 0,
) -> str:
    """Surface-syntax display.  Variables not on the flow path print as `_`;
    when `expand` is set (error endpoints) a variable with exactly one lower
    bound shows that bound once, its own variables staying wildcards."""
    if isinstance(t, Prim):
        return t.name
    if isinstance(t, TypeVar):
        name = names.get(t.id)
        if name is not None:
            return name
        if expand and state is not None and t.id in state.bounds and len(state.lb(t.id)) == 1:
            return display_type(state.lb(t.id)[0], names, state, expand=False, prec=prec)
        return "_"
    if isinstance(t, Ctor):
        if t.ctor.name == "->":
            a = display_type(t.args[0], names, state, expand, prec=1)
            b = display_type(t.args[1], names, state, expand, prec=0)
            s = f"{a} -> {b}"
            return f"({s})" if prec >= 1 else s
        if t.ctor.name == "*":
            parts = [display_type(a, names, state, expand, prec=2) for a in t.args]
            s = " * ".join(parts)
            return f"({s})" if prec >= 2 else s
        if t.ctor.name == "either":
            a = display_type(t.args[0], names, state, expand, prec=0)
            b = display_type(t.args[1], names, state, expand, prec=0)
            return f"({a}, {b}) either"
        arg = display_type(t.args[0], names, state, expand, prec=2)
        return f"{arg} {t.ctor.name}"
    raise TypeError(t)


def _link_dir(link) -> str:
    if isinstance(link, Forward):
        return "fwd"
    if isinstance(link, Backward):
        return "bwd"
    return "ctor"


def _kept_endpoints(flow: DataFlow, mode: str) -> list[int]:
    """Endpoint indices that become segments.  Compact mode drops variables
    where the flow passes straight through (no direction change)."""
    n = len(flow.endpoints)
    keep = [0]
    for i in range(1, n - 1):
        prev_dir = _link_dir(flow.links[i - 1])
        next_dir = _link_dir(flow.links[i])
        if mode == "verbose" or "ctor" in (prev_dir, next_dir) or prev_dir != next_dir:
            keep.append(i)
    keep.append(n - 1)
    return keep


def _prov_items(prov, verbose: bool) -> list:
    """Locations and (in verbose mode) covariant constructor frames of a
    link provenance, in flow order."""
    items: list = []
    for f in prov:
        if isinstance(f, LocStep):
            items.append(f.loc)
        elif isinstance(f, CtorStep) and verbose and f.ctor.variances[f.index] == "co":
            items.append(f)
    return items


class _PlanBuilder:
    def __init__(self, fe: FlowError, mode: str, state: InferenceState):
        self.fe = fe
        self.mode = mode
        self.verbose = mode == "verbose"
        self.state = state
        self.names = NameSupply()
        self.segments: list[Segment] = []
        self.joins: list[str] = []

    def build(self) -> RenderPlan:
        self._name_flow(self.fe.flow)
        self._emit_flow(self.fe.flow, depth=0, top=True)
        self._dedup_locations()
        left = display_type(self.fe.endpoints[0], self.names, self.state, expand=True)
        right = display_type(self.fe.endpoints[1], self.names, self.state, expand=True)
        return RenderPlan((left, right), self.fe.level, self.segments, self.joins)

    def _name_flow(self, flow: DataFlow) -> None:
        """Pre-assign ?names to every variable that becomes a segment."""
        for i in _kept_endpoints(flow, self.mode):
            t = flow.endpoints[i]
            if isinstance(t, TypeVar):
                self.names.assign(t.id)
        if self.verbose:
            for link in flow.links:
                if isinstance(link, CtorLink):
                    self._name_flow(link.inner)

    def _add_segment(self, t: Type | str, depth: int, expand: bool = False, var: bool = False) -> Segment:
        if isinstance(t, str):
            seg = Segment(t, "is assumed for" if var else "comes from", [], depth)
        else:
            role = "is assumed for" if isinstance(t, TypeVar) else "comes from"
            seg = Segment(display_type(t, self.names, self.state, expand=expand), role, [], depth)
        self.segments.append(seg)
        return seg

    def _emit_flow(self, flow: DataFlow, depth: int, top: bool) -> None:
        keep = _kept_endpoints(flow, self.mode)
        self._add_segment(flow.endpoints[0], depth, expand=top)
        for j in range(len(keep) - 1):
            a, b = keep[j], keep[j + 1]
            links = flow.links[a:b]
            is_last = b == len(flow.endpoints) - 1
            if len(links) == 1 and isinstance(links[0], CtorLink):
                for loc in _prov_items(flow.endpoints[a].prov, False):
                    self.segments[-1].locs.append(loc)
                if self.verbose:
                    self.joins.append("cfwd")
                    self._emit_flow(links[0].inner, depth + 1, top=False)
                    self.joins.append("cfwd")
                else:
                    self.joins.append("cfwd")
                seg = self._add_segment(flow.endpoints[b], depth, expand=top and is_last)
                seg.locs.extend(_prov_items(flow.endpoints[b].prov, False))
                continue
            direction = _link_dir(links[0])
            items: list = []
            for link in links:
                items.extend(_prov_items(link.prov, self.verbose))
            pending: list[Location] = []
            closed = self._emit_stream(items, direction, depth, pending)
            if not closed:
                self.joins.append(direction)
            seg = self._add_segment(flow.endpoints[b], depth, expand=top and is_last)
            seg.locs = pending + seg.locs

    def _emit_stream(self, items: list, direction: str, depth: int, pending: list[Location]) -> bool:
        """Distribute a gap's locations: everything before the first frame
        (or all but the last location) stays with the segment just emitted;
        frames become source/target constructor segments; the remainder goes
        to the upcoming segment via `pending`.  Returns True when the closing
        join into the upcoming segment was already emitted (a frame hop)."""
        frame_idx = [i for i, it in enumerate(items) if isinstance(it, CtorStep)]
        if not frame_idx:
            if items:
                self.segments[-1].locs.extend(items[:-1])
                pending.append(items[-1])
            return False
        first = frame_idx[0]
        self.segments[-1].locs.extend(items[:first])
        rest = items[first:]
        while rest:
            frame = rest[0]
            after = rest[1:]
            nxt = next((i for i, it in enumerate(after) if isinstance(it, CtorStep)), None)
            chunk = after[: nxt if nxt is not None else len(after)]
            rest = after[nxt:] if nxt is not None else []
            if direction == "fwd":
                src_t, dst_t = frame.lhs, frame.rhs
                hop = "cfwd"
            else:
                src_t, dst_t = frame.rhs, frame.lhs
                hop = "cbwd"
            self.joins.append(hop)
            self._add_segment(src_t, depth)
            inner_pending: list[Location] = []
            inner_closed = self._emit_stream(_prov_items(frame.inner, self.verbose), direction, depth, inner_pending)
            if not inner_closed:
                self.joins.append(direction)
            dst_seg = self._add_segment(dst_t, depth)
            dst_seg.locs = inner_pending
            if rest:
                dst_seg.locs.extend(chunk)
            else:
                self.joins.append(hop)
                pending.extend(chunk)
        return True

    def _dedup_locations(self) -> None:
        for seg in self.segments:
            out: list[Location] = []
            for loc in seg.locs:
                if not out or out[-1] != loc:
                    out.append(loc)
            seg.locs = out
        for k in range(len(self.segments) - 1):
            a, b = self.segments[k], self.segments[k + 1]
            if a.locs and b.locs and a.locs[-1] == b.locs[0]:
                if len(a.locs) > 1:
                    a.locs.pop()
                elif len(b.locs) > 1:
                    b.locs.pop(0)


def plan_report(fe: FlowError, mode: str, state: InferenceState) -> RenderPlan:
    return _PlanBuilder(fe, mode, state).build()


def flow_summary(plan: RenderPlan) -> str | None:
    return plan.summary


# ---------------------------------------------------------------------------
# Text rendering


def render_text(plan: RenderPlan, smap: SourceMap, color: bool = False) -> str:
    lines: list[str] = []
    head = f"[ERROR] Type `{plan.headline[0]}` does not match `{plan.headline[1]}`"
    if color:
        head = f"{ANSI_RED}{head}{ANSI_RESET}"
    lines.append(head)
    lines.append("")
    summary = plan.summary
    if summary is not None:
        lines.append("      " + summary)
        lines.append("")
    for k, seg in enumerate(plan.segments):
        right_join = plan.joins[k] if k < len(plan.joins) else None
        guttered = right_join in ("fwd", "bwd")
        indent = "  " * seg.depth
        lines.append(f"{indent}● ({seg.type_str}) {seg.role}")
        for i, loc in enumerate(seg.locs):
            if i > 0:
                lines.append(f"{indent}|" if guttered else "")
            ex = smap.span_lookup(loc)
            text = ex.line + (" ..." if ex.ellipsis else "")
            if guttered:
                g = "▲" if right_join == "bwd" and i == 0 else "|"
                prefix = f"{g} - {ex.ref} "
                lines.append(f"{indent}{prefix}{text}")
                lines.append(f"{indent}|" + " " * (len(prefix) - 1 + ex.col) + "^" * ex.width)
            else:
                prefix = f"- {ex.ref} "
                lines.append(f"{indent}{prefix}{text}")
                lines.append(f"{indent}" + " " * (len(prefix) + ex.col) + "^" * ex.width)
        if right_join == "fwd":
            lines.append(f"{indent}▼")
        elif right_join == "bwd":
            lines.append(f"{indent}|")
        elif right_join is not None:
            lines.append("")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Machine-readable rendering


def _loc_json(loc: Location, smap: SourceMap) -> dict:
    src = smap.file(loc.file)
    line, col = src.line_col(loc.start)
    end_line, end_col = src.line_col(loc.end)
    return {
        "file": src.user_index,
        "startLine": line,
        "startCol": col,
        "endLine": end_line,
        "endCol": end_col,
        "builtin": bool(loc.builtin or src.builtin),
    }


def render_json(plans: list[RenderPlan], smap: SourceMap) -> str:
    errors = []
    for plan in plans:
        errors.append(
            {
                "headline": {"lhs": plan.headline[0], "rhs": plan.headline[1]},
                "level": plan.level,
                "summary": plan.summary,
                "segments": [
                    {
                        "type": seg.type_str,
                        "role": seg.role,
                        "depth": seg.depth,
                        "locations": [_loc_json(loc, smap) for loc in seg.locs],
                    }
                    for seg in plan.segments
                ],
            }
        )
    return json.dumps({"format": 1, "errors": errors}, separators=(",", ":"), ensure_ascii=False)
