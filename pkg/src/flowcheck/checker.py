"""The checking pipeline: parse, infer, unify, render.

Exit codes: 0 no errors, 1 type errors, 2 syntax/scope errors,
3 configuration (prelude) errors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import surface as s
from .core import InferenceState
from .infer import ScopeError, infer_program
from .prelude import install_source_decl, load_prelude
from .report import RenderPlan, plan_report, render_json, render_text
from .surface import SourceMap, SurfaceError
from .unify import FlowError, unify_state


@dataclass
class CheckOutcome:
    exit_code: int
    text: str
    json_doc: str
    flow_errors: list[FlowError] = field(default_factory=list)
    plans: list[RenderPlan] = field(default_factory=list)
    state: InferenceState | None = None
    source_map: SourceMap | None = None


def _failure_text(smap: SourceMap, kind: str, message: str, loc) -> str:
    lines = [f"[ERROR] {kind}: {message}"]
    if loc is not None:
        try:
            ex = smap.span_lookup(loc)
        except Exception:
            ex = None
        if ex is not None:
            text = ex.line + (" ..." if ex.ellipsis else "")
            prefix = f"- {ex.ref} "
            lines.append(f"{prefix}{text}")
            lines.append(" " * (len(prefix) + ex.col) + "^" * ex.width)
    return "\n".join(lines) + "\n"


def check_programs(
    sources: list[tuple[str, str]],
    prelude_text: str | None = None,
    mode: str = "compact",
    color: bool = False,
    max_errors: int | None = None,
    erase: bool = False,
) -> CheckOutcome:
    smap = SourceMap()
    state = InferenceState(erase=erase)

    try:
        ctx = load_prelude(prelude_text, state, smap)
    except SurfaceError as e:
        return CheckOutcome(3, _failure_text(smap, "Prelude error", e.message, e.loc), "", source_map=smap)

    items = []
    for name, text in sources:
        fid = smap.add_file(name, text)
        try:
            program = s.parse_source(text, fid)
        except SurfaceError as e:
            return CheckOutcome(2, _failure_text(smap, "Syntax error", e.message, e.loc), "", source_map=smap)
        items.extend(program.items)

    program = s.Program(tuple(items))
    try:
        infer_program(state, ctx, program, install_source_decl)
    except ScopeError as e:
        return CheckOutcome(
            2, _failure_text(smap, "Scope error", f"unbound variable `{e.name}`", e.loc), "", source_map=smap
        )

    fes = unify_state(state)
    shown = fes if max_errors is None else fes[:max_errors]
    plans = [plan_report(fe, mode, state) for fe in shown]
    blocks = [render_text(plan, smap, color) for plan in plans]
    if max_errors is not None and len(fes) > max_errors:
        blocks.append(f"... {len(fes) - max_errors} more errors\n")
    text = "\n".join(blocks)
    json_doc = render_json(plans, smap)
    return CheckOutcome(
        1 if fes else 0,
        text,
        json_doc,
        flow_errors=fes,
        plans=plans,
        state=state,
        source_map=smap,
    )


def check_files(
    paths: list[str],
    prelude_path: str | None = None,
    mode: str = "compact",
    color: bool = False,
    max_errors: int | None = None,
) -> CheckOutcome:
    prelude_text = None
    if prelude_path is not None:
        with open(prelude_path, encoding="utf-8") as f:
            prelude_text = f.read()
    sources = []
    for path in paths:
        with open(path, encoding="utf-8") as f:
            sources.append((path, f.read()))
    return check_programs(sources, prelude_text, mode, color, max_errors)
