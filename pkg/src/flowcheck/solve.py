"""Constraint solving: subtyping constraints over bounded type variables.

`constrain` records bounds on variables and decomposes constructor
constraints, accumulating provenance as constraints travel.  Incompatible
concrete types append an error (with the concatenated provenance chain) to
the state rather than raising.  Level extrusion lowers the polymorphism
level of types that leak into lower-level variables.
"""
from __future__ import annotations

from .core import (
    Constraint,
    Ctor,
    CtorStep,
    InferenceState,
    Prim,
    SolveError,
    Type,
    TypeVar,
    append_prov,
    prov_concat,
    prov_rev,
    reset_key,
    with_prov,
)

Hypotheses = frozenset


def sub_constraints(q: Constraint, erase: bool = False):
    """Decompose a constraint between two non-variable types.

    Returns ("ok", [Constraint, ...]) or ("err", provenance).  Function
    parameters flip the constraint and reverse the left provenance; covariant
    positions keep direction.  Mismatched heads are unsolvable.
    """
    lhs, rhs = q.lhs, q.rhs
    if isinstance(lhs, Ctor) and isinstance(rhs, Ctor) and lhs.ctor == rhs.ctor:
        p0, p1 = lhs.prov, rhs.prov
        out = []
        for k, variance in enumerate(lhs.ctor.variances):
            a, b = lhs.args[k], rhs.args[k]
            if variance == "co":
                frame = () if erase else (CtorStep(lhs.ctor, k, prov_concat(p0, p1), lhs, rhs),)
                out.append(Constraint(append_prov(a, frame), b))
            else:
                frame = () if erase else (CtorStep(lhs.ctor, k, prov_concat(p1, prov_rev(p0)), lhs, rhs),)
                out.append(Constraint(append_prov(b, frame), a))
        return "ok", out
    return "err", prov_concat(lhs.prov, rhs.prov)


def lvl(t: Type, state: InferenceState) -> int:
    """Polymorphism level of a type: primitives are 0, constructors take the
    max over their arguments, variables their own entry."""
    if isinstance(t, Prim):
        return 0
    if isinstance(t, Ctor):
        return max((lvl(a, state) for a in t.args), default=0)
    if isinstance(t, TypeVar):
        return state.level(t.id)
    raise TypeError(t)


def extrude(ts: list[Type], state: InferenceState, level: int, hyps: set[int] | None = None) -> None:
    """Lower every variable reachable from `ts` to at most `level`."""
    if hyps is None:
        hyps = set()
    work = list(ts)
    while work:
        t = work.pop(0)
        if isinstance(t, Prim):
            continue
        if isinstance(t, TypeVar):
            if t.id in hyps or state.level(t.id) <= level:
                continue
            state.set_level(t.id, level)
            hyps.add(t.id)
            for b in state.lb(t.id):
                if isinstance(b, TypeVar):
                    work.append(b)
            for b in state.ub(t.id):
                if isinstance(b, TypeVar):
                    work.append(b)
            continue
        if isinstance(t, Ctor):
            if lvl(t, state) > level:
                work.extend(t.args)


def constrain(state: InferenceState, q: Constraint, hyps: Hypotheses = frozenset(), level: int = 0) -> None:
    lhs, rhs = q.lhs, q.rhs
    key = (reset_key(lhs), reset_key(rhs))
    if key in hyps:  # cache: already being solved somewhere up the stack
        return
    if key[0] == key[1]:  # reflexivity modulo provenance
        return

    # level extrusion before a variable may record an over-leveled bound
    if isinstance(lhs, TypeVar) and lvl(rhs, state) > state.level(lhs.id):
        extrude([rhs], state, state.level(lhs.id))
    elif isinstance(rhs, TypeVar) and lvl(lhs, state) > state.level(rhs.id):
        extrude([lhs], state, state.level(rhs.id))

    hyps2 = hyps | {key}
    full = prov_concat(lhs.prov, rhs.prov)

    if isinstance(lhs, TypeVar) and isinstance(rhs, TypeVar):
        snapshot = list(state.lb(lhs.id))
        state.add_bound(lhs.id, "ub", with_prov(rhs, full))
        state.add_bound(rhs.id, "lb", with_prov(lhs, full))
        target = with_prov(rhs, full)
        for t in snapshot:
            constrain(state, Constraint(t, target), hyps2, level)
        return

    if isinstance(lhs, TypeVar):
        snapshot = list(state.lb(lhs.id))
        state.add_bound(lhs.id, "ub", with_prov(rhs, full))
        target = with_prov(rhs, full)
        for t in snapshot:
            constrain(state, Constraint(t, target), hyps2, level)
        return

    if isinstance(rhs, TypeVar):
        snapshot = list(state.ub(rhs.id))
        state.add_bound(rhs.id, "lb", with_prov(lhs, full))
        source = with_prov(lhs, full)
        for t in snapshot:
            constrain(state, Constraint(source, t), hyps2, level)
        return

    status, payload = sub_constraints(q, state.erase)
    if status == "ok":
        for sub_q in payload:
            constrain(state, sub_q, hyps2, level)
    else:
        state.errors.append(SolveError(lhs, rhs, payload))
