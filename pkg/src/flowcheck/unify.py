"""Post-inference unification over the saturated bound graph.

Erroneous data flows are discovered breadth-first so the reported flow is a
shortest one for its error; every variable-pair edge is traversed in a single
direction thanks to a both-orientation cache.  Each error is classified by
how many times its flow reverses direction.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import (
    Backward,
    Ctor,
    CtorLink,
    DataFlow,
    Forward,
    InferenceState,
    Link,
    Prim,
    SolveError,
    Type,
    TypeVar,
    prov_locations,
    prov_rev,
    reset_key,
    single_flow,
)
from .surface import Location


@dataclass(frozen=True)
class FlowError:
    flow: DataFlow
    level: int
    endpoints: tuple[Type, Type]
    key: frozenset


def saturate(state: InferenceState) -> InferenceState:
    """Symmetric closure of variable-variable bounds: whenever b is an upper
    bound of a, a joins b's lower bounds with the reversed provenance, and
    vice versa.  Idempotent; non-variable bounds untouched."""
    for vid in sorted(state.bounds.keys()):
        for t in list(state.ub(vid)):
            if isinstance(t, TypeVar):
                state.add_bound(t.id, "lb", TypeVar(vid, prov_rev(t.prov)))
        for t in list(state.lb(vid)):
            if isinstance(t, TypeVar):
                state.add_bound(t.id, "ub", TypeVar(vid, prov_rev(t.prov)))
    return state


def classify_level(z: DataFlow) -> int:
    """Number of direction reversals among the outer directed links;
    constructor links are transparent."""
    last = None
    count = 0
    for link in z.links:
        if isinstance(link, CtorLink):
            continue
        d = "f" if isinstance(link, Forward) else "b"
        if last is not None and d != last:
            count += 1
        last = d
    return count


def _bound_link_exists(state: InferenceState, a: Type, b: Type, prov) -> bool:
    """Is the constraint a <:^prov b recorded in the state?"""
    ka, kb = reset_key(a), reset_key(b)
    if isinstance(b, TypeVar):
        for e in state.lb(b.id):
            if reset_key(e) == ka and e.prov == prov:
                return True
    if isinstance(a, TypeVar):
        for e in state.ub(a.id):
            if reset_key(e) == kb and e.prov == prov:
                return True
    for err in state.errors:
        if reset_key(err.lhs) == ka and reset_key(err.rhs) == kb and err.prov == prov:
            return True
    return False


def validate_flow(z: DataFlow, state: InferenceState) -> bool:
    """True iff every link of the flow is justified by the state."""
    for i, link in enumerate(z.links):
        a, b = z.endpoints[i], z.endpoints[i + 1]
        if isinstance(link, Forward):
            if not _bound_link_exists(state, a, b, link.prov):
                return False
        elif isinstance(link, Backward):
            if not _bound_link_exists(state, b, a, prov_rev(link.prov)):
                return False
        elif isinstance(link, CtorLink):
            inner = link.inner
            first, last = inner.first, inner.last
            if not (isinstance(first, Ctor) and first.ctor == link.ctor):
                return False
            if not (isinstance(last, Ctor) and last.ctor == link.ctor):
                return False
            if reset_key(first.args[link.index]) != reset_key(a):
                return False
            if reset_key(last.args[link.index]) != reset_key(b):
                return False
            if not validate_flow(inner, state):
                return False
        else:
            return False
    return True


def intro_locations(flow: DataFlow) -> tuple[Location | None, Location | None]:
    """The far-end locations of a flow: where its first endpoint is
    introduced and where its last endpoint is introduced.  Endpoints joined
    by a constructor hop carry their own introduction provenance."""
    if isinstance(flow.links[0], CtorLink):
        first_locs = prov_locations(flow.first.prov)[:1]
    else:
        first_locs = prov_locations(flow.links[0].prov)[:1]
    if isinstance(flow.links[-1], CtorLink):
        last_locs = prov_locations(flow.last.prov)[:1]
    else:
        last_locs = prov_locations(flow.links[-1].prov)[-1:]
    return (first_locs[0] if first_locs else None, last_locs[0] if last_locs else None)


def _loc_key(loc: Location | None):
    if loc is None:
        return ()
    if loc.builtin:
        # one key per signature: every occurrence in a declaration is the
        # same source as far as deduplication goes
        return (0, loc.file)
    return (1, loc.file, loc.start, loc.end)


def _make_error(flow: DataFlow) -> FlowError:
    left_loc, right_loc = intro_locations(flow)
    key = frozenset(
        {
            (reset_key(flow.first), _loc_key(left_loc)),
            (reset_key(flow.last), _loc_key(right_loc)),
        }
    )
    return FlowError(
        flow=flow,
        level=classify_level(flow),
        endpoints=(flow.first, flow.last),
        key=key,
    )


def _is_concrete(t: Type) -> bool:
    return not isinstance(t, TypeVar)


def _left_extensions(state: InferenceState, flow: DataFlow):
    """Prepend each bound of the left endpoint variable, forward lower
    bounds first, then backward upper bounds."""
    v = flow.first
    assert isinstance(v, TypeVar)
    out = []
    for e in state.lb(v.id):
        out.append(DataFlow((e,) + flow.endpoints, (Forward(e.prov),) + flow.links))
    for e in state.ub(v.id):
        out.append(DataFlow((e,) + flow.endpoints, (Backward(prov_rev(e.prov)),) + flow.links))
    return out


def _right_extensions(state: InferenceState, flow: DataFlow):
    v = flow.last
    assert isinstance(v, TypeVar)
    out = []
    for e in state.ub(v.id):
        out.append(DataFlow(flow.endpoints + (e,), flow.links + (Forward(e.prov),)))
    for e in state.lb(v.id):
        out.append(DataFlow(flow.endpoints + (e,), flow.links + (Backward(prov_rev(e.prov)),)))
    return out


def _ctor_children(flow: DataFlow):
    left, right = flow.first, flow.last
    assert isinstance(left, Ctor) and isinstance(right, Ctor) and left.ctor == right.ctor
    out = []
    for k in range(left.ctor.arity):
        link = CtorLink(left.ctor, k, flow)
        out.append(single_flow(left.args[k], link, right.args[k]))
    return out


def unify_flow(z: DataFlow, state: InferenceState, hyps: frozenset = frozenset()):
    """Equate the outer endpoints of `z`; "ok" or the first FlowError found
    (depth-first).  Mirrors the breadth-first search used by unify_state."""
    ka, kb = reset_key(z.first), reset_key(z.last)
    pair = frozenset((ka, kb))
    if pair in hyps:
        return "ok"
    if ka == kb:
        return "ok"
    hyps2 = hyps | {pair}
    left_var = isinstance(z.first, TypeVar)
    right_var = isinstance(z.last, TypeVar)
    if not left_var and not right_var:
        if isinstance(z.first, Ctor) and isinstance(z.last, Ctor) and z.first.ctor == z.last.ctor:
            for child in _ctor_children(z):
                result = unify_flow(child, state, hyps2)
                if result != "ok":
                    return result
            return "ok"
        return _make_error(z)
    children = []
    if left_var:
        children.extend(_left_extensions(state, z))
    if right_var:
        children.extend(_right_extensions(state, z))
    for child in children:
        result = unify_flow(child, state, hyps2)
        if result != "ok":
            return result
    return "ok"


def unify_state(state: InferenceState, max_steps: int = 2_000_000) -> list[FlowError]:
    """Saturate, then search the bound graph breadth-first for shortest valid
    erroneous flows.  One flow is kept per error key; solver-stage errors
    without a graph-derived counterpart are reported as single-link flows."""
    saturate(state)

    found: dict[frozenset, FlowError] = {}
    order: list[frozenset] = []

    queue: deque[tuple[DataFlow, frozenset]] = deque()
    seen: set[DataFlow] = set()

    def enqueue(flow: DataFlow, hyps: frozenset) -> None:
        if flow not in seen:
            seen.add(flow)
            queue.append((flow, hyps))

    for vid in sorted(state.bounds.keys()):
        for e in state.lb(vid):
            enqueue(single_flow(e, Forward(e.prov), TypeVar(vid)), frozenset())
        for e in state.ub(vid):
            enqueue(single_flow(TypeVar(vid), Forward(e.prov), e), frozenset())

    steps = 0
    while queue and steps < max_steps:
        steps += 1
        flow, hyps = queue.popleft()
        ka, kb = reset_key(flow.first), reset_key(flow.last)
        pair = frozenset((ka, kb))
        if pair in hyps:
            continue
        if ka == kb:
            continue
        hyps2 = hyps | {pair}
        left_var = isinstance(flow.first, TypeVar)
        right_var = isinstance(flow.last, TypeVar)
        if not left_var and not right_var:
            if isinstance(flow.first, Ctor) and isinstance(flow.last, Ctor) and flow.first.ctor == flow.last.ctor:
                for child in _ctor_children(flow):
                    enqueue(child, hyps2)
            else:
                err = _make_error(flow)
                if err.key not in found:
                    found[err.key] = err
                    order.append(err.key)
            continue
        if left_var:
            for child in _left_extensions(state, flow):
                enqueue(child, hyps2)
        if right_var:
            for child in _right_extensions(state, flow):
                enqueue(child, hyps2)

    # solver-stage errors: keep those the graph search did not re-derive
    for serr in state.errors:
        flow = single_flow(serr.lhs, Forward(serr.prov), serr.rhs)
        err = _make_error(flow)
        if err.key not in found:
            found[err.key] = err
            order.append(err.key)

    result = [found[k] for k in order]
    result.sort(key=lambda fe: (_loc_key(intro_locations(fe.flow)[0]), sorted(map(repr, fe.key))))
    return result
