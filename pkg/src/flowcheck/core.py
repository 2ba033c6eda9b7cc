"""Shared data model: provenances, annotated types, constraints, data flows
and the inference state.

A provenance is a normalized sequence of frames recording the directed path a
type took through the program.  Types carry one provenance per node.  The
inference state records insertion-ordered lower/upper bounds per type
variable, polymorphism levels, and the errors met while solving.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .surface import Location


# ---------------------------------------------------------------------------
# Constructors


@dataclass(frozen=True)
class Constructor:
    name: str
    variances: tuple[str, ...]  # "co" | "contra" per parameter

    @property
    def arity(self) -> int:
        return len(self.variances)


ARROW = Constructor("->", ("contra", "co"))
EITHER = Constructor("either", ("co", "co"))
LIST = Constructor("list", ("co",))


def product(arity: int) -> Constructor:
    return Constructor("*", ("co",) * arity)


PAIR = product(2)


# ---------------------------------------------------------------------------
# Provenances


@dataclass(frozen=True)
class LocStep:
    loc: Location


@dataclass(frozen=True)
class CtorStep:
    """A hop through constructor argument `index` of `ctor`.

    `lhs`/`rhs` keep the two constructor types of the originating constraint
    for display purposes; they do not affect solving.
    """

    ctor: Constructor
    index: int
    inner: "Provenance"
    lhs: "Type"
    rhs: "Type"


@dataclass(frozen=True)
class FlowStep:
    """Embeds a data flow in a provenance (internal use only)."""

    flow: "DataFlow"


Frame = Union[LocStep, CtorStep, FlowStep]

Provenance = tuple  # tuple[Frame, ...]; the empty tuple is the absent provenance

EMPTY: Provenance = ()


def prov_loc(loc: Location) -> Provenance:
    return (LocStep(loc),)


def prov_concat(*parts: Provenance) -> Provenance:
    out: list = []
    for p in parts:
        out.extend(p)
    return tuple(out)


def prov_rev(p: Provenance) -> Provenance:
    out = []
    for f in reversed(p):
        if isinstance(f, CtorStep):
            out.append(CtorStep(f.ctor, f.index, prov_rev(f.inner), f.lhs, f.rhs))
        else:
            out.append(f)
    return tuple(out)


def prov_locations(p: Provenance) -> list[Location]:
    """All locations mentioned, frames flattened depth-first."""
    out: list[Location] = []
    for f in p:
        if isinstance(f, LocStep):
            out.append(f.loc)
        elif isinstance(f, CtorStep):
            out.extend(prov_locations(f.inner))
    return out


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Type:
    pass


@dataclass(frozen=True)
class TypeVar(Type):
    id: int
    prov: Provenance = EMPTY


@dataclass(frozen=True)
class Prim(Type):
    name: str  # unit, int, bool, string, float
    prov: Provenance = EMPTY


@dataclass(frozen=True)
class Ctor(Type):
    ctor: Constructor
    args: tuple[Type, ...]
    prov: Provenance = EMPTY

    def __post_init__(self):
        if len(self.args) != self.ctor.arity:
            raise ValueError(f"{self.ctor.name} expects {self.ctor.arity} arguments")


def with_prov(t: Type, p: Provenance) -> Type:
    """The same type with provenance replaced by `p`."""
    if isinstance(t, TypeVar):
        return TypeVar(t.id, p)
    if isinstance(t, Prim):
        return Prim(t.name, p)
    if isinstance(t, Ctor):
        return Ctor(t.ctor, t.args, p)
    raise TypeError(t)


def append_prov(t: Type, p: Provenance) -> Type:
    return with_prov(t, prov_concat(t.prov, p)) if p else t


def reset(t: Type) -> Type:
    """Every provenance in `t` replaced by the empty provenance."""
    if isinstance(t, TypeVar):
        return TypeVar(t.id)
    if isinstance(t, Prim):
        return Prim(t.name)
    if isinstance(t, Ctor):
        return Ctor(t.ctor, tuple(reset(a) for a in t.args))
    raise TypeError(t)


def reset_key(t: Type) -> tuple:
    """Hashable structural key ignoring provenance."""
    if isinstance(t, TypeVar):
        return ("v", t.id)
    if isinstance(t, Prim):
        return ("p", t.name)
    if isinstance(t, Ctor):
        return ("c", t.ctor.name, len(t.args)) + tuple(reset_key(a) for a in t.args)
    raise TypeError(t)


@dataclass(frozen=True)
class Constraint:
    lhs: Type
    rhs: Type  # lhs <: rhs: lhs flows into rhs


# ---------------------------------------------------------------------------
# Data flows


@dataclass(frozen=True)
class Link:
    pass


@dataclass(frozen=True)
class Forward(Link):
    prov: Provenance


@dataclass(frozen=True)
class Backward(Link):
    prov: Provenance


@dataclass(frozen=True)
class CtorLink(Link):
    ctor: Constructor
    index: int
    inner: "DataFlow"


@dataclass(frozen=True)
class DataFlow:
    """A chain of types joined by directed or constructor relations."""

    endpoints: tuple[Type, ...]
    links: tuple[Link, ...]

    def __post_init__(self):
        if len(self.endpoints) != len(self.links) + 1:
            raise ValueError("a flow with n links needs n+1 endpoints")

    @property
    def first(self) -> Type:
        return self.endpoints[0]

    @property
    def last(self) -> Type:
        return self.endpoints[-1]


def single_flow(lhs: Type, link: Link, rhs: Type) -> DataFlow:
    return DataFlow((lhs, rhs), (link,))


# ---------------------------------------------------------------------------
# Inference state


@dataclass
class VarBounds:
    lb: list[Type] = field(default_factory=list)
    ub: list[Type] = field(default_factory=list)
    lb_keys: set = field(default_factory=set)
    ub_keys: set = field(default_factory=set)


@dataclass(frozen=True)
class SolveError:
    """An `err p` recorded by the solver, with the colliding endpoints."""

    lhs: Type
    rhs: Type
    prov: Provenance


@dataclass(frozen=True)
class Mono:
    ty: Type


@dataclass(frozen=True)
class Poly:
    level: int
    body: Type


Binding = Union[Mono, Poly]
Context = dict  # name -> Binding
Substitution = dict  # var id -> var id


class InferenceState:
    """Mutable record of variable bounds, levels and accumulated errors.

    When `erase` is set every provenance handed out by the helpers collapses
    to the empty provenance; solving must be insensitive to this.
    """

    def __init__(self, erase: bool = False):
        self.bounds: dict[int, VarBounds] = {}
        self.levels: dict[int, int] = {}
        self.errors: list[SolveError] = []
        self.erase = erase
        self._next = 0

    # -- provenance factory, honoring erasure

    def loc_prov(self, loc: Location | None) -> Provenance:
        if self.erase or loc is None:
            return EMPTY
        return prov_loc(loc)

    def ctor_prov(self, ctor: Constructor, index: int, inner: Provenance, lhs: Type, rhs: Type) -> Provenance:
        if self.erase:
            return EMPTY
        return (CtorStep(ctor, index, inner, lhs, rhs),)

    # -- variables

    def fresh(self, level: int, prov: Provenance = EMPTY) -> TypeVar:
        vid = self._next
        self._next = vid + 1
        self.bounds[vid] = VarBounds()
        self.levels[vid] = level
        return TypeVar(vid, EMPTY if self.erase else prov)

    def var_ids(self) -> list[int]:
        return list(self.bounds.keys())

    def level(self, vid: int) -> int:
        return self.levels[vid]

    def set_level(self, vid: int, level: int) -> None:
        self.levels[vid] = level

    # -- bounds

    def add_bound(self, vid: int, side: str, t: Type) -> bool:
        """Append `t` to the chosen bound list. Returns False on a
        reset-equality duplicate (insertion is skipped)."""
        vb = self.bounds[vid]
        key = reset_key(t)
        keys = vb.lb_keys if side == "lb" else vb.ub_keys
        if key in keys:
            return False
        keys.add(key)
        (vb.lb if side == "lb" else vb.ub).append(t)
        return True

    def lb(self, vid: int) -> list[Type]:
        return self.bounds[vid].lb

    def ub(self, vid: int) -> list[Type]:
        return self.bounds[vid].ub

    def bound_list(self, vid: int, side: str) -> list[Type]:
        return self.lb(vid) if side == "lb" else self.ub(vid)

    # -- snapshots for comparison (erasure equivalence checks)

    def reset_bound_graph(self) -> dict[int, tuple[tuple, tuple]]:
        return {
            vid: (
                tuple(sorted(reset_key(t) for t in vb.lb)),
                tuple(sorted(reset_key(t) for t in vb.ub)),
            )
            for vid, vb in self.bounds.items()
        }
