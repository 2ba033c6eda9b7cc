"""The algorithmic typing judgement over all term forms, with
let-polymorphism via levels, freshening and bound re-issue.

Inference is total: type collisions accumulate in the state while inference
continues with the rule's result type.  Only scope errors raise.
"""
from __future__ import annotations

from . import surface as s
from .core import (
    ARROW,
    EITHER,
    EMPTY,
    LIST,
    Constraint,
    Context,
    Ctor,
    InferenceState,
    Mono,
    Poly,
    Prim,
    Substitution,
    Type,
    TypeVar,
    append_prov,
    product,
    with_prov,
)
from .solve import constrain, lvl


class ScopeError(Exception):
    def __init__(self, name: str, loc: s.Location):
        super().__init__(f"unbound variable {name}")
        self.name = name
        self.loc = loc


def freshen(t: Type, sub: Substitution, idx: int, state: InferenceState, level: int) -> tuple[Type, Substitution]:
    """Copy the generalizable variables of `t` (level >= idx) to fresh ones.

    The walk chases variable bounds so that the whole generalizable subgraph
    lands in the substitution; `ty_subst` then re-issues its constraints.
    Provenances on `t` are preserved verbatim.
    """
    if isinstance(t, Prim):
        return t, sub
    if isinstance(t, Ctor):
        args = []
        for a in t.args:
            a2, sub = freshen(a, sub, idx, state, level)
            args.append(a2)
        return Ctor(t.ctor, tuple(args), t.prov), sub
    if isinstance(t, TypeVar):
        if t.id in sub:
            return TypeVar(sub[t.id], t.prov), sub
        if state.level(t.id) >= idx:
            fresh = state.fresh(level)
            sub[t.id] = fresh.id
            for b in list(state.lb(t.id)) + list(state.ub(t.id)):
                _, sub = freshen(b, sub, idx, state, level)
            return TypeVar(fresh.id, t.prov), sub
        return t, sub
    raise TypeError(t)


def subst_vars(t: Type, sub: Substitution) -> Type:
    """Rename variable ids through `sub`, provenance preserved."""
    if isinstance(t, TypeVar):
        return TypeVar(sub.get(t.id, t.id), t.prov)
    if isinstance(t, Ctor):
        return Ctor(t.ctor, tuple(subst_vars(a, sub) for a in t.args), t.prov)
    return t


def ty_subst(sub: Substitution, state: InferenceState, level: int) -> None:
    """Duplicate the bounds of every substituted variable onto its copy,
    re-issuing them through `constrain` (upper bounds first), and give each
    copy a level entry at the current level."""
    for vid, nvid in list(sub.items()):
        state.set_level(nvid, level)
        for t in list(state.ub(vid)):
            constrain(state, Constraint(TypeVar(nvid, EMPTY), subst_vars(t, sub)), frozenset(), level)
        for t in list(state.lb(vid)):
            constrain(state, Constraint(subst_vars(t, sub), TypeVar(nvid, EMPTY)), frozenset(), level)


def pattern_type(pat: s.Pattern, state: InferenceState, level: int) -> tuple[Type, list[tuple[str, int]]]:
    """A type skeleton of fresh variables shaped like the pattern, carrying
    the pattern-component locations, plus the (name, var id) binders."""
    if isinstance(pat, s.PVar):
        v = state.fresh(level)
        return TypeVar(v.id, state.loc_prov(pat.loc)), [(pat.name, v.id)]
    if isinstance(pat, s.PWild):
        v = state.fresh(level)
        return TypeVar(v.id, state.loc_prov(pat.loc)), []
    if isinstance(pat, s.PTuple):
        args = []
        binders: list[tuple[str, int]] = []
        for item in pat.items:
            t, bs = pattern_type(item, state, level)
            args.append(t)
            binders.extend(bs)
        return Ctor(product(len(args)), tuple(args), state.loc_prov(pat.loc)), binders
    raise TypeError(pat)


def lookup(state: InferenceState, level: int, ctx: Context, name: str, loc: s.Location) -> Type:
    binding = ctx.get(name)
    if binding is None:
        raise ScopeError(name, loc)
    if isinstance(binding, Mono):
        return append_prov(binding.ty, state.loc_prov(loc))
    body, sub = freshen(binding.body, {}, binding.level, state, level)
    if sub:
        ty_subst(sub, state, level)
    return append_prov(body, state.loc_prov(loc))


def bind_let(
    state: InferenceState,
    level: int,
    ctx: Context,
    pat: s.Pattern,
    rhs: s.Term,
    rec: bool,
    rhs_level: int,
) -> Context:
    """Type one (possibly recursive) binding and return the extended context.

    A fresh variable stands for each bound name; the right-hand side's type
    flows into it at the binder location.
    """
    if rec:
        if not isinstance(pat, s.PVar):
            raise ScopeError("let rec requires a simple name", s.pattern_loc(pat))
        v = state.fresh(rhs_level)
        inner = dict(ctx)
        inner[pat.name] = Mono(TypeVar(v.id))
        t_rhs = infer_type(state, rhs_level, inner, rhs)
        constrain(state, Constraint(t_rhs, TypeVar(v.id, state.loc_prov(pat.loc))), frozenset(), rhs_level)
        out = dict(ctx)
        out[pat.name] = Poly(rhs_level, TypeVar(v.id))
        return out
    t_rhs = infer_type(state, rhs_level, ctx, rhs)
    ptype, binders = pattern_type(pat, state, rhs_level)
    constrain(state, Constraint(t_rhs, ptype), frozenset(), rhs_level)
    out = dict(ctx)
    for name, vid in binders:
        out[name] = Poly(rhs_level, TypeVar(vid))
    return out


def infer_type(state: InferenceState, level: int, ctx: Context, e: s.Term) -> Type:
    match e:
        case s.Var(name, loc):
            return lookup(state, level, ctx, name, loc)
        case s.Unit(loc):
            return Prim("unit", state.loc_prov(loc))
        case s.IntLit(_, loc):
            return Prim("int", state.loc_prov(loc))
        case s.BoolLit(_, loc):
            return Prim("bool", state.loc_prov(loc))
        case s.StrLit(_, loc):
            return Prim("string", state.loc_prov(loc))
        case s.FloatLit(_, loc):
            return Prim("float", state.loc_prov(loc))
        case s.Plus(e0, e1, loc):
            t0 = infer_type(state, level, ctx, e0)
            constrain(state, Constraint(t0, Prim("int", state.loc_prov(loc))), frozenset(), level)
            t1 = infer_type(state, level, ctx, e1)
            constrain(state, Constraint(t1, Prim("int", state.loc_prov(loc))), frozenset(), level)
            return Prim("int", state.loc_prov(loc))
        case s.Lam(pat, body, loc):
            ptype, binders = pattern_type(pat, state, level)
            inner = dict(ctx)
            for name, vid in binders:
                inner[name] = Mono(TypeVar(vid, state.loc_prov(binder_loc(pat, name))))
            t_body = infer_type(state, level, inner, body)
            return Ctor(ARROW, (ptype, t_body), state.loc_prov(loc))
        case s.App(fn, arg, loc):
            res = state.fresh(level)
            t_fn = infer_type(state, level, ctx, fn)
            t_arg = infer_type(state, level, ctx, arg)
            lp = state.loc_prov(loc)
            expected = Ctor(ARROW, (t_arg, TypeVar(res.id, lp)), lp)
            constrain(state, Constraint(t_fn, expected), frozenset(), level)
            return TypeVar(res.id, lp)
        case s.If(cond, then, els, loc):
            res = state.fresh(level)
            t1 = infer_type(state, level, ctx, cond)
            t2 = infer_type(state, level, ctx, then)
            t3 = infer_type(state, level, ctx, els)
            constrain(state, Constraint(t1, Prim("bool", state.loc_prov(s.term_loc(cond)))), frozenset(), level)
            lp = state.loc_prov(loc)
            constrain(state, Constraint(t2, TypeVar(res.id, lp)), frozenset(), level)
            constrain(state, Constraint(t3, TypeVar(res.id, lp)), frozenset(), level)
            return TypeVar(res.id, lp)
        case s.Tuple(items, loc):
            ts = tuple(infer_type(state, level, ctx, item) for item in items)
            return Ctor(product(len(ts)), ts, state.loc_prov(loc))
        case s.Proj(arg, index, loc):
            t = infer_type(state, level, ctx, arg)
            a = state.fresh(level)
            b = state.fresh(level)
            lp = state.loc_prov(loc)
            pair = (TypeVar(a.id, lp), TypeVar(b.id, lp)) if index == 0 else (TypeVar(b.id, lp), TypeVar(a.id, lp))
            constrain(state, Constraint(t, Ctor(product(2), pair, lp)), frozenset(), level)
            return TypeVar(a.id, lp)
        case s.Inj(arg, side, loc):
            other = state.fresh(level)
            t = infer_type(state, level, ctx, arg)
            lp = state.loc_prov(loc)
            args = (t, TypeVar(other.id, lp)) if side == 0 else (TypeVar(other.id, lp), t)
            return Ctor(EITHER, args, lp)
        case s.Case(scrut, lname, lloc, lbody, rname, rloc, rbody, loc):
            a = state.fresh(level)
            b = state.fresh(level)
            g = state.fresh(level)
            t0 = infer_type(state, level, ctx, scrut)
            lctx = dict(ctx)
            lctx[lname] = Mono(TypeVar(a.id, state.loc_prov(lloc)))
            t1 = infer_type(state, level, lctx, lbody)
            rctx = dict(ctx)
            rctx[rname] = Mono(TypeVar(b.id, state.loc_prov(rloc)))
            t2 = infer_type(state, level, rctx, rbody)
            lp = state.loc_prov(loc)
            scrut_ty = Ctor(EITHER, (TypeVar(a.id, state.loc_prov(lloc)), TypeVar(b.id, state.loc_prov(rloc))), lp)
            constrain(state, Constraint(t0, scrut_ty), frozenset(), level)
            constrain(state, Constraint(t1, TypeVar(g.id, lp)), frozenset(), level)
            constrain(state, Constraint(t2, TypeVar(g.id, lp)), frozenset(), level)
            return TypeVar(g.id, lp)
        case s.NilLit(loc):
            a = state.fresh(level)
            lp = state.loc_prov(loc)
            return Ctor(LIST, (TypeVar(a.id, lp),), lp)
        case s.ListCase(scrut, nil_body, hname, hloc, tname, tloc, cons_body, loc):
            a = state.fresh(level)
            g = state.fresh(level)
            t0 = infer_type(state, level, ctx, scrut)
            t1 = infer_type(state, level, ctx, nil_body)
            cctx = dict(ctx)
            cctx[hname] = Mono(TypeVar(a.id, state.loc_prov(hloc)))
            cctx[tname] = Mono(Ctor(LIST, (TypeVar(a.id),), state.loc_prov(tloc)))
            t2 = infer_type(state, level, cctx, cons_body)
            lp = state.loc_prov(loc)
            constrain(state, Constraint(t0, Ctor(LIST, (TypeVar(a.id, state.loc_prov(hloc)),), lp)), frozenset(), level)
            constrain(state, Constraint(t1, TypeVar(g.id, lp)), frozenset(), level)
            constrain(state, Constraint(t2, TypeVar(g.id, lp)), frozenset(), level)
            return TypeVar(g.id, lp)
        case s.Let(pat, rhs, body, rec, loc):
            ctx2 = bind_let(state, level, ctx, pat, rhs, rec, level + 1)
            return infer_type(state, level, ctx2, body)
    raise TypeError(e)


def binder_loc(pat: s.Pattern, name: str) -> s.Location | None:
    if isinstance(pat, s.PVar) and pat.name == name:
        return pat.loc
    if isinstance(pat, s.PTuple):
        for item in pat.items:
            found = binder_loc(item, name)
            if found is not None:
                return found
    return None


def infer_program(state: InferenceState, ctx: Context, program: s.Program, install_decl) -> Context:
    """Type all top-level items in order.  `install_decl` turns a ValDecl into
    a context binding (the prelude loader provides it).  Every top-level
    binding is typed at polymorphism level 0 and generalized there.
    """
    for item in program.items:
        if isinstance(item, s.ValDecl):
            ctx = dict(ctx)
            ctx[item.name] = install_decl(item, state)
        else:
            ctx = bind_let(state, 0, ctx, item.pat, item.rhs, item.rec, 0)
    return ctx
