"""Signature declarations: the embedded default prelude and installation of
`val` declarations into the typing context.

Prelude signatures render in reports as `lib. let (+): int -> int -> int`
style lines; each node of the installed type points into that rendered text.
Signatures declared inside user files keep their source locations instead.
"""
from __future__ import annotations

from . import surface as s
from .core import ARROW, EITHER, LIST, Context, InferenceState, Poly, Prim, Type, TypeVar, Ctor, product
from .surface import Location, SourceMap, SurfaceError

DEFAULT_PRELUDE = """\
val (+) : int -> int -> int
val (-) : int -> int -> int
val ( * ) : int -> int -> int
val (/) : int -> int -> int
val (mod) : int -> int -> int
val (+.) : float -> float -> float
val (-.) : float -> float -> float
val ( *. ) : float -> float -> float
val (/.) : float -> float -> float
val (<) : 'a -> 'a -> bool
val (<=) : 'a -> 'a -> bool
val (>) : 'a -> 'a -> bool
val (>=) : 'a -> 'a -> bool
val (=) : 'a -> 'a -> bool
val (<>) : 'a -> 'a -> bool
val (^) : string -> string -> string
val (@) : 'a list -> 'a list -> 'a list
val (::) : 'a -> 'a list -> 'a list
val not : bool -> bool
val abs : int -> int
val string_of_int : int -> string
val List.map : ('a -> 'b) -> 'a list -> 'b list
val List.length : 'a list -> int
val List.rev : 'a list -> 'a list
val List.combine : 'a list -> 'b list -> ('a * 'b) list
val List.fold_left : ('a -> 'b -> 'a) -> 'a -> 'b list -> 'a
"""


def _name_display(name: str) -> str:
    if name[0].isalpha():
        return name
    if "*" in name:
        return f"( {name} )"
    return f"({name})"


def _render_ty(ty: s.TyExpr, out: list[str], spans: dict[int, tuple[int, int]], prec: int = 0) -> None:
    start = sum(len(p) for p in out)

    def emit(text: str) -> None:
        out.append(text)

    if isinstance(ty, s.TyName):
        emit(ty.name)
    elif isinstance(ty, s.TyVarRef):
        emit(ty.name)
    elif isinstance(ty, s.TyArrow):
        wrap = prec >= 1
        if wrap:
            emit("(")
            start += 1
        _render_ty(ty.lhs, out, spans, 1)
        emit(" -> ")
        _render_ty(ty.rhs, out, spans, 0)
        end = sum(len(p) for p in out)
        if wrap:
            emit(")")
        spans[id(ty)] = (start, end)
        return
    elif isinstance(ty, s.TyProd):
        wrap = prec >= 2
        if wrap:
            emit("(")
            start += 1
        for i, item in enumerate(ty.items):
            if i:
                emit(" * ")
            _render_ty(item, out, spans, 2)
        end = sum(len(p) for p in out)
        if wrap:
            emit(")")
        spans[id(ty)] = (start, end)
        return
    elif isinstance(ty, s.TyApp):
        if ty.ctor == "either":
            emit("(")
            _render_ty(ty.args[0], out, spans, 0)
            emit(", ")
            _render_ty(ty.args[1], out, spans, 0)
            emit(") either")
        else:
            arg = ty.args[0]
            if isinstance(arg, (s.TyArrow, s.TyProd)):
                emit("(")
                _render_ty(arg, out, spans, 0)
                emit(")")
            else:
                _render_ty(arg, out, spans, 0)
            emit(f" {ty.ctor}")
    else:
        raise TypeError(ty)
    spans[id(ty)] = (start, sum(len(p) for p in out))


def _type_of_tyexpr(ty: s.TyExpr, state: InferenceState, loc_of, tyvars: dict[str, int]) -> Type:
    lp = state.loc_prov(loc_of(ty))
    if isinstance(ty, s.TyName):
        return Prim(ty.name, lp)
    if isinstance(ty, s.TyVarRef):
        if ty.name not in tyvars:
            tyvars[ty.name] = state.fresh(0).id
        return TypeVar(tyvars[ty.name], lp)
    if isinstance(ty, s.TyArrow):
        return Ctor(ARROW, (_type_of_tyexpr(ty.lhs, state, loc_of, tyvars), _type_of_tyexpr(ty.rhs, state, loc_of, tyvars)), lp)
    if isinstance(ty, s.TyProd):
        return Ctor(product(len(ty.items)), tuple(_type_of_tyexpr(i, state, loc_of, tyvars) for i in ty.items), lp)
    if isinstance(ty, s.TyApp):
        ctor = LIST if ty.ctor == "list" else EITHER
        return Ctor(ctor, tuple(_type_of_tyexpr(a, state, loc_of, tyvars) for a in ty.args), lp)
    raise TypeError(ty)


def install_builtin_decl(item: s.ValDecl, state: InferenceState, smap: SourceMap) -> Poly:
    """Install a prelude declaration behind a rendered `lib.` display line."""
    parts: list[str] = []
    spans: dict[int, tuple[int, int]] = {}
    prefix = f"let {_name_display(item.name)}: "
    _render_ty(item.ty, parts, spans, 0)
    text = prefix + "".join(parts)
    fid = smap.add_file(f"lib:{item.name}", text, builtin=True)

    def loc_of(node: s.TyExpr) -> Location:
        a, b = spans[id(node)]
        return Location(fid, len(prefix) + a, len(prefix) + b, builtin=True)

    ty = _type_of_tyexpr(item.ty, state, loc_of, {})
    return Poly(0, ty)


def install_source_decl(item: s.ValDecl, state: InferenceState) -> Poly:
    """Install an in-source `val` declaration at its own locations."""
    ty = _type_of_tyexpr(item.ty, state, lambda node: node.loc, {})
    return Poly(0, ty)


def load_prelude(text: str | None, state: InferenceState, smap: SourceMap) -> Context:
    """Parse a prelude of `val` declarations and install every signature at
    polymorphism level 0."""
    source = DEFAULT_PRELUDE if text is None else text
    fid = smap.add_file("<prelude>", source, builtin=True)
    program = s.parse_source(source, fid, builtin=True)
    ctx: Context = {}
    for item in program.items:
        if not isinstance(item, s.ValDecl):
            raise SurfaceError("prelude may only contain val declarations", item.loc)
        ctx[item.name] = install_builtin_decl(item, state, smap)
    return ctx
