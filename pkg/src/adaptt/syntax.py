"""Abstract syntax for a two-level directed type theory with adapters.

Nine sorts live here: contexts, substitutions, transformations, types,
adapters, terms, telescopes, telescope adapters and instantiations, plus
the signature sorts for inductive types.  All values are immutable.

Representation choices that the rest of the kernel relies on:

* De Bruijn indices are split per namespace.  ``Var(i)`` counts only term
  entries of the context (innermost = 0) and ``TyVarRef(j)`` counts only
  type-variable entries.  The two never alias.
* Dualization is eager.  Dualizing a context flips every entry's
  direction flag (and the telescope direction of type-variable entries);
  substitutions and transformations are self-dual as data, their
  source/target reading flips with the context they are read against.
* Substitutions and transformations are fully eta-expanded component
  spines: one component per target-context entry, no contexts stored on
  the spine itself.  Operations that need the target context take it as
  an argument (it is always known: either the ambient context or the
  parameter context of a registered datatype).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union


class Dir(Enum):
    """Direction (variance) flag; the two-element group."""

    POS = "+"
    NEG = "-"

    def __mul__(self, other: Dir) -> Dir:
        return POS if self is other else NEG

    @property
    def flip(self) -> Dir:
        return NEG if self is POS else POS


POS = Dir.POS
NEG = Dir.NEG


# ---------------------------------------------------------------------------
# Types, terms, adapters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Base:
    """Postulated ground type; closed, so substitution leaves it alone."""

    name: str


@dataclass(frozen=True)
class TyVarRef:
    """Occurrence of a type variable, applied to an instantiation.

    ``inst`` fills the variable's dependency telescope; its terms live in
    the telescope-direction dual of the ambient context.
    """

    index: int
    inst: Inst


@dataclass(frozen=True)
class Pi:
    """Dependent function type.  ``dom`` lives in the dual of the ambient
    context; ``cod`` lives under a negative binder for the argument."""

    dom: Type
    cod: Type


@dataclass(frozen=True)
class Sig:
    """Dependent pair type; both components covariant."""

    fst: Type
    snd: Type


@dataclass(frozen=True)
class Ind:
    """A registered inductive type at concrete parameters and indices.

    ``params`` is a spine into the datatype's parameter context and
    ``indices`` instantiates its index telescope under ``params``.
    """

    desc: str
    params: Sub
    indices: Inst


Type = Union[Base, TyVarRef, Pi, Sig, Ind]


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lam:
    """Annotated abstraction; the bound variable is contravariant."""

    dom: Type
    body: Term


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair:
    """Annotated pair; ``ty`` is the Sigma type it inhabits."""

    ty: Sig
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst:
    pair: Term


@dataclass(frozen=True)
class Snd:
    pair: Term


@dataclass(frozen=True)
class Cast:
    """Action of an adapter on a term.  Normal forms never carry an
    identity or a composite adapter here; the normalizer splits those."""

    tm: Term
    ad: Adapter


@dataclass(frozen=True)
class Con:
    """Constructor of a registered inductive, fully applied."""

    desc: str
    tag: int
    params: Sub
    args: Inst


Term = Union[Var, Lam, App, Pair, Fst, Snd, Cast, Con]


@dataclass(frozen=True)
class AdId:
    """Identity adapter at a type."""

    ty: Type


@dataclass(frozen=True)
class Chain:
    """Free composition of atomic adapters, outermost (applied last) at
    the end.  Never nested, never contains identities."""

    parts: tuple[Adapter, ...]


@dataclass(frozen=True)
class Post:
    """Postulated ground adapter between closed types."""

    name: str
    src_ty: Type
    tgt_ty: Type


@dataclass(frozen=True)
class PiAd:
    """Structural adapter between function types.

    ``dom_ad`` runs from the target domain to the source domain, in the
    dual context.  ``cod_ad`` lives under a negative binder for the target
    domain and runs from the source codomain (precomposed with ``dom_ad``)
    to the target codomain.  Endpoints are stored because the source
    codomain is not recoverable from the components alone.
    """

    dom_ad: Adapter
    cod_ad: Adapter
    src_ty: Pi
    tgt_ty: Pi


@dataclass(frozen=True)
class SigAd:
    """Structural adapter between pair types; both components forward."""

    fst_ad: Adapter
    snd_ad: Adapter
    src_ty: Sig
    tgt_ty: Sig


@dataclass(frozen=True)
class IndAd:
    """Functorial adapter of an inductive: a transformation between two
    spines into the datatype's parameters-plus-indices context."""

    desc: str
    trans: Trans


Adapter = Union[AdId, Chain, Post, PiAd, SigAd, IndAd]


# ---------------------------------------------------------------------------
# Spines: substitutions, transformations, telescopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class STm:
    """Substitution component for a term entry."""

    tm: Term


@dataclass(frozen=True)
class STy:
    """Substitution component for a type-variable entry: a type over the
    source context extended by the entry's (substituted) telescope.
    ``arity`` caches that telescope's length."""

    ty: Type
    arity: int


SubComp = Union[STm, STy]


@dataclass(frozen=True)
class Sub:
    comps: tuple[SubComp, ...]

    def __len__(self) -> int:
        return len(self.comps)


@dataclass(frozen=True)
class KTm:
    """Transformation component for a term entry: the free-side term
    (source side for positive entries, target side for negative ones);
    the other endpoint is forced and recomputed on demand."""

    tm: Term


@dataclass(frozen=True)
class KAd:
    """Transformation component for a type-variable entry.

    ``ad`` is the free component (its source type is the free-side spine
    component); ``forced_ty`` is the other endpoint's spine component,
    which is not recoverable from ``ad`` alone.
    """

    ad: Adapter
    forced_ty: Type
    arity: int


TransComp = Union[KTm, KAd]


@dataclass(frozen=True)
class Trans:
    comps: tuple[TransComp, ...]

    def __len__(self) -> int:
        return len(self.comps)


Telescope = tuple[Type, ...]
Inst = tuple[Term, ...]
TelAd = tuple[Adapter, ...]


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TmEntry:
    """Term variable entry; ``ty`` lives over the dir-dual of the prefix."""

    dir: Dir
    ty: Type


@dataclass(frozen=True)
class TyEntry:
    """Type variable entry; ``tel`` lives over the tel_dir-dual prefix."""

    dir: Dir
    tel_dir: Dir
    tel: Telescope


CtxEntry = Union[TmEntry, TyEntry]
Context = tuple[CtxEntry, ...]

EMPTY: Context = ()


def dual_entry(e: CtxEntry) -> CtxEntry:
    if isinstance(e, TmEntry):
        return TmEntry(e.dir.flip, e.ty)
    return TyEntry(e.dir.flip, e.tel_dir.flip, e.tel)


def dual_ctx(ctx: Context, d: Dir = NEG) -> Context:
    if d is POS:
        return ctx
    return tuple(dual_entry(e) for e in ctx)


def extend_tm(ctx: Context, d: Dir, ty: Type) -> Context:
    return ctx + (TmEntry(d, ty),)


def extend_tel(ctx: Context, d: Dir, tel: Telescope) -> Context:
    """Telescope extension, stored expanded into individual term entries."""
    return ctx + tuple(TmEntry(d, ty) for ty in tel)


def extend_ty(ctx: Context, d: Dir, tel_dir: Dir, tel: Telescope) -> Context:
    return ctx + (TyEntry(d, tel_dir, tel),)


def tm_count(ctx: Context) -> int:
    return sum(1 for e in ctx if isinstance(e, TmEntry))


def ty_count(ctx: Context) -> int:
    return sum(1 for e in ctx if isinstance(e, TyEntry))


def tm_entry_position(ctx: Context, index: int) -> int:
    """Absolute position of the term entry with de Bruijn index ``index``."""
    seen = 0
    for pos in range(len(ctx) - 1, -1, -1):
        if isinstance(ctx[pos], TmEntry):
            if seen == index:
                return pos
            seen += 1
    raise IndexError(f"unbound term variable {index}")


def ty_entry_position(ctx: Context, index: int) -> int:
    seen = 0
    for pos in range(len(ctx) - 1, -1, -1):
        if isinstance(ctx[pos], TyEntry):
            if seen == index:
                return pos
            seen += 1
    raise IndexError(f"unbound type variable {index}")


def vinst(tel: Telescope) -> Inst:
    """Variable instantiation of a telescope over its own extension."""
    n = len(tel)
    return tuple(Var(n - 1 - k) for k in range(n))


# ---------------------------------------------------------------------------
# Weakening (namespace-split index shifting)
# ---------------------------------------------------------------------------


def shift(x, d_tm: int, d_ty: int, c_tm: int = 0, c_ty: int = 0):
    """Shift free indices of any syntax value: term indices at or above
    ``c_tm`` move by ``d_tm``, type-variable indices at or above ``c_ty``
    by ``d_ty``.  Total on every sort that can occur inside another."""
    if d_tm == 0 and d_ty == 0:
        return x
    return _shift(x, d_tm, d_ty, c_tm, c_ty)


def _shift_all(xs, d_tm, d_ty, c_tm, c_ty):
    return tuple(_shift(x, d_tm, d_ty, c_tm, c_ty) for x in xs)


def _shift(x, d_tm, d_ty, c_tm, c_ty):
    match x:
        case Var(i):
            return Var(i + d_tm) if i >= c_tm else x
        case Base(_):
            return x
        case TyVarRef(j, inst):
            j2 = j + d_ty if j >= c_ty else j
            return TyVarRef(j2, _shift_all(inst, d_tm, d_ty, c_tm, c_ty))
        case Pi(dom, cod):
            return Pi(_shift(dom, d_tm, d_ty, c_tm, c_ty),
                      _shift(cod, d_tm, d_ty, c_tm + 1, c_ty))
        case Sig(fst, snd):
            return Sig(_shift(fst, d_tm, d_ty, c_tm, c_ty),
                       _shift(snd, d_tm, d_ty, c_tm + 1, c_ty))
        case Ind(desc, params, indices):
            return Ind(desc, _shift(params, d_tm, d_ty, c_tm, c_ty),
                       _shift_all(indices, d_tm, d_ty, c_tm, c_ty))
        case Lam(dom, body):
            return Lam(_shift(dom, d_tm, d_ty, c_tm, c_ty),
                       _shift(body, d_tm, d_ty, c_tm + 1, c_ty))
        case App(fn, arg):
            return App(_shift(fn, d_tm, d_ty, c_tm, c_ty),
                       _shift(arg, d_tm, d_ty, c_tm, c_ty))
        case Pair(ty, fst, snd):
            return Pair(_shift(ty, d_tm, d_ty, c_tm, c_ty),
                        _shift(fst, d_tm, d_ty, c_tm, c_ty),
                        _shift(snd, d_tm, d_ty, c_tm, c_ty))
        case Fst(p):
            return Fst(_shift(p, d_tm, d_ty, c_tm, c_ty))
        case Snd(p):
            return Snd(_shift(p, d_tm, d_ty, c_tm, c_ty))
        case Cast(tm, ad):
            return Cast(_shift(tm, d_tm, d_ty, c_tm, c_ty),
                        _shift(ad, d_tm, d_ty, c_tm, c_ty))
        case Con(desc, tag, params, args):
            return Con(desc, tag, _shift(params, d_tm, d_ty, c_tm, c_ty),
                       _shift_all(args, d_tm, d_ty, c_tm, c_ty))
        case AdId(ty):
            return AdId(_shift(ty, d_tm, d_ty, c_tm, c_ty))
        case Chain(parts):
            return Chain(_shift_all(parts, d_tm, d_ty, c_tm, c_ty))
        case Post(_, _, _):
            return x
        case PiAd(da, ca, s, t):
            return PiAd(_shift(da, d_tm, d_ty, c_tm, c_ty),
                        _shift(ca, d_tm, d_ty, c_tm + 1, c_ty),
                        _shift(s, d_tm, d_ty, c_tm, c_ty),
                        _shift(t, d_tm, d_ty, c_tm, c_ty))
        case SigAd(fa, sa, s, t):
            return SigAd(_shift(fa, d_tm, d_ty, c_tm, c_ty),
                         _shift(sa, d_tm, d_ty, c_tm + 1, c_ty),
                         _shift(s, d_tm, d_ty, c_tm, c_ty),
                         _shift(t, d_tm, d_ty, c_tm, c_ty))
        case IndAd(desc, trans):
            return IndAd(desc, _shift(trans, d_tm, d_ty, c_tm, c_ty))
        case Sub(comps):
            return Sub(_shift_all(comps, d_tm, d_ty, c_tm, c_ty))
        case STm(tm):
            return STm(_shift(tm, d_tm, d_ty, c_tm, c_ty))
        case STy(ty, arity):
            return STy(_shift(ty, d_tm, d_ty, c_tm + arity, c_ty), arity)
        case Trans(comps):
            return Trans(_shift_all(comps, d_tm, d_ty, c_tm, c_ty))
        case KTm(tm):
            return KTm(_shift(tm, d_tm, d_ty, c_tm, c_ty))
        case KAd(ad, forced, arity):
            return KAd(_shift(ad, d_tm, d_ty, c_tm + arity, c_ty),
                       _shift(forced, d_tm, d_ty, c_tm + arity, c_ty), arity)
        case tuple():
            # telescope: successive entries see one more bound term var
            return tuple(_shift(t, d_tm, d_ty, c_tm + k, c_ty)
                         for k, t in enumerate(x))
        case _:
            raise TypeError(f"cannot shift {x!r}")


def shift_tel(tel: Telescope, d_tm: int, d_ty: int,
              c_tm: int = 0, c_ty: int = 0) -> Telescope:
    return tuple(shift(t, d_tm, d_ty, c_tm + k, c_ty) for k, t in enumerate(tel))


def shift_telad(ads: TelAd, d_tm: int, d_ty: int,
                c_tm: int = 0, c_ty: int = 0) -> TelAd:
    return tuple(shift(a, d_tm, d_ty, c_tm + k, c_ty) for k, a in enumerate(ads))


def shift_inst(inst: Inst, d_tm: int, d_ty: int,
               c_tm: int = 0, c_ty: int = 0) -> Inst:
    return tuple(shift(t, d_tm, d_ty, c_tm, c_ty) for t in inst)


# ---------------------------------------------------------------------------
# Identity and weakening spines
# ---------------------------------------------------------------------------


def id_sub(ctx: Context) -> Sub:
    """The identity substitution on ``ctx`` as an eta-expanded spine."""
    comps: list[SubComp] = []
    tm_left = tm_count(ctx)
    ty_left = ty_count(ctx)
    for e in ctx:
        if isinstance(e, TmEntry):
            tm_left -= 1
            comps.append(STm(Var(tm_left)))
        else:
            ty_left -= 1
            comps.append(STy(TyVarRef(ty_left, vinst(e.tel)), len(e.tel)))
    return Sub(tuple(comps))


def weaken_sub(ctx: Context, dropped: Context) -> Sub:
    """Spine of the weakening from ``ctx + dropped`` back to ``ctx``."""
    d_tm = tm_count(dropped)
    d_ty = ty_count(dropped)
    base = id_sub(ctx)
    return Sub(tuple(shift(c, d_tm, d_ty) for c in base.comps))


def is_id_sub(ctx: Context, sub: Sub) -> bool:
    return sub == id_sub(ctx)


# ---------------------------------------------------------------------------
# Inductive signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecDesc:
    """Recursive constructor argument: a contravariant arity telescope
    (the branching shape) and the indices of the recursive occurrence."""

    arit: Telescope
    rind: Inst


@dataclass(frozen=True)
class ConDesc:
    """Constructor signature: non-recursive arguments, recursive argument
    descriptions, and the result indices (over params + nrec)."""

    name: str
    nrec: Telescope
    rec: tuple[RecDesc, ...]
    ind: Inst


@dataclass(frozen=True)
class IndDesc:
    name: str
    params_ctx: Context
    index_tel: Telescope
    cons: tuple[ConDesc, ...]

    @property
    def full_ctx(self) -> Context:
        """Parameter context extended by the index telescope."""
        return extend_tel(self.params_ctx, POS, self.index_tel)

    def con_index(self, name: str) -> int:
        for i, c in enumerate(self.cons):
            if c.name == name:
                return i
        raise KeyError(f"no constructor {name!r} in {self.name}")


# The global description table: append-only, registration precedes use.
DESC_TABLE: dict[str, IndDesc] = {}


def desc(name: str) -> IndDesc:
    try:
        return DESC_TABLE[name]
    except KeyError:
        raise KeyError(f"unregistered datatype {name!r}") from None


def install_desc(d: IndDesc) -> None:
    """Raw table insertion; idempotent on structurally equal re-entry.
    Checked registration lives in the inductive engine."""
    old = DESC_TABLE.get(d.name)
    if old is not None and old != d:
        raise ValueError(f"datatype {d.name!r} already registered differently")
    DESC_TABLE[d.name] = d


# ---------------------------------------------------------------------------
# Dualization of the remaining sorts
# ---------------------------------------------------------------------------


def dualize(obj, d: Dir = NEG):
    """Group action of a direction on contexts, substitutions and
    transformations.  Spines are self-dual as data (their components do
    not change); only the context reading flips, so for them this is the
    identity and the flip happens wherever the context is supplied."""
    if d is POS:
        return obj
    if isinstance(obj, tuple):  # Context
        return dual_ctx(obj)
    if isinstance(obj, (Sub, Trans)):
        return obj
    raise TypeError(f"cannot dualize {obj!r}")
