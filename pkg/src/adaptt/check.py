"""Well-formedness checking for all nine judgment forms.

Syntax-directed traversal in inference mode: terms are fully annotated,
every classifier equality demanded by a rule premise is discharged by
conversion, and variable rules only allow access to covariant entries
(contravariant positions are reached through explicitly dualized
contexts, which the traversal produces as it descends).
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    POS, NEG, Context, TmEntry, TyEntry, Telescope, Inst,
    Type, Base, TyVarRef, Pi, Sig, Ind,
    Term, Var, Lam, App, Pair, Fst, Snd, Cast, Con,
    Adapter, AdId, Chain, Post, PiAd, SigAd, IndAd,
    Sub, STm, STy, Trans, KTm, KAd, IndDesc,
    dual_ctx, extend_tm, extend_tel, shift, id_sub, desc,
    tm_entry_position, ty_entry_position,
)
from .normalize import (
    apply, apply_tel, open_tm_block, cast, conv_ty,
    tm_entry_type, _entry_tel_here,
)
from .transform import push_tel, trans_source, trans_target


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: tuple[int, int] | None = None
    expected: str | None = None
    actual: str | None = None

    def render(self, filename: str = "<input>") -> str:
        loc = f"{filename}:{self.span[0]}:{self.span[1]}" if self.span else filename
        if self.expected is not None:
            return (f"ERROR {self.code} {loc} "
                    f"expected {self.expected} got {self.actual} ({self.message})")
        return f"ERROR {self.code} {loc} {self.message}"


class CheckError(Exception):
    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diag = diag

    def with_span(self, span) -> CheckError:
        if self.diag.span is None and span is not None:
            return CheckError(Diagnostic(self.diag.code, self.diag.message,
                                         span, self.diag.expected, self.diag.actual))
        return self


def _fail(code: str, message: str, expected=None, actual=None):
    from . import pretty
    exp = pretty.plain(expected) if expected is not None else None
    act = pretty.plain(actual) if actual is not None else None
    raise CheckError(Diagnostic(code, message, None, exp, act))


def _demand_conv_ty(ctx: Context, actual: Type, expected: Type, what: str):
    if not conv_ty(ctx, actual, expected):
        _fail("ClassifierMismatch", f"{what} has the wrong type",
              expected=expected, actual=actual)


# ---------------------------------------------------------------------------
# Contexts, telescopes, instantiations
# ---------------------------------------------------------------------------


def check_ctx(ctx: Context) -> None:
    for k, e in enumerate(ctx):
        prefix = ctx[:k]
        if isinstance(e, TmEntry):
            check_ty(dual_ctx(prefix, e.dir), e.ty)
        else:
            check_tel(dual_ctx(prefix, e.tel_dir), e.tel)


def check_tel(ctx: Context, tel: Telescope) -> None:
    for k, ty in enumerate(tel):
        check_ty(extend_tel(ctx, POS, tel[:k]), ty)


def check_inst(ctx: Context, inst: Inst, tel: Telescope) -> None:
    if len(inst) != len(tel):
        _fail("ArityMismatch",
              f"instantiation has {len(inst)} components, telescope wants {len(tel)}")
    for k, t in enumerate(inst):
        want = open_tm_block(tel[k], inst[:k])
        got = check_tm(ctx, t)
        _demand_conv_ty(ctx, got, want, "instantiation component")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


def check_ty(ctx: Context, ty: Type) -> None:
    match ty:
        case Base(_):
            pass
        case TyVarRef(j, inst):
            try:
                pos = ty_entry_position(ctx, j)
            except IndexError:
                _fail("UnboundVariable", f"type variable {j} is not in scope")
            entry = ctx[pos]
            if entry.dir is not POS:
                _fail("VarianceViolation",
                      f"type variable {j} is contravariant here")
            tel = _entry_tel_here(ctx, j)
            check_inst(dual_ctx(ctx, entry.tel_dir), inst, tel)
        case Pi(dom, cod):
            check_ty(dual_ctx(ctx), dom)
            check_ty(extend_tm(ctx, NEG, dom), cod)
        case Sig(fst, snd):
            check_ty(ctx, fst)
            check_ty(extend_tm(ctx, POS, fst), snd)
        case Ind(name, params, indices):
            d = desc(name)
            check_sub(ctx, params, d.params_ctx)
            check_inst(ctx, indices, apply_tel(d.index_tel, params))
        case _:
            _fail("IllFormed", f"not a type: {ty!r}")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


def check_tm(ctx: Context, t: Term) -> Type:
    return infer_tm(ctx, t)


def infer_tm(ctx: Context, t: Term) -> Type:
    match t:
        case Var(i):
            try:
                pos = tm_entry_position(ctx, i)
            except IndexError:
                _fail("UnboundVariable", f"term variable {i} is not in scope")
            if ctx[pos].dir is not POS:
                _fail("VarianceViolation", f"term variable {i} is contravariant here")
            return tm_entry_type(ctx, i)
        case Lam(dom, body):
            check_ty(dual_ctx(ctx), dom)
            cod = infer_tm(extend_tm(ctx, NEG, dom), body)
            return Pi(dom, cod)
        case App(fn, arg):
            fty = infer_tm(ctx, fn)
            if not isinstance(fty, Pi):
                _fail("ClassifierMismatch", "application head is not a function",
                      expected="a function type", actual=fty)
            aty = infer_tm(dual_ctx(ctx), arg)
            _demand_conv_ty(dual_ctx(ctx), aty, fty.dom, "function argument")
            return open_tm_block(fty.cod, (arg,))
        case Pair(ty, a, b):
            if not isinstance(ty, Sig):
                _fail("ClassifierMismatch", "pair annotation is not a pair type",
                      expected="a pair type", actual=ty)
            check_ty(ctx, ty)
            _demand_conv_ty(ctx, infer_tm(ctx, a), ty.fst, "first component")
            want = open_tm_block(ty.snd, (a,))
            _demand_conv_ty(ctx, infer_tm(ctx, b), want, "second component")
            return ty
        case Fst(p):
            pty = infer_tm(ctx, p)
            if not isinstance(pty, Sig):
                _fail("ClassifierMismatch", "projection of a non-pair",
                      expected="a pair type", actual=pty)
            return pty.fst
        case Snd(p):
            pty = infer_tm(ctx, p)
            if not isinstance(pty, Sig):
                _fail("ClassifierMismatch", "projection of a non-pair",
                      expected="a pair type", actual=pty)
            from .normalize import fst_
            return open_tm_block(pty.snd, (fst_(p),))
        case Cast(tm, ad):
            tty = infer_tm(ctx, tm)
            src, tgt = check_ad(ctx, ad)
            _demand_conv_ty(ctx, tty, src, "cast subject")
            return tgt
        case Con(name, tag, params, args):
            d = desc(name)
            if not 0 <= tag < len(d.cons):
                _fail("UnboundVariable", f"no constructor {tag} in {name}")
            check_sub(ctx, params, d.params_ctx)
            from .inductive import con_data_tied, result_indices
            tel = apply_tel(con_data_tied(d, tag), params)
            check_inst(ctx, args, tel)
            return Ind(name, params, result_indices(t))
        case _:
            _fail("IllFormed", f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Adapters
# ---------------------------------------------------------------------------


def check_ad(ctx: Context, ad: Adapter) -> tuple[Type, Type]:
    match ad:
        case AdId(ty):
            check_ty(ctx, ty)
            return ty, ty
        case Chain(parts):
            if len(parts) < 2:
                _fail("IllFormed", "composite adapter with fewer than two links")
            src, cur = check_ad(ctx, parts[0])
            for p in parts[1:]:
                s, t = check_ad(ctx, p)
                _demand_conv_ty(ctx, s, cur, "adapter composition middle")
                cur = t
            return src, cur
        case Post(_, s, t):
            check_ty(ctx, s)
            check_ty(ctx, t)
            return s, t
        case PiAd(dom_ad, cod_ad, src, tgt):
            if not (isinstance(src, Pi) and isinstance(tgt, Pi)):
                _fail("ClassifierMismatch", "function adapter endpoints must be functions",
                      expected="a function type", actual=src)
            check_ty(ctx, src)
            check_ty(ctx, tgt)
            das, dat = check_ad(dual_ctx(ctx), dom_ad)
            _demand_conv_ty(dual_ctx(ctx), das, tgt.dom, "domain adapter source")
            _demand_conv_ty(dual_ctx(ctx), dat, src.dom, "domain adapter target")
            ext = extend_tm(ctx, NEG, tgt.dom)
            cas, cat = check_ad(ext, cod_ad)
            expected = apply(src.cod, _precomp_sub(ctx, tgt.dom, dom_ad))
            _demand_conv_ty(ext, cas, expected, "codomain adapter source")
            _demand_conv_ty(ext, cat, tgt.cod, "codomain adapter target")
            return src, tgt
        case SigAd(fst_ad, snd_ad, src, tgt):
            if not (isinstance(src, Sig) and isinstance(tgt, Sig)):
                _fail("ClassifierMismatch", "pair adapter endpoints must be pair types",
                      expected="a pair type", actual=src)
            check_ty(ctx, src)
            check_ty(ctx, tgt)
            fas, fat = check_ad(ctx, fst_ad)
            _demand_conv_ty(ctx, fas, src.fst, "first adapter source")
            _demand_conv_ty(ctx, fat, tgt.fst, "first adapter target")
            ext = extend_tm(ctx, POS, src.fst)
            sas, sat = check_ad(ext, snd_ad)
            _demand_conv_ty(ext, sas, src.snd, "second adapter source")
            expected = apply(tgt.snd, _precomp_sub(ctx, src.fst, fst_ad))
            _demand_conv_ty(ext, sat, expected, "second adapter target")
            return src, tgt
        case IndAd(name, trans):
            d = desc(name)
            check_trans(ctx, trans, d.full_ctx)
            from .normalize import ad_src, ad_tgt
            return ad_src(ad), ad_tgt(ad)
        case _:
            _fail("IllFormed", f"not an adapter: {ad!r}")


def _precomp_sub(ctx: Context, new_dom: Type, ad: Adapter) -> Sub:
    """Spine ctx |> new_dom -> ctx |> other end: weaken the identity and
    cast the bound variable along the (weakened) adapter."""
    comps = tuple(shift(c, 1, 0) for c in id_sub(ctx).comps)
    return Sub(comps + (STm(cast(Var(0), shift(ad, 1, 0))),))


def _block_adjust_sub(ctx: Context, tel_src: Telescope, alpha) -> Sub:
    """Spine ctx |> tel_src -> ctx |> tel_tgt casting each block variable
    along the matching telescope-adapter component."""
    k = len(tel_src)
    comps = list(shift(c, k, 0) for c in id_sub(ctx).comps)
    for p in range(k):
        comps.append(STm(cast(Var(k - 1 - p), shift(alpha[p], k - p, 0))))
    return Sub(tuple(comps))


def check_telad(ctx: Context, ads, src_tel: Telescope, tgt_tel: Telescope) -> None:
    """Telescope adapter: componentwise, each component over the source
    prefix with its target adjusted along the earlier components."""
    if len(ads) != len(src_tel) or len(ads) != len(tgt_tel):
        _fail("ArityMismatch", "telescope adapter length mismatch")
    for k, ad in enumerate(ads):
        comp_ctx = extend_tel(ctx, POS, src_tel[:k])
        s, t = check_ad(comp_ctx, ad)
        _demand_conv_ty(comp_ctx, s, src_tel[k], "telescope adapter source")
        adj = _block_adjust_sub(ctx, src_tel[:k], ads[:k])
        _demand_conv_ty(comp_ctx, t, apply(tgt_tel[k], adj),
                        "telescope adapter target")


# ---------------------------------------------------------------------------
# Substitutions and transformations
# ---------------------------------------------------------------------------


def check_sub(ctx: Context, sub: Sub, tgt: Context) -> None:
    if len(sub.comps) != len(tgt):
        _fail("ArityMismatch",
              f"substitution has {len(sub.comps)} components for a context of {len(tgt)}")
    for k, (entry, c) in enumerate(zip(tgt, sub.comps)):
        pre = Sub(sub.comps[:k])
        if isinstance(entry, TmEntry):
            if not isinstance(c, STm):
                _fail("ArityMismatch", "term entry needs a term component")
            want = apply(entry.ty, pre)
            got = infer_tm(dual_ctx(ctx, entry.dir), c.tm)
            _demand_conv_ty(dual_ctx(ctx, entry.dir), got, want,
                            "substitution component")
        else:
            if not isinstance(c, STy):
                _fail("ArityMismatch", "type entry needs a type component")
            if c.arity != len(entry.tel):
                _fail("ArityMismatch", "type component arity mismatch")
            tel = apply_tel(entry.tel, pre)
            inner = extend_tel(dual_ctx(ctx, entry.tel_dir), entry.tel_dir, tel)
            inner = dual_ctx(inner, entry.tel_dir)
            check_ty(dual_ctx(inner, entry.dir), c.ty)


def check_trans(ctx: Context, tr: Trans, tgt: Context) -> None:
    if len(tr.comps) != len(tgt):
        _fail("ArityMismatch",
              f"transformation has {len(tr.comps)} components for a context of {len(tgt)}")
    for k, (entry, c) in enumerate(zip(tgt, tr.comps)):
        pre = Trans(tr.comps[:k])
        sigma = trans_source(tgt[:k], pre)
        tau = trans_target(tgt[:k], pre)
        if isinstance(entry, TmEntry):
            if not isinstance(c, KTm):
                _fail("ArityMismatch", "term entry needs a term component")
            side = sigma if entry.dir is POS else tau
            want = apply(entry.ty, side)
            got = infer_tm(dual_ctx(ctx, entry.dir), c.tm)
            _demand_conv_ty(dual_ctx(ctx, entry.dir), got, want,
                            "transformation component")
        else:
            if not isinstance(c, KAd):
                _fail("ArityMismatch", "type entry needs an adapter component")
            if c.arity != len(entry.tel):
                _fail("ArityMismatch", "adapter component arity mismatch")
            _check_trans_ty_comp(ctx, entry, c, tgt[:k], pre, sigma, tau)


def _check_trans_ty_comp(ctx: Context, entry: TyEntry, c: KAd,
                         prefix: Context, pre: Trans, sigma: Sub, tau: Sub):
    """Check one adapter component against the direction table; the
    component context and the adjusted endpoint depend on (dir, tel_dir)."""
    alpha = push_tel(entry.tel, pre, dual_ctx(prefix, entry.tel_dir))
    if entry.tel_dir is POS:
        tel_src = apply_tel(entry.tel, sigma)
        tel_tgt = apply_tel(entry.tel, tau)
        comp_ctx = extend_tel(ctx, POS, tel_src)
        s, t = check_ad(comp_ctx if entry.dir is POS else dual_ctx(comp_ctx),
                        c.ad)
        adj = _block_adjust_sub(ctx, tel_src, alpha)
        if entry.dir is POS:
            # ad : A => B[adjust], stored other = B over the tau block
            want_t = apply(c.forced_ty, adj)
            _demand_conv_ty(comp_ctx, t, want_t, "adapter component target")
        else:
            # ad : B[adjust] => A with B the target-side component
            want_s = apply(c.forced_ty, adj)
            _demand_conv_ty(dual_ctx(comp_ctx), s, want_s,
                            "adapter component source")
    else:
        # contravariant dependency telescope: component over the
        # target-side block, adjustment on the other endpoint
        tel_tgt = apply_tel(entry.tel, tau)
        comp_ctx = extend_tel(ctx, NEG, tel_tgt)
        s, t = check_ad(comp_ctx if entry.dir is POS else dual_ctx(comp_ctx),
                        c.ad)
        adj = _block_adjust_sub(ctx, tel_tgt, alpha)
        if entry.dir is POS:
            want_s = apply(c.forced_ty, adj)
            _demand_conv_ty(comp_ctx, s, want_s, "adapter component source")
        else:
            want_t = apply(c.forced_ty, adj)
            _demand_conv_ty(dual_ctx(comp_ctx), t, want_t,
                            "adapter component target")


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


def check_desc(d: IndDesc) -> None:
    check_ctx(d.params_ctx)
    check_tel(d.params_ctx, d.index_tel)
    for c in d.cons:
        check_tel(d.params_ctx, c.nrec)
        nr_ctx = extend_tel(d.params_ctx, POS, c.nrec)
        for r in c.rec:
            check_tel(dual_ctx(nr_ctx), r.arit)
            r_ctx = extend_tel(nr_ctx, NEG, r.arit)
            idx_tel = shift((d.index_tel), len(c.nrec) + len(r.arit), 0)
            check_inst(r_ctx, r.rind, idx_tel)
        idx_tel = shift((d.index_tel), len(c.nrec), 0)
        check_inst(nr_ctx, c.ind, idx_tel)
