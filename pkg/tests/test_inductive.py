"""Signature compiler: constructor elaboration against the hand-unfolded
shapes, and the derived cast-on-constructor equations for every stock
datatype (the golden computation rows), plus a datatype that is not in
the stock table to show the rules are derived generically."""

import pytest

from adaptt.syntax import (
    POS, NEG, TmEntry, TyEntry, Base, TyVarRef, Pi, Ind, Var, Cast, Con,
    Post, PiAd, IndAd, Sub, STm, STy, Trans, KTm, KAd, desc, shift,
)
from adaptt.normalize import cast, conv_tm, KernelError
from adaptt.inductive import (
    con_data, con_data_tied, constr_type, cast_con, ind_adapter,
    generic_con, result_indices, nat, nat_zero, nat_succ,
)
from helpers import (
    A, B, C, D, f_AB, g_BC, q_DC, list_of, vec_of, sum_of, w_of, id_of,
    nil, cons, mu1, list_ad, register_tree,
)


# -- elaboration shapes ------------------------------------------------------


def test_con_data_list():
    d = desc("List")
    assert con_data(d, 0) == ()
    # cons over (X:Ty+) |> (Self : <>.Ty+): [X, Self]
    assert con_data(d, 1) == (TyVarRef(1, ()), TyVarRef(0, ()))
    assert con_data_tied(d, 1) == (TyVarRef(0, ()), list_of(TyVarRef(0, ())))


def test_con_data_w():
    d = desc("W")
    # sup: [X, Pi (Y x). Self]
    assert con_data(d, 0) == (
        TyVarRef(2, ()),
        Pi(TyVarRef(1, (Var(0),)), TyVarRef(0, ())))
    tied = con_data_tied(d, 0)
    assert tied == (
        TyVarRef(1, ()),
        Pi(TyVarRef(0, (Var(0),)),
           Ind("W", Sub((STy(TyVarRef(1, ()), 0),
                         STy(TyVarRef(0, (Var(0),)), 1))), ())))


def test_con_data_vec():
    d = desc("Vec")
    tied = con_data_tied(d, 1)
    assert tied == (
        TyVarRef(0, ()), nat(),
        Ind("Vec", Sub((STy(TyVarRef(0, ()), 0),)), (Var(0),)))


def test_constr_type_list_nil():
    ctx, ty = constr_type("List", 0)
    assert ctx == (TyEntry(POS, POS, ()),)
    assert ty == list_of(TyVarRef(0, ()))


def test_constr_type_vec_cons():
    ctx, ty = constr_type("Vec", 1)
    assert ctx == (
        TyEntry(POS, POS, ()),
        TmEntry(POS, TyVarRef(0, ())),
        TmEntry(POS, nat()),
        TmEntry(POS, vec_of(TyVarRef(0, ()), Var(0))))
    assert ty == vec_of(TyVarRef(0, ()), nat_succ(Var(1)))


def test_constr_type_id_refl():
    ctx, ty = constr_type("Id", 0)
    assert ctx == (TyEntry(POS, POS, ()), TmEntry(POS, TyVarRef(0, ())))
    assert ty == id_of(TyVarRef(0, ()), Var(0), Var(0))


def test_generic_con_checks():
    from adaptt.check import infer_tm
    for name in ("Nat", "List", "Vec", "Sum", "W", "Id"):
        d = desc(name)
        for ci in range(len(d.cons)):
            ctx, want = constr_type(name, ci)
            got = infer_tm(ctx, generic_con(name, ci))
            assert conv_ty_here(ctx, got, want), (name, ci)


def conv_ty_here(ctx, a, b):
    from adaptt.normalize import conv_ty
    return conv_ty(ctx, a, b)


# -- golden computation rows -------------------------------------------------


def test_row_list_nil():
    ad = list_ad(f_AB, B)
    assert cast(nil(A), ad) == nil(B)


def test_row_list_cons():
    ad = list_ad(f_AB, B)
    t = cons(A, Var(1), Var(0))
    assert cast(t, ad) == cons(B, Cast(Var(1), f_AB), Cast(Var(0), ad))


def test_row_vec_nil():
    mu = mu1(f_AB, B)
    t = Con("Vec", 0, Sub((STy(A, 0),)), ())
    out = cast(t, ind_adapter("Vec", mu, (nat_zero(),)))
    assert out == Con("Vec", 0, Sub((STy(B, 0),)), ())


def test_row_vec_cons():
    # ctx: (a:A) |> (n:Nat) |> (v:Vec A n)
    mu = mu1(f_AB, B)
    t = Con("Vec", 1, Sub((STy(A, 0),)), (Var(2), Var(1), Var(0)))
    out = cast(t, ind_adapter("Vec", mu, (nat_succ(Var(1)),)))
    assert out == Con(
        "Vec", 1, Sub((STy(B, 0),)),
        (Cast(Var(2), f_AB), Var(1),
         Cast(Var(0), ind_adapter("Vec", mu, (Var(1),)))))


def test_row_sum_inl_inr():
    mu = Trans((KAd(f_AB, B, 0), KAd(g_BC, C, 0)))
    ad = ind_adapter("Sum", mu, ())
    params = Sub((STy(A, 0), STy(B, 0)))
    params2 = Sub((STy(B, 0), STy(C, 0)))
    assert cast(Con("Sum", 0, params, (Var(1),)), ad) == \
        Con("Sum", 0, params2, (Cast(Var(1), f_AB),))
    assert cast(Con("Sum", 1, params, (Var(0),)), ad) == \
        Con("Sum", 1, params2, (Cast(Var(0), g_BC),))


def test_row_w_sup():
    # constant branching families C (source) and D (target), g : D => C
    mu = Trans((KAd(f_AB, B, 0), KAd(q_DC, D, 1)))
    ad = ind_adapter("W", mu, ())
    params = Sub((STy(A, 0), STy(C, 1)))
    t = Con("W", 0, params, (Var(1), Var(0)))
    out = cast(t, ad)
    assert isinstance(out, Con) and out.params == Sub((STy(B, 0), STy(D, 1)))
    arg0, arg1 = out.args
    assert arg0 == Cast(Var(1), f_AB)
    # recursive argument: pre-composition with g, then the tree map
    assert isinstance(arg1, Cast) and isinstance(arg1.ad, PiAd)
    assert arg1.ad.dom_ad == q_DC
    assert arg1.ad.cod_ad == shift(ad, 1, 0)


def test_row_id_refl():
    mu = Trans((KAd(f_AB, B, 0), KTm(Var(0))))
    ad = ind_adapter("Id", mu, (Var(0),))
    t = Con("Id", 0, Sub((STy(A, 0), STm(Var(0)))), ())
    out = cast(t, ad)
    assert out == Con("Id", 0, Sub((STy(B, 0), STm(Cast(Var(0), f_AB)))), ())


def test_row_tree_not_in_stock_table():
    register_tree()
    mu = Trans((KAd(f_AB, B, 0), KAd(q_DC, D, 0)))
    ad = ind_adapter("Tree", mu, ())
    params = Sub((STy(A, 0), STy(C, 0)))
    leaf = Con("Tree", 0, params, ())
    node = Con("Tree", 1, params, (Var(1), Var(0)))
    assert cast(leaf, ad) == Con("Tree", 0, Sub((STy(B, 0), STy(D, 0))), ())
    out = cast(node, ad)
    assert out.args[0] == Cast(Var(1), f_AB)
    assert isinstance(out.args[1].ad, PiAd)
    assert out.args[1].ad.dom_ad == q_DC
    assert out.args[1].ad.cod_ad == shift(ad, 1, 0)


# -- error paths -------------------------------------------------------------


def test_cast_con_rejects_wrong_parameters():
    ad = list_ad(f_AB, B)
    with pytest.raises(KernelError):
        cast_con(nil(C), ad.trans)


def test_cast_con_rejects_wrong_indices():
    mu = mu1(f_AB, B)
    t = Con("Vec", 0, Sub((STy(A, 0),)), ())  # indices force zero
    with pytest.raises(KernelError):
        cast_con(t, ind_adapter("Vec", mu, (nat_succ(nat_zero()),)).trans)


def test_identity_cast_on_constructor():
    from adaptt.syntax import AdId
    from adaptt.transform import id_trans, trans_source
    d = desc("List")
    ident = ind_adapter("List", Trans((KAd(AdId(A), A, 0),)), ())
    t = cons(A, Var(1), Var(0))
    out = cast(t, ident)
    ctx = (TmEntry(POS, A), TmEntry(POS, list_of(A)))
    assert conv_tm(ctx, list_of(A), out, t)


def test_result_indices():
    t = Con("Vec", 1, Sub((STy(A, 0),)), (Var(2), Var(1), Var(0)))
    assert result_indices(t) == (nat_succ(Var(1)),)
