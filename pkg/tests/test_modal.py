import random

import pytest

from uext import (
    Frame,
    InputError,
    Model,
    ResourceError,
    eval_modal,
    extend_model,
    format_modal,
    frame_valid,
    modal_depth,
    modally_equivalent_upto,
    n_bisimilar,
    parse_modal,
    truth_membership_check,
    truth_set,
)
from uext.modal import And, Box, Dia, Imp, Not, Or, Prop, distinguishing_formula

from helpers import random_frame, random_modal, random_valuation

TRI = Frame(("a", "b", "c"), frozenset([("a", "b"), ("a", "c"), ("b", "c")]))


def test_parse_precedence():
    # -> binds loosest and associates right; unary binds tightest
    phi = parse_modal("~p0 & p1 | p2 -> p0 -> <>[]p1")
    assert phi == Imp(
        Or(And(Not(Prop("p0")), Prop("p1")), Prop("p2")),
        Imp(Prop("p0"), Dia(Box(Prop("p1")))),
    )


def test_parse_round_trip():
    rng = random.Random(1)
    for _ in range(80):
        phi = random_modal(rng, 3, ["p0", "p1"])
        assert parse_modal(format_modal(phi)) == phi


def test_parse_errors_carry_position():
    with pytest.raises(InputError, match="position"):
        parse_modal("p0 & & p1")
    with pytest.raises(InputError, match="syntax error"):
        parse_modal("(p0")
    with pytest.raises(InputError):
        parse_modal("")


def test_modal_depth():
    assert modal_depth(parse_modal("p0")) == 0
    assert modal_depth(parse_modal("<>[]p0 & <>p1")) == 2


def test_eval_and_truth_set():
    m = Model.make(TRI, {"p0": ["b", "c"]})
    assert eval_modal(m, "a", parse_modal("<>p0"))
    assert eval_modal(m, "a", parse_modal("[]p0"))
    assert not eval_modal(m, "c", parse_modal("<>p0"))
    assert truth_set(m, parse_modal("<>p0")) == {"a", "b"}
    # unknown letters are false everywhere
    assert truth_set(m, parse_modal("p9")) == frozenset()


def test_box_is_derived_from_diamond():
    m = Model.make(TRI, {"p0": ["b"]})
    box = parse_modal("[]p0")
    dual = parse_modal("~<>~p0")
    for w in TRI.vertices:
        assert eval_modal(m, w, box) == eval_modal(m, w, dual)


def test_frame_valid():
    refl = Frame(("x",), frozenset([("x", "x")]))
    ok, _ = frame_valid(refl, parse_modal("[]p0 -> p0"))
    assert ok
    ok, counter = frame_valid(TRI, parse_modal("[]p0 -> p0"))
    assert not ok and counter is not None
    model, w = counter
    assert not eval_modal(model, w, parse_modal("[]p0 -> p0"))


def test_frame_valid_cap(monkeypatch):
    monkeypatch.setenv("UEXT_VALUATION_LIMIT", "4")
    with pytest.raises(ResourceError):
        frame_valid(TRI, parse_modal("p0 | p1"))


def test_truth_membership_on_random_models():
    rng = random.Random(11)
    for _ in range(30):
        f = random_frame(rng, max_n=5)
        m = Model.make(f, random_valuation(rng, f, ["p0", "p1"]))
        uem = extend_model(m)
        for _ in range(5):
            assert truth_membership_check(uem, random_modal(rng, 3, ["p0", "p1"]))


def test_n_bisimilar_reflexive_vs_two_cycle():
    loop = Model.make(Frame(("x",), frozenset([("x", "x")])), {})
    two = Model.make(Frame(("a", "b"), frozenset([("a", "b"), ("b", "a")])), {})
    for n in range(5):
        assert n_bisimilar(loop, "x", two, "a", n)


def test_n_bisimilar_depth_cutoff():
    # paths of length 1 vs 2 differ exactly at depth 2
    p1 = Model.make(Frame(("a", "b"), frozenset([("a", "b")])), {})
    p2 = Model.make(Frame(("x", "y", "z"), frozenset([("x", "y"), ("y", "z")])), {})
    assert n_bisimilar(p1, "a", p2, "x", 1)
    assert not n_bisimilar(p1, "a", p2, "x", 2)


def test_distinguishing_formula_witnesses():
    p1 = Model.make(Frame(("a", "b"), frozenset([("a", "b")])), {})
    p2 = Model.make(Frame(("x", "y", "z"), frozenset([("x", "y"), ("y", "z")])), {})
    eq, phi = modally_equivalent_upto(p1, "a", p2, "x", 2, [])
    assert not eq and phi is not None
    assert modal_depth(phi) <= 2
    assert eval_modal(p1, "a", phi) != eval_modal(p2, "x", phi)


def test_equivalent_upto_agrees_with_game():
    rng = random.Random(23)
    for _ in range(40):
        f1, f2 = random_frame(rng, 4), random_frame(rng, 4)
        m1 = Model.make(f1, random_valuation(rng, f1, ["p0"]))
        m2 = Model.make(f2, random_valuation(rng, f2, ["p0"]))
        w1, w2 = f1.vertices[0], f2.vertices[0]
        n = rng.randint(0, 3)
        eq, phi = modally_equivalent_upto(m1, w1, m2, w2, n, ["p0"])
        assert eq == n_bisimilar(m1, w1, m2, w2, n)
        if not eq:
            assert modal_depth(phi) <= n
            assert eval_modal(m1, w1, phi) != eval_modal(m2, w2, phi)
