import random

import pytest

from uext import (
    Frame,
    InputError,
    canonical_form,
    endpoints,
    eval_fo,
    hull,
    hull_formula,
    rooted_iso,
)
from uext.fo import free_vars, quantifier_rank

from helpers import random_bounded_frame

TRI = Frame(("a", "b", "c"), frozenset([("a", "b"), ("a", "c"), ("b", "c")]))
PATH4 = Frame(("p0", "p1", "p2", "p3"),
              frozenset([("p0", "p1"), ("p1", "p2"), ("p2", "p3")]))


def test_hull_is_rooted_neighborhood():
    h = hull(PATH4, "p0", 2)
    assert set(h.graph.vertices) == {"p0", "p1", "p2"}
    assert h.root == "p0"
    assert h.layers == {"p0": 0, "p1": 1, "p2": 2}


def test_hull_uses_both_directions():
    h = hull(PATH4, "p2", 1)
    assert set(h.graph.vertices) == {"p1", "p2", "p3"}


def test_hull_depth_zero():
    h = hull(TRI, "a", 0)
    assert h.graph.vertices == ("a",)


def test_endpoints():
    assert endpoints(hull(PATH4, "p0", 2)) == {"p2"}
    with pytest.raises(InputError):
        endpoints(hull(PATH4, "p0", 0))


def test_certificate_invariant_under_relabeling():
    rng = random.Random(5)
    for _ in range(50):
        f = random_bounded_frame(rng, 8, 3)
        w = rng.choice(f.vertices)
        perm = list(f.vertices)
        rng.shuffle(perm)
        ren = dict(zip(f.vertices, perm))
        g = Frame(tuple(sorted(perm)), frozenset((ren[a], ren[b]) for a, b in f.edges))
        n = rng.randint(0, 2)
        assert canonical_form(hull(f, w, n)).hex == canonical_form(hull(g, ren[w], n)).hex


def test_certificate_separates_root_position():
    # same underlying path, different root
    h0, h1 = hull(PATH4, "p0", 3), hull(PATH4, "p1", 3)
    assert canonical_form(h0).hex != canonical_form(h1).hex


def test_rooted_iso_witness_is_checked():
    h1 = hull(PATH4, "p1", 1)
    h2 = hull(Frame(("x", "y", "z"), frozenset([("x", "y"), ("y", "z")])), "y", 1)
    ok, mapping = rooted_iso(h1, h2)
    assert ok
    assert mapping["p1"] == "y"
    for a, b in h1.graph.edges:
        assert h2.graph.has_edge(mapping[a], mapping[b])


def test_rooted_iso_rejects_different_shapes():
    ok, mapping = rooted_iso(hull(TRI, "a", 1), hull(PATH4, "p1", 1))
    assert not ok and mapping is None


def test_hull_formula_characterizes_type():
    h = hull(PATH4, "p1", 1)
    phi = hull_formula(h)
    assert free_vars(phi) == {"x"}
    assert quantifier_rank(phi) >= 1
    # p2 has the same 1-hull type as p1; the ends do not
    assert eval_fo(PATH4, phi, {"x": "p1"})
    assert eval_fo(PATH4, phi, {"x": "p2"})
    assert not eval_fo(PATH4, phi, {"x": "p0"})
    assert not eval_fo(PATH4, phi, {"x": "p3"})


def test_hull_formula_closure_excludes_larger_neighborhoods():
    # a 1-hull of degree 1 must not match a vertex of degree 2
    two_star = Frame(("c", "l", "r"), frozenset([("c", "l"), ("c", "r")]))
    h = hull(Frame(("u", "v"), frozenset([("u", "v")])), "u", 1)
    assert not eval_fo(two_star, hull_formula(h), {"x": "c"})


def test_singleton_hull_formula():
    lone = Frame(("z",), frozenset())
    phi = hull_formula(hull(lone, "z", 1))
    assert eval_fo(lone, phi, {"x": "z"})
    assert not eval_fo(PATH4, phi, {"x": "p0"})
