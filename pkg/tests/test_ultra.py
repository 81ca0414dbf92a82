import random

import pytest

from uext import (
    DefectError,
    Frame,
    InputError,
    ResourceError,
    Road,
    Ultrafilter,
    build_ue,
    canonical_embedding,
    distinguishing_elements,
    enumerate_ultrafilters,
    roads_between,
    ue_related,
    ultrafilter_road_delta,
)
from uext.ultra import length_zero_delta

from helpers import random_frame

TRI = Frame(("a", "b", "c"), frozenset([("a", "b"), ("a", "c"), ("b", "c")]))


def test_principal_membership():
    u = Ultrafilter(TRI, "b")
    assert u.member({"a", "b"})
    assert not u.member({"a", "c"})
    assert u.name == "pi:b"


def test_enumerate_is_one_per_point():
    assert [u.point for u in enumerate_ultrafilters(TRI)] == ["a", "b", "c"]


def test_three_modes_agree_small():
    us = enumerate_ultrafilters(TRI)
    for u in us:
        for v in us:
            a = ue_related(u, v, "A")
            assert a == ue_related(u, v, "B") == ue_related(u, v, "C")
            assert a == TRI.has_edge(u.point, v.point)


def test_build_ue_mirrors_base_edges():
    rng = random.Random(7)
    for _ in range(25):
        f = random_frame(rng, max_n=5)
        ue = build_ue(f)
        expected = frozenset((f"pi:{a}", f"pi:{b}") for a, b in f.edges)
        assert ue.frame.edges == expected


def test_canonical_embedding_bijective():
    eta = canonical_embedding(TRI)
    assert sorted(eta) == ["a", "b", "c"]
    assert all(eta[w].point == w for w in eta)


def test_powerset_cap(monkeypatch):
    monkeypatch.setenv("UEXT_POWERSET_LIMIT", "2")
    with pytest.raises(ResourceError):
        build_ue(TRI)


def test_distinguishing_elements_are_separating():
    us = enumerate_ultrafilters(TRI)
    ds = distinguishing_elements(us)
    assert len(ds) == len(us)
    for i, u in enumerate(us):
        assert u.member(ds[i])
        for j, v in enumerate(us):
            if i != j:
                assert not v.member(ds[i])


def test_distinguishing_elements_reject_duplicates():
    us = [Ultrafilter(TRI, "a"), Ultrafilter(TRI, "a")]
    with pytest.raises(InputError):
        distinguishing_elements(us)


def test_road_validation():
    with pytest.raises(InputError):
        Road(("a",), ())
    with pytest.raises(InputError):
        Road(("a", "a"), ("R",))
    with pytest.raises(InputError):
        Road(("a", "b"), ("Q",))


def test_roads_between_excludes_length_zero():
    assert roads_between(TRI, "a", "a", 3) == []


def test_roads_between_triangle():
    roads = roads_between(TRI, "a", "c", 2)
    found = {(r.waypoints, r.directions) for r in roads}
    assert (("a", "c"), ("R",)) in found
    assert (("a", "b", "c"), ("R", "R")) in found
    # every road is simple and within length
    for r in roads:
        assert len(set(r.waypoints)) == len(r.waypoints)
        assert len(r) <= 2


def test_roads_use_both_directions():
    f = Frame(("a", "b", "c"), frozenset([("b", "a"), ("b", "c")]))
    roads = roads_between(f, "a", "c", 2)
    assert [(r.waypoints, r.directions) for r in roads] == [
        (("a", "b", "c"), ("R-", "R"))
    ]


def test_road_delta_recursion():
    # along pi:a -R-> pi:b -R-> pi:c the chained image of {a} lands on {c}
    path = Frame(("a", "b", "c"), frozenset([("a", "b"), ("b", "c")]))
    ua, ub, uc = (Ultrafilter(path, w) for w in "abc")
    road = Road((ua, ub, uc), ("R", "R"))
    ds = distinguishing_elements([ua, ub, uc])
    delta = ultrafilter_road_delta(frozenset({"a"}), road, ds)
    assert delta == frozenset({"c"})
    # the final delta is nonempty, so it belongs to the last (principal) waypoint
    assert uc.member(delta)


def test_road_delta_requires_start_membership():
    path = Frame(("a", "b"), frozenset([("a", "b")]))
    ua, ub = Ultrafilter(path, "a"), Ultrafilter(path, "b")
    road = Road((ua, ub), ("R",))
    ds = distinguishing_elements([ua, ub])
    with pytest.raises(InputError):
        ultrafilter_road_delta(frozenset({"b"}), road, ds)


def test_length_zero_delta_identity():
    assert length_zero_delta(frozenset({"a"})) == frozenset({"a"})
