"""Shared random generators for the test suite."""

import random

from uext import Frame
from uext.modal import And, Box, Dia, Falsum, Imp, Not, Or, Prop


def random_frame(rng: random.Random, max_n: int = 6, edge_p: float = 0.35) -> Frame:
    n = rng.randint(1, max_n)
    verts = tuple(f"w{i}" for i in range(n))
    edges = frozenset(
        (a, b) for a in verts for b in verts if rng.random() < edge_p
    )
    return Frame(verts, edges)


def random_bounded_frame(rng: random.Random, max_n: int, max_deg: int) -> Frame:
    n = rng.randint(1, max_n)
    verts = [f"w{i}" for i in range(n)]
    edges: set[tuple[str, str]] = set()
    deg = {v: 0 for v in verts}
    attempts = 3 * n * max_deg
    for _ in range(attempts):
        a, b = rng.choice(verts), rng.choice(verts)
        if (a, b) in edges or deg[a] >= max_deg or deg[b] >= max_deg:
            continue
        edges.add((a, b))
        deg[a] += 1
        if b != a:
            deg[b] += 1
    return Frame(tuple(verts), frozenset(edges))


def random_modal(rng: random.Random, depth: int, letters: list[str], size: int = 12):
    """A random formula of modal depth at most `depth` and about `size` nodes."""
    choices = ["prop"]
    if size > 1:
        choices += ["not", "and", "or", "imp"]
        if depth > 0:
            choices += ["dia", "box", "dia"]
    kind = rng.choice(choices)
    if kind == "prop":
        return Prop(rng.choice(letters)) if letters else Falsum()
    if kind == "not":
        return Not(random_modal(rng, depth, letters, size - 1))
    if kind == "dia":
        return Dia(random_modal(rng, depth - 1, letters, size - 1))
    if kind == "box":
        return Box(random_modal(rng, depth - 1, letters, size - 1))
    half = (size - 1) // 2
    l = random_modal(rng, depth, letters, half)
    r = random_modal(rng, depth, letters, half)
    return {"and": And, "or": Or, "imp": Imp}[kind](l, r)


def random_valuation(rng: random.Random, frame: Frame, letters: list[str]):
    return {
        p: [w for w in frame.vertices if rng.random() < 0.5] for p in letters
    }


def all_3vertex_frames():
    """All 512 labeled digraphs on vertices a, b, c."""
    verts = ("a", "b", "c")
    slots = [(x, y) for x in verts for y in verts]
    for mask in range(512):
        edges = frozenset(slots[i] for i in range(9) if mask & (1 << i))
        yield Frame(verts, edges)
