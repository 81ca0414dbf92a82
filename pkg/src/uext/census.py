"""Finitely-presented infinite frames and what can be decided about their
ultrafilter extensions at desk scale: hull-type censuses, extension skeletons,
and the verdict detectors (reflexive points, generated substructure,
modal-logic coincidence).

A presentation is a finite base, omega-multiplicity component templates,
periodic rays/lines, and an optional builtin generator.  "Infinitely realized"
is always computed, never assumed: templates carry declared omega
multiplicity, ray interiors get omega after stabilization detection, and
generators only ever yield lower bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InputError
from .frame import Frame, boundedness, frame_from_dict, frame_to_dict
from .hulls import RootedGraph, canonical_form, hull

OMEGA = "w"


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True)
class Ray:
    """A periodic one-way ('ray') or two-way ('line') infinite graph.

    Copies of the period are indexed by naturals (ray) or integers (line);
    each seam edge (u, v) runs from u in copy k to v in copy k+1.
    """

    period: Frame
    seam: tuple[tuple[str, str], ...]
    kind: str

    def __post_init__(self):
        if self.kind not in ("ray", "line"):
            raise InputError(f"ray kind must be 'ray' or 'line', got {self.kind!r}")
        for a, b in self.seam:
            self.period.check_vertices([a, b])


def _gen_chains_lt(i: int) -> Frame:
    verts = tuple(f"c{i}:{j}" for j in range(i + 1))
    edges = frozenset((f"c{i}:{j}", f"c{i}:{k}") for j in range(i + 1) for k in range(j + 1, i + 1))
    return Frame(verts, edges)


def _gen_nat_lt(i: int) -> Frame:
    verts = tuple(str(j) for j in range(i + 1))
    edges = frozenset((str(j), str(i)) for j in range(i))
    return Frame(verts, edges)


def _gen_nat_succ(i: int) -> Frame:
    if i == 0:
        return Frame(("0",), frozenset())
    return Frame((str(i - 1), str(i)), frozenset([(str(i - 1), str(i))]))


# builtin name -> (component function, declared degree bound or None)
GENERATORS = {
    "chains_lt": (_gen_chains_lt, None),
    "nat_lt": (_gen_nat_lt, None),
    "nat_succ": (_gen_nat_succ, 2),
}


@dataclass(frozen=True)
class Generator:
    name: str

    def __post_init__(self):
        if self.name not in GENERATORS:
            raise InputError(f"unknown generator builtin {self.name!r}")

    @property
    def degree_bound(self) -> int | None:
        return GENERATORS[self.name][1]

    def component(self, i: int) -> Frame:
        return GENERATORS[self.name][0](i)


@dataclass(frozen=True)
class FamilyPresentation:
    base: Frame = Frame((), frozenset())
    omega_templates: tuple[Frame, ...] = ()
    rays: tuple[Ray, ...] = ()
    generator: Generator | None = None

    @property
    def is_finite(self) -> bool:
        return not self.omega_templates and not self.rays and self.generator is None

    @property
    def degree_bounded(self) -> bool:
        return self.generator is None or self.generator.degree_bound is not None


def family_from_dict(doc: dict) -> FamilyPresentation:
    base = frame_from_dict(doc["base"]) if doc.get("base") else Frame((), frozenset())
    templates = tuple(frame_from_dict(t) for t in doc.get("omega_templates", []))
    rays = tuple(
        Ray(
            frame_from_dict(r["period"]),
            tuple((str(a), str(b)) for a, b in r.get("seam", [])),
            r.get("kind", "ray"),
        )
        for r in doc.get("rays", [])
    )
    gen = Generator(doc["generator"]["name"]) if doc.get("generator") else None
    return FamilyPresentation(base, templates, rays, gen)


def load_family(path: str) -> FamilyPresentation:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read family file {path}: {exc}") from exc
    return family_from_dict(doc)


# ---------------------------------------------------------------------------
# Expansion


def _merge(parts: list[Frame]) -> Frame:
    verts: list[str] = []
    seen: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for p in parts:
        for v in p.vertices:
            if v not in seen:
                seen.add(v)
                verts.append(v)
        edges |= p.edges
    return Frame(tuple(verts), frozenset(edges))


def _ray_unroll(ray: Ray, copies: range, tag: str) -> Frame:
    name = lambda k, v: f"{tag}.{k}:{v}"
    verts = tuple(name(k, v) for k in copies for v in ray.period.vertices)
    edges = set()
    for k in copies:
        for a, b in ray.period.edges:
            edges.add((name(k, a), name(k, b)))
        if k + 1 in copies:
            for a, b in ray.seam:
                edges.add((name(k, a), name(k + 1, b)))
    return Frame(verts, frozenset(edges))


def expand(fam: FamilyPresentation, budget: int) -> Frame:
    """Deterministic finite truncation of the presented family."""
    if budget < 0:
        raise InputError("budget must be nonnegative")
    parts = [fam.base]
    for ti, tpl in enumerate(fam.omega_templates):
        for k in range(budget):
            parts.append(Frame(
                tuple(f"t{ti}.{k}:{v}" for v in tpl.vertices),
                frozenset((f"t{ti}.{k}:{a}", f"t{ti}.{k}:{b}") for a, b in tpl.edges),
            ))
    for ri, ray in enumerate(fam.rays):
        copies = range(budget) if ray.kind == "ray" else range(-budget, budget + 1)
        parts.append(_ray_unroll(ray, copies, f"r{ri}"))
    seen: set[str] = set()
    for p in parts:
        dup = seen & set(p.vertices)
        if dup:
            raise InputError(f"vertex ids collide across family parts: {sorted(dup)[0]!r}")
        seen |= set(p.vertices)
    if fam.generator is not None:
        # generator components may overlap each other (monotone union) but
        # must stay clear of the rest of the family
        gen = _merge([fam.generator.component(i) for i in range(budget)])
        dup = seen & set(gen.vertices)
        if dup:
            raise InputError(f"generator vertex ids collide with family parts: {sorted(dup)[0]!r}")
        parts.append(gen)
    return _merge(parts)


# ---------------------------------------------------------------------------
# Hull census


@dataclass
class HullCensus:
    depth: int
    entries: dict[str, object] = field(default_factory=dict)  # cert hex -> int | "w"
    representatives: dict[str, RootedGraph] = field(default_factory=dict)
    exact: bool = True
    unbounded_suspected: set[str] = field(default_factory=set)

    def add(self, h: RootedGraph, count) -> str:
        cert = canonical_form(h).hex
        self.representatives.setdefault(cert, h)
        prev = self.entries.get(cert, 0)
        if count == OMEGA or prev == OMEGA:
            self.entries[cert] = OMEGA
        else:
            self.entries[cert] = prev + count
        return cert

    def omega_types(self) -> list[str]:
        return sorted(c for c, m in self.entries.items() if m == OMEGA)


def _census_of_frame(census: HullCensus, frame: Frame, n: int, count) -> None:
    for w in frame.vertices:
        census.add(hull(frame, w, n), count)


def hull_census(fam: FamilyPresentation, n: int, generator_budget: int = 16) -> HullCensus:
    """Multiplicity map over depth-n rooted hull types of the presented family."""
    if n < 0:
        raise InputError("census depth must be nonnegative")
    if not fam.degree_bounded:
        raise InputError("census requires bounded degree")
    census = HullCensus(depth=n)
    _census_of_frame(census, fam.base, n, 1)
    for tpl in fam.omega_templates:
        _census_of_frame(census, tpl, n, OMEGA)
    for ri, ray in enumerate(fam.rays):
        _census_ray(census, ray, n, f"r{ri}")
    if fam.generator is not None:
        _census_generator(census, fam.generator, n, generator_budget)
    return census


def _census_ray(census: HullCensus, ray: Ray, n: int, tag: str) -> None:
    if ray.kind == "line":
        # every copy looks alike: compute copy 0 in a wide-enough window
        window = _ray_unroll(ray, range(-n - 1, n + 2), tag)
        for v in ray.period.vertices:
            census.add(hull(window, f"{tag}.0:{v}", n), OMEGA)
        return
    # ray: hulls of copy k are exact within an unrolling of k+n+1 copies;
    # scan copies outward until two consecutive copies carry the same types
    window = _ray_unroll(ray, range(0, 2 * n + 3), tag)

    def copy_sig(k: int) -> tuple[str, ...]:
        return tuple(canonical_form(hull(window, f"{tag}.{k}:{v}", n)).hex for v in ray.period.vertices)

    stab = n
    for k in range(n):
        if all(copy_sig(j) == copy_sig(n) for j in range(k, n + 1)):
            stab = k
            break
    for k in range(stab):
        for v in ray.period.vertices:
            census.add(hull(window, f"{tag}.{k}:{v}", n), 1)
    for v in ray.period.vertices:
        census.add(hull(window, f"{tag}.{stab}:{v}", n), OMEGA)


def _census_generator(census: HullCensus, gen: Generator, n: int, budget: int) -> None:
    # streaming lower bounds: a vertex is counted only once its hull has
    # settled between the budget and the margin-extended expansion
    small = _merge([gen.component(i) for i in range(budget)])
    large = _merge([gen.component(i) for i in range(budget + n + 1)])
    census.exact = False
    counts: dict[str, int] = {}
    for v in small.vertices:
        c_small = canonical_form(hull(small, v, n)).hex
        c_large = canonical_form(hull(large, v, n)).hex
        if c_small == c_large:
            census.add(hull(small, v, n), 1)
            counts[c_small] = counts.get(c_small, 0) + 1
    # types still being produced at the frontier are suspected unbounded
    half = _merge([gen.component(i) for i in range(max(1, budget // 2))])
    half_counts: dict[str, int] = {}
    for v in half.vertices:
        half_counts_key = canonical_form(hull(half, v, n)).hex
        half_counts[half_counts_key] = half_counts.get(half_counts_key, 0) + 1
    for cert, cnt in counts.items():
        if cnt > half_counts.get(cert, 0):
            census.unbounded_suspected.add(cert)


# ---------------------------------------------------------------------------
# Skeleton


@dataclass
class UESkeleton:
    frame: Frame
    provenance: dict[str, str]
    census: HullCensus


def _template_diameter(fam: FamilyPresentation) -> int:
    best = 0
    for tpl in fam.omega_templates:
        for w in tpl.vertices:
            best = max(best, max(hull(tpl, w, len(tpl.vertices)).layers.values(), default=0))
    return best


def default_budget(fam: FamilyPresentation, n: int) -> int:
    # ensures seam types are fully visible before representatives are matched
    return max(4 * n, 2 * _template_diameter(fam) + n, 2)


def ue_skeleton(fam: FamilyPresentation, n: int, budget: int | None = None) -> UESkeleton:
    """Expansion truncation plus one representative per omega-multiplicity type."""
    if budget is None:
        budget = default_budget(fam, n)
    census = hull_census(fam, n)
    expansion = expand(fam, budget)
    provenance = {v: "expansion" for v in expansion.vertices}
    parts = [expansion]
    for idx, cert in enumerate(census.omega_types()):
        rep = census.representatives[cert]
        renamed = Frame(
            tuple(f"rep{idx}:{v}" for v in rep.graph.vertices),
            frozenset((f"rep{idx}:{a}", f"rep{idx}:{b}") for a, b in rep.graph.edges),
        )
        parts.append(renamed)
        for v in renamed.vertices:
            provenance[v] = f"type:{cert}"
    return UESkeleton(_merge(parts), provenance, census)


# ---------------------------------------------------------------------------
# Coloring and clique bounds


def greedy_coloring(frame: Frame, ignore_loops: bool = True) -> dict[str, int]:
    """Proper coloring on non-loop edges, <= maxdeg+1 colors, load-order greedy."""
    colors: dict[str, int] = {}
    for v in frame.vertices:
        taken = {
            colors[w]
            for w in (frame.succ[v] | frame.pred[v])
            if w in colors and (ignore_loops or w != v) and w != v
        }
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def clique_lower_bound(frame: Frame) -> tuple[int, list[str]]:
    """A greedy clique in the underlying undirected graph (chromatic lower bound)."""
    adj = {v: (frame.succ[v] | frame.pred[v]) - {v} for v in frame.vertices}
    best: list[str] = []
    for seed in frame.vertices:
        clique = [seed]
        for v in frame.vertices:
            if v != seed and all(v in adj[u] for u in clique):
                clique.append(v)
        if len(clique) > len(best):
            best = clique
    return len(best), best


# ---------------------------------------------------------------------------
# Verdicts


@dataclass
class Verdict:
    kind: str  # "yes" | "no" | "unknown"
    evidence: str
    data: dict = field(default_factory=dict)


INEQUIVALENCE_SENTENCES = ("forall x. ~R(x,x)", "exists x. R(x,x)")


def _loops(frame: Frame) -> list[str]:
    return [v for v in frame.vertices if frame.has_edge(v, v)]


def reflexive_point_in_ue(fam: FamilyPresentation, chi_threshold: int) -> Verdict:
    """Does the ultrafilter extension of the family have a reflexive point?

    Any concrete reflexive point settles Yes via its principal ultrafilter.
    On loop-free families a uniform <= threshold coloring schema certifies No;
    a chromatic lower bound above the threshold certifies Yes by compactness
    (the finite-intersection family over the color classes).
    """
    if fam.is_finite:
        loops = _loops(fam.base)
        if loops:
            return Verdict("yes", f"reflexive point {loops[0]!r} (principal ultrafilter)")
        return Verdict("no", "finite loop-free frame; its extension is isomorphic to it",
                       {"coloring": greedy_coloring(fam.base)})

    for part_name, frame in _finite_parts(fam):
        loops = _loops(frame)
        if loops:
            return Verdict("yes", f"reflexive point {loops[0]!r} in {part_name}")
    if fam.generator is not None:
        for i in range(max(chi_threshold + 2, 12)):
            loops = _loops(fam.generator.component(i))
            if loops:
                return Verdict("yes", f"reflexive point {loops[0]!r} in generator component {i}")

    # loop-free family: chromatic analysis
    colorings: dict[str, dict[str, int]] = {}
    unknown = None
    for part_name, frame in _finite_parts(fam):
        coloring = greedy_coloring(frame)
        if frame.vertices and max(coloring.values()) + 1 > chi_threshold:
            lb, clique = clique_lower_bound(frame)
            if lb > chi_threshold:
                return Verdict(
                    "yes",
                    f"chromatic lower bound {lb} > {chi_threshold} in {part_name}",
                    {"clique": clique, "inequivalence_sentences": INEQUIVALENCE_SENTENCES},
                )
            unknown = f"{part_name} needs > {chi_threshold} colors greedily but no clique proof"
        else:
            colorings[part_name] = coloring

    if fam.generator is not None:
        bound = fam.generator.degree_bound
        scan = max(chi_threshold + 2, 12)
        for i in range(1, scan + 1):
            expansion = _merge([fam.generator.component(j) for j in range(i)])
            lb, clique = clique_lower_bound(expansion)
            if lb > chi_threshold:
                return Verdict(
                    "yes",
                    f"chromatic lower bound {lb} > {chi_threshold} reached by component index {i - 1}",
                    {"component_index": i - 1, "clique": clique,
                     "inequivalence_sentences": INEQUIVALENCE_SENTENCES},
                )
        if bound is not None and bound + 1 <= chi_threshold:
            expansion = _merge([fam.generator.component(j) for j in range(scan)])
            colorings["generator"] = greedy_coloring(expansion)
            # load-order greedy over a monotone presentation is a stabilizing
            # schema: later budgets only append vertices, never recolor
        else:
            return Verdict("unknown", f"chromatic scan exhausted at component index {scan - 1}")

    if unknown:
        return Verdict("unknown", unknown)
    return Verdict("no", f"uniform coloring schema with <= {chi_threshold} colors",
                   {"colorings": colorings})


def _finite_parts(fam: FamilyPresentation):
    """Finite frames whose coloring schemas cover the non-generator parts."""
    if fam.base.vertices:
        yield "base", fam.base
    for ti, tpl in enumerate(fam.omega_templates):
        yield f"template {ti}", tpl
    for ri, ray in enumerate(fam.rays):
        yield f"ray {ri} (period-doubled quotient)", _ray_quotient(ray)


def _ray_quotient(ray: Ray) -> Frame:
    """Period x {even, odd} quotient; a proper coloring of it lifts periodically."""
    name = lambda p, v: f"{v}@{p}"
    verts = tuple(name(p, v) for p in (0, 1) for v in ray.period.vertices)
    edges = set()
    for p in (0, 1):
        for a, b in ray.period.edges:
            edges.add((name(p, a), name(p, b)))
        for a, b in ray.seam:
            edges.add((name(p, a), name(1 - p, b)))
    return Frame(verts, frozenset(edges))


def generated_substructure_verdict(fam: FamilyPresentation) -> Verdict:
    """Is the family a generated substructure of its ultrafilter extension?

    Yes exactly when every vertex provably has finite out-degree; a vertex
    whose out-degree grows without bound across expansions is a No witness.
    """
    if fam.generator is None or fam.generator.degree_bound is not None:
        return Verdict("yes", "presentation guarantees finite out-degree everywhere")
    budgets = [4, 8, 16, 32]
    degs: dict[str, list[int]] = {}
    for b in budgets:
        expansion = _merge([fam.generator.component(i) for i in range(b)])
        for v in expansion.vertices:
            degs.setdefault(v, []).append(len(expansion.succ[v]))
    for v in sorted(degs, key=lambda x: (len(x), x)):
        series = degs[v]
        if len(series) == len(budgets) and all(a < b for a, b in zip(series, series[1:])):
            return Verdict("no", f"out-degree of vertex {v!r} grows without bound",
                           {"witness": v, "degrees": dict(zip(budgets, series))})
    return Verdict("unknown", "no growing-degree witness found within the scan")


def modal_logic_coincides(fam: FamilyPresentation, n: int, budget: int | None = None) -> tuple[bool, dict]:
    """Check every omega-type of the depth-n census is realized in the expansion.

    Rooted hull isomorphism implies n-bisimilarity of the roots, which is what
    equality of the modal logics needs at depth n.  An unmatched type would
    falsify the census, so a False return is a defect detector.
    """
    if budget is None:
        budget = default_budget(fam, n)
    census = hull_census(fam, n)
    expansion = expand(fam, budget)
    hull_certs = {v: canonical_form(hull(expansion, v, n)).hex for v in expansion.vertices}
    matches: dict[str, str] = {}
    unmatched: list[str] = []
    for cert in census.omega_types():
        for v in expansion.vertices:
            if hull_certs[v] == cert:
                matches[cert] = v
                break
        else:
            unmatched.append(cert)
    report = {"depth": n, "budget": budget, "matches": matches, "unmatched": unmatched}
    return not unmatched, report


# ---------------------------------------------------------------------------
# Serialization helpers


def census_to_dict(census: HullCensus) -> dict:
    types = {}
    for cert in sorted(census.entries):
        rep = census.representatives[cert]
        types[cert] = {
            "multiplicity": census.entries[cert],
            "representative": {**frame_to_dict(rep.graph), "root": rep.root},
            "unbounded_suspected": cert in census.unbounded_suspected,
        }
    return {"depth": census.depth, "exact": census.exact, "types": types}
