"""The basic modal language: parsing, truth, frame validity, n-bisimulation,
and the truth-membership cross-check on ultrafilter-extension models.

Box is derived (eval treats [] phi as ~<>~phi) so the diamond clause stays the
single semantic clause.  Unknown proposition letters evaluate as false
everywhere, which is observationally the same as extending the valuation
with the empty set.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import cached_property

from .errors import InputError, ResourceError
from .frame import Frame
from .ultra import UEFrame, build_ue

VALUATION_LIMIT_ENV = "UEXT_VALUATION_LIMIT"
DEFAULT_VALUATION_LIMIT = 2**22


# ---------------------------------------------------------------------------
# Formula AST


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class Not:
    sub: "ModalFormula"


@dataclass(frozen=True)
class And:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Or:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Imp:
    left: "ModalFormula"
    right: "ModalFormula"


@dataclass(frozen=True)
class Dia:
    sub: "ModalFormula"


@dataclass(frozen=True)
class Box:
    sub: "ModalFormula"


ModalFormula = Prop | Falsum | Not | And | Or | Imp | Dia | Box

TOP: ModalFormula = Not(Falsum())


def letters(phi: ModalFormula) -> frozenset[str]:
    if isinstance(phi, Prop):
        return frozenset([phi.name])
    if isinstance(phi, Falsum):
        return frozenset()
    if isinstance(phi, (Not, Dia, Box)):
        return letters(phi.sub)
    return letters(phi.left) | letters(phi.right)


def modal_depth(phi: ModalFormula) -> int:
    """Nesting depth of <> and []."""
    if isinstance(phi, (Prop, Falsum)):
        return 0
    if isinstance(phi, Not):
        return modal_depth(phi.sub)
    if isinstance(phi, (Dia, Box)):
        return 1 + modal_depth(phi.sub)
    return max(modal_depth(phi.left), modal_depth(phi.right))


def format_modal(phi: ModalFormula) -> str:
    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, Falsum):
        return "(p0 & ~p0)"  # falsum has no surface token in the grammar
    if isinstance(phi, Not):
        return f"~{format_modal(phi.sub)}"
    if isinstance(phi, Dia):
        return f"<>{format_modal(phi.sub)}"
    if isinstance(phi, Box):
        return f"[]{format_modal(phi.sub)}"
    op = {And: "&", Or: "|", Imp: "->"}[type(phi)]
    return f"({format_modal(phi.left)} {op} {format_modal(phi.right)})"


# ---------------------------------------------------------------------------
# Parser: unary (~, <>, []) > & > | > ->, with -> right-associative.

_MODAL_TOKEN = re.compile(r"\s*(p\d+|->|<>|\[\]|[~&|()])")


def _tokenize_modal(text: str) -> list[tuple[str, int]]:
    toks, pos = [], 0
    while pos < len(text):
        m = _MODAL_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise InputError(f"modal syntax error at position {pos}: {text[pos:pos+10]!r}")
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


class _ModalParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize_modal(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        if self.i < len(self.toks):
            tok, pos = self.toks[self.i]
            raise InputError(f"modal syntax error at position {pos}: expected {expected}, got {tok!r}")
        raise InputError(f"modal syntax error at end of input: expected {expected}")

    def parse(self) -> ModalFormula:
        phi = self.imp()
        if self.i < len(self.toks):
            self.fail("end of input")
        return phi

    def imp(self) -> ModalFormula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self) -> ModalFormula:
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> ModalFormula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> ModalFormula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "<>":
            self.take()
            return Dia(self.unary())
        if tok == "[]":
            self.take()
            return Box(self.unary())
        if tok == "(":
            self.take()
            phi = self.imp()
            if self.peek() != ")":
                self.fail("')'")
            self.take()
            return phi
        if tok is not None and tok.startswith("p"):
            self.take()
            return Prop(tok)
        self.fail("a formula")


def parse_modal(text: str) -> ModalFormula:
    """Parse the modal surface grammar: p0..., ~, &, |, ->, <>, [], parens."""
    return _ModalParser(text).parse()


# ---------------------------------------------------------------------------
# Models and truth


@dataclass(frozen=True)
class Model:
    frame: Frame
    valuation: tuple[tuple[str, frozenset[str]], ...]

    @staticmethod
    def make(frame: Frame, valuation: dict[str, frozenset[str]]) -> "Model":
        items = []
        for p in sorted(valuation):
            items.append((p, frame.check_vertices(valuation[p])))
        return Model(frame, tuple(items))

    @cached_property
    def val(self) -> dict[str, frozenset[str]]:
        return dict(self.valuation)

    def holds(self, p: str, w: str) -> bool:
        return w in self.val.get(p, frozenset())


def eval_modal(model: Model, w: str, phi: ModalFormula) -> bool:
    """Standard recursive truth at a world."""
    model.frame.check_vertices([w])
    return _eval(model, w, phi)


def _eval(model: Model, w: str, phi: ModalFormula) -> bool:
    if isinstance(phi, Prop):
        return model.holds(phi.name, w)
    if isinstance(phi, Falsum):
        return False
    if isinstance(phi, Not):
        return not _eval(model, w, phi.sub)
    if isinstance(phi, And):
        return _eval(model, w, phi.left) and _eval(model, w, phi.right)
    if isinstance(phi, Or):
        return _eval(model, w, phi.left) or _eval(model, w, phi.right)
    if isinstance(phi, Imp):
        return (not _eval(model, w, phi.left)) or _eval(model, w, phi.right)
    if isinstance(phi, Dia):
        return any(_eval(model, v, phi.sub) for v in model.frame.succ[w])
    if isinstance(phi, Box):
        return not _eval(model, w, Dia(Not(phi.sub)))
    raise InputError(f"unknown formula node {phi!r}")


def truth_set(model: Model, phi: ModalFormula) -> frozenset[str]:
    return frozenset(w for w in model.frame.vertices if _eval(model, w, phi))


def frame_valid(frame: Frame, phi: ModalFormula) -> tuple[bool, tuple["Model", str] | None]:
    """Whether phi holds at every world under every valuation of its letters.

    Returns (valid, counterexample), the counterexample being a refuting
    (model, world) pair or None.
    """
    ls = sorted(letters(phi))
    n = len(frame.vertices)
    limit = int(os.environ.get(VALUATION_LIMIT_ENV, DEFAULT_VALUATION_LIMIT))
    total = 2 ** (len(ls) * n)
    if total > limit:
        raise ResourceError(
            f"frame_valid would enumerate {total} valuations, over the cap {limit} "
            f"(set {VALUATION_LIMIT_ENV} to raise)"
        )
    verts = frame.vertices
    for mask in range(total):
        val = {}
        for j, p in enumerate(ls):
            bits = (mask >> (j * n)) & ((1 << n) - 1)
            val[p] = frozenset(verts[i] for i in range(n) if bits & (1 << i))
        model = Model.make(frame, val)
        for w in verts:
            if not _eval(model, w, phi):
                return False, (model, w)
    return True, None


# ---------------------------------------------------------------------------
# Ultrafilter-extension models


@dataclass(frozen=True)
class UEModel:
    """A model over an ultrafilter extension; V^ue(p) = {u : V(p) in u} is derived."""

    ue_frame: UEFrame
    base_model: Model

    @cached_property
    def model(self) -> Model:
        val = {
            p: frozenset(f"pi:{w}" for w in xs)
            for p, xs in self.base_model.valuation
        }
        return Model.make(self.ue_frame.frame, val)


def extend_model(model: Model) -> UEModel:
    return UEModel(build_ue(model.frame), model)


def truth_membership_check(ue_model: UEModel, phi: ModalFormula) -> bool:
    """Truth at u on the extension iff the base truth set belongs to u.

    A false return is a defect detector, not an expected outcome.
    """
    base_truth = truth_set(ue_model.base_model, phi)
    for u in ue_model.ue_frame.ultrafilters:
        if _eval(ue_model.model, u.name, phi) != u.member(base_truth):
            return False
    return True


# ---------------------------------------------------------------------------
# n-bisimulation and bounded modal equivalence

GAME_LIMIT_ENV = "UEXT_GAME_LIMIT"
DEFAULT_GAME_LIMIT = 2**20


def _game_letters(m1: Model, m2: Model) -> frozenset[str]:
    return frozenset(m1.val) | frozenset(m2.val)


def n_bisimilar(m1: Model, w1: str, m2: Model, w2: str, n: int) -> bool:
    """Exact n-round back-and-forth between two pointed models."""
    if n < 0:
        raise InputError("n must be nonnegative")
    ls = _game_letters(m1, m2)
    memo: dict = {}
    return _bisim(m1, w1, m2, w2, n, ls, memo)


def _bisim(m1, w1, m2, w2, k, ls, memo) -> bool:
    key = (w1, w2, k)
    if key in memo:
        return memo[key]
    limit = int(os.environ.get(GAME_LIMIT_ENV, DEFAULT_GAME_LIMIT))
    if len(memo) > limit:
        raise ResourceError(f"bisimulation memo exceeded cap {limit} (set {GAME_LIMIT_ENV})")
    memo[key] = True  # harmless placeholder; the game is bounded so no real cycles
    ok = all(m1.holds(p, w1) == m2.holds(p, w2) for p in ls)
    if ok and k > 0:
        ok = all(
            any(_bisim(m1, v1, m2, v2, k - 1, ls, memo) for v2 in m2.frame.succ[w2])
            for v1 in m1.frame.succ[w1]
        ) and all(
            any(_bisim(m1, v1, m2, v2, k - 1, ls, memo) for v1 in m1.frame.succ[w1])
            for v2 in m2.frame.succ[w2]
        )
    memo[key] = ok
    return ok


def distinguishing_formula(m1: Model, w1: str, m2: Model, w2: str, n: int, ls) -> ModalFormula | None:
    """A formula of depth <= n true at (m1, w1) and false at (m2, w2), if one exists."""
    ls = sorted(ls)
    for p in ls:
        if m1.holds(p, w1) and not m2.holds(p, w2):
            return Prop(p)
        if m2.holds(p, w2) and not m1.holds(p, w1):
            return Not(Prop(p))
    if n == 0:
        return None
    memo: dict = {}
    lsf = frozenset(ls)
    # forth failure: some successor of w1 that no successor of w2 matches
    for v1 in m1.frame.sort(m1.frame.succ[w1]):
        if not any(_bisim(m1, v1, m2, v2, n - 1, lsf, memo) for v2 in m2.frame.succ[w2]):
            parts = []
            for v2 in m2.frame.sort(m2.frame.succ[w2]):
                d = distinguishing_formula(m1, v1, m2, v2, n - 1, ls)
                if d is not None and d not in parts:
                    parts.append(d)
            return Dia(_conj(parts))
    # back failure, mirrored: negate the distinguisher built from m2's side
    for v2 in m2.frame.sort(m2.frame.succ[w2]):
        if not any(_bisim(m1, v1, m2, v2, n - 1, lsf, memo) for v1 in m1.frame.succ[w1]):
            parts = []
            for v1 in m1.frame.sort(m1.frame.succ[w1]):
                d = distinguishing_formula(m2, v2, m1, v1, n - 1, ls)
                if d is not None and d not in parts:
                    parts.append(d)
            return Not(Dia(_conj(parts)))
    return None


def _conj(parts: list[ModalFormula]) -> ModalFormula:
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def modally_equivalent_upto(
    m1: Model, w1: str, m2: Model, w2: str, n: int, ls
) -> tuple[bool, ModalFormula | None]:
    """Agreement on all formulas of depth <= n over the given letters.

    For finite (hence image-finite) models this coincides with n-bisimilarity
    by the Hennessy-Milner property, so the verdict is the exact game fixpoint;
    a distinguishing witness formula is synthesized from the failing round.
    """
    lsf = frozenset(ls)
    memo: dict = {}
    if _bisim(m1, w1, m2, w2, n, lsf, memo):
        return True, None
    witness = distinguishing_formula(m1, w1, m2, w2, n, lsf)
    if witness is None:
        witness = distinguishing_formula(m2, w2, m1, w1, n, lsf)
        witness = Not(witness) if witness is not None else None
    return False, witness
