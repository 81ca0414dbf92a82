"""First-order language with equality and one binary relation over finite frames.

Covers Tarskian evaluation, the k-round Ehrenfeucht-Fraisse game (exact, with
spoiler-line and distinguishing-sentence extraction), a bounded sentence
enumerator used as a cross-check oracle, the Los-Lemma-like check on finite
ultrafilter extensions, and literal ultraproducts over finite index sets.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass

from .errors import DefectError, InputError, ResourceError
from .frame import Frame
from .ultra import Ultrafilter, build_ue

EF_MEMO_LIMIT_ENV = "UEXT_EF_MEMO_LIMIT"
DEFAULT_EF_MEMO_LIMIT = 2**22


# ---------------------------------------------------------------------------
# Formula AST


@dataclass(frozen=True)
class Rel:
    left: str
    right: str


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Neg:
    sub: "FOFormula"


@dataclass(frozen=True)
class Conj:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class Disj:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class Impl:
    left: "FOFormula"
    right: "FOFormula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "FOFormula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "FOFormula"


FOFormula = Rel | Eq | Neg | Conj | Disj | Impl | Exists | Forall


def free_vars(phi: FOFormula) -> frozenset[str]:
    if isinstance(phi, (Rel, Eq)):
        return frozenset([phi.left, phi.right])
    if isinstance(phi, Neg):
        return free_vars(phi.sub)
    if isinstance(phi, (Conj, Disj, Impl)):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}


def quantifier_rank(phi: FOFormula) -> int:
    if isinstance(phi, (Rel, Eq)):
        return 0
    if isinstance(phi, Neg):
        return quantifier_rank(phi.sub)
    if isinstance(phi, (Conj, Disj, Impl)):
        return max(quantifier_rank(phi.left), quantifier_rank(phi.right))
    return 1 + quantifier_rank(phi.body)


def format_fo(phi: FOFormula) -> str:
    if isinstance(phi, Rel):
        return f"R({phi.left},{phi.right})"
    if isinstance(phi, Eq):
        return f"{phi.left}={phi.right}"
    if isinstance(phi, Neg):
        return f"~{_atomish(phi.sub)}"
    if isinstance(phi, Exists):
        return f"exists {phi.var}. {format_fo(phi.body)}"
    if isinstance(phi, Forall):
        return f"forall {phi.var}. {format_fo(phi.body)}"
    op = {Conj: "&", Disj: "|", Impl: "->"}[type(phi)]
    return f"({format_fo(phi.left)} {op} {format_fo(phi.right)})"


def _atomish(phi: FOFormula) -> str:
    s = format_fo(phi)
    return s if isinstance(phi, (Rel, Eq, Neg)) or s.startswith("(") else f"({s})"


# ---------------------------------------------------------------------------
# Parser: quantifier scope extends maximally right; ~ > & > | > ->.

_FO_TOKEN = re.compile(r"\s*(exists\b|forall\b|->|[~&|()=,.]|R\b|[A-Za-z_]\w*)")


class _FOParser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _FO_TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip() == "":
                    break
                raise InputError(f"FO syntax error at position {pos}: {text[pos:pos+10]!r}")
            self.toks.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok[0]

    def expect(self, tok: str):
        if self.peek() != tok:
            self.fail(repr(tok))
        return self.take()

    def fail(self, expected: str):
        if self.i < len(self.toks):
            t, pos = self.toks[self.i]
            raise InputError(f"FO syntax error at position {pos}: expected {expected}, got {t!r}")
        raise InputError(f"FO syntax error at end of input: expected {expected}")

    def variable(self) -> str:
        tok = self.peek()
        if tok is None or not re.fullmatch(r"[A-Za-z_]\w*", tok) or tok in ("exists", "forall", "R"):
            self.fail("a variable name")
        return self.take()

    def parse(self) -> FOFormula:
        phi = self.expr()
        if self.i < len(self.toks):
            self.fail("end of input")
        return phi

    def expr(self) -> FOFormula:
        # quantifiers sit at the lowest precedence: their scope runs maximally right
        if self.peek() in ("exists", "forall"):
            kind = self.take()
            var = self.variable()
            self.expect(".")
            body = self.expr()
            return Exists(var, body) if kind == "exists" else Forall(var, body)
        return self.imp()

    def imp(self) -> FOFormula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Impl(left, self.imp())
        return left

    def disj(self) -> FOFormula:
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Disj(left, self.conj())
        return left

    def conj(self) -> FOFormula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = Conj(left, self.unary())
        return left

    def unary(self) -> FOFormula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Neg(self.unary())
        if tok in ("exists", "forall"):
            return self.expr()
        if tok == "(":
            self.take()
            phi = self.expr()
            self.expect(")")
            return phi
        if tok == "R":
            self.take()
            self.expect("(")
            a = self.variable()
            self.expect(",")
            b = self.variable()
            self.expect(")")
            return Rel(a, b)
        a = self.variable()
        self.expect("=")
        b = self.variable()
        return Eq(a, b)


def parse_fo(text: str) -> FOFormula:
    """Parse R(x,y), x=y, ~, &, |, ->, exists x., forall x. with maximal scopes."""
    return _FOParser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation


def eval_fo(frame: Frame, phi: FOFormula, asg: dict[str, str] | None = None) -> bool:
    """Tarskian truth by exhaustive quantification over the finite vertex set."""
    asg = dict(asg or {})
    missing = free_vars(phi) - set(asg)
    if missing:
        raise InputError(f"unbound free variable {min(missing)!r}")
    for v in asg.values():
        frame.check_vertices([v])
    return _eval_fo(frame, phi, asg)


def _eval_fo(frame: Frame, phi: FOFormula, asg: dict[str, str]) -> bool:
    if isinstance(phi, Rel):
        return frame.has_edge(asg[phi.left], asg[phi.right])
    if isinstance(phi, Eq):
        return asg[phi.left] == asg[phi.right]
    if isinstance(phi, Neg):
        return not _eval_fo(frame, phi.sub, asg)
    if isinstance(phi, Conj):
        return _eval_fo(frame, phi.left, asg) and _eval_fo(frame, phi.right, asg)
    if isinstance(phi, Disj):
        return _eval_fo(frame, phi.left, asg) or _eval_fo(frame, phi.right, asg)
    if isinstance(phi, Impl):
        return (not _eval_fo(frame, phi.left, asg)) or _eval_fo(frame, phi.right, asg)
    if isinstance(phi, Exists):
        return any(_eval_fo(frame, phi.body, {**asg, phi.var: w}) for w in frame.vertices)
    if isinstance(phi, Forall):
        return all(_eval_fo(frame, phi.body, {**asg, phi.var: w}) for w in frame.vertices)
    raise InputError(f"unknown formula node {phi!r}")


# ---------------------------------------------------------------------------
# Ehrenfeucht-Fraisse games

Pairing = frozenset[tuple[str, str]]


def _partial_iso(f1: Frame, f2: Frame, pairs: Pairing) -> bool:
    for a, b in pairs:
        for a2, b2 in pairs:
            if (a == a2) != (b == b2):
                return False
            if f1.has_edge(a, a2) != f2.has_edge(b, b2):
                return False
    return True


class _EFGame:
    def __init__(self, f1: Frame, f2: Frame):
        self.f1 = f1
        self.f2 = f2
        self.memo: dict[tuple[int, Pairing], bool] = {}
        self.limit = int(os.environ.get(EF_MEMO_LIMIT_ENV, DEFAULT_EF_MEMO_LIMIT))

    def duplicator_wins(self, pairs: Pairing, k: int) -> bool:
        if not _partial_iso(self.f1, self.f2, pairs):
            return False
        if k == 0:
            return True
        key = (k, pairs)
        if key in self.memo:
            return self.memo[key]
        if len(self.memo) > self.limit:
            raise ResourceError(
                f"EF memo table exceeded cap {self.limit} (set {EF_MEMO_LIMIT_ENV})"
            )
        win = all(
            any(self.duplicator_wins(pairs | {(a, b)}, k - 1) for b in self.f2.vertices)
            for a in self.f1.vertices
        ) and all(
            any(self.duplicator_wins(pairs | {(a, b)}, k - 1) for a in self.f1.vertices)
            for b in self.f2.vertices
        )
        self.memo[key] = win
        return win


def ef_equivalent(f1: Frame, f2: Frame, rounds: int) -> bool:
    """True iff Duplicator wins the k-round EF game between the two frames."""
    if rounds < 0:
        raise InputError("rounds must be nonnegative")
    return _EFGame(f1, f2).duplicator_wins(frozenset(), rounds)


def ef_min_rounds(f1: Frame, f2: Frame, max_rounds: int) -> int | None:
    """Smallest k <= max_rounds at which Spoiler wins, or None."""
    for k in range(max_rounds + 1):
        if not ef_equivalent(f1, f2, k):
            return k
    return None


def spoiler_line(f1: Frame, f2: Frame, rounds: int) -> list[str]:
    """One optimal Spoiler line (with Duplicator's replies) when Spoiler wins."""
    game = _EFGame(f1, f2)
    if game.duplicator_wins(frozenset(), rounds):
        return []
    line: list[str] = []
    pairs: Pairing = frozenset()
    k = rounds
    while k > 0 and _partial_iso(f1, f2, pairs):
        move = None
        for side, frame in (("1", f1), ("2", f2)):
            for elem in frame.vertices:
                if side == "1":
                    responses = [b for b in f2.vertices if game.duplicator_wins(pairs | {(elem, b)}, k - 1)]
                else:
                    responses = [a for a in f1.vertices if game.duplicator_wins(pairs | {(a, elem)}, k - 1)]
                if not responses:
                    move = (side, elem)
                    break
            if move:
                break
        if move is None:
            raise DefectError("spoiler_line: no winning spoiler move at a losing position")
        side, elem = move
        line.append(f"S:{side}:{elem}")

        # Duplicator is lost whatever it answers, but report its most
        # stubborn reply: the one that stays alive for the most rounds.
        def survival(p: Pairing) -> int:
            for j in range(k - 1, -1, -1):
                if game.duplicator_wins(p, j):
                    return j
            return -1

        if side == "1":
            replies = f2.vertices
            mk = lambda b: pairs | {(elem, b)}
            reply_side = "2"
        else:
            replies = f1.vertices
            mk = lambda a: pairs | {(a, elem)}
            reply_side = "1"
        if not replies:
            return line
        reply = max(replies, key=lambda c: survival(mk(c)))
        pairs = mk(reply)
        line.append(f"D:{reply_side}:{reply}")
        k -= 1
    return line


def distinguishing_sentence(f1: Frame, f2: Frame, rounds: int) -> FOFormula | None:
    """A sentence of rank <= rounds true in f1 and false in f2, from the game tree."""
    game = _EFGame(f1, f2)
    if game.duplicator_wins(frozenset(), rounds):
        return None
    return _distinguish(game, (), (), rounds)


def _literal_distinguisher(f1, f2, ta, tb, names) -> FOFormula:
    for i in range(len(ta)):
        for j in range(len(ta)):
            if (ta[i] == ta[j]) and not (tb[i] == tb[j]):
                return Eq(names[i], names[j])
            if (tb[i] == tb[j]) and not (ta[i] == ta[j]):
                return Neg(Eq(names[i], names[j]))
            if f1.has_edge(ta[i], ta[j]) and not f2.has_edge(tb[i], tb[j]):
                return Rel(names[i], names[j])
            if f2.has_edge(tb[i], tb[j]) and not f1.has_edge(ta[i], ta[j]):
                return Neg(Rel(names[i], names[j]))
    raise DefectError("no distinguishing literal at a non-isomorphic position")


def _distinguish(game: _EFGame, ta: tuple, tb: tuple, k: int) -> FOFormula:
    f1, f2 = game.f1, game.f2
    names = [f"x{i}" for i in range(len(ta) + 1)]
    if not _partial_iso(f1, f2, frozenset(zip(ta, tb))):
        return _literal_distinguisher(f1, f2, ta, tb, names)
    if k == 0:
        raise DefectError("distinguishing sentence requested at a duplicator-won position")
    var = f"x{len(ta)}"
    # a spoiler move in f1 yields an existential; in f2 a universal
    for a in f1.vertices:
        if not any(game.duplicator_wins(frozenset(zip(ta + (a,), tb + (b,))), k - 1) for b in f2.vertices):
            parts: list[FOFormula] = []
            for b in f2.vertices:
                d = _distinguish(game, ta + (a,), tb + (b,), k - 1)
                if d not in parts:
                    parts.append(d)
            return Exists(var, _fold(Conj, parts, Eq(var, var)))
    for b in f2.vertices:
        if not any(game.duplicator_wins(frozenset(zip(ta + (a,), tb + (b,))), k - 1) for a in f1.vertices):
            parts = []
            for a in f1.vertices:
                d = _distinguish(game, ta + (a,), tb + (b,), k - 1)
                if d not in parts:
                    parts.append(d)
            return Forall(var, _fold(Disj, parts, Neg(Eq(var, var))))
    raise DefectError("no winning spoiler move at a spoiler-won position")


def _fold(op, parts: list[FOFormula], empty: FOFormula) -> FOFormula:
    if not parts:
        return empty
    out = parts[0]
    for p in parts[1:]:
        out = op(out, p)
    return out


# ---------------------------------------------------------------------------
# Bounded sentence enumeration (fixed normal form, reproducible oracle)


def sentences_upto(max_rank: int, limit: int = 4000) -> list[FOFormula]:
    """Closed formulas of quantifier rank <= max_rank in a fixed normal form.

    Negation-normal form over a pool of max_rank variable names, built from
    literals, binary conjunction/disjunction, and one quantifier per rank
    level.  The hard count cap keeps the oracle reproducible.
    """
    pool = [f"x{i}" for i in range(max_rank)]

    def formulas(rank: int, depth: int) -> list[FOFormula]:
        avail = pool[:depth]
        lits: list[FOFormula] = []
        for a in avail:
            for b in avail:
                lits.append(Rel(a, b))
                lits.append(Neg(Rel(a, b)))
                if a != b:
                    lits.append(Eq(a, b))
                    lits.append(Neg(Eq(a, b)))
        if rank == 0:
            return lits[:limit]
        inner = formulas(rank - 1, depth + 1)
        var = pool[depth]
        out: list[FOFormula] = list(lits)
        for body in inner:
            out.append(Exists(var, body))
            out.append(Forall(var, body))
            if len(out) >= limit:
                return out[:limit]
        combos = [f for f in out if not isinstance(f, (Rel, Eq, Neg))]
        for f, g in itertools.combinations(combos[:40], 2):
            out.append(Conj(f, g))
            out.append(Disj(f, g))
            if len(out) >= limit:
                break
        return out[:limit]

    return [phi for phi in formulas(max_rank, 0) if not free_vars(phi)][:limit]


# ---------------------------------------------------------------------------
# Los-Lemma-like check on finite ultrafilter extensions


def los_like_check(frame: Frame, phi: FOFormula, u: Ultrafilter) -> tuple[bool, bool, bool]:
    """Truth of phi(u) on the extension iff {w : phi holds at eta(w)} belongs to u.

    phi must have exactly one free variable.  Returns (agree, extension side,
    membership side).  On finite frames disagreement is a defect (eta is an
    isomorphism).
    """
    fv = sorted(free_vars(phi))
    if len(fv) != 1:
        raise InputError(f"los_like_check needs exactly one free variable, got {fv}")
    if u.frame != frame:
        raise InputError("ultrafilter is not over the given frame")
    x = fv[0]
    ue = build_ue(frame).frame
    lhs = eval_fo(ue, phi, {x: f"pi:{u.point}"})
    truth = frozenset(w for w in frame.vertices if eval_fo(ue, phi, {x: f"pi:{w}"}))
    rhs = u.member(truth)
    return lhs == rhs, lhs, rhs


# ---------------------------------------------------------------------------
# Ultraproducts over finite index sets


@dataclass(frozen=True)
class Ultraproduct:
    """A literal finite-index ultraproduct: functions on the index set modulo d."""

    frame: Frame
    factors: tuple[Frame, ...]
    principal_index: int
    representatives: tuple[tuple[str, ...], ...]  # class id order matches frame.vertices

    def class_of(self, func: tuple[str, ...]) -> str:
        """Class id of a choice function (its value at the principal index)."""
        if len(func) != len(self.factors):
            raise InputError("choice function has wrong arity")
        for i, w in enumerate(func):
            self.factors[i].check_vertices([w])
        return func[self.principal_index]

    def diagonal(self, w: str) -> str:
        """Class of the constant function at w (requires w in every factor)."""
        return self.class_of(tuple(w for _ in self.factors))


def index_ultrafilter(size: int, point: int) -> Ultrafilter:
    """A principal ultrafilter over the index set {0..size-1}."""
    idx = Frame(tuple(str(i) for i in range(size)), frozenset())
    return Ultrafilter(idx, str(point))


def ultraproduct(structures: list[Frame], d: Ultrafilter) -> Ultraproduct:
    """Quotient construction performed literally over a finite index set.

    Elements are choice functions; f ~ g iff {i : f(i) = g(i)} in d; the edge
    relation holds on classes iff the agreement set of R is in d.  The class
    representative is the function value at the principal index.
    """
    if not structures:
        raise InputError("ultraproduct of an empty family")
    if len(d.frame.vertices) != len(structures):
        raise InputError("index ultrafilter size does not match the number of factors")
    indices = list(range(len(structures)))
    i0 = int(d.point)

    classes: dict[str, list[tuple[str, ...]]] = {}
    for func in itertools.product(*(s.vertices for s in structures)):
        classes.setdefault(func[i0], []).append(func)

    # class order follows the principal factor's vertex order
    order = [w for w in structures[i0].vertices if w in classes]
    reps = tuple(classes[w][0] for w in order)

    def d_large(pred) -> bool:
        return d.member(frozenset(str(i) for i in indices if pred(i)))

    edges = set()
    for fa in reps:
        for fb in reps:
            if d_large(lambda i: structures[i].has_edge(fa[i], fb[i])):
                edges.add((fa[i0], fb[i0]))
    return Ultraproduct(Frame(tuple(order), frozenset(edges)), tuple(structures), i0, reps)
