"""Semiconstrained systems as rational polytopes inside P(Sigma^k).

A :class:`ConstraintSet` is an intersection of half-spaces and hyperplanes
with the probability simplex (optionally also with the shift-invariant
subspace).  This module owns membership, shrinking/expanding, the forbidden
set and the (relative) fatness tests; all decisions are taken with exact
rational LPs.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

from .errors import DimensionError, LengthError
from .lp import linprog_exact
from .measure import Measure, to_fraction
from .words import Alphabet, Word, kmer_frequency, pattern_counts, pattern_index

LE, LT, EQ = "<=", "<", "="
RELATIONS = (LE, LT, EQ)


@dataclass(frozen=True)
class LinearConstraint:
    """``sum_phi coefficients[phi] * mu(phi)  relation  bound``."""

    coefficients: tuple[Fraction, ...]
    relation: str
    bound: Fraction

    def __post_init__(self):
        coeffs = tuple(to_fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "bound", to_fraction(self.bound))
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        if not any(coeffs):
            raise ValueError("a constraint needs at least one nonzero coefficient")

    @property
    def strict(self) -> bool:
        return self.relation == LT

    @cached_property
    def l1(self) -> Fraction:
        return sum((abs(c) for c in self.coefficients), Fraction(0))

    @cached_property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coefficients) if c)

    def evaluate(self, values: Sequence) -> Fraction:
        return sum((self.coefficients[i] * values[i] for i in self.support), Fraction(0))

    def compare(self, lhs, rhs) -> bool:
        if self.relation == LE:
            return lhs <= rhs
        if self.relation == LT:
            return lhs < rhs
        return lhs == rhs

    def satisfied_by_counts(self, counts: Sequence[int], windows: int) -> bool:
        """Exact test of ``a . (counts / windows) rel b`` without dividing."""
        lhs = sum((self.coefficients[i] * counts[i] for i in self.support), Fraction(0))
        return self.compare(lhs, self.bound * windows)

    def upper_forms(self) -> list[tuple[tuple[Fraction, ...], Fraction, bool]]:
        """The constraint as one or two rows ``a.x <= b`` (strict flag)."""
        if self.relation == EQ:
            neg = tuple(-c for c in self.coefficients)
            return [(self.coefficients, self.bound, False), (neg, -self.bound, False)]
        return [(self.coefficients, self.bound, self.strict)]

    def describe(self, alphabet: Alphabet, k: int) -> str:
        from .words import pattern_from_index

        terms = []
        for i in self.support:
            c = self.coefficients[i]
            name = alphabet.format(pattern_from_index(i, alphabet.size, k))
            if not alphabet.single_char:
                name = f"[{name}]"
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = name if mag == 1 else f"{mag}*{name}"
            terms.append((sign, body))
        text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return f"{text} {self.relation} {self.bound}"


@dataclass(frozen=True)
class ConstraintSet:
    """The set Gamma.  ``shift_invariant`` intersects it with P_si."""

    alphabet: Alphabet
    k: int
    constraints: tuple[LinearConstraint, ...] = ()
    shift_invariant: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        size = self.alphabet.size**self.k
        for c in self.constraints:
            if len(c.coefficients) != size:
                raise DimensionError(
                    f"constraint has {len(c.coefficients)} coefficients, expected {size}"
                )

    @classmethod
    def simplex(cls, alphabet: Alphabet, k: int, shift_invariant: bool = False) -> ConstraintSet:
        return cls(alphabet, k, (), shift_invariant)

    @property
    def size(self) -> int:
        return self.alphabet.size**self.k

    @property
    def closed(self) -> bool:
        return not any(c.strict for c in self.constraints)

    convex = True  # intersections of half-spaces always are

    def constraint(self, terms: Mapping | str, relation: str, bound) -> LinearConstraint:
        """Build a constraint from ``{pattern: coefficient}`` (or one pattern)."""
        if isinstance(terms, (str, tuple)):
            terms = {terms: 1}
        coeffs = [Fraction(0)] * self.size
        for pattern, coef in terms.items():
            if isinstance(pattern, str):
                pattern = self.alphabet.parse(pattern)
            if len(pattern) != self.k:
                raise DimensionError(f"pattern {pattern!r} does not have length {self.k}")
            coeffs[pattern_index(pattern, self.alphabet.size)] += to_fraction(coef)
        return LinearConstraint(tuple(coeffs), relation, to_fraction(bound))

    def add(self, terms, relation: str, bound) -> ConstraintSet:
        return replace(self, constraints=self.constraints + (self.constraint(terms, relation, bound),))

    @cached_property
    def relevant_patterns(self) -> tuple[int, ...]:
        """Patterns whose counts influence membership."""
        return tuple(sorted({i for c in self.constraints for i in c.support}))

    def shift_rows(self) -> list[tuple[Fraction, ...]]:
        """Rows r with r.eta = 0 iff eta is shift invariant."""
        sigma, k = self.alphabet.size, self.k
        ctx = sigma ** (k - 1)
        rows = []
        for phi in range(ctx):
            row = [Fraction(0)] * self.size
            for a in range(sigma):
                row[a * ctx + phi] += 1      # a phi
                row[phi * sigma + a] -= 1    # phi a
            if any(row):
                rows.append(tuple(row))
        return rows

    def check_measure(self, mu: Measure) -> None:
        if mu.k != self.k or mu.alphabet.size != self.alphabet.size:
            raise DimensionError(
                f"measure on Sigma^{mu.k} (|Sigma|={mu.alphabet.size}) vs constraint set on "
                f"Sigma^{self.k} (|Sigma|={self.alphabet.size})"
            )

    def describe(self) -> str:
        lines = [f"alphabet: {' '.join(self.alphabet.symbols)}", f"k: {self.k}"]
        if self.shift_invariant:
            lines.append("shift_invariant: true")
        lines += [f"constraint: {c.describe(self.alphabet, self.k)}" for c in self.constraints]
        return "\n".join(lines)


def upper_bound_system(alphabet: Alphabet, k: int, bounds: Mapping, relation: str = LE,
                       shift_invariant: bool = False) -> ConstraintSet:
    """Gamma = {mu : mu(phi) rel c_phi} for the given ``{phi: c_phi}``."""
    gamma = ConstraintSet.simplex(alphabet, k, shift_invariant)
    for pattern, bound in bounds.items():
        gamma = gamma.add(pattern, relation, bound)
    return gamma


@dataclass(frozen=True)
class ToleranceFn:
    """A tolerance xi(n) with xi = o(1) and xi = Omega(1/n).

    Families: ``constant`` (c) -- only for experiments, it is not o(1);
    ``inverse`` (c): c/n; ``window`` (k, m): (2m-2)(m-k)/(n-k+1).
    """

    family: str
    params: tuple = field(default=())

    def __call__(self, n: int) -> Fraction:
        if self.family == "constant":
            return to_fraction(self.params[0])
        if self.family == "inverse":
            return to_fraction(self.params[0]) / n
        if self.family == "window":
            k, m = self.params
            return tolerance_S(k, m, n)
        raise ValueError(f"unknown tolerance family {self.family!r}")

    @classmethod
    def window(cls, k: int, m: int) -> ToleranceFn:
        return cls("window", (k, m))

    @classmethod
    def constant(cls, c) -> ToleranceFn:
        return cls("constant", (to_fraction(c),))


def tolerance_S(k: int, m: int, n: int) -> Fraction:
    """(2m-2)(m-k)/(n-k+1): window-averaging error for length-n words."""
    if n < k:
        raise LengthError("n must be at least k")
    return Fraction((2 * m - 2) * (m - k), n - k + 1)


# --- membership --------------------------------------------------------------

def contains(gamma: ConstraintSet, mu: Measure) -> bool:
    gamma.check_measure(mu)
    if gamma.shift_invariant and not mu.is_shift_invariant():
        return False
    return all(c.compare(c.evaluate(mu.values), c.bound) for c in gamma.constraints)


def counts_admissible(gamma: ConstraintSet, counts: Sequence[int], windows: int) -> bool:
    return all(c.satisfied_by_counts(counts, windows) for c in gamma.constraints)


def is_admissible(gamma: ConstraintSet, word: Sequence[int]) -> bool:
    k = gamma.k
    if len(word) < k:
        raise LengthError(f"word of length {len(word)} is shorter than k={k}")
    if gamma.shift_invariant and tuple(word[: k - 1]) != tuple(word[len(word) - k + 1 :]):
        return False  # only words with equal (k-1)-prefix and suffix are shift invariant
    counts = pattern_counts(word, gamma.alphabet.size, k)
    return counts_admissible(gamma, counts, len(word) - k + 1)


def is_weakly_admissible(gamma: ConstraintSet, word: Sequence[int], xi: ToleranceFn) -> bool:
    relaxed = expand(gamma, xi(len(word)))
    return contains(relaxed, kmer_frequency(word, gamma.k, gamma.alphabet))


def enumerate_admissible(gamma: ConstraintSet, n: int) -> list[Word]:
    """B_n(Gamma) in lexicographic order."""
    from .counting import AdmissibleCounter

    return list(AdmissibleCounter(gamma, n).words())


def count_admissible(gamma: ConstraintSet, n: int) -> int:
    from .counting import AdmissibleCounter

    return AdmissibleCounter(gamma, n).count()


# --- shrinking / expanding --------------------------------------------------

def shrink(gamma: ConstraintSet, eps) -> ConstraintSet:
    """Gamma_eps: every inequality a.mu <= b becomes a.mu <= b - eps*|a|_1.

    Hyperplanes (including the shift-invariance ones) and the simplex facets
    are left alone.
    """
    eps = to_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0:
        return gamma
    out = []
    for c in gamma.constraints:
        if c.relation == EQ:
            out.append(c)
        else:
            out.append(replace(c, bound=c.bound - eps * c.l1))
    return replace(gamma, constraints=tuple(out))


def expand(gamma: ConstraintSet, eps) -> ConstraintSet:
    """Gamma^eps, relaxed constraint by constraint; strict relations close."""
    eps = to_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0 and gamma.closed:
        return gamma
    out = []
    rows = [LinearConstraint(c.coefficients, c.relation, c.bound) for c in gamma.constraints]
    if gamma.shift_invariant:
        rows += [LinearConstraint(r, EQ, 0) for r in gamma.shift_rows()]
    for c in rows:
        for a, b, _ in c.upper_forms():
            lc = LinearConstraint(a, LE, b)
            out.append(replace(lc, bound=b + eps * lc.l1))
    return ConstraintSet(gamma.alphabet, gamma.k, tuple(out), False)


# --- LP plumbing --------------------------------------------------------------

@dataclass
class _Region:
    """Linear description of a polytope in eta-space (dimension ``size``)."""

    size: int
    ub: list = field(default_factory=list)    # (row, bound, strict)
    eq: list = field(default_factory=list)    # (row, bound)

    def copy(self) -> _Region:
        return _Region(self.size, list(self.ub), list(self.eq))


def _region(gamma: ConstraintSet, *, shift_invariant: bool, zero: Iterable[int] = (),
            include_gamma: bool = True) -> _Region:
    size = gamma.size
    reg = _Region(size)
    reg.eq.append(((Fraction(1),) * size, Fraction(1)))
    if shift_invariant or gamma.shift_invariant:
        reg.eq += [(r, Fraction(0)) for r in gamma.shift_rows()]
    for z in zero:
        row = [Fraction(0)] * size
        row[z] = Fraction(1)
        reg.eq.append((tuple(row), Fraction(0)))
    if include_gamma:
        for c in gamma.constraints:
            if c.relation == EQ:
                reg.eq.append((c.coefficients, c.bound))
            else:
                reg.ub.append((c.coefficients, c.bound, c.strict))
    return reg


def _optimize(reg: _Region, objective: Sequence, maximize: bool = True):
    return linprog_exact(
        objective,
        [r for r, _, _ in reg.ub], [b for _, b, _ in reg.ub],
        [r for r, _ in reg.eq], [b for _, b in reg.eq],
        maximize=maximize,
    )


def _max_margin(reg: _Region, rows: Sequence[tuple], cap=1):
    """max t s.t. eta in reg (non-strictly) and row.eta + t <= b for ``rows``.

    Returns the LP result; variables are eta followed by t (0 <= t <= cap).
    """
    size = reg.size
    A_ub, b_ub = [], []
    marked = {id(r) for r in rows}
    for item in reg.ub:
        row, b, _ = item
        extra = Fraction(1) if id(item) in marked else Fraction(0)
        A_ub.append(list(row) + [extra])
        b_ub.append(b)
    for item in rows:
        if not any(item is u for u in reg.ub):
            row, b = item[0], item[1]
            A_ub.append(list(row) + [Fraction(1)])
            b_ub.append(b)
    A_ub.append([Fraction(0)] * size + [Fraction(1)])
    b_ub.append(to_fraction(cap))
    A_eq = [list(r) + [Fraction(0)] for r, _ in reg.eq]
    b_eq = [b for _, b in reg.eq]
    c = [Fraction(0)] * size + [Fraction(1)]
    return linprog_exact(c, A_ub, b_ub, A_eq, b_eq, maximize=True)


def is_feasible(gamma: ConstraintSet, *, shift_invariant: bool = False) -> bool:
    """Is Gamma (strict relations honored) non-empty?  Optionally within P_si."""
    reg = _region(gamma, shift_invariant=shift_invariant)
    strict = [u for u in reg.ub if u[2]]
    res = _max_margin(reg, strict)
    if not res.optimal:
        return False
    return not strict or res.value > 0


def feasible_point(gamma: ConstraintSet, *, shift_invariant: bool = False) -> Measure | None:
    """An exact rational point of the closure of Gamma (within P_si if asked)."""
    reg = _region(gamma, shift_invariant=shift_invariant)
    strict = [u for u in reg.ub if u[2]]
    res = _max_margin(reg, strict)
    if not res.optimal:
        return None
    return Measure(gamma.alphabet, gamma.k, tuple(res.x[: gamma.size]))


def pattern_max(gamma: ConstraintSet, pattern: int, *, shift_invariant: bool = False,
                zero: Iterable[int] = ()):
    """max mu(pattern) over the closure of Gamma; None when that is empty."""
    reg = _region(gamma, shift_invariant=shift_invariant, zero=zero)
    obj = [Fraction(0)] * gamma.size
    obj[pattern] = Fraction(1)
    res = _optimize(reg, obj, maximize=True)
    if not res.optimal:
        return None
    return res


def forbidden_set(gamma: ConstraintSet) -> frozenset[int]:
    """F(Gamma): pattern indices phi with mu(phi) = 0 for every mu in Gamma."""
    if not is_feasible(gamma):
        return frozenset(range(gamma.size))
    out = set()
    for phi in range(gamma.size):
        res = pattern_max(gamma, phi)
        if res is None or res.value == 0:
            out.add(phi)
    return frozenset(out)


@dataclass(frozen=True)
class FatnessResult:
    fat: bool
    margin: Fraction | None
    witness: Measure | None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.fat


def _fatness(gamma: ConstraintSet, zero: frozenset[int], vacuous: bool = False) -> FatnessResult:
    base = _region(gamma, shift_invariant=True, zero=zero, include_gamma=False)
    if not _optimize(base, [0] * gamma.size).optimal:
        return FatnessResult(vacuous, None, None, "the ambient face is empty")
    full = _region(gamma, shift_invariant=True, zero=zero)
    strict = [u for u in full.ub if u[2]]
    probe = _max_margin(full, strict)
    if not probe.optimal or (strict and probe.value <= 0):
        # closure of an empty interior equals the closure of the empty set
        return FatnessResult(vacuous, None, None,
                             "vacuous: the region is empty" if vacuous else "the region is empty")
    active = []
    for c in gamma.constraints:
        for a, b, strict in c.upper_forms():
            hi = _optimize(base, a, maximize=True).value
            if c.relation == EQ:
                if hi <= b:
                    continue  # implied direction
                return FatnessResult(
                    False, Fraction(0), None,
                    f"hyperplane {c.describe(gamma.alphabet, gamma.k)} cuts the face",
                )
            if hi < b or (hi == b and not strict):
                continue  # redundant on the face
            active.append((a, b, strict))
    reg = base.copy()
    reg.ub = list(active)
    res = _max_margin(reg, reg.ub)
    if not res.optimal:
        return FatnessResult(False, None, None, "the region is empty")
    witness = Measure(gamma.alphabet, gamma.k, tuple(res.x[: gamma.size]))
    t = res.value
    if t > 0:
        # prefer a witness that is also positive off the pinned coordinates
        inner = reg.copy()
        for phi in range(gamma.size):
            if phi not in zero:
                row = [Fraction(0)] * gamma.size
                row[phi] = Fraction(-1)
                inner.ub.append((tuple(row), Fraction(0), True))
        res2 = _max_margin(inner, inner.ub)
        if res2.optimal and res2.value > 0:
            witness = Measure(gamma.alphabet, gamma.k, tuple(res2.x[: gamma.size]))
        return FatnessResult(True, t, witness)
    return FatnessResult(False, t, witness, "no point with positive slack")


def is_fat(gamma: ConstraintSet) -> FatnessResult:
    """Gamma cap P_si has non-empty interior relative to P_si."""
    return _fatness(gamma, frozenset())


def is_relatively_fat(gamma: ConstraintSet) -> FatnessResult:
    """Fatness inside P_si(D), D = Sigma^k minus the forbidden set.

    Holds vacuously when Gamma cap P_si(D) is empty.
    """
    return _fatness(gamma, forbidden_set(gamma), vacuous=True)


def max_admissible_epsilon(gamma: ConstraintSet, tol=Fraction(1, 2**20)) -> Fraction:
    """Largest eps in [0, 1] (to within ``tol``) keeping shrink(gamma, eps) fat."""
    tol = to_fraction(tol)
    if not is_fat(gamma):
        return Fraction(0)
    lo, hi = Fraction(0), Fraction(1)
    if is_fat(shrink(gamma, hi)):
        return hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if is_fat(shrink(gamma, mid)):
            lo = mid
        else:
            hi = mid
    return lo
