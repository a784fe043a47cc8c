"""Capacity of semiconstrained systems and of graph presentations.

``capacity_scs`` maximizes the conditional entropy of the last symbol of a
k-tuple given the first k-1 over the polytope Gamma cap P_si with an
away-step conditional-gradient method; each linear subproblem is an LP.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.sparse.linalg import eigs

from .constraints import ConstraintSet, feasible_point, is_fat, max_admissible_epsilon, shrink
from .counting import AdmissibleCounter, log2_count
from .graphs import LabeledDigraph, cyclic_components, sparse_adjacency
from .measure import Measure

_FLOOR = 1e-300


@dataclass(frozen=True)
class CapacityResult:
    value: float
    optimizer: Measure | None
    iterations: int
    duality_gap_estimate: float

    @property
    def infeasible(self) -> bool:
        return self.value == -math.inf

    def __float__(self) -> float:
        return self.value


# --- objective ----------------------------------------------------------------

def _context_mass(eta: np.ndarray, sigma: int) -> np.ndarray:
    """p(phi) = sum_a eta(phi a), repeated once per a (aligned with eta)."""
    p = eta.reshape(-1, sigma).sum(axis=1)
    return np.repeat(p, sigma)


def conditional_entropy(eta, sigma: int) -> float:
    """sum_phi p(phi) H(eta(. | phi)), in bits; 0 log 0 = 0."""
    eta = np.asarray(eta, dtype=float)
    p = _context_mass(eta, sigma)
    mask = eta > 0
    return float(np.sum(eta[mask] * np.log2(p[mask] / eta[mask])))


def entropy_gradient(eta, sigma: int) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    p = _context_mass(eta, sigma)
    return np.log2(np.maximum(p, _FLOOR) / np.maximum(eta, _FLOOR))


def relative_entropy_term(eta: Measure) -> float:
    """H(eta | eta') with eta'(phi a) = sum_b eta(phi b) / sigma, in bits."""
    sigma = eta.alphabet.size
    x = np.array(eta.as_floats())
    ref = _context_mass(x, sigma) / sigma
    mask = x > 0
    return float(np.sum(x[mask] * np.log2(x[mask] / ref[mask])))


# --- polytope as float LP data ---------------------------------------------------

def _lp_data(gamma: ConstraintSet):
    size = gamma.size
    A_ub, b_ub, A_eq, b_eq = [], [], [np.ones(size)], [1.0]
    for row in gamma.shift_rows():
        A_eq.append(np.array([float(x) for x in row]))
        b_eq.append(0.0)
    for c in gamma.constraints:
        row = np.array([float(x) for x in c.coefficients])
        if c.relation == "=":
            A_eq.append(row)
            b_eq.append(float(c.bound))
        else:
            A_ub.append(row)
            b_ub.append(float(c.bound))
    return (np.array(A_ub) if A_ub else None, np.array(b_ub) if b_ub else None,
            np.array(A_eq), np.array(b_eq))


class _Oracle:
    def __init__(self, gamma: ConstraintSet):
        self.size = gamma.size
        self.A_ub, self.b_ub, self.A_eq, self.b_eq = _lp_data(gamma)

    def __call__(self, grad: np.ndarray) -> np.ndarray | None:
        res = linprog(-grad, A_ub=self.A_ub, b_ub=self.b_ub, A_eq=self.A_eq, b_eq=self.b_eq,
                      bounds=(0, None), method="highs-ds")
        if res.status != 0:
            return None
        return np.clip(res.x, 0.0, None)


def _line_search(x: np.ndarray, d: np.ndarray, gmax: float, sigma: int) -> float:
    """argmax over [0, gmax] of the concave f(x + g d), by bisection on f'."""

    def slope(g: float) -> float:
        return float(entropy_gradient(x + g * d, sigma) @ d)

    if slope(gmax) >= 0:
        return gmax
    lo, hi = 0.0, gmax
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _rationalize(x: np.ndarray, gamma: ConstraintSet, max_den: int = 10**9) -> Measure:
    vals = [Fraction(float(v)).limit_denominator(max_den) if v > 1e-15 else Fraction(0)
            for v in x]
    total = sum(vals)
    if total == 0:
        vals = [Fraction(1, len(vals))] * len(vals)
    else:
        vals = [v / total for v in vals]
    return Measure(gamma.alphabet, gamma.k, tuple(vals))


def capacity_scs(gamma: ConstraintSet, tol: float = 1e-7, max_iter: int = 5000) -> CapacityResult:
    """cap(B(Gamma)) in bits/symbol via the conditional-entropy program.

    Strict relations are replaced by their closures.  Returns ``-inf`` when
    Gamma cap P_si is empty.
    """
    start = feasible_point(gamma, shift_invariant=True)
    if start is None:
        return CapacityResult(-math.inf, None, 0, 0.0)
    sigma = gamma.alphabet.size
    oracle = _Oracle(gamma)
    fat = is_fat(gamma)
    if fat.fat:
        start = fat.witness
    x0 = np.array(start.as_floats())
    atoms = [x0]
    weights = [1.0]
    x = x0.copy()
    gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        g = entropy_gradient(x, sigma)
        s = oracle(g)
        if s is None:
            break
        gap = float(g @ (s - x))
        if gap < tol:
            break
        scores = [float(g @ a) for a in atoms]
        j = int(np.argmin(scores))
        d_away = x - atoms[j]
        if gap >= float(g @ d_away) or len(atoms) == 1:
            d, gmax, away = s - x, 1.0, False
        else:
            w = weights[j]
            d, gmax, away = d_away, w / (1.0 - w), True
        step = _line_search(x, d, gmax, sigma)
        if step <= 0:
            if away:
                # stalled away step: fall back to the plain FW direction
                d, gmax, away = s - x, 1.0, False
                step = _line_search(x, d, gmax, sigma)
            if step <= 0:
                break
        x = x + step * d
        if away:
            weights = [w * (1 + step) for w in weights]
            weights[j] -= step
            if weights[j] <= 1e-12 or step >= gmax:
                del atoms[j], weights[j]
        else:
            weights = [w * (1 - step) for w in weights]
            for i, a in enumerate(atoms):
                if np.max(np.abs(a - s)) < 1e-12:
                    weights[i] += step
                    break
            else:
                atoms.append(s)
                weights.append(step)
            if step >= 1.0:
                atoms, weights = [s], [1.0]
            keep = [i for i, w in enumerate(weights) if w > 1e-14]
            atoms = [atoms[i] for i in keep]
            weights = [weights[i] for i in keep]
        total = sum(weights)
        weights = [w / total for w in weights]
    value = conditional_entropy(x, sigma)
    return CapacityResult(value, _rationalize(x, gamma), it, max(gap, 0.0))


def capacity_bounds(gamma: ConstraintSet, tol: float = 1e-6, steps: int = 8) -> tuple[float, float]:
    """(lower, upper) bounds on cap(B(Gamma)) valid for any Gamma.

    Upper: the program over the closure.  Lower: the limit over the shrunk
    interiors Gamma_eps for a geometric eps sequence; ``-inf`` if the
    interior is empty.
    """
    upper = capacity_scs(gamma).value
    if upper == -math.inf:
        return -math.inf, -math.inf
    if not is_fat(gamma):
        return -math.inf, upper
    eps = max_admissible_epsilon(gamma) / 2
    lower = -math.inf
    for _ in range(steps):
        value = capacity_scs(shrink(gamma, eps)).value
        if lower > -math.inf and abs(value - lower) < tol:
            lower = value
            break
        lower = value
        eps /= 4
    return min(lower, upper), upper


def capacity_bruteforce(gamma: ConstraintSet, n_max: int, n_min: int | None = None):
    """[(n, log2|B_n(Gamma)| / n)] from exact counts; -inf where B_n is empty."""
    n_min = gamma.k if n_min is None else max(n_min, gamma.k)
    out = []
    for n in range(n_min, n_max + 1):
        c = AdmissibleCounter(gamma, n).count()
        out.append((n, log2_count(c) / n if c else -math.inf))
    return out


# --- graphs -----------------------------------------------------------------

def spectral_radius(A, rtol: float = 1e-12, max_iter: int = 200_000) -> float:
    """Perron root of an irreducible non-negative matrix (dense or sparse).

    Power iteration on A + I (aperiodic) with Collatz-Wielandt bounds; falls
    back to an eigenvalue solve if the bounds do not close.
    """
    n = A.shape[0]
    if sparse.issparse(A):
        B = sparse.csr_matrix(A, dtype=float) + sparse.identity(n, format="csr")
    else:
        B = np.asarray(A, dtype=float) + np.eye(n)
    x = np.ones(n)
    lo = hi = 0.0
    for _ in range(max_iter):
        y = B @ x
        ratio = y / x
        lo, hi = float(ratio.min()), float(ratio.max())
        if hi - lo <= rtol * hi:
            return 0.5 * (lo + hi) - 1.0
        x = y / np.linalg.norm(y)
    if sparse.issparse(A):
        if n > 2:
            return float(eigs(sparse.csr_matrix(A, dtype=float), k=1, which="LM",
                              return_eigenvectors=False)[0].real)
        A = A.toarray()
    return float(max(np.linalg.eigvals(np.asarray(A, dtype=float)).real))


def graph_capacity(G: LabeledDigraph) -> float:
    """log2 of the spectral radius of G's adjacency over its recurrent part,
    per symbol (edge labels of length q count q symbols)."""
    comps = cyclic_components(G)
    if not comps:
        return -math.inf
    A = sparse_adjacency(G) if G.num_vertices > 512 else G.adjacency_matrix()
    best = 0.0
    for comp in comps:
        sub = A[comp][:, comp] if sparse.issparse(A) else A[np.ix_(comp, comp)]
        best = max(best, spectral_radius(sub))
    q = max(G.label_length, 1)
    return math.log2(best) / q if best > 0 else -math.inf
