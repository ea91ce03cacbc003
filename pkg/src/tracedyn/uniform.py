"""Uniform measure of an irreducible partial action.

The state-indexed Möbius matrix ``mu(t)`` inverts the growth matrix ``Z(t)``.
Its determinant ``theta`` locates the characteristic root ``t0``, and the
adjugate of ``mu(t0)`` yields the cocycle weighting the uniform valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .action import BOT, PartialAction
from .errors import (
    CocycleDegenerate,
    LimitExceeded,
    NoRootInUnitInterval,
    NotIrreducible,
    ValidationFailed,
)
from .monoid import (
    DEFAULT_LIMIT,
    UNIT,
    Trace,
    append_letter,
    bits,
    clique_trace,
    left_quotient,
    popcount,
    right_quotient,
)
from .polynomial import IntPolynomial, PolyMatrix
from .valuation import FibredValuation, check_concurrency, mobius_report

SCAN_STEPS = 1024
FINE_SCAN_STEPS = 65536
BISECTIONS = 60
FALLBACK_EPSILONS = (1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class CharacteristicData:
    t0: float
    theta: IntPolynomial
    cocycle: dict[tuple[str, str], float]
    method: str  # "adjugate" or "series-fallback"

    def gamma(self, a: str, b: str) -> float:
        return self.cocycle[(a, b)]


def _require_irreducible(pa: PartialAction) -> None:
    if not pa.reachability.is_irreducible:
        comps = pa.reachability.irreducible_components
        raise NotIrreducible(f"action is reducible; closed classes {comps!r}")


def mobius_matrix(pa: PartialAction) -> PolyMatrix:
    """``mu[a][b]`` sums ``(-t)^|c|`` over cliques ``c`` taking state ``a`` to ``b``."""
    n = pa.size
    coeffs = [[[0] * (pa.monoid.alphabet_size + 1) for _ in range(n)] for _ in range(n)]
    for s in range(n):
        for c in pa.monoid.cliques:
            target = pa.run(s, bits(c))
            if target != BOT:
                k = popcount(c)
                coeffs[s][target][k] += (-1) ** k
    entries = tuple(tuple(IntPolynomial(tuple(p)) for p in row) for row in coeffs)
    return PolyMatrix(pa.states, entries)


def theta_polynomial(pa: PartialAction) -> IntPolynomial:
    return mobius_matrix(pa).det()


def _sign(p: IntPolynomial, t: Fraction) -> int:
    v = p(t)
    return (v > 0) - (v < 0)


def smallest_root(p: IntPolynomial) -> float:
    """Smallest root of ``p`` in (0, 1], with ``p(0) != 0``.

    Works on the squarefree part so that roots of even multiplicity still
    produce a sign change. Signs are evaluated exactly on rationals.
    """
    if p[0] == 0:
        raise ValueError("polynomial vanishes at 0")
    q = p.squarefree_part()
    for steps in (SCAN_STEPS, FINE_SCAN_STEPS):
        lo = Fraction(0)
        s_lo = _sign(q, lo)
        for k in range(1, steps + 1):
            hi = Fraction(k, steps)
            s_hi = _sign(q, hi)
            if s_hi == 0:
                return float(hi)
            if s_hi != s_lo:
                for _ in range(BISECTIONS):
                    mid = (lo + hi) / 2
                    s_mid = _sign(q, mid)
                    if s_mid == 0:
                        return float(mid)
                    if s_mid == s_lo:
                        lo = mid
                    else:
                        hi = mid
                return float((lo + hi) / 2)
            lo, s_lo = hi, s_hi
    raise NoRootInUnitInterval(f"no root of {p} found in (0, 1]")


def characteristic_root(pa: PartialAction, theta: IntPolynomial | None = None) -> float:
    _require_irreducible(pa)
    return smallest_root(theta if theta is not None else theta_polynomial(pa))


def _adjugate_row_sums(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    sums = np.zeros(n)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, j, axis=0), i, axis=1)
            # adj[i, j] is the (j, i) cofactor
            sums[i] += (-1) ** (i + j) * (np.linalg.det(minor) if n > 1 else 1.0)
    return sums


def _extrapolate_to_zero(xs, ys) -> float:
    """Value at 0 of the interpolating polynomial through (xs, ys) (Neville)."""
    p = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
    return p[0]


def _series_ratios(mu: PolyMatrix, t0: float) -> np.ndarray:
    """Growth ratios ``Z_b / Z_0`` extrapolated from points just below ``t0``."""
    n = mu.size
    eps = list(FALLBACK_EPSILONS)
    samples = []
    for e in eps:
        z = np.linalg.solve(mu.at(t0 * (1 - e)), np.ones(n))
        if not np.all(np.isfinite(z)) or z[0] <= 0:
            raise CocycleDegenerate("growth series not positive below the characteristic root")
        samples.append(z / z[0])
    samples = np.array(samples)
    return np.array([_extrapolate_to_zero(eps, samples[:, b]) for b in range(n)])


def parry_cocycle(pa: PartialAction, t0: float, tol: float = 1e-9) -> tuple[dict[tuple[str, str], float], str]:
    """Cocycle ``Gamma(a, b) = lim Z_b / Z_a`` at ``t0`` and the method used."""
    _require_irreducible(pa)
    mu = mobius_matrix(pa)
    sums = _adjugate_row_sums(mu.at(t0))
    scale = max(1.0, float(np.max(np.abs(mu.at(t0)))) ** (pa.size - 1))
    method = "adjugate"
    if np.all(np.abs(sums) > tol * scale) and (np.all(sums > 0) or np.all(sums < 0)):
        weights = np.abs(sums)
    else:
        method = "series-fallback"
        weights = _series_ratios(mu, t0)
        if not np.all(weights > 0):
            raise CocycleDegenerate("adjugate row sums vanish and the series ratios are not positive")
    states = pa.states
    cocycle = {}
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            cocycle[(a, b)] = 1.0 if i == j else float(weights[j] / weights[i])
    return cocycle, method


def characteristic_data(pa: PartialAction) -> CharacteristicData:
    _require_irreducible(pa)
    theta = theta_polynomial(pa)
    t0 = characteristic_root(pa, theta)
    cocycle, method = parry_cocycle(pa, t0)
    return CharacteristicData(t0, theta, cocycle, method)


def uniform_valuation(pa: PartialAction, data: CharacteristicData | None = None, tol: float = 1e-9) -> FibredValuation:
    """Valuation ``lambda_a(x) = t0 * Gamma(a, a.x)`` on enabled letters, zero elsewhere."""
    data = data if data is not None else characteristic_data(pa)
    rows = []
    for s, state in enumerate(pa.states):
        row = []
        for target in pa.table[s]:
            row.append(0.0 if target == BOT else data.t0 * data.cocycle[(state, pa.states[target])])
        rows.append(tuple(row))
    F = FibredValuation(pa, tuple(rows))
    conc = check_concurrency(F, tol)
    if not conc.passed:
        raise ValidationFailed(f"uniform valuation breaks concurrency at {conc.witnesses[0][:3]}")
    report = mobius_report(F, tol)
    if not report.valid:
        raise ValidationFailed(f"uniform valuation fails the Möbius conditions at {report.violations[0][:2]}")
    return F


# truncated growth matrix and inversion checks

def _check_limit(K: int, limit: int) -> None:
    if K < 0:
        raise ValueError("K must be nonnegative")
    if K > limit:
        raise LimitExceeded(f"K = {K} exceeds enumeration limit {limit}")


def executions(pa: PartialAction, s: int, K: int) -> list[dict[Trace, int]]:
    """Traces of each length 0..K executable from state index ``s``, mapped to their target."""
    m = pa.monoid
    levels = [{UNIT: s}]
    for _ in range(K):
        nxt = {}
        for x, state in levels[-1].items():
            for a, target in enumerate(pa.table[state]):
                if target != BOT:
                    nxt[append_letter(m, x, a)] = target
        levels.append(nxt)
    return levels


def zeta_truncated(pa: PartialAction, K: int, limit: int = DEFAULT_LIMIT) -> list[list[list[int]]]:
    """``out[a][b][k]`` counts traces of length k leading from state a to state b."""
    _check_limit(K, limit)
    n = pa.size
    out = [[[0] * (K + 1) for _ in range(n)] for _ in range(n)]
    for s in range(n):
        for k, level in enumerate(executions(pa, s, K)):
            for target in level.values():
                out[s][target][k] += 1
    return out


def truncated_inverse_residual(pa: PartialAction, K: int, limit: int = DEFAULT_LIMIT) -> int:
    """Largest coefficient of ``mu(t) Z(t) - I`` through degree ``K``, in exact integers."""
    z = zeta_truncated(pa, K, limit)
    mu = mobius_matrix(pa)
    n = pa.size
    worst = 0
    for a in range(n):
        for c in range(n):
            for k in range(K + 1):
                acc = sum(
                    mu[a, b][j] * z[b][c][k - j]
                    for b in range(n)
                    for j in range(min(k, mu[a, b].degree) + 1)
                )
                expected = 1 if (a == c and k == 0) else 0
                worst = max(worst, abs(acc - expected))
    return worst


def fibred_inversion_check(pa: PartialAction, K: int, limit: int = DEFAULT_LIMIT) -> int:
    """Largest deviation of the fibred products ``mu*zeta`` and ``zeta*mu`` from the identity.

    Both products are expanded over every executable trace of length at most
    ``K`` by summing over clique divisors on the left and on the right.
    """
    _check_limit(K, limit)
    m = pa.monoid
    cliques = [clique_trace(c) for c in m.cliques]
    worst = 0
    for s in range(pa.size):
        for level in executions(pa, s, K):
            for x in level:
                expected = 1 if x.is_unit() else 0
                left = 0
                right = 0
                for g in cliques:
                    sign = (-1) ** g.length
                    rest = left_quotient(m, g, x)
                    if rest is not None:
                        mid = pa.act_trace(s, g)
                        if mid != BOT and pa.act_trace(mid, rest) != BOT:
                            left += sign
                    head = right_quotient(m, x, g)
                    if head is not None:
                        mid = pa.act_trace(s, head)
                        if mid != BOT and pa.act_trace(mid, g) != BOT:
                            right += sign
                worst = max(worst, abs(left - expected), abs(right - expected))
    return worst


def growth_at(pa: PartialAction, t: float) -> np.ndarray:
    """Per-state growth ``Z_a(t)`` below the characteristic root, by solving ``mu(t) Z = 1``."""
    return np.linalg.solve(mobius_matrix(pa).at(t), np.ones(pa.size))
