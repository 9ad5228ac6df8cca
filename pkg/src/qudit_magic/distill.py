"""Distillation analysis: iteration maps, thresholds, yields, regions.

The protocol consumes n = d^m - 1 noisy resource states, measures the X
stabilizers of the code, and keeps the decoded qudit on acceptance.  After
twirling, a resource state is diagonal in the rotated basis, so it is a
probability vector f = (f_0, ..., f_{d-1}) with f_0 the weight on the clean
state.  One round maps

    f'_j = N_j(f) / P(f),   N_j(f) = sum over {v : v + j*1 in Lz} of
                                     prod_k f_k^(count of symbol k in v),
    P(f)  = sum_j N_j(f),

where Lz is the Z stabilizer span.  P is the acceptance probability.

Two evaluation regimes are provided and never mixed silently: exact
rationals (fractions.Fraction in, Fraction out) and numpy extended-precision
floats for everything that needs speed (threshold bisection, region scans).

Depolarizing noise is special: the spans are invariant under nonzero symbol
scaling, so the d-1 error components stay equal under the map and the whole
round collapses to a closed form in the two Reed-Muller weight enumerators.
That form needs only (d, m), never the code object, so it covers parameter
ranges where the code itself is far too large to write down.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .codes import (
    WeightEnumerator,
    check_prime,
    closed_form_rm_enumerators,
    enumerator_evaluate_fraction,
    symbol_weight_profile,
)
from .gates import gate_exists
from .qrm import QrmCode

LONG = np.longdouble


def iteration_valid(d: int, m: int) -> bool:
    """Parameter pairs with a working protocol: a transversal gate exists,
    or d = 2 with m >= 4 where the code has distance 3 and the round still
    purifies even though the diagonal gate family is empty."""
    check_prime(d)
    if d == 2:
        return m >= 4
    return gate_exists(d, m)


@dataclass(frozen=True)
class NoiseVector:
    """Twirled resource state: probs[j] is the weight on the j-th basis state,
    index 0 being the clean resource.  Entries are Fractions (exact regime)
    or floats; both must be nonnegative and sum to one."""

    d: int
    probs: tuple

    def __post_init__(self) -> None:
        check_prime(self.d)
        if len(self.probs) != self.d:
            raise ValueError(f"need {self.d} probabilities, got {len(self.probs)}")
        if any(p < 0 for p in self.probs):
            raise ValueError(f"negative probability in {self.probs}")
        total = sum(self.probs)
        if self.exact:
            if total != 1:
                raise ValueError(f"exact probabilities must sum to 1, got {total}")
        elif abs(float(total) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {float(total)!r}, not 1")

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (Fraction, int)) for p in self.probs)

    @property
    def epsilon(self):
        return 1 - self.probs[0]

    @classmethod
    def depolarizing(cls, d: int, eps) -> "NoiseVector":
        """Error weight spread evenly over the d-1 non-clean components."""
        if isinstance(eps, Fraction):
            share = eps / (d - 1)
            return cls(d, (1 - eps,) + (share,) * (d - 1))
        share = float(eps) / (d - 1)
        return cls(d, (1.0 - float(eps),) + (share,) * (d - 1))

    @classmethod
    def single_error(cls, d: int, eps, k: int = 1) -> "NoiseVector":
        """All error weight on one component, the worst case in practice."""
        if not 1 <= k < d:
            raise ValueError(f"error component k must be in [1, {d}), got {k}")
        probs = [1 - eps if isinstance(eps, Fraction) else 1.0 - float(eps)]
        probs += [type(probs[0])(0)] * (d - 1)
        probs[k] = eps if isinstance(eps, Fraction) else float(eps)
        return cls(d, tuple(probs))


@dataclass(frozen=True)
class IterationResult:
    noise: NoiseVector
    success_probability: object

    @property
    def epsilon(self):
        return self.noise.epsilon


@functools.lru_cache(maxsize=None)
def _lz_profiles(code: QrmCode) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Symbol-count profiles of the Z span with multiplicities.

    The numerators only see codewords through how many positions hold each
    symbol, so grouping by profile shrinks the d^r-term sums to a handful.
    """
    counts: dict[tuple[int, ...], int] = {}
    for z in code.lz.codewords():
        prof = symbol_weight_profile(z, code.d)
        counts[prof] = counts.get(prof, 0) + 1
    return tuple(sorted(counts.items()))


def iterate_general(code: QrmCode, noise: NoiseVector) -> IterationResult:
    """One distillation round for an arbitrary diagonal noise vector.

    Exact when the input probabilities are Fractions, extended-precision
    float otherwise.  The coset for output symbol j is the Z span shifted by
    -j times the all-ones word; shifting permutes symbol counts cyclically,
    so one profile table serves all d cosets.
    """
    if noise.d != code.d:
        raise ValueError(f"noise dimension {noise.d} does not match code dimension {code.d}")
    d = code.d
    profiles = _lz_profiles(code)
    exact = noise.exact
    if exact:
        f = [Fraction(p) for p in noise.probs]
        zero, one = Fraction(0), Fraction(1)
    else:
        f = [LONG(p) for p in noise.probs]
        zero, one = LONG(0), LONG(1)
    numer = []
    for j in range(d):
        shift = (-j) % d
        total = zero
        for prof, count in profiles:
            term = one * count
            for i, w in enumerate(prof):
                if w:
                    term = term * f[(i + shift) % d] ** w
            total = total + term
        numer.append(total)
    prob = sum(numer)
    if prob <= 0:
        raise ValueError("acceptance probability vanished; noise vector is degenerate")
    out = tuple(nj / prob for nj in numer)
    if not exact:
        out = tuple(float(x) for x in out)
        prob = float(prob)
    return IterationResult(NoiseVector(d, out), prob)


@functools.lru_cache(maxsize=None)
def _enumerator_pair(d: int, m: int) -> tuple[WeightEnumerator, WeightEnumerator]:
    return closed_form_rm_enumerators(d, m)


def iterate_depolarizing_exact(d: int, m: int, eps: Fraction) -> tuple[Fraction, Fraction]:
    """One round on depolarizing noise, exact rationals: (eps_out, P).

    With mu = eps/((d-1)(1-eps)) the product weights collapse onto Hamming
    weight and the transformed variable (1-mu)/(1+(d-1)mu) simplifies to
    1 - d*eps/(d-1).  In that variable the acceptance probability is the X
    enumerator over d^m and the clean output weight is the ratio of the
    extended enumerator to d times the X enumerator; both evaluations stay
    bounded, so no overflowing intermediate ever appears.
    """
    check_prime(d)
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError(f"need 0 <= eps < 1, got {eps}")
    wlx, wext = _enumerator_pair(d, m)
    mt = 1 - Fraction(d, d - 1) * eps
    wlx_at = enumerator_evaluate_fraction(wlx, mt)
    wext_at = enumerator_evaluate_fraction(wext, mt)
    f0 = wext_at / (d * wlx_at)
    prob = wlx_at / Fraction(d) ** m
    return 1 - f0, prob


def iterate_depolarizing(d: int, m: int, eps: float) -> tuple[float, float]:
    """Extended-precision version of iterate_depolarizing_exact: (eps_out, P)."""
    check_prime(d)
    wlx, wext = _enumerator_pair(d, m)
    mt = LONG(1) - LONG(d) * LONG(eps) / LONG(d - 1)
    if mt < 0:
        raise ValueError(f"eps={eps} is beyond the maximally mixed point (d-1)/d")
    wlx_at = LONG(0)
    for w, c in wlx.coeffs.items():
        wlx_at += c * mt**w
    wext_at = LONG(0)
    for w, c in wext.coeffs.items():
        wext_at += c * mt**w
    f0 = wext_at / (d * wlx_at)
    prob = wlx_at / LONG(d) ** m
    return float(1 - f0), float(prob)


def _poly_mul(a: list[Fraction], b: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        top = min(order - i, len(b) - 1)
        for j in range(top + 1):
            if b[j]:
                out[i + j] += ai * b[j]
    return out


def _poly_pow(a: list[Fraction], k: int, order: int) -> list[Fraction]:
    result = [Fraction(1)] + [Fraction(0)] * order
    base = list(a) + [Fraction(0)] * (order + 1 - len(a))
    while k:
        if k & 1:
            result = _poly_mul(result, base, order)
        base = _poly_mul(base, base, order)
        k >>= 1
    return result


def _poly_inv(a: list[Fraction], order: int) -> list[Fraction]:
    if a[0] == 0:
        raise ZeroDivisionError("series has no inverse: zero constant term")
    inv = [Fraction(0)] * (order + 1)
    inv[0] = 1 / a[0]
    for k in range(1, order + 1):
        acc = Fraction(0)
        for i in range(1, min(k, len(a) - 1) + 1):
            acc += a[i] * inv[k - i]
        inv[k] = -acc / a[0]
    return inv


def epsilon_series(d: int, m: int, order: int = 4) -> list[Fraction]:
    """Exact Taylor coefficients of the depolarizing output error in eps.

    Returns [c_0, ..., c_order] with eps_out = sum c_k eps^k.  The constant
    and linear terms vanish for every valid (d, m); the quadratic term is
    (d^m - 1)(d - 2) / (2(d - 1)), which degenerates to zero for d = 2 where
    the distance-3 code starts at cubic order instead.
    """
    check_prime(d)
    wlx, wext = _enumerator_pair(d, m)
    mt = [Fraction(1), Fraction(-d, d - 1)]
    cache: dict[int, list[Fraction]] = {}

    def series_of(enum: WeightEnumerator) -> list[Fraction]:
        out = [Fraction(0)] * (order + 1)
        for w, c in enum.coeffs.items():
            if w not in cache:
                cache[w] = _poly_pow(mt, w, order)
            pw = cache[w]
            for i in range(order + 1):
                if pw[i]:
                    out[i] += c * pw[i]
        return out

    num = series_of(wext)
    den = [d * x for x in series_of(wlx)]
    f0 = _poly_mul(num, _poly_inv(den, order), order)
    eps_out = [-x for x in f0]
    eps_out[0] += 1
    return eps_out


def taylor_coefficient(d: int, m: int) -> tuple[int, Fraction]:
    """Leading order and coefficient of the output error: (order, coeff)."""
    series = epsilon_series(d, m, order=6)
    for k in range(2, len(series)):
        if series[k] != 0:
            return k, series[k]
    raise ValueError(f"no nonzero coefficient up to order 6 for (d={d}, m={m})")


def threshold_depolarizing(d: int, m: int, tol: float = 1e-12) -> float:
    """Largest depolarizing error rate that still purifies, by bisection.

    The gain function eps_out(eps) - eps is negative on the purifying side
    and crosses zero exactly once before the maximally mixed point, found by
    a geometric coarse scan and then bisected to width tol.
    """
    if not iteration_valid(d, m):
        raise ValueError(f"no working protocol for (d={d}, m={m})")

    def gain(eps: float) -> float:
        eps_out, _ = iterate_depolarizing(d, m, eps)
        return eps_out - eps

    top = (d - 1) / d
    grid = np.geomspace(1e-9, top * (1 - 1e-9), 600)
    lo = None
    hi = None
    prev = grid[0]
    if gain(float(prev)) >= 0:
        raise ArithmeticError(f"no purifying regime found for (d={d}, m={m})")
    for eps in grid[1:]:
        if gain(float(eps)) >= 0:
            lo, hi = float(prev), float(eps)
            break
        prev = eps
    if lo is None:
        raise ArithmeticError(f"gain never turns positive for (d={d}, m={m})")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        if gain(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def worst_epsilon_out(code: QrmCode, eps: float, refine: int = 48) -> tuple[float, NoiseVector]:
    """Maximum one-round output error over all noise vectors at input error eps.

    Scans the error simplex slice {f_0 = 1 - eps} on a coarse lattice, then
    polishes the best point by coordinate-pair mass transfers with a
    shrinking step.  Returns (eps_out_max, argmax noise vector).
    """
    d = code.d
    if not 0 < eps < 1:
        raise ValueError(f"need 0 < eps < 1, got {eps}")

    def eps_out_of(weights: Sequence[float]) -> float:
        probs = (1.0 - eps,) + tuple(eps * w for w in weights)
        return float(iterate_general(code, NoiseVector(d, probs)).epsilon)

    k = d - 1
    best_w: tuple[float, ...]
    if k == 1:
        best_w, best = (1.0,), eps_out_of((1.0,))
    else:
        step = 6
        best, best_w = -1.0, (1.0,) + (0.0,) * (k - 1)
        for comp in _compositions(step, k):
            w = tuple(c / step for c in comp)
            val = eps_out_of(w)
            if val > best:
                best, best_w = val, w
        delta = 1.0 / step
        for _ in range(refine):
            improved = False
            for i in range(k):
                for j in range(k):
                    if i == j:
                        continue
                    if best_w[j] < delta:
                        continue
                    cand = list(best_w)
                    cand[i] += delta
                    cand[j] -= delta
                    val = eps_out_of(cand)
                    if val > best:
                        best, best_w = val, tuple(cand)
                        improved = True
            if not improved:
                delta *= 0.5
                if delta < 1e-10:
                    break
    return best, NoiseVector(d, (1.0 - eps,) + tuple(eps * w for w in best_w))


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to total."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def threshold_worst_case(code: QrmCode, tol: float = 1e-7) -> float:
    """Largest input error below which every noise vector purifies.

    Bisection on the envelope max-over-noise of the one-round output error:
    while the envelope stays below the input error, every orbit's error
    decreases monotonically, so the envelope crossing is the worst-case
    threshold.
    """
    def gain(eps: float) -> float:
        worst, _ = worst_epsilon_out(code, eps)
        return worst - eps

    lo, hi = None, None
    prev = 1e-4
    if gain(prev) >= 0:
        raise ArithmeticError("no purifying regime at eps=1e-4")
    for eps in np.linspace(0.01, (code.d - 1) / code.d - 1e-6, 120):
        if gain(float(eps)) >= 0:
            lo, hi = prev, float(eps)
            break
        prev = float(eps)
    if lo is None:
        raise ArithmeticError("worst-case gain never turns positive")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gain(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def quadratic_bound_constant(code: QrmCode) -> float:
    """Tight constant K in eps_out <= K * eps^2 over the worst-case regime.

    The ratio eps_out / eps^2 grows with eps and peaks where the worst-case
    envelope meets the identity, so K is the reciprocal of the worst-case
    threshold.
    """
    return 1.0 / threshold_worst_case(code)


@dataclass(frozen=True)
class CoarseBounds:
    """Analytic sufficient bounds: eps below eps_star certainly purifies."""

    cross_terms: int
    amplification: float
    eps_star: float


def coarse_bounds(d: int, m: int, distance: int | None = None) -> CoarseBounds:
    """Conservative closed-form threshold bound from counting alone.

    Every unwanted acceptance path is bounded by the number of nontrivial
    accepted cosets C = d^(n-m) - 1, each suppressed to at least the code
    distance in error order, giving eps_out <= K eps^D with K = d^D * C and
    the sufficient bound eps_star = K^(-1/(D-1)).
    """
    check_prime(d)
    n = d**m - 1
    if distance is None:
        distance = 3 if d == 2 else 2
    cross = d ** (n - m) - 1
    amp = float(d**distance * cross)
    eps_star = amp ** (-1.0 / (distance - 1))
    return CoarseBounds(cross_terms=cross, amplification=amp, eps_star=eps_star)


def success_probability_floor(d: int, m: int) -> Fraction:
    """Acceptance probability at the maximally mixed input: d^-m.

    Every component of the mixed state is equally likely and exactly the
    d^(n-m) accepted cosets survive out of d^n, so the floor depends only
    on m.  Observed acceptance never drops below it on the purifying side.
    """
    check_prime(d)
    return Fraction(1, d**m)


@dataclass(frozen=True)
class YieldResult:
    d: int
    m: int
    eps_in: float
    eps_target: float
    rounds: int
    epsilons: tuple[float, ...]
    success_probabilities: tuple[float, ...]
    yield_per_input: float


def yield_for_target(
    d: int, m: int, eps_in: float, eps_target: float, max_rounds: int = 200
) -> YieldResult:
    """Rounds and expected yield to push depolarizing noise below a target.

    Round k consumes on average n / P_k inputs per output, so the yield per
    input after N rounds is prod_k (P_k / n).  Raises when the input is not
    in the purifying regime.
    """
    if not iteration_valid(d, m):
        raise ValueError(f"no working protocol for (d={d}, m={m})")
    if not 0 < eps_target < eps_in:
        raise ValueError("need 0 < eps_target < eps_in")
    n = d**m - 1
    eps = float(eps_in)
    epsilons = [eps]
    probs: list[float] = []
    for _ in range(max_rounds):
        if eps <= eps_target:
            break
        eps_next, prob = iterate_depolarizing(d, m, eps)
        if eps_next >= eps:
            raise ValueError(
                f"eps={eps_in} is outside the purifying regime for (d={d}, m={m})"
            )
        probs.append(prob)
        eps = eps_next
        epsilons.append(eps)
    else:
        raise ValueError(f"target {eps_target} not reached in {max_rounds} rounds")
    yield_total = 1.0
    for prob in probs:
        yield_total *= prob / n
    return YieldResult(
        d=d,
        m=m,
        eps_in=float(eps_in),
        eps_target=float(eps_target),
        rounds=len(probs),
        epsilons=tuple(epsilons),
        success_probabilities=tuple(probs),
        yield_per_input=yield_total,
    )


def gamma_star(d: int, m: int) -> float:
    """Overhead exponent: log of the round cost n in base of the distance.

    Reaching output error eps costs Theta(log(1/eps)^gamma) inputs with
    gamma = log_D(n); D = 2 for odd primes and 3 for the d = 2, m = 4 code.
    """
    if not iteration_valid(d, m):
        raise ValueError(f"no working protocol for (d={d}, m={m})")
    distance = 3 if d == 2 else 2
    return math.log(d**m - 1) / math.log(distance)


def epsilon_from_delta(d: int, delta: float) -> float:
    """Error weight of a depolarized state with depolarized fraction delta.

    The fully mixed share delta lands on the clean state with weight 1/d,
    so the off-target weight is (d-1)*delta/d.
    """
    check_prime(d)
    if not 0 <= delta <= 1:
        raise ValueError(f"need 0 <= delta <= 1, got {delta}")
    return (d - 1) * delta / d


def epsilon_from_pure_weight(d: int, delta: float) -> float:
    """Error weight when delta is instead the surviving pure-state weight."""
    check_prime(d)
    if not 0 <= delta <= 1:
        raise ValueError(f"need 0 <= delta <= 1, got {delta}")
    return (d - 1) * (1 - delta) / d


@dataclass(frozen=True)
class RegionResult:
    """Attractor classification of the qutrit noise simplex on a cell grid.

    classes[i, j] describes the noise vector with f_1 = axis[i], f_2 =
    axis[j]: the index 0..2 of the pure state its even-round subsequence
    converges to, -1 if it never settles (mixed basin or boundary), -2
    outside the simplex.
    """

    axis: tuple[float, ...]
    classes: "np.ndarray"
    iterations: int


def distillable_region_qutrit(
    resolution: int = 120, max_iter: int = 600, settle: float = 1e-7
) -> RegionResult:
    """Classify the qutrit (f_1, f_2) simplex by distillation attractor.

    Pure wrong states come in two-cycles: all inputs in the k-shifted state
    produce the (-k)-shifted state, so orbits near those attractors alternate
    between two pure states.  Classification therefore runs the two-round
    map, whose three fixed points are the pure states, and reports the limit
    of the even subsequence.

    Cell-centered grid, so no exact zeros appear and the whole sweep runs in
    log space: each round is one matrix product against the Z-span profile
    table per output symbol, on every undecided grid point at once.
    """
    from .qrm import build_qrm

    code = build_qrm(3, 2)
    profiles = _lz_profiles(code)
    expo = np.array([p for p, _ in profiles], dtype=np.float64)
    logc = np.log(np.array([c for _, c in profiles], dtype=np.float64))
    axis = tuple((np.arange(resolution) + 0.5) / resolution)
    pts = []
    index = []
    for i, f1 in enumerate(axis):
        for j, f2 in enumerate(axis):
            if f1 + f2 < 1.0:
                pts.append((1.0 - f1 - f2, f1, f2))
                index.append((i, j))
    F = np.array(pts, dtype=np.float64)
    classes = np.full((resolution, resolution), -2, dtype=np.int8)
    undecided = np.arange(len(pts))
    logf = np.log(F)

    def one_round(logf: "np.ndarray") -> "np.ndarray":
        lognum = np.empty((logf.shape[0], 3))
        for j in range(3):
            perm = [(i - j) % 3 for i in range(3)]
            terms = logf[:, perm] @ expo.T + logc
            peak = terms.max(axis=1, keepdims=True)
            lognum[:, j] = peak[:, 0] + np.log(np.exp(terms - peak).sum(axis=1))
        peak = lognum.max(axis=1, keepdims=True)
        return lognum - (peak + np.log(np.exp(lognum - peak).sum(axis=1, keepdims=True)))

    rounds_used = 0
    for rounds_used in range(2, max_iter + 1, 2):
        logf = one_round(one_round(logf))
        top = logf.max(axis=1)
        done = top > math.log1p(-settle)
        if done.any():
            winners = logf[done].argmax(axis=1)
            for flat, cls in zip(undecided[done], winners):
                i, j = index[flat]
                classes[i, j] = cls
            keep = ~done
            undecided = undecided[keep]
            logf = logf[keep]
        if len(undecided) == 0:
            break
    for flat in undecided:
        i, j = index[flat]
        classes[i, j] = -1
    return RegionResult(axis=axis, classes=classes, iterations=rounds_used)
