"""Dense state-vector verification of the quantum claims.

Everything the analytic modules assert about the protocol is re-derived
here by brute force on full d^n-amplitude vectors: Pauli phase relations,
the projector case analysis, Clifford correction, transversal gate action,
twirling, and the complete distillation round.  Nothing in this module is
used by the analytic paths; agreement between the two is the strongest
correctness check the package has.

Conventions, fixed once and used everywhere:

    X[u]|t> = |t+u>,  Z[w]|t> = w^<w,t> |t>  (w = exp(2 pi i / d)),
    |+_v>   = d^(-n/2) sum_t w^<v,t> |t>     (so Z[w]|+_v> = |+_{v+w}>
                                              and X[u]|+_v> = w^{-<v,u>}|+_v>),
    |j_L>   = |Lx|^(-1/2) sum_{x in Lx} |x + j*1>.

With these, a plus state labeled by v in the Z-span coset shifted by -j
projects onto the logical plus state of symbol j, which is what makes the
classical coset bookkeeping in the iteration map come out index for index.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distill import NoiseVector
from .gates import MagicGate
from .qrm import QrmCode

SIZE_LIMIT = 2**20


class SizeExceeded(Exception):
    """Raised when a dense vector of d^n amplitudes would be too large."""


def _check_size(d: int, n: int) -> int:
    size = d**n
    if size > SIZE_LIMIT:
        raise SizeExceeded(f"d^n = {size} amplitudes exceeds the dense limit {SIZE_LIMIT}")
    return size


@functools.lru_cache(maxsize=None)
def _digit_table(d: int, n: int) -> np.ndarray:
    """(d^n, n) array: row t holds the base-d digits of t, most significant first."""
    size = _check_size(d, n)
    idx = np.arange(size)
    cols = []
    for i in range(n):
        cols.append((idx // d ** (n - 1 - i)) % d)
    return np.stack(cols, axis=1).astype(np.int64)


def _radix(d: int, n: int) -> np.ndarray:
    return d ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _omega_powers(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


@dataclass(frozen=True)
class StateVector:
    d: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (self.d**self.n,):
            raise ValueError(
                f"expected {self.d ** self.n} amplitudes, got {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.d, self.n, self.amplitudes / np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class ProjectionOutcome:
    post_state: StateVector
    squared_norm: float


def basis_state(d: int, n: int, t: Sequence[int]) -> StateVector:
    size = _check_size(d, n)
    amp = np.zeros(size, dtype=np.complex128)
    flat = int(np.dot([x % d for x in t], _radix(d, n)))
    amp[flat] = 1.0
    return StateVector(d, n, amp)


def plus_basis_state(d: int, n: int, v: Sequence[int]) -> StateVector:
    """Product of single-qudit Fourier states with phase labels v."""
    size = _check_size(d, n)
    digits = _digit_table(d, n)
    phases = (digits @ np.asarray([x % d for x in v], dtype=np.int64)) % d
    amp = _omega_powers(d)[phases] / np.sqrt(size)
    return StateVector(d, n, amp)


def apply_pauli(state: StateVector, kind: str, u: Sequence[int]) -> StateVector:
    """X[u] (digit-wise shift) or Z[u] (digit-wise phase)."""
    d, n = state.d, state.n
    uu = np.asarray([x % d for x in u], dtype=np.int64)
    digits = _digit_table(d, n)
    if kind == "Z":
        phases = (digits @ uu) % d
        return StateVector(d, n, state.amplitudes * _omega_powers(d)[phases])
    if kind == "X":
        source = ((digits - uu) % d) @ _radix(d, n)
        return StateVector(d, n, state.amplitudes[source])
    raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")


def apply_transversal_diagonal(
    state: StateVector, gate: MagicGate, powers: Sequence[int] | None = None
) -> StateVector:
    """Apply the product over sites of the gate raised to powers[i].

    powers defaults to the all-ones vector, the plain transversal gate.
    """
    d, n = state.d, state.n
    if gate.d != d:
        raise ValueError(f"gate dimension {gate.d} does not match state dimension {d}")
    if powers is None:
        powers = (1,) * n
    mod = gate.modulus
    lam = np.asarray(gate.lambdas, dtype=np.int64)
    pw = np.asarray(list(powers), dtype=np.int64)
    digits = _digit_table(d, n)
    exponent = (lam[digits] @ pw) % mod
    phases = np.exp(2j * np.pi * exponent / mod)
    return StateVector(d, n, state.amplitudes * phases)


def gate_matrix(gate: MagicGate) -> np.ndarray:
    """The single-qudit diagonal matrix of the gate."""
    return np.diag(np.exp(2j * np.pi * np.asarray(gate.lambdas) / gate.modulus))


def shift_matrix(d: int) -> np.ndarray:
    x = np.zeros((d, d), dtype=np.complex128)
    for t in range(d):
        x[(t + 1) % d, t] = 1.0
    return x


def clock_matrix(d: int) -> np.ndarray:
    return np.diag(_omega_powers(d))


def cm_matrix(gate: MagicGate) -> np.ndarray:
    """The conjugated shift M X M+, a Clifford for family members."""
    m = gate_matrix(gate)
    return m @ shift_matrix(gate.d) @ m.conj().T


@functools.lru_cache(maxsize=None)
def cm_power_phases(gate: MagicGate) -> np.ndarray:
    """(d, d) table g[k, t] with (M X M+)^k |t> = g[k, t] |t + k>.

    Built from the actual matrix powers and certified to be in
    permutation-phase form, rather than assembled from a phase formula.
    """
    d = gate.d
    cm = cm_matrix(gate)
    table = np.zeros((d, d), dtype=np.complex128)
    power = np.eye(d, dtype=np.complex128)
    for k in range(d):
        for t in range(d):
            col = power[:, t]
            target = (t + k) % d
            off = np.abs(col).sum() - abs(col[target])
            if off > 1e-12 or abs(abs(col[target]) - 1.0) > 1e-12:
                raise AssertionError(f"power {k} of the conjugated shift is not permutation-phase")
            table[k, t] = col[target]
        power = cm @ power
    return table


def apply_cm_correction(state: StateVector, gate: MagicGate, w: Sequence[int]) -> StateVector:
    """Apply the product over sites of (M X M+)^{w_i}: shift by w plus phases."""
    d, n = state.d, state.n
    ww = np.asarray([x % d for x in w], dtype=np.int64)
    table = cm_power_phases(gate)
    digits = _digit_table(d, n)
    phases = table[np.broadcast_to(ww, digits.shape), digits].prod(axis=1)
    target = ((digits + ww) % d) @ _radix(d, n)
    out = np.zeros_like(state.amplitudes)
    out[target] = phases * state.amplitudes
    return StateVector(d, n, out)


def project_stabilizer(
    state: StateVector, half: str, code: QrmCode, outcomes: Sequence[int] | None = None
) -> ProjectionOutcome:
    """Group-average projector onto fixed measurement outcomes of one half.

    X half: averages X[x] over the X span with outcome phases, selecting the
    joint eigenspace where generator X[g_i] has eigenvalue w^{outcomes_i}.
    Z half: the same average collapses to a diagonal indicator, kept in that
    form; generator Z[g_i] has eigenvalue w^{outcomes_i} on the kept span.
    """
    d, n = state.d, state.n
    if (code.d, code.n) != (d, n):
        raise ValueError("code and state shapes do not match")
    if half == "X":
        gens = code.lx.rows
        k = np.zeros(len(gens), dtype=np.int64) if outcomes is None else np.asarray(
            list(outcomes), dtype=np.int64
        )
        if len(k) != len(gens):
            raise ValueError(f"need {len(gens)} outcomes, got {len(k)}")
        dim = len(gens)
        acc = np.zeros_like(state.amplitudes)
        omega = _omega_powers(d)
        gen_mat = np.asarray(gens, dtype=np.int64)
        for a_flat in range(d**dim):
            a = np.asarray(
                [(a_flat // d** (dim - 1 - i)) % d for i in range(dim)], dtype=np.int64
            )
            x = (a @ gen_mat) % d
            phase = omega[int((-(a @ k)) % d)]
            acc = acc + phase * apply_pauli(state, "X", x).amplitudes
        acc /= d**dim
        return ProjectionOutcome(StateVector(d, n, acc), float(np.vdot(acc, acc).real))
    if half == "Z":
        gens = code.lz.rows
        k = np.zeros(len(gens), dtype=np.int64) if outcomes is None else np.asarray(
            list(outcomes), dtype=np.int64
        )
        if len(k) != len(gens):
            raise ValueError(f"need {len(gens)} outcomes, got {len(k)}")
        digits = _digit_table(d, n)
        gen_mat = np.asarray(gens, dtype=np.int64)
        syndrome = (digits @ gen_mat.T) % d
        keep = np.all(syndrome == (-k) % d, axis=1)
        acc = np.where(keep, state.amplitudes, 0)
        return ProjectionOutcome(StateVector(d, n, acc), float(np.vdot(acc, acc).real))
    raise ValueError(f"half must be 'X' or 'Z', got {half!r}")


@functools.lru_cache(maxsize=None)
def _lz_pivots(code: QrmCode) -> tuple[int, ...]:
    pivots = []
    for row in code.lz.rows:
        for col, val in enumerate(row):
            if val:
                pivots.append(col)
                break
    return tuple(pivots)


def clifford_correction_vector(code: QrmCode, outcomes: Sequence[int]) -> tuple[int, ...]:
    """The shift w with <w, g_i> = outcomes_i for every Z generator g_i.

    The Z span is stored in reduced echelon form, so placing outcome i on
    the pivot column of generator i solves the system exactly.
    """
    pivots = _lz_pivots(code)
    k = list(outcomes)
    if len(k) != len(pivots):
        raise ValueError(f"need {len(pivots)} outcomes, got {len(k)}")
    w = [0] * code.n
    for p, val in zip(pivots, k):
        w[p] = val % code.d
    for row, val in zip(code.lz.rows, k):
        if sum(wi * ri for wi, ri in zip(w, row)) % code.d != val % code.d:
            raise AssertionError("correction vector failed its defining identity")
    return tuple(w)


@functools.lru_cache(maxsize=None)
def _logical_support(code: QrmCode) -> np.ndarray:
    """(d, |Lx|) flat indices of the computational words in each |j_L>."""
    d, n = code.d, code.n
    radix = _radix(d, n)
    words = np.asarray(list(code.lx.codewords()), dtype=np.int64)
    out = np.empty((d, words.shape[0]), dtype=np.int64)
    for j in range(d):
        out[j] = ((words + j) % d) @ radix
    return out


def logical_state(code: QrmCode, j: int) -> StateVector:
    size = _check_size(code.d, code.n)
    amp = np.zeros(size, dtype=np.complex128)
    support = _logical_support(code)[j % code.d]
    amp[support] = 1.0 / np.sqrt(len(support))
    return StateVector(code.d, code.n, amp)


def logical_amplitudes(state: StateVector, code: QrmCode) -> np.ndarray:
    """<j_L | state> for j = 0..d-1; the decode step without a circuit."""
    support = _logical_support(code)
    return state.amplitudes[support].sum(axis=1) / np.sqrt(support.shape[1])


def magic_basis(gate: MagicGate, dagger: bool = False) -> np.ndarray:
    """(d, d) matrix whose column k is M |+_k> (or M+ |+_k> with dagger)."""
    d = gate.d
    fourier = _omega_powers(d)[np.outer(np.arange(d), np.arange(d)) % d] / np.sqrt(d)
    m = gate_matrix(gate)
    if dagger:
        m = m.conj().T
    return m @ fourier


def transversality_defect(code: QrmCode, gate: MagicGate) -> float:
    """max_j || M^(x)n |j_L> - exp(-2 pi i lambda_j / d^m) |j_L> ||."""
    worst = 0.0
    for j in range(code.d):
        before = logical_state(code, j)
        after = apply_transversal_diagonal(before, gate)
        expected = np.exp(-2j * np.pi * gate.lambdas[j] / gate.modulus) * before.amplitudes
        worst = max(worst, float(np.linalg.norm(after.amplitudes - expected)))
    return worst


@dataclass(frozen=True)
class TrichotomyReport:
    detected: int
    trivial: int
    undetected: int
    max_deviation: float
    plateau_constant: float


def trichotomy_check(code: QrmCode) -> TrichotomyReport:
    """Exhaustive case analysis of the code projector on every |+_v>.

    For each of the d^n labels v, the codespace projector (X average times
    Z-outcome-zero indicator) must send |+_v> to: zero when v is outside the
    dual of the X span (error detected); sqrt(c) times the logical plus
    state of symbol j when v + j*1 lies in the Z span, with the constant
    c = |Lz|^-1 independent of v.  Counts and the worst deviation from this
    three-way split are returned.
    """
    d, n = code.d, code.n
    size = _check_size(d, n)
    digits = _digit_table(d, n)
    omega = _omega_powers(d)
    lx = np.asarray(code.lx.rows, dtype=np.int64)
    lz = np.asarray(code.lz.rows, dtype=np.int64)
    keep0 = np.all((digits @ lz.T) % d == 0, axis=1)
    support = _logical_support(code)
    csize = support.shape[1]
    c_expected = 1.0 / code.lz.size
    detected = trivial = undetected = 0
    worst = 0.0
    all_x = np.asarray(list(code.lx.codewords()), dtype=np.int64)
    radix = _radix(d, n)
    # the X-half projector average, applied to a diagonal-phase state, only
    # reweights each |+_v>; building the amplitudes once per v keeps the whole
    # sweep dense but affordable
    for flat in range(size):
        v = digits[flat]
        amp = omega[(digits @ v) % d] / np.sqrt(size)
        # X average: mean over the span of the eigenphases
        eig = omega[(-(all_x @ v)) % d].mean()
        in_dual = abs(eig - 1.0) < 1e-12
        if not in_dual and abs(eig) > 1e-12:
            # partial phase averages must vanish exactly for non-dual v
            worst = max(worst, abs(eig))
        projected = (amp * keep0) * (eig if in_dual else 0.0)
        norm2 = float(np.vdot(projected, projected).real)
        if not in_dual:
            detected += 1
            worst = max(worst, np.sqrt(norm2))
            continue
        # which logical symbol: v + j*1 in the Z span
        target = None
        for j in range(d):
            if code.lz.contains(tuple((v + j) % d)):
                target = j
                break
        if target is None:
            raise AssertionError("v in the dual but in no shifted Z-span coset")
        logical = np.zeros(size, dtype=np.complex128)
        logical[support[target]] = 1.0 / np.sqrt(csize)
        # compare against sqrt(c) |+^L_j> up to a global phase, where
        # |+^L_j> = d^(-1/2) sum_i w^{ji} |i_L>
        plus_l = np.zeros(size, dtype=np.complex128)
        for i in range(d):
            plus_l[support[i]] += omega[(target * i) % d] / np.sqrt(csize * d)
        dev = abs(norm2 - c_expected)
        overlap = np.vdot(plus_l, projected)
        dev = max(dev, abs(abs(overlap) - np.sqrt(c_expected)))
        worst = max(worst, dev)
        if target == 0 and code.lz.contains(tuple(v % d)):
            trivial += 1
        else:
            undetected += 1
    return TrichotomyReport(
        detected=detected,
        trivial=trivial,
        undetected=undetected,
        max_deviation=worst,
        plateau_constant=c_expected,
    )


def twirl_numeric(rho: np.ndarray, gate: MagicGate) -> tuple[NoiseVector, float]:
    """Average rho over conjugation by powers of M X M+.

    Returns the diagonal in the M|+_k> basis and the largest off-diagonal
    magnitude left after twirling (certified small: the basis states are
    eigenvectors of the conjugating Clifford with distinct eigenvalues).
    """
    d = gate.d
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (d, d):
        raise ValueError(f"need a {d}x{d} density matrix, got {rho.shape}")
    cm = cm_matrix(gate)
    acc = np.zeros_like(rho)
    power = np.eye(d, dtype=np.complex128)
    for _ in range(d):
        acc += power @ rho @ power.conj().T
        power = cm @ power
    acc /= d
    basis = magic_basis(gate)
    in_basis = basis.conj().T @ acc @ basis
    off = in_basis - np.diag(np.diag(in_basis))
    diag = np.real(np.diag(in_basis))
    diag = np.clip(diag, 0.0, None)
    diag = diag / diag.sum()
    return NoiseVector(d, tuple(float(x) for x in diag)), float(np.abs(off).max())


@dataclass(frozen=True)
class RoundSimulation:
    noise: NoiseVector
    success_probability: float
    branch_success_variance: float
    branches: int


@functools.lru_cache(maxsize=None)
def _round_tables(code: QrmCode, gate: MagicGate):
    """Precomputed gather and phase tables for the exact round simulation.

    Branch k of the Z measurement keeps exactly the computational words t
    with syndrome -k; applying the correction shift w_k maps them onto the
    accepted span, where they decompose uniquely as x + j*1.  The triple
    (k, j, x) therefore partitions all d^n words, and the logical amplitude
    of symbol j in branch k is a single gather-and-sum over x.
    """
    d, n, r = code.d, code.n, code.r
    radix = _radix(d, n)
    x_words = np.asarray(list(code.lx.codewords()), dtype=np.int64)
    n_x = x_words.shape[0]
    branches = d**r
    table = cm_power_phases(gate)
    gather = np.empty((branches, d, n_x), dtype=np.int64)
    phase = np.empty((branches, d, n_x), dtype=np.complex128)
    for k_flat in range(branches):
        k = [(k_flat // d ** (r - 1 - i)) % d for i in range(r)]
        w = np.asarray(clifford_correction_vector(code, k), dtype=np.int64)
        for j in range(d):
            u = (x_words + j - w) % d
            gather[k_flat, j] = u @ radix
            phase[k_flat, j] = table[np.broadcast_to(w, u.shape), u].prod(axis=1)
    return x_words, gather, phase


def simulate_round(
    code: QrmCode,
    gate: MagicGate,
    noise: NoiseVector,
    correction: bool = True,
    chunk: int = 256,
) -> RoundSimulation:
    """Exact ensemble propagation of one distillation round.

    Every input component |M_v> = M^(x)n |+_v> is propagated through the
    full measurement tree: all d^r Z-outcome branches, the outcome-dependent
    Clifford correction (identity when correction is off, which keeps only
    the all-zero branch), the X-stabilizer acceptance, and the logical
    decode.  Output weights are read in the dagger basis M+|+_i>, which is
    where the next round's resource states live.
    """
    d, n = code.d, code.n
    if gate.d != d or noise.d != d:
        raise ValueError("code, gate, and noise dimensions must agree")
    size = _check_size(d, n)
    digits = _digit_table(d, n)
    omega_m = np.exp(2j * np.pi / gate.modulus)
    lam = np.asarray(gate.lambdas, dtype=np.int64)
    big_phase = omega_m ** ((lam[digits].sum(axis=1)) % gate.modulus)
    omega = _omega_powers(d)
    x_words, gather, phase = _round_tables(code, gate)
    if not correction:
        gather = gather[:1]
        phase = phase[:1]
    branches = gather.shape[0]
    n_x = x_words.shape[0]
    f = np.asarray([float(p) for p in noise.probs])
    dagger_basis = magic_basis(gate, dagger=True)
    accept = np.zeros(branches, dtype=np.float64)
    out_weight = np.zeros(d, dtype=np.float64)
    flat_gather = gather.reshape(-1)
    for start in range(0, size, chunk):
        block = digits[start : start + chunk]
        alpha = f[block].prod(axis=1)
        live = alpha > 0
        if not live.any():
            continue
        block = block[live]
        alpha = alpha[live]
        # amplitudes of M^(x)n |+_v> for the whole block at the gathered
        # positions only; <v, t> runs over gathered t via the digit matrix
        phases = (block @ digits[flat_gather].T) % d
        psi = omega[phases] * big_phase[flat_gather][None, :] / np.sqrt(size)
        psi = psi.reshape(-1, branches, d, n_x)
        amps = (psi * phase[None]).sum(axis=3) / np.sqrt(n_x)
        weights = np.abs(amps) ** 2
        accept += alpha @ weights.sum(axis=2)
        decoded = amps @ dagger_basis.conj()
        out_weight += alpha @ (np.abs(decoded) ** 2).sum(axis=1)
    total = float(accept.sum())
    if total <= 0:
        raise ValueError("acceptance probability vanished in simulation")
    variance = float(np.var(accept)) if correction else 0.0
    return RoundSimulation(
        noise=NoiseVector(d, tuple(float(x) for x in out_weight / total)),
        success_probability=total,
        branch_success_variance=variance,
        branches=branches,
    )
