"""Linear codes over prime fields GF(d), with exact weight-enumerator algebra.

Everything in this module is exact: vectors are tuples of Python ints reduced
mod d, weight enumerators are integer polynomials, and the MacWilliams
transform certifies that the dual enumerator it produces has nonnegative
integer coefficients (anything else means the input enumerator was not the
enumerator of a linear code).

The Reed-Muller construction ``rm_code`` follows the evaluation-code view:
position j of a codeword is the value of a linear map at the point whose
base-d digits (most significant first) spell j.  The shortened variant drops
position 0, where every linear map vanishes.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Vector = tuple[int, ...]

SPAN_CUTOFF_DEFAULT = 2**24


class CutoffExceeded(Exception):
    """Raised when a span enumeration would exceed its codeword budget."""


class NonIntegerResult(Exception):
    """Raised when an exact transform fails its integrality certificate."""


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    for p in range(2, int(math.isqrt(d)) + 1):
        if d % p == 0:
            return False
    return True


def check_prime(d: int) -> int:
    if not is_prime(d):
        raise ValueError(f"field order must be prime, got {d}")
    return d


def reduce_vector(v: Sequence[int], d: int) -> Vector:
    """Reduce an integer sequence to the canonical tuple of residues mod d."""
    return tuple(int(x) % d for x in v)


def vector_add(u: Sequence[int], v: Sequence[int], d: int) -> Vector:
    return tuple((a + b) % d for a, b in zip(u, v, strict=True))


def vector_scale(c: int, v: Sequence[int], d: int) -> Vector:
    return tuple((c * a) % d for a in v)


def dot(u: Sequence[int], v: Sequence[int], d: int) -> int:
    return sum(a * b for a, b in zip(u, v, strict=True)) % d


def hamming_weight(v: Sequence[int]) -> int:
    return sum(1 for x in v if x != 0)


def symbol_weight_profile(v: Sequence[int], d: int) -> Vector:
    """Count of each symbol value in v: entry k is wt_k(v), including k=0."""
    counts = [0] * d
    for x in v:
        counts[x % d] += 1
    return tuple(counts)


def _rref(rows: list[list[int]], d: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over GF(d). Returns (rows, pivot columns)."""
    mat = [[x % d for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = pow(mat[r][c], -1, d)
        mat[r] = [(x * inv) % d for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % d for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


@dataclass(frozen=True)
class LinearCode:
    """A linear code over GF(d), stored by a canonical generator matrix.

    Generator rows are reduced to the unique reduced row echelon form on
    construction, so two codes span the same space exactly when their row
    tuples compare equal.  A dimension-0 code has an empty row tuple.
    """

    d: int
    n: int
    rows: tuple[Vector, ...]

    def __post_init__(self) -> None:
        check_prime(self.d)
        if self.n < 1:
            raise ValueError(f"code length must be positive, got {self.n}")
        for row in self.rows:
            if len(row) != self.n:
                raise ValueError("generator row length differs from code length")

    @classmethod
    def from_rows(cls, d: int, n: int, rows: Iterable[Sequence[int]]) -> "LinearCode":
        check_prime(d)
        mat = [[int(x) % d for x in row] for row in rows]
        for row in mat:
            if len(row) != n:
                raise ValueError("generator row length differs from code length")
        rref_rows, _ = _rref(mat, d)
        return cls(d=d, n=n, rows=tuple(tuple(r) for r in rref_rows))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def size(self) -> int:
        return self.d**self.dim

    def contains(self, v: Sequence[int]) -> bool:
        """Membership by elimination against the canonical generator rows."""
        w = list(reduce_vector(v, self.d))
        if len(w) != self.n:
            raise ValueError("vector length differs from code length")
        pivots = {next(i for i, x in enumerate(row) if x): row for row in self.rows}
        for c, row in pivots.items():
            if w[c]:
                f = w[c]
                w = [(x - f * y) % self.d for x, y in zip(w, row)]
        return not any(w)

    def codewords(self, cutoff: int = SPAN_CUTOFF_DEFAULT) -> Iterator[Vector]:
        """Enumerate the span in lexicographic order over coefficient tuples."""
        if self.size > cutoff:
            raise CutoffExceeded(
                f"span has {self.d}^{self.dim} codewords, above the cutoff {cutoff}"
            )
        n, d = self.n, self.d
        for coeffs in itertools.product(range(d), repeat=self.dim):
            word = [0] * n
            for c, row in zip(coeffs, self.rows):
                if c:
                    word = [(x + c * y) % d for x, y in zip(word, row)]
            yield tuple(word)

    def dual(self) -> "LinearCode":
        """The dual code under the standard inner product mod d."""
        _, pivots = _rref([list(r) for r in self.rows], self.d)
        pivot_set = set(pivots)
        free_cols = [c for c in range(self.n) if c not in pivot_set]
        dual_rows = []
        for f in free_cols:
            w = [0] * self.n
            w[f] = 1
            for i, p in enumerate(pivots):
                w[p] = (-self.rows[i][f]) % self.d
            dual_rows.append(w)
        return LinearCode.from_rows(self.d, self.n, dual_rows)

    def shortened(self) -> "LinearCode":
        """Shorten at position 0: keep words with first entry 0, drop that entry."""
        if self.n < 2:
            raise ValueError("cannot shorten a length-1 code")
        keep = [row[1:] for row in self.rows if row[0] == 0]
        return LinearCode.from_rows(self.d, self.n - 1, keep)

    def extended_by(self, extra: Sequence[Sequence[int]]) -> "LinearCode":
        """Span of this code together with extra generator rows."""
        rows = [list(r) for r in self.rows] + [list(r) for r in extra]
        return LinearCode.from_rows(self.d, self.n, rows)

    def to_text(self) -> str:
        lines = [f"d={self.d} n={self.n}"]
        lines += [" ".join(str(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearCode":
        lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
        if not lines or not lines[0].startswith("d="):
            raise ValueError("code text must start with a 'd=<d> n=<n>' header")
        fields = dict(part.split("=", 1) for part in lines[0].split())
        d, n = int(fields["d"]), int(fields["n"])
        rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
        return cls.from_rows(d, n, rows)


def span_enumerate(code: LinearCode, cutoff: int = SPAN_CUTOFF_DEFAULT) -> list[Vector]:
    return list(code.codewords(cutoff=cutoff))


def rm_point(j: int, d: int, m: int) -> Vector:
    """Base-d digits of j, most significant first: the j-th evaluation point."""
    digits = []
    for _ in range(m):
        digits.append(j % d)
        j //= d
    return tuple(reversed(digits))


def rm_code(d: int, m: int, shortened: bool = True) -> LinearCode:
    """First-order Reed-Muller code over GF(d) on m variables.

    Unshortened: length d^m, dimension m+1, codewords are the evaluations of
    affine maps u . a_j + c over all points a_j.  Shortened: position j=0
    (the all-zero point) is dropped along with the constant functions,
    leaving length d^m - 1 and dimension m.
    """
    check_prime(d)
    if m < 1:
        raise ValueError(f"need at least one variable, got m={m}")
    length = d**m
    points = [rm_point(j, d, m) for j in range(length)]
    rows = []
    for i in range(m):
        unit = tuple(1 if k == i else 0 for k in range(m))
        rows.append([dot(unit, a, d) for a in points])
    if shortened:
        return LinearCode.from_rows(d, length - 1, [row[1:] for row in rows])
    rows.append([1] * length)
    return LinearCode.from_rows(d, length, rows)


class WeightEnumerator:
    """Integer-coefficient weight enumerator W(x) = sum_w A_w x^w."""

    def __init__(self, coeffs: dict[int, int], n: int, d: int):
        self.n = n
        self.d = check_prime(d)
        clean = {int(w): int(a) for w, a in coeffs.items() if a != 0}
        for w, a in clean.items():
            if not 0 <= w <= n:
                raise ValueError(f"weight {w} outside [0, {n}]")
            if a < 0:
                raise ValueError(f"negative coefficient {a} at weight {w}")
        self.coeffs = dict(sorted(clean.items()))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, WeightEnumerator)
            and self.n == other.n
            and self.d == other.d
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        terms = " + ".join(f"{a}*x^{w}" for w, a in self.coeffs.items())
        return f"WeightEnumerator({terms or '0'}, n={self.n}, d={self.d})"

    @property
    def total(self) -> int:
        """Number of codewords counted, i.e. W(1)."""
        return sum(self.coeffs.values())

    def evaluate(self, x):
        """Evaluate W at x; exact for Fraction or int inputs."""
        return sum(a * x**w for w, a in self.coeffs.items())


def weight_enumerator_bruteforce(
    code: LinearCode, cutoff: int = SPAN_CUTOFF_DEFAULT
) -> WeightEnumerator:
    counts: Counter[int] = Counter()
    for word in code.codewords(cutoff=cutoff):
        counts[hamming_weight(word)] += 1
    return WeightEnumerator(dict(counts), n=code.n, d=code.d)


def macwilliams_transform(enum: WeightEnumerator, dim: int) -> WeightEnumerator:
    """Exact MacWilliams transform of a dimension-``dim`` code enumerator.

    W_dual(x) = d^-dim (1+(d-1)x)^n W((1-x)/(1+(d-1)x)), expanded as the
    integer polynomial d^-dim sum_w A_w (1-x)^w (1+(d-1)x)^(n-w).  Every
    coefficient must divide exactly by d^dim and come out a nonnegative
    integer; otherwise NonIntegerResult is raised.
    """
    n, d = enum.n, enum.d
    acc = [0] * (n + 1)
    for w, a_w in enum.coeffs.items():
        for i in range(w + 1):
            left = math.comb(w, i) * (-1) ** i
            for k in range(n - w + 1):
                right = math.comb(n - w, k) * (d - 1) ** k
                acc[i + k] += a_w * left * right
    denom = d**dim
    out: dict[int, int] = {}
    for w, c in enumerate(acc):
        q, r = divmod(c, denom)
        if r != 0 or q < 0:
            raise NonIntegerResult(
                f"coefficient {c} at weight {w} is not a nonnegative multiple of d^{dim}"
            )
        if q:
            out[w] = q
    return WeightEnumerator(out, n=n, d=d)


def closed_form_rm_enumerators(d: int, m: int) -> tuple[WeightEnumerator, WeightEnumerator]:
    """Enumerators of the shortened RM code and its extension by the 1-vector.

    Nonzero shortened codewords all have weight d^m - d^(m-1).  Adding the
    constant c != 0 to a codeword moves its zeros to the positions where the
    underlying map took value -c, giving weight d^m - 1 - d^(m-1), except on
    the zero codeword where the shift has full weight d^m - 1.
    """
    check_prime(d)
    n = d**m - 1
    w_nonzero = d**m - d ** (m - 1)
    base: Counter[int] = Counter({0: 1, w_nonzero: d**m - 1})
    ext = Counter(base)
    ext[n] += d - 1
    ext[n - d ** (m - 1)] += (d - 1) * (d**m - 1)
    return (
        WeightEnumerator(dict(base), n=n, d=d),
        WeightEnumerator(dict(ext), n=n, d=d),
    )


def canonical_generator_form(code: LinearCode) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    """Generator matrix as (I | G') plus the column permutation that got there.

    Returns (rows, perm) where perm maps new column positions to original
    ones: permuted_row[i] = row[perm[i]].  The permutation is the identity
    whenever the pivots already sit in the leading dim columns.
    """
    _, pivots = _rref([list(r) for r in code.rows], code.d)
    non_pivots = [c for c in range(code.n) if c not in set(pivots)]
    perm = tuple(pivots + non_pivots)
    permuted = tuple(tuple(row[c] for c in perm) for row in code.rows)
    return permuted, perm


def coset_min_weight(
    ambient: LinearCode, excluded: LinearCode, max_weight: int
) -> int | None:
    """Smallest Hamming weight in ambient minus excluded, searching weight <= max_weight.

    Walks all low-weight vectors (positions times nonzero symbol values)
    instead of the full span, so it stays cheap even when the ambient span
    is far beyond the enumeration cutoff.  Returns None when nothing is
    found, which only bounds the true minimum from below.
    """
    n, d = ambient.n, ambient.d
    for w in range(1, max_weight + 1):
        best_here: int | None = None
        for positions in itertools.combinations(range(n), w):
            for values in itertools.product(range(1, d), repeat=w):
                v = [0] * n
                for p, x in zip(positions, values):
                    v[p] = x
                if ambient.contains(v) and not excluded.contains(v):
                    best_here = w
                    break
            if best_here is not None:
                break
        if best_here is not None:
            return best_here
    return None


def enumerator_evaluate_fraction(enum: WeightEnumerator, x: Fraction) -> Fraction:
    """Exact rational evaluation, kept separate so callers opt in explicitly."""
    return Fraction(sum(a * x**w for w, a in enum.coeffs.items()))
