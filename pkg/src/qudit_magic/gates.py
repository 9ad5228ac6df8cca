"""Single-qudit diagonal gates at the second level of the Clifford hierarchy.

A gate here is a diagonal unitary on a prime-dimension qudit whose eigenvalue
phases are 2*pi*lambda_j / d^m with integer lambda_j.  The integer vector
lambda is the whole object: membership in the distillable gate family,
Clifford-ness, daggers, and the additive phase function used by the code
transversality checks are all exact integer computations on it.

Membership conditions checked by ``verify_membership``:

  1. integer lambda (structural, so the gate's order divides d^m),
  2. zero lambda sum (determinant one),
  3. conjugating X by the gate lands one level down the hierarchy, i.e.
     the cyclic differences lambda_{j+1} - lambda_j match
     d^(m-1) * (alpha*C(j,2) + beta*j) + c mod d^m for some alpha, beta,
  4. the gate is not itself Clifford (the alpha = 0 case of the same form).

The exhaustive (alpha, beta) search is complete for odd prime d: telescoping
the differences around the cycle pins the admissible constants, so nothing
outside the d^2 grid can occur.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .codes import check_prime, rm_code, LinearCode


class EmptySetError(Exception):
    """Raised when no gate of the requested kind exists for these parameters."""


@dataclass(frozen=True)
class MagicGate:
    """Diagonal gate diag(exp(2i pi lambda_j / d^m)) on a d-level system.

    The constructor only enforces shape (prime d, m >= 1, one integer per
    level); use verify_membership to learn whether the lambdas describe a
    genuine non-Clifford second-level gate.  Canonical gates keep the exact
    integers produced by the construction, which sum to zero over Z, not
    merely mod d^m.
    """

    d: int
    m: int
    lambdas: tuple[int, ...]

    def __post_init__(self) -> None:
        check_prime(self.d)
        if self.m < 1:
            raise ValueError(f"hierarchy index m must be >= 1, got {self.m}")
        if len(self.lambdas) != self.d:
            raise ValueError(
                f"need {self.d} lambda entries for a d={self.d} gate, got {len(self.lambdas)}"
            )
        if not all(isinstance(x, int) for x in self.lambdas):
            raise ValueError("lambda entries must be exact integers")

    @property
    def modulus(self) -> int:
        return self.d**self.m

    def dagger(self) -> "MagicGate":
        return MagicGate(self.d, self.m, tuple(-x for x in self.lambdas))

    def rescaled(self) -> "MagicGate":
        """The same gate viewed one level up: lambdas scaled by d, modulus d^(m+1)."""
        return MagicGate(self.d, self.m + 1, tuple(self.d * x for x in self.lambdas))

    def to_text(self) -> str:
        lam = ",".join(str(x) for x in self.lambdas)
        return f"d={self.d} m={self.m} lambda={lam}\n"

    @classmethod
    def from_text(cls, text: str) -> "MagicGate":
        fields = dict(part.split("=", 1) for part in text.split())
        return cls(
            d=int(fields["d"]),
            m=int(fields["m"]),
            lambdas=tuple(int(x) for x in fields["lambda"].split(",")),
        )


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of the gate-family membership checks, one boolean per condition."""

    d: int
    m: int
    integer_lambda: bool
    special_unitary: bool
    sum_exactly_zero: bool
    second_level: bool
    clifford: bool
    recurrence_constant: int | None
    member: bool


def _cyclic_differences(gate: MagicGate) -> list[int]:
    lam = gate.lambdas
    d = gate.d
    return [lam[(j + 1) % d] - lam[j] for j in range(d)]


def _matches_difference_form(gate: MagicGate, alpha: int, beta: int) -> bool:
    """Does lambda_{j+1}-lambda_j = d^(m-1)(alpha*C(j,2)+beta*j)+c mod d^m hold?

    The constant c is not free: evaluating at j=0 forces c = lambda_1-lambda_0.
    """
    d, mod = gate.d, gate.modulus
    scale = gate.d ** (gate.m - 1)
    eta = _cyclic_differences(gate)
    c = eta[0]
    return all(
        (eta[j] - scale * (alpha * math.comb(j, 2) + beta * j) - c) % mod == 0
        for j in range(d)
    )


def verify_membership(gate: MagicGate) -> MembershipReport:
    """Check every defining condition of the distillable gate family.

    Failures are reported, never raised, so negative fixtures can be probed.
    """
    d = gate.d
    mod = gate.modulus
    total = sum(gate.lambdas)
    special_unitary = total % mod == 0
    second_level = any(
        _matches_difference_form(gate, alpha, beta)
        for alpha in range(d)
        for beta in range(d)
    )
    clifford = any(_matches_difference_form(gate, 0, beta) for beta in range(d))
    recurrence_constant = None
    if _matches_difference_form(gate, 1, 0):
        recurrence_constant = gate.lambdas[1] - gate.lambdas[0]
    return MembershipReport(
        d=d,
        m=gate.m,
        integer_lambda=True,
        special_unitary=special_unitary,
        sum_exactly_zero=total == 0,
        second_level=second_level,
        clifford=clifford,
        recurrence_constant=recurrence_constant,
        member=special_unitary and second_level and not clifford,
    )


def canonical_gate(d: int, m: int) -> MagicGate:
    """The canonical family member for dimension d at hierarchy index m.

    lambda_j = d^(m-2) * (d*C(j,3) - j*C(d,3) + C(d+1,4)), evaluated in exact
    rationals and certified integral.  Exists for d >= 5 prime at every
    m >= 1 and for d = 3 at m >= 2.  For d = 2 every diagonal gate of this
    shape with m < 4 is Clifford and the construction itself degenerates, so
    no canonical gate is offered at any m; the qutrit case m = 1 is empty
    for the same reason.
    """
    check_prime(d)
    if m < 1:
        raise ValueError(f"hierarchy index m must be >= 1, got {m}")
    if d == 2:
        raise EmptySetError("no canonical gate exists for qubits in this family")
    if d == 3 and m == 1:
        raise EmptySetError("the qutrit family is empty at m=1 (all candidates are Clifford)")
    prefactor = Fraction(d) ** (m - 2)
    lambdas = []
    for j in range(d):
        value = prefactor * (
            d * math.comb(j, 3) - j * math.comb(d, 3) + math.comb(d + 1, 4)
        )
        if value.denominator != 1:
            raise EmptySetError(
                f"canonical lambda_{j} = {value} is not an integer for d={d}, m={m}"
            )
        lambdas.append(int(value))
    gate = MagicGate(d, m, tuple(lambdas))
    report = verify_membership(gate)
    if not report.member:
        raise EmptySetError(f"canonical construction failed membership for d={d}, m={m}")
    return gate


def gate_exists(d: int, m: int) -> bool:
    """Existence of a family member: empty for qubits, qutrits need m >= 2."""
    check_prime(d)
    if d == 2:
        return False
    if d == 3:
        return m >= 2
    return m >= 1


def lambda_eval(gate: MagicGate, v: Sequence[int]) -> int:
    """Additive phase function: sum_i lambda_{v_i} as a residue in [0, d^m)."""
    lam = gate.lambdas
    d = gate.d
    return sum(lam[x % d] for x in v) % gate.modulus


def lemma_check(
    gate: MagicGate, shortened: bool, code: LinearCode | None = None
) -> tuple[bool, tuple | None]:
    """Exhaustive check of the coset phase identities on a first-order RM span.

    Unshortened (shortened=False): every codeword v of the length-d^m code
    must satisfy lambda_eval(v) = 0 mod d^m.  Shortened: every codeword v of
    the length-(d^m - 1) code must satisfy
    lambda_eval(v + c*1) = -lambda_c mod d^m for every symbol c.

    Returns (ok, counterexample); the counterexample is (v,) or (v, c).
    A caller may pass its own code (same length and field) to run the check
    against a span it already trusts.
    """
    d, m, mod = gate.d, gate.m, gate.modulus
    if code is None:
        code = rm_code(d, m, shortened=shortened)
    if shortened:
        for v in code.codewords():
            for c in range(d):
                shifted = tuple((x + c) % d for x in v)
                if (lambda_eval(gate, shifted) + gate.lambdas[c]) % mod != 0:
                    return False, (v, c)
        return True, None
    for v in code.codewords():
        if lambda_eval(gate, v) % mod != 0:
            return False, (v,)
    return True, None
