import itertools
from fractions import Fraction

import numpy as np
import pytest

from qudit_magic.codes import (
    CutoffExceeded,
    LinearCode,
    NonIntegerResult,
    WeightEnumerator,
    canonical_generator_form,
    check_prime,
    closed_form_rm_enumerators,
    coset_min_weight,
    dot,
    enumerator_evaluate_fraction,
    hamming_weight,
    is_prime,
    macwilliams_transform,
    rm_code,
    rm_point,
    symbol_weight_profile,
    weight_enumerator_bruteforce,
)


def random_code(rng, d, n):
    k = int(rng.integers(1, n + 1))
    rows = rng.integers(0, d, size=(k, n)).tolist()
    return LinearCode.from_rows(d, n, rows)


def brute_dual_enumerator(code):
    counts = {}
    for v in itertools.product(range(code.d), repeat=code.n):
        if all(dot(v, row, code.d) == 0 for row in code.rows):
            w = hamming_weight(v)
            counts[w] = counts.get(w, 0) + 1
    return WeightEnumerator(counts, n=code.n, d=code.d)


def test_primality_helpers():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert check_prime(7) == 7
    for bad in (0, 1, 4, 9, 15):
        with pytest.raises(ValueError):
            check_prime(bad)


def test_vector_helpers():
    assert hamming_weight((0, 2, 0, 1, 1)) == 3
    assert symbol_weight_profile((0, 2, 0, 1, 1), 3) == (2, 2, 1)
    assert dot((1, 2), (2, 2), 3) == (2 + 4) % 3


def test_span_canonical_under_row_operations():
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(2, 7))
        code = random_code(rng, d, n)
        rows = [list(r) for r in code.rows]
        # scale a row, add one row to another, shuffle
        rows[0] = [(x * (d - 1)) % d for x in rows[0]]
        if len(rows) > 1:
            rows[1] = [(a + b) % d for a, b in zip(rows[1], rows[0])]
        rng.shuffle(rows)
        again = LinearCode.from_rows(d, n, rows)
        assert again.rows == code.rows
        assert again.dim == code.dim


def test_contains_and_codewords():
    rng = np.random.default_rng(4)
    for _ in range(10):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(2, 6))
        code = random_code(rng, d, n)
        words = list(code.codewords())
        assert len(words) == code.size == d**code.dim
        assert len(set(words)) == len(words)
        for w in words[:16]:
            assert code.contains(w)
        if code.dim < n:
            outside = sum(
                not code.contains(v) for v in itertools.product(range(d), repeat=n)
            )
            assert outside == d**n - code.size


def test_codewords_cutoff():
    code = LinearCode.from_rows(2, 30, np.eye(30, dtype=int).tolist())
    with pytest.raises(CutoffExceeded):
        list(code.codewords(cutoff=1000))


def test_dual_properties():
    rng = np.random.default_rng(5)
    for _ in range(15):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(2, 7))
        code = random_code(rng, d, n)
        dual = code.dual()
        assert dual.dim == n - code.dim
        for r in code.rows:
            for s in dual.rows:
                assert dot(r, s, d) == 0
        assert dual.dual().rows == code.rows


def test_extended_by_and_shortened():
    code = rm_code(3, 2)
    ext = code.extended_by([[1] * code.n])
    assert ext.dim == code.dim + 1
    assert ext.contains(tuple([1] * code.n))
    sh = ext.shortened()
    assert sh.n == code.n - 1
    for w in sh.codewords():
        assert ext.contains((0,) + tuple(w))


def test_rm_point_and_code_shape():
    # evaluation vectors list every nonzero point of the m-dim space once
    d, m = 3, 2
    pts = [rm_point(j, d, m) for j in range(d**m - 1)]
    assert len(set(pts)) == d**m - 1
    assert all(len(p) == m for p in pts)
    for d, m in [(2, 4), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)]:
        code = rm_code(d, m)
        assert code.n == d**m - 1
        assert code.dim == m
        # every codeword is a linear functional evaluated on the point list
        full = rm_code(d, m, shortened=False)
        assert full.n == d**m
        assert full.dim == m + 1


def test_closed_form_enumerators_match_bruteforce():
    for d, m in [(2, 4), (3, 2), (3, 3), (5, 1), (7, 1)]:
        lx = rm_code(d, m)
        ext = lx.extended_by([[1] * lx.n])
        w_lx, w_ext = closed_form_rm_enumerators(d, m)
        assert w_lx == weight_enumerator_bruteforce(lx)
        assert w_ext == weight_enumerator_bruteforce(ext)


def test_macwilliams_against_brute_dual():
    rng = np.random.default_rng(6)
    for _ in range(25):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(2, 7))
        code = random_code(rng, d, n)
        enum = weight_enumerator_bruteforce(code)
        transformed = macwilliams_transform(enum, code.dim)
        assert transformed == brute_dual_enumerator(code)


def test_macwilliams_double_transform_identity():
    rng = np.random.default_rng(7)
    for _ in range(10):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(2, 7))
        code = random_code(rng, d, n)
        enum = weight_enumerator_bruteforce(code)
        back = macwilliams_transform(macwilliams_transform(enum, code.dim), n - code.dim)
        assert back == enum


def test_macwilliams_rejects_non_code_enumerator():
    with pytest.raises(NonIntegerResult):
        macwilliams_transform(WeightEnumerator({0: 1, 1: 2}, n=1, d=2), 1)


def test_enumerator_evaluation():
    enum = WeightEnumerator({0: 1, 2: 3}, n=2, d=2)
    assert enum.total == 4
    assert enum.evaluate(2) == 1 + 3 * 4
    assert enumerator_evaluate_fraction(enum, Fraction(1, 2)) == Fraction(7, 4)


def test_canonical_generator_form():
    rng = np.random.default_rng(8)
    for _ in range(10):
        d = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(3, 8))
        code = random_code(rng, d, n)
        rows, perm = canonical_generator_form(code)
        assert sorted(perm) == list(range(n))
        k = len(rows)
        for i, row in enumerate(rows):
            for j in range(k):
                assert row[j] == (1 if i == j else 0)


def test_coset_min_weight():
    lx = rm_code(3, 2)
    lz = lx.extended_by([[1] * lx.n]).dual()
    ambient = lx.dual()
    assert coset_min_weight(ambient, lz, max_weight=6) == 2
    # no coset representative below the cap: cap of zero finds nothing
    assert coset_min_weight(ambient, lz, max_weight=0) is None


def test_serialization_round_trip():
    code = rm_code(5, 1)
    text = code.to_text()
    again = LinearCode.from_text(text)
    assert again == code
    with pytest.raises(ValueError):
        LinearCode.from_text("garbage\n")
