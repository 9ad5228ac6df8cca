import pytest

from qudit_magic.codes import dot
from qudit_magic.gates import MagicGate, canonical_gate
from qudit_magic.qrm import (
    QrmCode,
    build_qrm,
    code_distance,
    validate_css,
    verify_transversality,
)

PAIRS = [(2, 4), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (11, 1), (13, 1)]


def test_build_shapes_and_validation():
    for d, m in PAIRS:
        code = build_qrm(d, m)
        assert code.n == d**m - 1
        assert code.lx.dim == m
        assert code.lz.dim == code.n - m - 1
        assert code.r == code.n - m - 1
        rep = validate_css(code)
        assert rep.ok, (d, m, rep)


def test_logical_pair():
    for d, m in PAIRS:
        code = build_qrm(d, m)
        assert code.logical_x == (1,) * code.n
        assert code.logical_z == (d - 1,) * code.n
        assert dot(code.logical_x, code.logical_z, d) == 1
        # logical X commutes with every Z stabilizer and vice versa
        for row in code.lz.rows:
            assert dot(code.logical_x, row, d) == 0
        for row in code.lx.rows:
            assert dot(code.logical_z, row, d) == 0


def test_lx_perp_contains_lz_and_logical():
    code = build_qrm(3, 2)
    perp = code.lx_perp()
    assert perp.dim == code.lz.dim + 1
    for row in code.lz.rows:
        assert perp.contains(row)
    assert perp.contains((1,) * code.n)


def test_distances():
    expected = {
        (2, 4): 3,
        (3, 2): 2,
        (3, 3): 2,
        (5, 1): 2,
        (5, 2): 2,
        (7, 1): 2,
    }
    for (d, m), want in expected.items():
        assert code_distance(build_qrm(d, m)) == want


def test_serialization_round_trip():
    code = build_qrm(3, 2)
    text = code.to_text()
    again = QrmCode.from_text(text)
    assert again == code
    with pytest.raises(ValueError):
        QrmCode.from_text("not a code\n")


def test_css_violation_detected():
    code = build_qrm(3, 2)
    # swap in a Z span that fails to commute with the X stabilizers
    bad_rows = [list(code.lz.rows[0])]
    bad_rows[0][0] = (bad_rows[0][0] + 1) % 3
    bad = QrmCode(
        d=code.d,
        m=code.m,
        lx=code.lx,
        lz=code.lz.extended_by(bad_rows),
    )
    rep = validate_css(bad)
    assert not rep.ok


def test_transversality_on_flagships():
    for d, m in [(3, 2), (5, 1), (7, 1)]:
        code = build_qrm(d, m)
        ok, counter = verify_transversality(code, canonical_gate(d, m))
        assert ok and counter is None


def test_transversality_rejects_broken_gate():
    code = build_qrm(5, 1)
    ok, counter = verify_transversality(code, MagicGate(5, 1, (1, 0, 0, 0, 0)))
    assert not ok
    assert counter is not None


def test_transversality_dimension_guard():
    code = build_qrm(5, 1)
    with pytest.raises(ValueError):
        verify_transversality(code, canonical_gate(3, 2))


def test_build_guards():
    with pytest.raises(ValueError):
        build_qrm(4, 1)
    with pytest.raises(ValueError):
        build_qrm(9, 1)
