import math
from fractions import Fraction

import numpy as np
import pytest

from qudit_magic.distill import (
    NoiseVector,
    coarse_bounds,
    distillable_region_qutrit,
    epsilon_from_delta,
    epsilon_from_pure_weight,
    epsilon_series,
    gamma_star,
    iterate_depolarizing,
    iterate_depolarizing_exact,
    iterate_general,
    iteration_valid,
    quadratic_bound_constant,
    success_probability_floor,
    taylor_coefficient,
    threshold_depolarizing,
    threshold_worst_case,
    worst_epsilon_out,
    yield_for_target,
)
from qudit_magic.qrm import build_qrm


def test_noise_vector_validation():
    NoiseVector(3, (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
    with pytest.raises(ValueError):
        NoiseVector(3, (0.5, 0.25))
    with pytest.raises(ValueError):
        NoiseVector(3, (0.7, 0.2, 0.2))
    with pytest.raises(ValueError):
        NoiseVector(3, (1.1, -0.05, -0.05))
    dep = NoiseVector.depolarizing(5, Fraction(1, 10))
    assert dep.exact and dep.epsilon == Fraction(1, 10)
    single = NoiseVector.single_error(3, Fraction(1, 8), 2)
    assert single.probs[2] == Fraction(1, 8) and single.probs[1] == 0


def test_exact_rational_round_ququint():
    code = build_qrm(5, 1)
    res = iterate_general(code, NoiseVector.depolarizing(5, Fraction(1, 10)))
    assert res.epsilon == Fraction(323, 17125)
    assert res.success_probability == Fraction(685, 1024)
    # closed form agrees exactly
    eo, p = iterate_depolarizing_exact(5, 1, Fraction(1, 10))
    assert (eo, p) == (Fraction(323, 17125), Fraction(685, 1024))


def test_depolarizing_closed_form_matches_general_map():
    for d, m, eps in [(3, 2, Fraction(1, 7)), (5, 1, Fraction(2, 11)), (7, 1, Fraction(1, 9))]:
        code = build_qrm(d, m)
        res = iterate_general(code, NoiseVector.depolarizing(d, eps))
        eo, p = iterate_depolarizing_exact(d, m, eps)
        assert res.epsilon == eo
        assert res.success_probability == p
        # depolarizing form is preserved: all wrong components equal
        wrong = set(res.noise.probs[1:])
        assert len(wrong) == 1


def test_float_path_tracks_exact_path():
    for d, m in [(3, 2), (5, 1), (2, 4)]:
        for eps in (0.01, 0.1, 0.2):
            eo_f, p_f = iterate_depolarizing(d, m, eps)
            eo_x, p_x = iterate_depolarizing_exact(d, m, Fraction(eps).limit_denominator(10**12))
            assert abs(eo_f - float(eo_x)) < 1e-12
            assert abs(p_f - float(p_x)) < 1e-12


def test_power_series_frozen():
    assert epsilon_series(5, 1, order=5) == [
        Fraction(0),
        Fraction(0),
        Fraction(3, 2),
        Fraction(7, 2),
        Fraction(251, 64),
        Fraction(-19, 16),
    ]
    assert epsilon_series(3, 2, order=3) == [Fraction(0), Fraction(0), Fraction(2), Fraction(10)]
    assert taylor_coefficient(5, 1) == (2, Fraction(3, 2))
    assert taylor_coefficient(2, 4) == (3, Fraction(35))
    # leading quadratic coefficient for odd primes at m=1
    for d in (5, 7, 11):
        order, coeff = taylor_coefficient(d, 1)
        assert order == 2
        assert coeff == Fraction((d - 1) * (d - 2), 2 * (d - 1))


def test_thresholds_frozen_sample():
    assert abs(threshold_depolarizing(5, 1) - 0.3631226) < 1e-7
    assert abs(threshold_depolarizing(3, 2) - 0.211001) < 1e-6
    assert abs(threshold_depolarizing(2, 4) - 0.14148) < 1e-5
    assert abs(threshold_depolarizing(19, 4) - 0.0000100014) < 1e-10


def test_iteration_map_anticommutes_with_symbol_shift():
    code = build_qrm(5, 1)
    rng = np.random.default_rng(9)
    raw = [Fraction(int(x), 1000) for x in rng.integers(1, 200, size=5)]
    total = sum(raw)
    f = tuple(x / total for x in raw)
    base = iterate_general(code, NoiseVector(5, f))
    for s in range(1, 5):
        shifted = tuple(f[(k - s) % 5] for k in range(5))
        res = iterate_general(code, NoiseVector(5, shifted))
        expect = tuple(base.noise.probs[(k + s) % 5] for k in range(5))
        assert res.noise.probs == expect
        assert res.success_probability == base.success_probability


def test_pure_wrong_states_form_two_cycles():
    for d, m in [(3, 2), (5, 1)]:
        code = build_qrm(d, m)
        for k in range(1, d):
            nv = NoiseVector(d, tuple(Fraction(int(i == k)) for i in range(d)))
            res = iterate_general(code, nv)
            target = tuple(Fraction(int(i == (-k) % d)) for i in range(d))
            assert res.noise.probs == target
            assert res.success_probability == 1


def test_worst_case_results_frozen():
    code3 = build_qrm(3, 2)
    code5 = build_qrm(5, 1)
    assert abs(threshold_worst_case(code3) - 0.200143) < 2e-4
    assert abs(threshold_worst_case(code5) - 0.311957) < 2e-4
    assert abs(quadratic_bound_constant(code3) - 4.9964) < 5e-3


def test_worst_noise_is_a_vertex():
    for d, m in [(3, 2), (5, 1)]:
        code = build_qrm(d, m)
        val, arg = worst_epsilon_out(code, 0.1)
        probs = [float(p) for p in arg.probs]
        assert abs(probs[0] - 0.9) < 1e-9
        assert abs(max(probs[1:]) - 0.1) < 1e-6
        dep, _ = iterate_depolarizing(d, m, 0.1)
        assert val > dep


def test_coarse_bounds_and_floor():
    cb = coarse_bounds(3, 2)
    assert cb.cross_terms == 3**6 - 1 == 728
    assert abs(cb.amplification - 9 * 728) < 1e-9
    assert abs(cb.eps_star - 1 / 6552) < 1e-12
    assert success_probability_floor(3, 2) == Fraction(1, 9)
    assert success_probability_floor(5, 1) == Fraction(1, 5)
    assert success_probability_floor(2, 4) == Fraction(1, 16)


def test_success_probability_never_below_floor():
    rng = np.random.default_rng(10)
    for d, m in [(3, 2), (5, 1)]:
        code = build_qrm(d, m)
        floor = float(success_probability_floor(d, m))
        for _ in range(40):
            f = rng.dirichlet(np.ones(d))
            res = iterate_general(code, NoiseVector(d, tuple(float(x) for x in f)))
            assert float(res.success_probability) >= floor - 1e-12


def test_yield_path_frozen():
    res = yield_for_target(5, 1, 0.1, 1e-9)
    assert res.rounds == 4
    assert abs(res.yield_per_input - 0.00241738444) < 1e-9
    assert res.epsilons[0] == 0.1
    assert res.epsilons[-1] < 1e-9
    # yields shrink when the target tightens
    easier = yield_for_target(5, 1, 0.1, 1e-4)
    assert easier.yield_per_input > res.yield_per_input


def test_yield_guards():
    with pytest.raises(ValueError):
        yield_for_target(5, 1, 0.45, 1e-9)


def test_gamma_star_values():
    assert gamma_star(5, 1) == pytest.approx(2.0, abs=1e-12)
    assert gamma_star(3, 2) == pytest.approx(3.0, abs=1e-12)
    assert gamma_star(2, 4) == pytest.approx(math.log(15) / math.log(3), abs=1e-12)
    with pytest.raises(ValueError):
        gamma_star(3, 1)


def test_iteration_valid_table():
    assert iteration_valid(2, 4)
    assert not iteration_valid(2, 3)
    assert not iteration_valid(3, 1)
    assert iteration_valid(3, 2)
    assert iteration_valid(5, 1)
    with pytest.raises(ValueError):
        iteration_valid(4, 1)


def test_noise_reparameterizations():
    assert epsilon_from_delta(3, 0.3) == pytest.approx(0.2)
    assert epsilon_from_pure_weight(3, 0.7) == pytest.approx(0.2)


def test_region_symmetry_and_corners():
    res = distillable_region_qutrit(resolution=24, max_iter=400)
    classes = res.classes
    n = classes.shape[0]
    counts = {int(c): int((classes == c).sum()) for c in np.unique(classes)}
    assert counts == {-2: 300, -1: 243, 0: 13, 1: 10, 2: 10}
    # swapping the two wrong-state weights swaps their attractors
    relabel = {-2: -2, -1: -1, 0: 0, 1: 2, 2: 1}
    swapped = np.vectorize(relabel.get)(classes.T)
    assert np.array_equal(swapped, classes)
    # cells nearest each simplex vertex belong to that vertex's attractor
    assert classes[0, 0] == 0
    assert classes[n - 2, 0] == 1
    assert classes[0, n - 2] == 2
    # cell-centered grid: the closed edge f1 + f2 = 1 lies outside
    assert classes[n - 1, 0] == -2
    assert classes[n - 1, n - 1] == -2
