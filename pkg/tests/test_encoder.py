import itertools
import math

import numpy as np
import pytest

from cssmaxsat import encoder
from cssmaxsat.codes import BitMatrix, gen_color_666, gen_rotated_surface, gen_toric, repetition_checks
from cssmaxsat.encoder import EncoderOptions, VarAllocator
from cssmaxsat.errors import InvalidCheck, InvalidParameter, InvalidPrior, UnsupportedWeight, WeightOverflow


def satisfied(clauses, values):
    return all(any(values[abs(l)] == (l > 0) for l in c) for c in clauses)


def projection(w, s, strict3):
    alloc = VarAllocator(w + 1)
    clauses = encoder.encode_xor_chain(range(1, w + 1), s, alloc, strict3)
    num_aux = alloc.next_id - w - 1
    assert num_aux == encoder.chain_aux_count(w, strict3)
    proj = set()
    for bits in itertools.product([False, True], repeat=w + num_aux):
        if satisfied(clauses, (None,) + bits):
            proj.add(bits[:w])
    return clauses, proj


@pytest.mark.parametrize("strict3", [True, False])
@pytest.mark.parametrize("w", range(1, 7))
@pytest.mark.parametrize("s", [0, 1])
def test_xor_chain_projection(w, s, strict3):
    clauses, proj = projection(w, s, strict3)
    expected = {b for b in itertools.product([False, True], repeat=w) if sum(b) % 2 == s}
    assert proj == expected
    if strict3:
        assert all(len(c) == 3 for c in clauses)
        assert len(clauses) == 4 * max(w - 1, 1)


def test_xor_chain_w3_counts():
    alloc = VarAllocator(4)
    clauses = encoder.encode_xor_chain([1, 2, 3], 0, alloc, strict3=True)
    assert len(clauses) == 8 and alloc.next_id - 4 == 2
    alloc = VarAllocator(4)
    assert len(encoder.encode_xor_chain([1, 2, 3], 0, alloc, strict3=False)) == 6


def test_xor_chain_errors():
    with pytest.raises(InvalidCheck):
        encoder.encode_xor_chain([], 0, VarAllocator(1))
    with pytest.raises(InvalidParameter):
        encoder.encode_xor_chain([1], 2, VarAllocator(2))


def test_log_likelihood_weight():
    assert encoder.log_likelihood_weight(0.1) == pytest.approx(math.log(9))
    assert encoder.log_likelihood_weight(0.5) == 0
    assert encoder.log_likelihood_weight(0.75) == pytest.approx(-math.log(3))
    assert encoder.log_likelihood_weight(0.0) == pytest.approx(math.log((1 - 1e-12) / 1e-12))
    with pytest.raises(InvalidPrior):
        encoder.log_likelihood_weight(1.5)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.75])
@pytest.mark.parametrize("strict3", [True, False])
def test_soft_gadget_costs(p, strict3):
    """Minimum violated weight over padding equals w*e (w>0) or |w|*(1-e) (w<0)."""
    w = float(encoder.log_likelihood_weight(p))
    alloc = VarAllocator(2)
    soft = encoder.encode_soft([p], [1], alloc, strict3)
    nb = alloc.next_id - 2
    for e in (False, True):
        best = math.inf
        for pad in itertools.product([False, True], repeat=nb):
            vals = (None, e) + pad
            cost = sum(wt for wt, c in soft if not any(vals[abs(l)] == (l > 0) for l in c))
            best = min(best, cost)
        expected = w * e if w > 0 else -w * (1 - e)
        assert best == pytest.approx(expected, abs=1e-12)


def test_soft_zero_weight_emits_nothing():
    assert encoder.encode_soft([0.5], [1], VarAllocator(2)) == []


def test_variable_layout():
    h = gen_toric(3).hz
    f = encoder.build_spacetime_wcnf(h, np.zeros(h.num_rows * 3, np.uint8), 0.1, 0.05, 3)
    vm = f.var_map
    assert vm.num_e == 18 * 3 and vm.num_r == 9 * 2
    assert vm.e_id(0, 0) == 1 and vm.r_id(0, 0) == 18 * 3 + 1
    assert vm.num_vars == f.num_vars
    assert f.is_strict3()
    again = encoder.VariableMap.from_comment(vm.to_comment())
    assert again == vm


def test_spacetime_matrix_repetition():
    h = repetition_checks(3)
    big = encoder.build_spacetime_matrix(h, 2)
    # columns e1(3) r1(2) e2(3)
    expected = np.array(
        [
            [1, 1, 0, 1, 0, 0, 0, 0],
            [0, 1, 1, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0, 1, 1, 0],
            [0, 0, 0, 0, 1, 0, 1, 1],
        ]
    )
    assert np.array_equal(big.dense, expected)


@pytest.mark.parametrize("seed", range(5))
def test_l1_equals_capacity(seed):
    rng = np.random.default_rng(seed)
    h = gen_rotated_surface(3).hz
    s = rng.integers(0, 2, h.num_rows)
    p = rng.uniform(0.01, 0.49, h.cols)
    a = encoder.build_capacity_wcnf(h, s, p)
    b = encoder.build_spacetime_wcnf(h, s, p, rng.uniform(0, 0.5, h.num_rows), 1)
    assert a.hard == b.hard and a.soft == b.soft and a.var_map == b.var_map


def test_build_errors(steane):
    with pytest.raises(InvalidParameter):
        encoder.build_capacity_wcnf(steane.hz, [0, 1], 0.1)
    with pytest.raises(InvalidParameter):
        encoder.build_capacity_wcnf(steane.hz, [0, 2, 0], 0.1)
    with pytest.raises(InvalidParameter):
        encoder.build_spacetime_wcnf(steane.hz, [0, 0, 0], 0.1, 0.1, 0)


def test_quantize(steane):
    f = encoder.build_capacity_wcnf(steane.hz, [1, 0, 0], 0.1)
    q = encoder.quantize_weights(f, 1000)
    assert all(isinstance(w, int) for w, _ in q.soft)
    assert q.meta["scale"] == 1000
    assert q.meta["distortion_bound"] == pytest.approx(7 * 0.5 / 1000)
    tiny = encoder.build_capacity_wcnf(steane.hz, [1, 0, 0], 0.4999999)
    assert encoder.quantize_weights(tiny, 10).meta["clamped"]
    with pytest.raises(WeightOverflow):
        encoder.quantize_weights(encoder.build_capacity_wcnf(steane.hz, [1, 0, 0], 1e-12), 10**18)
    with pytest.raises(InvalidParameter):
        encoder.quantize_weights(f, 0)


def test_density_formulas_small_cases():
    assert encoder.alpha_3sat([3], 3) == pytest.approx(4 / 5)
    assert encoder.alpha_max3sat([3], 3) == pytest.approx(16 / 11)
    assert encoder.alpha_spacetime_3sat([3], 3, 1) == pytest.approx(12 / 7)


def test_density_modes():
    code = gen_color_666(7)
    for mode in encoder.MODES:
        rep = encoder.clause_density(code, mode)
        assert rep.alpha > 0
    rep = encoder.clause_density(code, "actual")
    assert rep.easy_phase
    assert rep.hard_clauses_chain - rep.hard_clauses_aggregate == 4 * code.hz.num_rows


def test_density_rejects_weight_one_analytic():
    h = BitMatrix.from_rows([[0], [0, 1]], 2)
    with pytest.raises(UnsupportedWeight):
        encoder.clause_density(h, "hard-analytic")
    assert encoder.clause_density(h, "actual").alpha > 0


def test_compact_mode_has_unit_soft_clauses(steane):
    f = encoder.build_capacity_wcnf(steane.hz, [1, 1, 0], 0.1, EncoderOptions(strict3=False))
    assert all(len(c) == 1 for _, c in f.soft)
    assert f.var_map.num_b == 0


def test_quantize_examples(steane):
    f = encoder.build_capacity_wcnf(steane.hz, [1, 0, 0], 0.1)
    q = encoder.quantize_weights(f, 10_000)
    assert {w for w, _ in q.soft} == {21972}
    p = 1 / (1 + math.exp(0.2))
    small = encoder.quantize_weights(encoder.build_capacity_wcnf(steane.hz, [1, 0, 0], p), 1)
    assert {w for w, _ in small.soft} == {1} and small.meta["clamped"]


def test_toric_actual_density_against_analytic():
    rep = encoder.clause_density(gen_toric(5).hz, "maxsat-analytic")
    assert rep.actual_alpha < encoder.ALPHA_CRITICAL
    # the chain emits 4 more clauses per check than the aggregate count
    assert rep.actual_alpha <= 1.25 * rep.alpha_maxsat + 1e-12


@pytest.mark.parametrize("family", ["toric", "rotated-surface", "color-666"])
def test_analytic_density_at_most_four(family):
    from cssmaxsat.codes import generate

    h = generate(family, 7).hz
    if min(h.row_weights()) >= 2:
        assert encoder.clause_density(h, "hard-analytic").alpha <= 4
        assert encoder.clause_density(h, "maxsat-analytic").alpha <= 4


def test_deterministic_output(steane):
    from cssmaxsat import wcnf

    a = wcnf.dumps(encoder.build_capacity_wcnf(steane.hz, [1, 0, 1], 0.2))
    b = wcnf.dumps(encoder.build_capacity_wcnf(steane.hz, [1, 0, 1], 0.2))
    assert a == b
