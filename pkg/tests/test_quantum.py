import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from qinference.errors import ConditioningOnNullError, InputError
from qinference.lattice import meet
from qinference.linalg import DensityMatrix, Projector, identity, projector_onto_columns, random_unitary
from qinference.quantum import (
    A_THEN_B,
    B_THEN_A,
    affine_fit_residual,
    born,
    commuting_product_rule_check,
    computational_resolution,
    conditioned_state,
    delta_curve,
    delta_scan,
    frame_additivity_check,
    lueders,
    product_rule_residual,
    quantum_renyi_check,
    random_nested_pair,
    random_orthogonal_pair,
    random_projector_any_rank,
    reference_closed_form,
    two_qubit_delta,
    two_qubit_family,
)

from .conftest import RIGHT, UP, commuting_family, dims, projector_from_seed, seeds, state_from_seed

DIAG = DensityMatrix(np.diag([0.5, 0.3, 0.2]))


def test_conditioned_state_examples(up, right):
    half = DensityMatrix(np.eye(2) / 2)
    np.testing.assert_allclose(conditioned_state(half, up).matrix, np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(conditioned_state(DensityMatrix(up.matrix), right).matrix, right.matrix, atol=1e-15)
    rho = state_from_seed(3, 4)
    np.testing.assert_allclose(conditioned_state(rho, identity(3)).matrix, rho.matrix, atol=1e-15)


def test_conditioned_state_null_carries_trace(up):
    with pytest.raises(ConditioningOnNullError) as exc:
        conditioned_state(DensityMatrix(np.diag([0.0, 1.0])), up)
    assert exc.value.value == pytest.approx(0.0)


def test_lueders_examples():
    p = Projector(np.diag([1, 0, 0]))
    q = Projector(np.diag([1, 1, 0]))
    assert lueders(DIAG, p, q).value == pytest.approx(0.5 / 0.8, abs=1e-15)
    assert lueders(DIAG, q, q).value == pytest.approx(1.0, abs=1e-15)
    assert lueders(DIAG, p, identity(3)).value == pytest.approx(born(DIAG, p), abs=1e-15)


def test_born_examples(up, right):
    assert born(DIAG, identity(3)) == pytest.approx(1.0, abs=1e-15)
    assert born(DensityMatrix(np.eye(2) / 2), up) == pytest.approx(0.5, abs=1e-15)
    assert born(DensityMatrix(right.matrix), up) == pytest.approx(abs(np.vdot(UP, RIGHT / np.linalg.norm(RIGHT))) ** 2,
                                                                  abs=1e-15)


def test_lueders_null_names_factor():
    with pytest.raises(ConditioningOnNullError) as exc:
        lueders(DIAG, Projector(np.diag([1, 0, 0])), Projector(np.diag([0, 0, 0])), factor="Pr(Q|P∧R)")
    assert exc.value.factor == "Pr(Q|P∧R)"


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_lueders_two_paths_agree(d, seed):
    rho = state_from_seed(d, seed, mix=0.5)
    p = projector_from_seed(d, seed + 1)
    q = projector_from_seed(d, seed + 2, rank=max(1, d // 2))
    direct = lueders(rho, p, q).value
    via_state = born(conditioned_state(rho, q), p)
    assert abs(direct - via_state) <= 1e-13


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_lueders_below_condition_uses_meet(d, seed):
    rng = np.random.default_rng(seed)
    p, q = random_nested_pair(d, rng)
    rho = state_from_seed(d, seed, mix=0.3)
    assert abs(lueders(rho, p, q).value - lueders(rho, meet(p, q), q).value) <= 1e-12


def _diagonal_projectors(d):
    return [Projector(np.diag(bits)) for bits in itertools.product([0, 1], repeat=d)]


def test_quantum_renyi_diagonal_exhaustive():
    projs = _diagonal_projectors(3)
    rep = quantum_renyi_check(DIAG, list(itertools.product(projs, repeat=3)))
    assert rep.passed
    assert max(ch.max_residual for ch in rep.checks.values() if ch.instances) <= 1e-12
    # diagonal oracle: the Lüders value is a ratio of weight sums
    w = np.diag(DIAG.matrix).real
    for p, q in itertools.product(projs, repeat=2):
        dq = np.diag(q.matrix).real
        if w @ dq > 0:
            expect = (w * dq * np.diag(p.matrix).real).sum() / (w @ dq)
            assert lueders(DIAG, p, q).value == pytest.approx(expect, abs=1e-15)


def test_quantum_renyi_random_chains():
    rng = np.random.default_rng(8)
    rho = state_from_seed(4, 8, mix=0.4)
    inst = []
    for _ in range(50):
        q, r = random_nested_pair(4, rng)
        inst.append((random_projector_any_rank(4, rng), q, r))
        p, q = random_orthogonal_pair(4, rng)
        inst.append((p, q, random_projector_any_rank(4, rng)))
    rep = quantum_renyi_check(rho, inst)
    assert rep.passed
    assert rep["qabc"].max_residual <= 1e-10
    assert rep["additivity"].max_residual <= 1e-12


def test_quantum_renyi_flags_bad_tolerance():
    rng = np.random.default_rng(1)
    inst = [(*random_orthogonal_pair(3, rng), random_projector_any_rank(3, rng)) for _ in range(20)]
    rep = quantum_renyi_check(state_from_seed(3, 2), inst, tol=0.0)
    assert rep["additivity"].instances > 0


def test_two_qubit_family_states():
    fam = two_qubit_family(1.0)
    np.testing.assert_allclose(fam.rho.matrix, np.eye(4) / 4, atol=1e-15)
    fam = two_qubit_family(0.0)
    assert np.linalg.matrix_rank(fam.rho.matrix) == 1
    assert born(fam.rho, fam.R) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(InputError):
        two_qubit_family(1.5)


def _symbolic_family():
    """Exact Δ(r) and its components for the two-qubit family."""
    r = sp.symbols("r", nonnegative=True)
    i2 = sp.eye(2)
    up = sp.Matrix([[1, 0], [0, 0]])
    right = sp.Matrix([[1, 1], [1, 1]]) / 2
    P = sp.kronecker_product(up, i2)
    Q = sp.kronecker_product(i2, up)
    R = sp.kronecker_product(i2, right)
    rho = r / 4 * sp.eye(4) + (1 - r) * sp.kronecker_product(up, up)

    def lu(a, b):
        return sp.simplify((b * rho * b * a).trace() / (rho * b).trace())

    # P, Q commute and P, R commute, so both meets are products
    joint, first, second = lu(P * Q, R), lu(P, R), lu(Q, P * R)
    return r, joint, first, second, sp.simplify(joint - first * second), (Q * R)


def test_two_qubit_delta_matches_exact_oracle():
    r, joint, first, second, delta, _ = _symbolic_family()
    assert sp.simplify(joint - (sp.Rational(1, 2) - r / 4)) == 0
    assert sp.simplify(first - (1 - r / 2)) == 0
    assert sp.simplify(second - sp.Rational(1, 2)) == 0
    assert delta == 0
    for rv in np.linspace(0, 1, 11):
        rec = two_qubit_delta(float(rv))
        comp = rec.component_values()
        exact = [float(e.subs(r, rv)) for e in (joint, first, second)]
        np.testing.assert_allclose(comp, exact, atol=1e-14)
        assert abs(rec.delta) <= 1e-14


def test_two_qubit_meets_are_nondegenerate():
    fam = two_qubit_family(0.0)
    assert meet(fam.P, fam.Q).rank == 1
    assert meet(fam.P, fam.R).rank == 1
    # Q and R are incompatible rays on the second factor
    assert meet(fam.Q, fam.R).rank == 0


def test_a_then_b_degenerates():
    *_, qr = _symbolic_family()
    assert qr != sp.zeros(4, 4)  # QR is nonzero but Q∧R is zero
    rec = two_qubit_delta(0.0, A_THEN_B)
    assert rec.delta is None
    assert "Pr(P|Q∧R)" in rec.note
    fam = two_qubit_family(0.5)
    with pytest.raises(ConditioningOnNullError) as exc:
        product_rule_residual(fam.rho, fam.P, fam.Q, fam.R, A_THEN_B)
    assert exc.value.factor == "Pr(P|Q∧R)"


def test_reference_closed_form_is_comparison_only():
    assert reference_closed_form(0.0) == pytest.approx(-(np.sqrt(2) - 1) / 2)
    assert reference_closed_form(1.0) == 0.0
    assert abs(two_qubit_delta(0.0).delta - reference_closed_form(0.0)) > 0.2


def test_delta_curve_invariants():
    curve = delta_curve(101)
    rs = [c.r for c in curve]
    ds = [c.delta for c in curve]
    assert rs[0] == 0.0 and rs[-1] == 1.0
    assert abs(ds[-1]) <= 1e-15
    assert affine_fit_residual(rs, ds) <= 1e-10
    mags = np.abs(ds)
    assert np.all(np.diff(mags) <= 1e-12)


def test_affine_fit_residual_detects_curvature():
    xs = np.linspace(0, 1, 11)
    assert affine_fit_residual(xs, 3 * xs - 1) <= 1e-14
    assert affine_fit_residual(xs, xs ** 2) > 1e-2


def test_commuting_triples_obey_product_rule():
    rep = commuting_product_rule_check(4, 200, seed=3)
    assert rep.passed and rep.instances == 200
    assert rep["commuting_product_rule"].max_residual <= 1e-12


def test_diagonal_product_rule_oracle():
    projs = _diagonal_projectors(3)
    w = np.diag(DIAG.matrix).real
    for p, q, r in itertools.product(projs, repeat=3):
        dp, dq, dr = (np.diag(x.matrix).real for x in (p, q, r))
        if w @ dr == 0 or w @ (dp * dr) == 0:
            continue
        # classical ratio arithmetic on the diagonal
        expect = (w @ (dp * dq * dr)) / (w @ dr) - (w @ (dp * dr)) / (w @ dr) * (w @ (dp * dq * dr)) / (w @ (dp * dr))
        assert abs(expect) <= 1e-15
        assert abs(product_rule_residual(DIAG, p, q, r).delta) <= 1e-12


def test_delta_scan_commuting_mode():
    res = delta_scan(4, 200, (0.0, 1.0), seed=2, commuting=True)
    assert len(res) + res.rejected_null == 200
    assert all(abs(rec.delta) <= 1e-10 for rec in res)


def test_delta_scan_finds_violations_and_is_deterministic():
    a = delta_scan(2, 500, seed=11)
    b = delta_scan(2, 500, seed=11)
    assert [(x.index, x.delta) for x in a] == [(x.index, x.delta) for x in b]
    assert abs(a[0].delta) > 0.1
    mags = [abs(x.delta) for x in a]
    assert mags == sorted(mags, reverse=True)


def test_delta_scan_rejects_bad_arguments():
    with pytest.raises(InputError):
        delta_scan(1, 10)
    with pytest.raises(InputError):
        delta_scan(3, 0)
    with pytest.raises(InputError):
        product_rule_residual(DIAG, identity(3), identity(3), identity(3), "sideways")


def test_frame_computational_basis():
    rho = state_from_seed(5, 1)
    rep = frame_additivity_check(rho, resolutions=0, explicit=[computational_resolution(5)])
    assert rep["frame_sum"].max_residual <= 1e-13


def test_frame_rotated_basis_d3():
    rho = state_from_seed(3, 6)
    u = random_unitary(3, np.random.default_rng(6))
    res = [projector_onto_columns(u[:, [i]]) for i in range(3)]
    rep = frame_additivity_check(rho, resolutions=20, explicit=[res])
    assert rep.passed and not rep.warnings
    assert rep["frame_sum"].max_residual <= 1e-12


def test_frame_d2_warns():
    rep = frame_additivity_check(DensityMatrix(np.eye(2) / 2), resolutions=10)
    assert rep.passed
    assert any("dim=2" in w for w in rep.warnings)


@settings(max_examples=30, deadline=None)
@given(st_dim=dims, seed=seeds)
def test_commuting_family_has_zero_delta(st_dim, seed):
    p, q, r = commuting_family(st_dim, seed, 3)
    rho = state_from_seed(st_dim, seed, mix=0.5)
    try:
        rec = product_rule_residual(rho, p, q, r, B_THEN_A)
    except ConditioningOnNullError:
        return
    assert abs(rec.delta) <= 1e-12
