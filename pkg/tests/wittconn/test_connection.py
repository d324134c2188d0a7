"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import os

import numpy as np
import pytest

from common.connection import (canonical_torsion, compatibility_report, connection_coefficients,
                               connection_jet, connection_residuals, contorsion,
                               covariant_derivative, one_form_derivative_identity, tau_tensor)
from common.manifolds import abelian, fefferman_heisenberg, hyperbolic_oscillator, oscillator
from common.manifoldspec import build_model, load_manifold_spec_file
from common.wittcore import structure_functions
from tests.wittconn.sympyoracles import CoordinateOracle

SPECS = os.path.join(os.path.dirname(__file__), '..', '..', 'specs')


def _riemannian_chart():
    return build_model(load_manifold_spec_file(os.path.join(SPECS, 'riemannian_chart.json')))


def test__tau_tensor__same_block__zero():
    model = oscillator([1.0, 2.0])

    for label in model.grading.labels:
        assert not np.any(tau_tensor(model, None, label, label))


def test__tau_tensor__abelian__zero():
    model = abelian(4, null_pair=True)

    for i in model.grading.labels:
        for j in model.grading.labels:
            assert not np.any(tau_tensor(model, None, i, j))


def test__tau_tensor__osc_n_into_q1__brute_force_value():
    model = oscillator([1.5])
    gram, gram_inverse = model.gram, model.structure.gram_inverse
    c = structure_functions(model)
    n, e1 = 3, 0
    rows, dual = model.grading.slots('q1'), model.grading.slots('q1')

    # g(tau(n, e1), Z) = 1/2 ((L_n e1^flat)(Z) - g([n, e1], Z)) for Z in q1
    lie = np.array([-(c[n, z] @ gram[:, e1]) for z in range(4)])
    expected = 0.5 * (lie @ gram_inverse - c[n, e1])
    expected[[k for k in range(4) if k not in rows]] = 0.0

    value = tau_tensor(model, None, 'p1', 'q1')[n, e1]

    np.testing.assert_allclose(value, expected, atol=1e-14)
    assert set(np.nonzero(value)[0]) <= set(dual)


def test__canonical_torsion__abelian__zero():
    assert not np.any(canonical_torsion(abelian(5, null_pair=True)))


def test__canonical_torsion__osc__e1_e2_is_minus_eps0():
    torsion = canonical_torsion(oscillator([1.0]))

    np.testing.assert_allclose(torsion[0, 1], [0.0, 0.0, -1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(torsion[1, 0], [0.0, 0.0, 1.0, 0.0], atol=1e-15)


def test__canonical_torsion__osc__screen_pairs_only_along_nstar():
    model = oscillator([1.0, 2.0])
    torsion = canonical_torsion(model)
    screen = list(range(4))
    nstar = model.null_pair.nstar_slot

    for a in screen:
        for b in screen:
            outside = np.delete(torsion[a, b], nstar)
            assert not np.any(np.abs(outside) > 1e-14)


def test__canonical_torsion__osc__nstar_row_vanishes():
    model = oscillator([1.0, 2.0])

    torsion = canonical_torsion(model)

    assert np.max(np.abs(torsion[model.null_pair.nstar_slot])) < 1e-14


def test__canonical_torsion__osc__n_row_keeps_the_rotation_between_screen_blocks():
    # ad(n) maps q1 onto q2, the connection keeps both blocks, the torsion carries the bracket
    lam = [1.0, 2.0]
    model = oscillator(lam)
    torsion = canonical_torsion(model)
    n = model.null_pair.n_slot

    for i, value in enumerate(lam):
        expected = np.zeros(6)
        expected[2 + i] = -value
        np.testing.assert_allclose(torsion[n, i], expected, atol=1e-14)


@pytest.mark.parametrize('model', [oscillator([1.0]), oscillator([1.0, 3.0]),
                                   hyperbolic_oscillator([1.0, 2.0]), abelian(4, True)])
def test__connection_coefficients__builtin_models__torsion_roundtrip_and_metricity(model):
    c = structure_functions(model)
    torsion = canonical_torsion(model)

    gamma = connection_coefficients(model)

    recomputed = gamma - np.transpose(gamma, (1, 0, 2)) - c
    np.testing.assert_allclose(recomputed, torsion, atol=1e-12)
    lowered = np.einsum('abk,kc->abc', gamma, model.gram)
    np.testing.assert_allclose(lowered, -np.transpose(lowered, (0, 2, 1)), atol=1e-12)


def test__connection_coefficients__abelian__zero():
    assert not np.any(connection_coefficients(abelian(4)))


def test__connection_coefficients__riemannian_chart__matches_levi_civita_oracle():
    model = _riemannian_chart()
    oracle = CoordinateOracle(['x', 'y'], [['1', '0'], ['x', '1 + x * x']], np.eye(2))

    for point in ([0.3, -0.4], [1.2, 0.5], [-0.7, 1.1]):
        np.testing.assert_allclose(connection_coefficients(model, np.array(point)),
                                   oracle.coefficients(point), atol=1e-10)


def test__connection_coefficients__riemannian_chart__torsion_free():
    model = _riemannian_chart()

    assert not np.any(canonical_torsion(model, np.array([0.4, 0.1])))


def test__contorsion__antisymmetric_in_last_pair():
    model = oscillator([1.0, 2.0])

    K = contorsion(model.structure, canonical_torsion(model))

    np.testing.assert_allclose(K, -np.transpose(K, (0, 2, 1)), atol=1e-14)


@pytest.mark.parametrize('model', [oscillator([1.0]), hyperbolic_oscillator([2.0]),
                                   abelian(4, True)])
def test__covariant_derivative__gram__vanishes(model):
    nabla_g = covariant_derivative(model, model.gram, 'dd')

    assert np.max(np.abs(nabla_g)) < 1e-12


def test__covariant_derivative__abelian_constant_tensor__zero():
    tensor = np.random.default_rng(5).normal(size=(4, 4, 4))

    result = covariant_derivative(abelian(4), tensor, 'udu')

    assert not np.any(result)


def test__covariant_derivative__vector_field__coefficient_rows():
    model = oscillator([1.0])
    gamma = connection_coefficients(model)
    e = np.zeros(4)
    e[1] = 1.0

    result = covariant_derivative(model, e, 'u')

    np.testing.assert_allclose(result, gamma[:, 1, :], atol=1e-15)


def test__covariant_derivative__bad_valence__value_error():
    with pytest.raises(ValueError):
        covariant_derivative(oscillator([1.0]), np.zeros((4, 4)), 'd')


def test__one_form_derivative_identity__osc_random_vectors__sides_agree():
    model = oscillator([1.0, 2.0])
    rng = np.random.default_rng(11)

    for _ in range(10):
        X, Y, Z = rng.normal(size=(3, 6))
        left, right = one_form_derivative_identity(model, None, X, Y, Z)
        assert left == pytest.approx(right, abs=1e-12)


def test__compatibility_report__osc__below_lie_tolerance():
    report = compatibility_report(oscillator([1.0]))

    assert report.samples == 1
    assert report.max_residual() < 1e-12


def test__compatibility_report__abelian__exactly_zero():
    report = compatibility_report(abelian(4))

    assert report.residuals == {'metricity': 0.0, 'block_escape': 0.0, 'torsion_roundtrip': 0.0}


def test__compatibility_report__fefferman_chart__below_chart_tolerance():
    model = fefferman_heisenberg(1)
    points = [np.array([0.1, 0.2, -0.3, 0.4]), np.array([-0.5, 0.0, 0.6, 0.2])]

    report = compatibility_report(model, points)

    assert report.samples == 2
    assert report.max_residual() < 1e-9


def test__connection_residuals__corrupted_coefficient__detected():
    model = oscillator([1.0])
    c = structure_functions(model)
    torsion = canonical_torsion(model)
    gamma = connection_coefficients(model).copy()
    gamma[0, 1, 0] += 0.1

    residuals = connection_residuals(model.structure, gamma, c, torsion)

    assert residuals['metricity'] > 0.01
    assert residuals['block_escape'] > 0.01
    assert residuals['torsion_roundtrip'] > 0.01


def test__connection_jet__chart__frame_derivatives_match_central_difference():
    model = fefferman_heisenberg(1)
    x = np.array([0.1, -0.2, 0.3, 0.5])
    step = 1e-5
    jet = connection_jet(model, x)
    frame = model.frame_matrix(x)

    for a in range(4):
        ahead = connection_coefficients(model, x + step * frame[:, a])
        behind = connection_coefficients(model, x - step * frame[:, a])
        np.testing.assert_allclose(jet.coefficient_derivatives[a], (ahead - behind) / (2 * step),
                                   atol=1e-8)


def test__connection_coefficients__constant_backend__memoized(mocker):
    model = oscillator([1.0])
    connection_coefficients(model)
    spy = mocker.spy(model.backend, 'structure_functions')

    connection_coefficients(model, np.ones(4))

    assert spy.call_count == 0
