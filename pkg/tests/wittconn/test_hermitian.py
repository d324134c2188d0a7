"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import numpy as np
import pytest

from common.connection import canonical_torsion
from common.errors import ModelDefinitionException
from common.hermitian import (FeffermanData, JNotAdaptedException, NotFeffermanModelException,
                              NotScreenException, ScreenHermitianData,
                              fefferman_multiplier_diagnostic, lichnerowicz_connection,
                              lichnerowicz_torsion, lichnerowicz_torsion_terms, nijenhuis,
                              nijenhuis_tensor, robinson_symmetric_report)
from common.geodesics import integrate_geodesic, integrate_normal_sr_geodesic
from common.manifolds import abelian, fefferman_heisenberg, oscillator
from common.wittcore import NotNullPairModelException, structure_functions


def _bracket(c, u, v):
    return np.einsum('a,b,abk->k', u, v, c)


def _brute_force_nijenhuis(c, J, screen):
    m = c.shape[0]
    result = np.zeros((m, m, m))
    basis = np.eye(m)
    for a in screen:
        for b in screen:
            X, Y = basis[a], basis[b]
            result[a, b] = (_bracket(c, X, Y) - _bracket(c, J @ X, J @ Y)
                            + J @ _bracket(c, J @ X, Y) + J @ _bracket(c, X, J @ Y))
    return result


def _twisted_fefferman_structure():
    # J X1 = X2, J Y1 = -Y2 on fefferman_heisenberg(2), slots n, n*, X1, X2, Y1, Y2
    J = np.zeros((6, 6))
    J[3, 2] = 1.0
    J[2, 3] = -1.0
    J[5, 4] = -1.0
    J[4, 5] = 1.0
    return J


@pytest.mark.parametrize('m', [1, 2])
def test__lichnerowicz_torsion__fefferman__equals_canonical_torsion(m):
    model = fefferman_heisenberg(m)
    x = np.linspace(-0.4, 0.5, 2 * m + 2)

    np.testing.assert_allclose(lichnerowicz_torsion(model, x=x), canonical_torsion(model, x),
                               atol=1e-12)


def test__nijenhuis__fefferman_standard_structure__integrable():
    model = fefferman_heisenberg(2)
    data = ScreenHermitianData(model, model.complex_structure)

    tensor = nijenhuis_tensor(data, structure_functions(model, np.full(6, 0.3)))

    assert np.max(np.abs(tensor)) < 1e-14


def test__nijenhuis__twisted_structure__minus_two_nstar():
    model = fefferman_heisenberg(2)
    X1, Y1 = np.eye(6)[2], np.eye(6)[4]

    value = nijenhuis(model, _twisted_fefferman_structure(), np.zeros(6), X1, Y1)

    np.testing.assert_allclose(value, [0.0, -2.0, 0.0, 0.0, 0.0, 0.0], atol=1e-14)


@pytest.mark.parametrize('model, J', [
    (oscillator([1.0, 2.0]), None),
    (fefferman_heisenberg(2), None),
    (fefferman_heisenberg(2), _twisted_fefferman_structure()),
])
def test__nijenhuis_tensor__matches_brute_force_brackets(model, J):
    data = ScreenHermitianData(model, model.complex_structure if J is None else J)
    c = structure_functions(model, model.origin() + 0.2)

    np.testing.assert_allclose(nijenhuis_tensor(data, c),
                               _brute_force_nijenhuis(c, data.matrix, data.screen), atol=1e-13)


def test__nijenhuis__null_argument__not_screen():
    model = fefferman_heisenberg(1)

    with pytest.raises(NotScreenException):
        nijenhuis(model, None, np.zeros(4), np.eye(4)[0], np.eye(4)[2])


def test__lichnerowicz_connection__fefferman__metric_and_parallel_structure():
    model = fefferman_heisenberg(1)

    report = lichnerowicz_connection(model, x=np.array([0.2, -0.3, 0.5, 0.1]))

    assert report.metricity < 1e-12
    assert report.parallel_J < 1e-12
    assert report.block_escape < 1e-12


params = [np.zeros(6), np.linspace(-0.3, 0.4, 6)]


@pytest.mark.parametrize('x', params)
def test__lichnerowicz_connection__twisted_structure__metric_and_parallel_structure(x):
    model = fefferman_heisenberg(2)

    report = lichnerowicz_connection(model, _twisted_fefferman_structure(), x)

    assert report.metricity <= 1e-9
    assert report.parallel_J <= 1e-9
    assert report.block_escape <= 1e-9
    # [X1, Y1] = -n*, so the null part of T(X1, Y1) is +n*
    np.testing.assert_allclose(report.torsion[2, 4][:2], [0.0, 1.0], atol=1e-9)


def test__lichnerowicz_connection__abelian__flat():
    report = lichnerowicz_connection(abelian(4, null_pair=True))

    assert not np.any(report.torsion)
    assert not np.any(report.coefficients)
    assert report.residuals == {'metricity': 0.0, 'parallel_J': 0.0, 'block_escape': 0.0}


def test__lichnerowicz_torsion_terms__osc__null_forms_carry_screen_brackets():
    model = oscillator([1.0])

    terms = lichnerowicz_torsion_terms(model)

    # [e1, e2] = eps0 = n*, so d sigma*(e1, e2) = -g(eps0, eps1) = -1 lands on the n* slot
    expected = np.zeros((4, 4, 4))
    expected[0, 1, 2] = -1.0
    expected[1, 0, 2] = 1.0
    np.testing.assert_allclose(terms['null_forms'], expected, atol=1e-15)
    assert not np.any(terms['null_bracket'])


def test__lichnerowicz_torsion_terms__osc__nijenhuis_term_is_quarter_tensor():
    model = oscillator([1.0, 3.0])
    data = ScreenHermitianData(model, model.complex_structure)
    c = structure_functions(model)

    terms = lichnerowicz_torsion_terms(model)

    np.testing.assert_allclose(terms['nijenhuis'],
                               -0.25 * _brute_force_nijenhuis(c, data.matrix, data.screen)
                               * data.screen_mask(),
                               atol=1e-15)
    assert list(terms) == ['nijenhuis', 'dc_omega', 'null_forms', 'screen_tau', 'omega_lie',
                           'null_bracket']


def test__lichnerowicz_torsion__osc__sum_of_terms_and_antisymmetric():
    model = oscillator([1.0, 2.0])

    torsion = lichnerowicz_torsion(model)

    np.testing.assert_allclose(torsion, sum(lichnerowicz_torsion_terms(model).values()))
    np.testing.assert_allclose(torsion, -np.transpose(torsion, (1, 0, 2)), atol=1e-14)
    assert lichnerowicz_connection(model).metricity < 1e-12


def test__screen_hermitian_data__not_complex__j_not_adapted():
    model = fefferman_heisenberg(1)

    with pytest.raises(JNotAdaptedException):
        ScreenHermitianData(model, np.eye(2))


def test__screen_hermitian_data__nonzero_on_null_pair__j_not_adapted():
    model = fefferman_heisenberg(1)
    J = np.array(model.complex_structure)
    J[0, 2] = 1.0

    with pytest.raises(JNotAdaptedException):
        ScreenHermitianData(model, J)


def test__screen_hermitian_data__wrong_shape__j_not_adapted():
    with pytest.raises(JNotAdaptedException):
        ScreenHermitianData(fefferman_heisenberg(1), np.zeros((3, 3)))


def test__screen_hermitian_data__no_null_pair__not_null_pair_model():
    with pytest.raises(NotNullPairModelException):
        ScreenHermitianData(abelian(4), np.zeros((4, 4)))


def test__screen_hermitian_data__screen_block_j__embedded_on_frame():
    data = ScreenHermitianData(abelian(4, True), [[0.0, -1.0], [1.0, 0.0]])

    assert data.matrix[3, 2] == 1.0
    assert not np.any(data.matrix[:2]) and not np.any(data.matrix[:, :2])
    np.testing.assert_array_equal(data.omega[2:, 2:], [[0.0, 1.0], [-1.0, 0.0]])


def test__fefferman_data__zero_dimension__model_definition_exception():
    with pytest.raises(ModelDefinitionException):
        FeffermanData(0)


def test__fefferman_multiplier_diagnostic__flat_circle__all_residuals_vanish():
    model = fefferman_heisenberg(1)
    v0 = np.array([0.0, 0.0, 1.0, 0.0])
    trajectory = integrate_normal_sr_geodesic(model, np.zeros(4), v0, [0.0, 2.0], (0.0, 1.0), 400)

    diagnostic = fefferman_multiplier_diagnostic(model, trajectory=trajectory)

    assert diagnostic.lambda1_drift < 1e-8
    assert diagnostic.lambda2_residual < 1e-8
    assert diagnostic.acceleration_residual < 1e-8
    assert diagnostic.sasaki_residual < 1e-7
    assert diagnostic.sasaki_applicable is True
    assert set(diagnostic.to_dict()) == {'lambda1_drift', 'lambda2_residual',
                                         'acceleration_residual', 'sasaki_residual',
                                         'sasaki_applicable'}


def test__fefferman_multiplier_diagnostic__plain_geodesic__not_fefferman_model():
    model = fefferman_heisenberg(1)
    trajectory = integrate_geodesic(model, np.zeros(4), [0.0, 0.0, 1.0, 0.0], (0.0, 1.0), 10)

    with pytest.raises(NotFeffermanModelException):
        fefferman_multiplier_diagnostic(model, trajectory=trajectory)


def test__fefferman_multiplier_diagnostic__model_without_fefferman_data__raises():
    model = oscillator([1.0])
    trajectory = integrate_normal_sr_geodesic(model, np.zeros(4), [1.0, 0.0, 0.0, 0.0],
                                              [0.0, 0.0], (0.0, 1.0), 10)

    with pytest.raises(NotFeffermanModelException):
        fefferman_multiplier_diagnostic(model, trajectory=trajectory)


def test__robinson_symmetric_report__fefferman__lie_and_foliation_residuals_vanish():
    model = fefferman_heisenberg(1)

    report = robinson_symmetric_report(model, points=[np.array([0.1, 0.2, -0.3, 0.4])])

    for field in ('foliation', 'lie_n_sigma', 'lie_nstar_sigma', 'lie_n_sigma_star',
                  'lie_nstar_sigma_star'):
        assert report.residuals[field] < 1e-12
    assert report.samples == 1


def test__robinson_symmetric_report__abelian__all_zero():
    report = robinson_symmetric_report(abelian(4, True))

    assert report.max_residual() == 0.0
    assert set(report.residuals) == set(report.FIELDS)
