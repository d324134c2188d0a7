"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import numpy as np
import pytest

from common.errors import ModelDefinitionException
from common.framebackends import LieConstantBackend, StepOutOfDomainException
from common.geodesics import (BadIntegrationRequestException, NegativeSpeedSquareException,
                              NonHorizontalStartException, NotLightlikeException, Trajectory,
                              VariationField, develop_curve, energy_variation_fd, exp_map,
                              first_variation, functionals, integrate_geodesic,
                              integrate_normal_sr_geodesic, inverse_exp_map, lightlike_residual,
                              local_symmetry_map, multiplier_values,
                              null_plane_decomposition_residual, parallel_transport, time_grid)
from common.manifolds import abelian, fefferman_heisenberg, oscillator
from common.wittcore import (BlockLabel, DistinguishedNullPair, FrameModel,
                             NotNullPairModelException, WittGrading, validate_witt_structure)

# fefferman_heisenberg(1) slots: n, n*, X, Y; chart (phi, t, x, y)
X_SLOT, Y_SLOT = 2, 3


def _frame_vector(dimension, **components):
    v = np.zeros(dimension)
    for slot, value in components.items():
        v[int(slot[1:])] = value
    return v


def _circle(k, steps, span=(0.0, np.pi)):
    model = fefferman_heisenberg(1)
    v0 = _frame_vector(4, s2=1.0)
    return integrate_normal_sr_geodesic(model, np.zeros(4), v0, [0.0, k], span, steps)


def test__time_grid__no_steps__bad_integration_request():
    with pytest.raises(BadIntegrationRequestException):
        time_grid((0.0, 1.0), 0)


def test__time_grid__empty_span__bad_integration_request():
    with pytest.raises(BadIntegrationRequestException):
        time_grid((1.0, 1.0), 10)


def test__trajectory__decreasing_grid__model_definition_exception():
    with pytest.raises(ModelDefinitionException):
        Trajectory([0.0, 0.5, 0.2], np.zeros((3, 2)), np.zeros((3, 2)))


def test__integrate_geodesic__abelian__straight_line():
    model = abelian(3)
    x0, v0 = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.4, -1.0])

    trajectory = integrate_geodesic(model, x0, v0, (0.0, 2.0), 50)

    expected = x0 + np.outer(trajectory.times, v0)
    np.testing.assert_allclose(trajectory.points, expected, atol=1e-13)
    assert trajectory.steps == 50
    assert len(trajectory) == 51
    assert trajectory.step == pytest.approx(0.04)


def test__integrate_geodesic__osc__speed_square_conserved():
    model = oscillator([1.0])
    v0 = np.array([0.5, -0.3, 0.8, 0.2])

    trajectory = integrate_geodesic(model, np.zeros(4), v0, (0.0, 1.0), 400)

    speeds = np.einsum('ta,ab,tb->t', trajectory.velocities, model.gram, trajectory.velocities)
    assert np.max(np.abs(speeds - speeds[0])) < 1e-9


def test__integrate_normal_sr_geodesic__fefferman_constant_multiplier__circle():
    k = 2.0

    trajectory = _circle(k, 1000)

    x, y = trajectory.points[:, X_SLOT], trajectory.points[:, Y_SLOT]
    radius = np.hypot(x, y - 1.0 / k)
    assert np.max(np.abs(radius - 1.0 / abs(k))) < 1e-9
    np.testing.assert_allclose(trajectory.multipliers, np.tile([0.0, k], (1001, 1)), atol=1e-14)
    assert np.max(np.abs(trajectory.velocities[:, :2])) < 1e-14


def test__integrate_normal_sr_geodesic__zero_multipliers__straight_line():
    trajectory = _circle(0.0, 100, span=(0.0, 1.0))

    np.testing.assert_allclose(trajectory.points[:, X_SLOT], trajectory.times, atol=1e-13)
    assert np.max(np.abs(trajectory.points[:, Y_SLOT])) < 1e-13


def test__integrate_normal_sr_geodesic__halving_step__fourth_order_error():
    # the velocity turns a full circle on (0, pi) with k = 2
    coarse = _circle(2.0, 40).velocities[-1]
    fine = _circle(2.0, 80).velocities[-1]
    exact = _frame_vector(4, s2=1.0)

    ratio = np.linalg.norm(coarse - exact) / np.linalg.norm(fine - exact)

    assert 12.0 < ratio < 20.0


def test__integrate_normal_sr_geodesic__vertical_start__non_horizontal_start():
    model = fefferman_heisenberg(1)

    with pytest.raises(NonHorizontalStartException):
        integrate_normal_sr_geodesic(model, np.zeros(4), _frame_vector(4, s0=1.0, s2=1.0),
                                     [0.0, 1.0])


def test__integrate_normal_sr_geodesic__no_null_pair__not_null_pair_model():
    with pytest.raises(NotNullPairModelException):
        integrate_normal_sr_geodesic(abelian(2), np.zeros(2), [1.0, 0.0], [0.0, 0.0])


def _rank_two_null_pair_model():
    # slots p1: 0, 1; p1*: 2, 3; q1: 4
    p1 = BlockLabel.isotropic(1)
    grading = WittGrading([(p1, 2), (p1.star(), 2), (BlockLabel.anisotropic(1), 1)])
    gram = np.zeros((5, 5))
    gram[0, 2] = gram[2, 0] = gram[1, 3] = gram[3, 1] = gram[4, 4] = 1.0
    structure = validate_witt_structure(grading, gram)
    return FrameModel(structure, LieConstantBackend(np.zeros((5, 5, 5))),
                      DistinguishedNullPair(0, 2), name='rank_two')


def test__integrate_normal_sr_geodesic__null_pair_not_rank_one__not_null_pair_model():
    model = _rank_two_null_pair_model()

    with pytest.raises(NotNullPairModelException):
        integrate_normal_sr_geodesic(model, np.zeros(5), np.eye(5)[4], [0.0, 0.0])


def test__lightlike_residual__fefferman_n_geodesic__vanishes():
    model = fefferman_heisenberg(1)

    trajectory = integrate_geodesic(model, np.zeros(4), _frame_vector(4, s0=1.0), (0.0, 1.0), 100)

    first, second = lightlike_residual(model, trajectory)
    assert first < 1e-9
    assert second < 1e-9
    assert null_plane_decomposition_residual(model, trajectory) < 1e-9


@pytest.mark.parametrize('velocity', [{'s0': 1.0, 's1': 1.0}, {'s2': 1.0}])
def test__lightlike_residual__not_null_velocity__not_lightlike(velocity):
    model = fefferman_heisenberg(1)
    trajectory = integrate_geodesic(model, np.zeros(4), _frame_vector(4, **velocity),
                                    (0.0, 0.1), 10)

    with pytest.raises(NotLightlikeException):
        lightlike_residual(model, trajectory)


def test__functionals__abelian_unit_line__energy_and_length():
    model = abelian(3)
    trajectory = integrate_geodesic(model, np.zeros(3), [1.0, 0.0, 0.0], (0.0, 1.0), 20)

    values = functionals(model, trajectory)

    assert values.energy == pytest.approx(0.5)
    assert values.length == pytest.approx(1.0)
    assert values.action == 0.0
    assert values.energy_lambda == values.energy
    assert values.to_dict() == {'E_K': values.energy, 'L_K': values.length,
                                'A_lambda': 0.0, 'E_lambda': values.energy}


def test__functionals__timelike_velocity__length_raises():
    model = fefferman_heisenberg(1)
    velocities = np.tile(_frame_vector(4, s0=1.0, s1=-1.0), (5, 1))
    trajectory = Trajectory(np.linspace(0.0, 1.0, 5), np.zeros((5, 4)), velocities)

    values = functionals(model, trajectory)

    assert values.energy == pytest.approx(-1.0)
    assert not values.has_length
    assert values.to_dict()['L_K'] is None
    with pytest.raises(NegativeSpeedSquareException):
        values.length


def test__functionals__constant_multipliers__action_pairs_with_null_components():
    model = fefferman_heisenberg(1)
    velocities = np.tile(_frame_vector(4, s0=2.0, s2=1.0), (9, 1))
    trajectory = Trajectory(np.linspace(0.0, 1.0, 9), np.zeros((9, 4)), velocities)

    values = functionals(model, trajectory, [0.5, 3.0])

    # sigma(c') = g(n*, c') = 2 and sigma*(c') = g(n, c') = 0
    assert values.action == pytest.approx(-1.0)


def test__multiplier_values__wrong_shape__bad_integration_request():
    trajectory = integrate_geodesic(abelian(2), np.zeros(2), [1.0, 0.0], (0.0, 1.0), 4)

    with pytest.raises(BadIntegrationRequestException):
        multiplier_values(trajectory, np.zeros((3, 2)))


def test__variation_field__nonzero_endpoint__bad_integration_request():
    with pytest.raises(BadIntegrationRequestException):
        VariationField(np.ones((4, 2)))


def test__first_variation__zero_field__zero():
    model = fefferman_heisenberg(1)
    trajectory = _circle(1.0, 200, span=(0.0, 1.0))

    value = first_variation(model, trajectory, VariationField.zero(len(trajectory), 4))

    assert value == 0.0


def test__first_variation__normal_geodesic_horizontal_variation__stationary():
    model = fefferman_heisenberg(1)
    trajectory = _circle(1.5, 400, span=(0.0, 1.0))
    variation = VariationField.sine_modes(trajectory.times,
                                          [[0.0, 0.0, 0.3, -0.2], [0.0, 0.0, 0.1, 0.4]])

    assert abs(first_variation(model, trajectory, variation)) < 1e-5


@pytest.mark.parametrize('multipliers', [None, [0.3, 0.7]])
def test__first_variation__developed_horizontal_curve__matches_energy_difference(multipliers):
    model = fefferman_heisenberg(1)
    trajectory = develop_curve(model, np.zeros(4),
                               lambda t: [0.0, 0.0, np.cos(t), 0.5 + np.sin(2 * t)],
                               (0.0, 1.0), 400)
    variation = VariationField.sine_modes(trajectory.times,
                                          [[0.0, 0.0, 0.2, -0.1], [0.0, 0.0, 0.05, 0.3]])

    formula = first_variation(model, trajectory, variation, multipliers)
    difference = energy_variation_fd(model, trajectory, variation, multipliers)

    assert trajectory.kind == 'developed'
    assert formula == pytest.approx(difference, rel=1e-4, abs=1e-8)


def test__exp_map__zero_velocity__base_point():
    x = np.array([0.1, 0.2, -0.3, 0.4])

    np.testing.assert_allclose(exp_map(oscillator([1.0]), x, np.zeros(4), steps=20), x)


def test__exp_map__abelian__translation():
    x, v = np.array([1.0, 2.0]), np.array([-0.5, 0.25])

    np.testing.assert_allclose(exp_map(abelian(2), x, v, steps=10), x + v, atol=1e-14)


def test__exp_map__too_long__step_out_of_domain():
    with pytest.raises(StepOutOfDomainException):
        exp_map(abelian(2), np.zeros(2), [11.0, 0.0])


def test__inverse_exp_map__osc__recovers_velocity():
    model = oscillator([1.0])
    x = np.zeros(4)
    v = np.array([0.1, -0.2, 0.05, 0.1])
    y = exp_map(model, x, v, steps=200)

    np.testing.assert_allclose(inverse_exp_map(model, x, y), v, atol=1e-7)


def test__local_symmetry_map__abelian__reflects_odd_blocks():
    base = abelian(4, True)
    model = base.with_grading(base.grading.with_indices({}))
    x, y = np.array([1.0, 0.0, 2.0, -1.0]), np.array([1.5, 0.5, 1.0, 0.0])

    image = local_symmetry_map(model, x, y)

    # p1 and p1* are odd, q1 is even
    np.testing.assert_allclose(image, x + np.array([-1.0, -1.0, 1.0, 1.0]) * (y - x), atol=1e-12)
    np.testing.assert_allclose(local_symmetry_map(model, x, x), x, atol=1e-12)


def test__parallel_transport__osc_geodesic__preserves_inner_products():
    model = oscillator([1.0])
    trajectory = integrate_geodesic(model, np.zeros(4), [0.4, -0.6, 0.3, 0.7], (0.0, 1.0), 200)
    w0 = np.array([1.0, 0.5, -0.2, 0.3])

    transported = parallel_transport(model, trajectory, w0)

    norms = np.einsum('ta,ab,tb->t', transported, model.gram, transported)
    pairings = np.einsum('ta,ab,tb->t', transported, model.gram, trajectory.velocities)
    assert np.max(np.abs(norms - norms[0])) < 1e-7
    assert np.max(np.abs(pairings - pairings[0])) < 1e-7
