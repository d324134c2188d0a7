"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline

from .connection import connection_coefficients
from .errors import ModelDefinitionException, NumericFailureException
from .framebackends import NonFiniteException, StepOutOfDomainException
from .wittcore import NotNullPairModelException, lowered_brackets, structure_functions

DEFAULT_STEPS = 1000
DEFAULT_SPAN = (0.0, 1.0)
HORIZONTAL_TOLERANCE = 1e-12
LIGHTLIKE_TOLERANCE = 1e-8
EXP_MAX_NORM = 10.0


class Trajectory(object):
    """
    Discretized curve: grid times, chart points, frame velocities and the
    optional multiplier pair. accelerations, when recorded, are the frame
    components of nabla_c' c' from the integrator right-hand side.
    """

    def __init__(self, times, points, velocities, multipliers=None, accelerations=None,
                 kind='geodesic'):
        self.times = np.asarray(times, dtype=float)
        self.points = np.asarray(points, dtype=float)
        self.velocities = np.asarray(velocities, dtype=float)
        self.multipliers = None if multipliers is None else np.asarray(multipliers, dtype=float)
        self.accelerations = None if accelerations is None \
            else np.asarray(accelerations, dtype=float)
        self.kind = kind
        if self.times.ndim != 1 or len(self.times) < 2 or np.any(np.diff(self.times) <= 0):
            raise ModelDefinitionException('Trajectory grid must be strictly increasing')
        if not np.all(np.isfinite(self.velocities)):
            raise NonFiniteException('Trajectory velocities are not finite')

    @property
    def steps(self):
        return len(self.times) - 1

    @property
    def step(self):
        return (self.times[-1] - self.times[0]) / self.steps

    @property
    def endpoint(self):
        return self.points[-1]

    def __len__(self):
        return len(self.times)


def time_grid(span, steps):
    start, stop = (float(value) for value in span)
    if int(steps) < 1:
        raise BadIntegrationRequestException('At least one step is required, got {}'.format(steps))
    if not stop > start:
        raise BadIntegrationRequestException('Span {} is empty'.format(span))
    return np.linspace(start, stop, int(steps) + 1)


def runge_kutta(rhs, initial, times):
    """ Classical fixed-step RK4 on the given grid. """
    states = np.empty((len(times), len(initial)))
    states[0] = initial
    for k in range(len(times) - 1):
        t, h, y = times[k], times[k + 1] - times[k], states[k]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        states[k + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(states[k + 1])):
            raise NonFiniteException('Integration produced non-finite values at t={}'.format(t + h))
    return states


def time_derivative(values, step):
    """ Fourth order finite difference along axis 0 of a uniformly sampled array. """
    values = np.asarray(values, dtype=float)
    count = len(values)
    if count < 5:
        if count < 3:
            return np.repeat([(values[-1] - values[0]) / (step * (count - 1))], count, axis=0)
        return np.gradient(values, step, axis=0, edge_order=2)
    result = np.empty_like(values)
    result[2:-2] = (-values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]) / (12 * step)
    result[0] = (-25 * values[0] + 48 * values[1] - 36 * values[2]
                 + 16 * values[3] - 3 * values[4]) / (12 * step)
    result[1] = (-3 * values[0] - 10 * values[1] + 18 * values[2]
                 - 6 * values[3] + values[4]) / (12 * step)
    result[-1] = (25 * values[-1] - 48 * values[-2] + 36 * values[-3]
                  - 16 * values[-4] + 3 * values[-5]) / (12 * step)
    result[-2] = (3 * values[-1] + 10 * values[-2] - 18 * values[-3]
                  + 6 * values[-4] - values[-5]) / (12 * step)
    return result


def christoffel_action(model, x, v, w=None):
    """ Gamma(v, w)^c = v^a w^b Gamma[a, b, c]. """
    w = v if w is None else w
    return np.einsum('a,b,abc->c', v, w, connection_coefficients(model, x))


def integrate_geodesic(model, x0, v0, span=DEFAULT_SPAN, steps=DEFAULT_STEPS):
    """ nabla-geodesic: dv/dt = -Gamma(v, v), dx/dt = F(x) v. """
    times = time_grid(span, steps)
    d = model.backend.chart_dimension
    x0 = model.backend.check_point(x0)
    v0 = np.asarray(v0, dtype=float)

    def rhs(t, y):
        x, v = y[:d], y[d:]
        return np.concatenate([model.frame_matrix(x) @ v, -christoffel_action(model, x, v)])

    logging.debug('Integrating geodesic of {} from {} with {} steps'.format(model.name, x0, steps))
    states = runge_kutta(rhs, np.concatenate([x0, v0]), times)
    return Trajectory(times, states[:, :d], states[:, d:],
                      accelerations=np.zeros_like(states[:, d:]), kind='geodesic')


def develop_curve(model, x0, velocity, span=DEFAULT_SPAN, steps=DEFAULT_STEPS):
    """ Positions of the curve whose frame velocity at time t is velocity(t). """
    times = time_grid(span, steps)
    x0 = model.backend.check_point(x0)

    def rhs(t, x):
        return model.frame_matrix(x) @ np.asarray(velocity(t), dtype=float)

    points = runge_kutta(rhs, x0, times)
    velocities = np.array([velocity(t) for t in times], dtype=float)
    return Trajectory(times, points, velocities, kind='developed')


def covariant_accelerations(model, trajectory):
    """ nabla_c' c' in frame components, recorded or recovered from the grid. """
    if trajectory.accelerations is not None:
        return trajectory.accelerations
    rates = time_derivative(trajectory.velocities, trajectory.step)
    return np.array([rate + christoffel_action(model, x, v) for rate, x, v in
                     zip(rates, trajectory.points, trajectory.velocities)])


def velocity_rates(model, trajectory):
    """ dv/dt in frame components. """
    accelerations = covariant_accelerations(model, trajectory)
    return np.array([acceleration - christoffel_action(model, x, v) for acceleration, x, v in
                     zip(accelerations, trajectory.points, trajectory.velocities)])


class NullPairForms(object):
    """
    sigma = n*^flat, sigma* = n^flat and their derivatives at one point,
    all reduced to Gram-contracted structure functions.
    """

    def __init__(self, model, x):
        pair = model.null_pair
        if pair is None:
            raise NotNullPairModelException(
                'Model {} has no distinguished null pair'.format(model.name))
        if not pair.is_rank_one(model.grading):
            raise NotNullPairModelException(
                'Null pair of model {} spans blocks of rank > 1'.format(model.name))
        self.n, self.nstar = pair.slots
        self.structure = model.structure
        grading = model.grading
        null_blocks = pair.null_blocks(grading)
        self.screen = [label for label in grading.labels if label not in null_blocks]
        self.lowered = lowered_brackets(self.structure, structure_functions(model, x))

    @property
    def sigma(self):
        return self.structure.gram[self.nstar]

    @property
    def sigma_star(self):
        return self.structure.gram[self.n]

    @property
    def d_sigma(self):
        return -self.lowered[:, :, self.nstar]

    @property
    def d_sigma_star(self):
        return -self.lowered[:, :, self.n]

    def lie_sigma(self, z):
        """ (L_{E_z} sigma)(E_c) as a covector. """
        return -self.lowered[z, :, self.nstar]

    def lie_sigma_star(self, z):
        return -self.lowered[z, :, self.n]

    def lie_metric(self, z):
        """ (L_{E_z} g)(E_a, E_b). """
        return -self.lowered[z] - self.lowered[z].T

    def horizontal(self, v):
        """ Component of v in the screen H. """
        mask = np.zeros(len(v), dtype=bool)
        for label in self.screen:
            mask[self.structure.grading.slots(label)] = True
        return np.where(mask, v, 0.0)

    def horizontal_sharp(self, alpha):
        return self.structure.restricted_sharp(alpha, self.screen)

    def multiplier_rates(self, v, multipliers):
        """ Right-hand side of the 2x2 multiplier system along velocity v. """
        n, nstar = self.n, self.nstar
        matrix = np.array([[self.lie_sigma(n) @ v, self.lie_sigma_star(n) @ v],
                           [self.lie_sigma(nstar) @ v, self.lie_sigma_star(nstar) @ v]])
        source = 0.5 * np.array([v @ self.lie_metric(n) @ v, v @ self.lie_metric(nstar) @ v])
        return matrix @ multipliers + source

    def forcing(self, v, multipliers):
        """ lambda1 (i(v) d sigma)^sharp_H + lambda2 (i(v) d sigma*)^sharp_H. """
        lam1, lam2 = multipliers
        return (lam1 * self.horizontal_sharp(v @ self.d_sigma)
                + lam2 * self.horizontal_sharp(v @ self.d_sigma_star))


def integrate_normal_sr_geodesic(model, x0, v0, multipliers0, span=DEFAULT_SPAN,
                                 steps=DEFAULT_STEPS):
    """
    Normal sub-Riemannian geodesic: horizontal geodesic equation with the
    multiplier forcing, coupled to the linear multiplier system.
    """
    times = time_grid(span, steps)
    d, m = model.backend.chart_dimension, model.dimension
    x0 = model.backend.check_point(x0)
    v0 = np.asarray(v0, dtype=float)
    forms = NullPairForms(model, x0)
    vertical = abs(v0[forms.n]) + abs(v0[forms.nstar])
    if vertical > HORIZONTAL_TOLERANCE * max(1.0, np.linalg.norm(v0)):
        raise NonHorizontalStartException(
            'Initial velocity {} has null-plane components {}'.format(
                v0, (v0[forms.n], v0[forms.nstar])))

    def split(y):
        return y[:d], y[d:d + m], y[d + m:]

    def rhs(t, y):
        x, v, multipliers = split(y)
        forms = NullPairForms(model, x)
        acceleration = forms.forcing(v, multipliers)
        return np.concatenate([model.frame_matrix(x) @ v,
                               acceleration - christoffel_action(model, x, v),
                               forms.multiplier_rates(v, multipliers)])

    initial = np.concatenate([x0, v0, np.asarray(multipliers0, dtype=float)])
    logging.debug('Integrating normal sub-Riemannian geodesic of {} from {} with {}'.format(
        model.name, x0, multipliers0))
    states = runge_kutta(rhs, initial, times)
    points, velocities, multipliers = states[:, :d], states[:, d:d + m], states[:, d + m:]
    accelerations = np.array([NullPairForms(model, x).forcing(v, lam)
                              for x, v, lam in zip(points, velocities, multipliers)])
    drift = np.max(np.abs(velocities[:, [forms.n, forms.nstar]]))
    logging.debug('Horizontal drift of the normal geodesic: {}'.format(drift))
    return Trajectory(times, points, velocities, multipliers, accelerations, kind='normal_sr')


def _check_lightlike(model, trajectory, tolerance):
    pair = model.null_pair
    if pair is None:
        raise NotNullPairModelException(
            'Model {} has no distinguished null pair'.format(model.name))
    structure = model.structure
    for v in trajectory.velocities:
        scale = max(1.0, float(v @ v))
        outside = np.delete(v, list(pair.slots))
        if abs(structure.inner(v, v)) > tolerance * scale or \
                (outside.size and np.max(np.abs(outside)) > tolerance * np.sqrt(scale)):
            raise NotLightlikeException(
                'Velocity {} is not a null vector of the null plane'.format(v))


def lightlike_residual(model, trajectory, tolerance=LIGHTLIKE_TOLERANCE):
    """
    Maximum over the grid of
    |(L_c' sigma)(c') - sigma(c') (L_n* sigma*)(c')| and
    |(L_c' sigma*)(c') - sigma*(c') (L_n sigma)(c')|.
    (L_c' sigma)(c') is d/dt sigma(c') since the frame Gram matrix is constant.
    """
    _check_lightlike(model, trajectory, tolerance)
    first, second = lightlike_terms(model, trajectory)
    return float(np.max(np.abs(first))), float(np.max(np.abs(second)))


def lightlike_terms(model, trajectory):
    rates = velocity_rates(model, trajectory)
    first, second = [], []
    for x, v, rate in zip(trajectory.points, trajectory.velocities, rates):
        forms = NullPairForms(model, x)
        first.append(forms.sigma @ rate
                     - (forms.sigma @ v) * (forms.lie_sigma_star(forms.nstar) @ v))
        second.append(forms.sigma_star @ rate
                      - (forms.sigma_star @ v) * (forms.lie_sigma(forms.n) @ v))
    return np.array(first), np.array(second)


def null_plane_decomposition_residual(model, trajectory, tolerance=LIGHTLIKE_TOLERANCE):
    """
    Max norm of nabla_c' c' minus its expression through the two lightlike
    terms along n and n*, valid for any null curve in the null plane.
    """
    _check_lightlike(model, trajectory, tolerance)
    first, second = lightlike_terms(model, trajectory)
    accelerations = covariant_accelerations(model, trajectory)
    n, nstar = model.null_pair.slots
    expected = np.zeros_like(accelerations)
    expected[:, n] = first
    expected[:, nstar] = second
    return float(np.max(np.abs(accelerations - expected)))


class Functionals(object):
    def __init__(self, energy, length, action):
        self.energy = energy
        self._length = length
        self.action = action

    @property
    def length(self):
        if self._length is None:
            raise NegativeSpeedSquareException('Length is undefined: g(c\', c\') < 0 on the curve')
        return self._length

    @property
    def has_length(self):
        return self._length is not None

    @property
    def energy_lambda(self):
        return self.energy + self.action

    def to_dict(self):
        return {'E_K': self.energy, 'L_K': self._length,
                'A_lambda': self.action, 'E_lambda': self.energy_lambda}


def multiplier_values(trajectory, multipliers=None):
    """ (N+1, 2) multiplier samples from an explicit value, the trajectory or zero. """
    count = len(trajectory)
    if multipliers is None:
        if trajectory.multipliers is not None:
            return trajectory.multipliers
        return np.zeros((count, 2))
    values = np.asarray(multipliers, dtype=float)
    if values.shape == (2,):
        return np.tile(values, (count, 1))
    if values.shape != (count, 2):
        raise BadIntegrationRequestException(
            'Multipliers must be a pair or one pair per grid time, got {}'.format(values.shape))
    return values


def _action_density(model, points, velocities, multipliers):
    if not np.any(multipliers):
        return np.zeros(len(points))
    if model.null_pair is None:
        raise NotNullPairModelException(
            'Multipliers need a null pair, model {} has none'.format(model.name))
    n, nstar = model.null_pair.slots
    gram = model.gram
    sigma = velocities @ gram[nstar]
    sigma_star = velocities @ gram[n]
    return -(multipliers[:, 0] * sigma + multipliers[:, 1] * sigma_star)


def functionals(model, trajectory, multipliers=None):
    """ E_K, L_K and A_lambda by composite Simpson quadrature on the grid. """
    lam = multiplier_values(trajectory, multipliers)
    speed = np.einsum('ta,ab,tb->t', trajectory.velocities, model.gram, trajectory.velocities)
    energy = 0.5 * simpson(speed, x=trajectory.times)
    length = None
    if np.all(speed >= -LIGHTLIKE_TOLERANCE):
        length = float(simpson(np.sqrt(np.clip(speed, 0.0, None)), x=trajectory.times))
    action = simpson(_action_density(model, trajectory.points, trajectory.velocities, lam),
                     x=trajectory.times)
    return Functionals(float(energy), length, float(action))


class VariationField(object):
    """ Frame components w(t) of a variation with fixed endpoints. """

    def __init__(self, values):
        self.values = np.array(values, dtype=float)
        if np.any(self.values[0] != 0.0) or np.any(self.values[-1] != 0.0):
            raise BadIntegrationRequestException('A variation field must vanish at both endpoints')

    @classmethod
    def sine_modes(cls, times, amplitudes):
        """ w(t) = sum_k sin((k+1) pi s) a_k with s the normalized time. """
        times = np.asarray(times, dtype=float)
        s = (times - times[0]) / (times[-1] - times[0])
        amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=float))
        profiles = np.array([np.sin((k + 1) * np.pi * s) for k in range(len(amplitudes))])
        values = profiles.T @ amplitudes
        values[0] = 0.0
        values[-1] = 0.0
        return cls(values)

    @classmethod
    def zero(cls, count, dimension):
        return cls(np.zeros((count, dimension)))


def first_variation(model, trajectory, variation, multipliers=None):
    """
    d/ds E^lambda(c_s) at s = 0 for a horizontal curve, integrated from the
    pointwise first variation formula.
    """
    lam = multiplier_values(trajectory, multipliers)
    lam_rates = time_derivative(lam, trajectory.step)
    accelerations = covariant_accelerations(model, trajectory)
    gram = model.gram
    density = []
    for x, v, w, acc, mult, rate in zip(trajectory.points, trajectory.velocities,
                                        variation.values, accelerations, lam, lam_rates):
        forms = NullPairForms(model, x)
        n, nstar = forms.n, forms.nstar
        w_h = forms.horizontal(w)
        value = (-acc @ gram @ w_h
                 + mult[0] * (v @ forms.d_sigma @ w_h)
                 + mult[1] * (v @ forms.d_sigma_star @ w_h))
        value += (forms.sigma @ w) * (rate[0] - mult[0] * (forms.lie_sigma(n) @ v)
                                      - mult[1] * (forms.lie_sigma_star(n) @ v)
                                      + 0.5 * v @ forms.lie_metric(n) @ v)
        value += (forms.sigma_star @ w) * (rate[1] - mult[0] * (forms.lie_sigma(nstar) @ v)
                                           - mult[1] * (forms.lie_sigma_star(nstar) @ v)
                                           + 0.5 * v @ forms.lie_metric(nstar) @ v)
        density.append(value)
    return float(simpson(np.array(density), x=trajectory.times))


def _varied_points(model, trajectory, variation, s, substeps):
    points = []
    for x, w in zip(trajectory.points, variation.values):
        y = np.array(x, dtype=float)
        for _ in range(substeps):
            y = y + (s / substeps) * (model.frame_matrix(y) @ w)
        points.append(y)
    return np.array(points)


def _energy_lambda_of_points(model, times, points, multipliers):
    step = (times[-1] - times[0]) / (len(times) - 1)
    coordinate_velocities = time_derivative(points, step)
    velocities = np.array([np.linalg.solve(model.frame_matrix(x), xdot)
                           for x, xdot in zip(points, coordinate_velocities)])
    speed = np.einsum('ta,ab,tb->t', velocities, model.gram, velocities)
    action = _action_density(model, points, velocities, multipliers)
    return 0.5 * simpson(speed, x=times) + simpson(action, x=times)


def energy_variation_fd(model, trajectory, variation, multipliers=None, step=1e-4, substeps=8):
    """
    Central difference in s of E^lambda(c_s), c_s(t) the time-t flow of the
    frame field with components w(t) applied to c(t).
    """
    lam = multiplier_values(trajectory, multipliers)
    plus = _varied_points(model, trajectory, variation, step, substeps)
    minus = _varied_points(model, trajectory, variation, -step, substeps)
    return float((_energy_lambda_of_points(model, trajectory.times, plus, lam)
                  - _energy_lambda_of_points(model, trajectory.times, minus, lam)) / (2 * step))


def parallel_transport(model, trajectory, w0):
    """
    Transports a frame vector along a trajectory: dw/dt = -Gamma(c', w).
    Points and velocities between grid times come from cubic Hermite
    interpolation with the recorded derivatives.
    """
    times = trajectory.times
    coordinate_rates = np.array([model.frame_matrix(x) @ v for x, v in
                                 zip(trajectory.points, trajectory.velocities)])
    position = CubicHermiteSpline(times, trajectory.points, coordinate_rates, axis=0)
    velocity = CubicHermiteSpline(times, trajectory.velocities,
                                  velocity_rates(model, trajectory), axis=0)

    def rhs(t, w):
        return -christoffel_action(model, position(t), velocity(t), w)

    return runge_kutta(rhs, np.asarray(w0, dtype=float), times)


def exp_map(model, x, v, steps=DEFAULT_STEPS, max_norm=EXP_MAX_NORM):
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) > max_norm:
        raise StepOutOfDomainException(
            'Initial velocity norm {} exceeds the exponential map bound {}'.format(
                np.linalg.norm(v), max_norm))
    return integrate_geodesic(model, x, v, DEFAULT_SPAN, steps).endpoint


def inverse_exp_map(model, x, y, steps=200, tolerance=1e-10, max_iterations=50,
                    jacobian_step=1e-6):
    """
    v with exp(x, v) = y, by damped Newton shooting with a central
    difference Jacobian. The first guess is F(x)^-1 (y - x).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.linalg.solve(model.frame_matrix(x), y - x)

    def residual(candidate):
        return exp_map(model, x, candidate, steps) - y

    current = residual(v)
    for iteration in range(max_iterations):
        norm = np.linalg.norm(current)
        logging.debug('Shooting iteration {}: residual {}'.format(iteration, norm))
        if norm <= tolerance:
            return v
        jacobian = np.empty((len(y), len(v)))
        for k in range(len(v)):
            offset = np.zeros(len(v))
            offset[k] = jacobian_step
            jacobian[:, k] = (exp_map(model, x, v + offset, steps)
                              - exp_map(model, x, v - offset, steps)) / (2 * jacobian_step)
        direction = np.linalg.solve(jacobian, -current)
        damping = 1.0
        while damping > 1e-3:
            candidate = v + damping * direction
            trial = residual(candidate)
            if np.linalg.norm(trial) < norm:
                v, current = candidate, trial
                break
            damping /= 2.0
        else:
            raise ShootingDivergedException(
                'Shooting stalled after {} iterations'.format(iteration + 1), norm)
    norm = float(np.linalg.norm(current))
    if norm <= tolerance:
        return v
    raise ShootingDivergedException(
        'Shooting did not converge in {} iterations'.format(max_iterations), norm)


def symmetry_involution(model, v):
    """ delta_x: +1 on even blocks, -1 on odd blocks. """
    return model.grading.parity_signs() * np.asarray(v, dtype=float)


def local_symmetry_map(model, x, y, steps=200, tolerance=1e-10):
    """ psi_x(y) = exp_x(delta_x(exp_x^-1(y))). """
    model.grading.parity_signs()
    v = inverse_exp_map(model, x, y, steps, tolerance)
    return exp_map(model, x, symmetry_involution(model, v), steps)


class BadIntegrationRequestException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class NotLightlikeException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class NonHorizontalStartException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class NegativeSpeedSquareException(NumericFailureException):
    def __init__(self, message):
        super().__init__(message)


class ShootingDivergedException(NumericFailureException):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__('{} (last residual {})'.format(message, residual))
