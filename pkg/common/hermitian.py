"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.

Real presentation of the Robinson layer: a complex structure J on the
screen (every block outside the null pair), its fundamental form, the
Lichnerowicz connection and the Fefferman diagnostics.
"""

import logging
from collections import OrderedDict

import numpy as np
from scipy.integrate import cumulative_simpson

from .connection import (ConnectionJet, coefficients_from_torsion, covariant_derivative,
                         frame_derivative)
from .curvature import curvature_from_jet, frame_stencil
from .errors import ModelDefinitionException
from .geodesics import covariant_accelerations
from .sampling import sample_points
from .wittcore import NotNullPairModelException, lowered_brackets, structure_functions

J_TOLERANCE = 1e-12


class ScreenHermitianData(object):
    """
    J on the screen S as a frame matrix (column a is J E_a), zero on the
    null pair, and omega(E_a, E_b) = g(J E_a, E_b).
    """

    def __init__(self, model, J):
        pair = model.null_pair
        if pair is None or not pair.is_rank_one(model.grading):
            raise NotNullPairModelException(
                'The Robinson layer needs a rank one null pair, model {} has none'.format(
                    model.name))
        self.model = model
        self.n, self.nstar = pair.slots
        null_blocks = pair.null_blocks(model.grading)
        self.screen_labels = [label for label in model.grading.labels if label not in null_blocks]
        self.screen = np.sort(np.concatenate(
            [model.grading.slots(label) for label in self.screen_labels]))
        self.matrix = self._embed(np.asarray(J, dtype=float), model.dimension)
        self._validate()
        gram = model.gram
        self.omega = self.matrix.T @ gram
        self._screen_inverse = np.linalg.inv(gram[np.ix_(self.screen, self.screen)])

    def _embed(self, J, m):
        size = len(self.screen)
        if J.shape == (size, size):
            full = np.zeros((m, m))
            full[np.ix_(self.screen, self.screen)] = J
            return full
        if J.shape != (m, m):
            raise JNotAdaptedException(
                'J must be {0}x{0} on the screen or {1}x{1} on the frame, got {2}'.format(
                    size, m, J.shape))
        null = [self.n, self.nstar]
        if np.any(J[null, :] != 0.0) or np.any(J[:, null] != 0.0):
            raise JNotAdaptedException('J must vanish on the null pair')
        return J.copy()

    def _validate(self):
        S = np.ix_(self.screen, self.screen)
        J = self.matrix[S]
        gram = self.model.gram[S]
        if not np.allclose(J @ J, -np.eye(len(self.screen)), rtol=0.0, atol=J_TOLERANCE):
            raise JNotAdaptedException('J does not square to -1 on the screen')
        if not np.allclose(J.T @ gram @ J, gram, rtol=0.0, atol=J_TOLERANCE):
            raise JNotAdaptedException('J is not orthogonal for the screen metric')

    @property
    def dimension(self):
        return self.model.dimension

    def screen_mask(self):
        mask = np.zeros(self.dimension, dtype=bool)
        mask[self.screen] = True
        return mask

    def in_screen(self, v):
        outside = np.delete(np.asarray(v, dtype=float), self.screen)
        return not np.any(outside)

    def apply_m(self, form):
        """ M(alpha)(X1, X2, ...) = alpha(J X1, J X2, ...). """
        return np.einsum('pa,qb,pq...->ab...', self.matrix, self.matrix, form)

    def screen_sharp(self, forms):
        """ Vector u in S with g(u, Z) = alpha(Z) for Z in S, along the last axis. """
        forms = np.asarray(forms, dtype=float)
        vectors = np.zeros(forms.shape[:-1] + (self.dimension,))
        vectors[..., self.screen] = forms[..., self.screen] @ self._screen_inverse
        return vectors


def _hermitian(model, J):
    if isinstance(J, ScreenHermitianData):
        return J
    if J is None:
        if model.complex_structure is None:
            raise JNotAdaptedException('Model {} carries no complex structure'.format(model.name))
        J = model.complex_structure
    return ScreenHermitianData(model, J)


def nijenhuis_tensor(data, brackets):
    """ N_J[a, b, :] = [E_a,E_b] - [JE_a,JE_b] + J[JE_a,E_b] + J[E_a,JE_b] on screen pairs. """
    J = data.matrix
    value = (brackets
             - np.einsum('pa,qb,pqk->abk', J, J, brackets)
             + np.einsum('kl,pa,pbl->abk', J, J, brackets)
             + np.einsum('kl,qb,aql->abk', J, J, brackets))
    mask = data.screen_mask()
    return value * np.logical_and.outer(mask, mask)[:, :, np.newaxis]


def nijenhuis(model, J, x, X, Y):
    data = _hermitian(model, J)
    if not (data.in_screen(X) and data.in_screen(Y)):
        raise NotScreenException('Nijenhuis arguments must lie in the screen')
    tensor = nijenhuis_tensor(data, structure_functions(model, x))
    return np.einsum('a,b,abk->k', np.asarray(X, dtype=float), np.asarray(Y, dtype=float), tensor)


def omega_exterior(data, brackets):
    """ d omega(E_a, E_b, E_c) for a frame-constant omega. """
    omega = data.omega
    return -(np.einsum('abk,kc->abc', brackets, omega)
             + np.einsum('bck,ka->abc', brackets, omega)
             + np.einsum('cak,kb->abc', brackets, omega))


def omega_exterior_conjugate(data, brackets):
    """ d^c omega(X, Y, Z) = -d omega(JX, JY, JZ). """
    J = data.matrix
    return -np.einsum('pa,qb,rc,pqr->abc', J, J, J, omega_exterior(data, brackets))


def omega_lie(data, brackets, slot):
    """ (L_{E_slot} omega)(E_a, E_b). """
    omega = data.omega
    return -(np.einsum('ak,kb->ab', brackets[slot], omega)
             + np.einsum('bk,ak->ab', brackets[slot], omega))


def _antisymmetric_fill(terms, a, b, value):
    terms[a, b] += value
    terms[b, a] -= value


def lichnerowicz_torsion_terms(model, J=None, x=None, brackets=None):
    """
    The separate terms of the Lichnerowicz torsion, each a full (m, m, m)
    array: nijenhuis, dc_omega, null_forms, screen_tau, omega_lie and
    null_bracket. Every term is linear in the structure functions.
    """
    data = _hermitian(model, J)
    brackets = structure_functions(model, x) if brackets is None else brackets
    structure = model.structure
    lowered = lowered_brackets(structure, brackets)
    m = data.dimension
    n, nstar = data.n, data.nstar
    screen = data.screen
    S = np.ix_(screen, screen)
    terms = OrderedDict((name, np.zeros((m, m, m))) for name in
                        ('nijenhuis', 'dc_omega', 'null_forms', 'screen_tau',
                         'omega_lie', 'null_bracket'))

    terms['nijenhuis'] = -0.25 * nijenhuis_tensor(data, brackets) * data.screen_mask()

    conjugate = omega_exterior_conjugate(data, brackets)
    sharp = data.screen_sharp(conjugate + data.apply_m(conjugate))
    terms['dc_omega'][S] = -0.25 * sharp[S]

    d_sigma = -lowered[:, :, nstar]
    d_sigma_star = -lowered[:, :, n]
    null_forms = terms['null_forms']
    null_forms[S + (n,)] = d_sigma[S]
    null_forms[S + (nstar,)] = d_sigma_star[S]

    lie_metric = {z: -lowered[z] - lowered[z].T for z in (n, nstar)}
    beta = {z: omega_lie(data, brackets, z) - data.apply_m(omega_lie(data, brackets, z))
            for z in (n, nstar)}
    for X in screen:
        lie_pair = -lowered[X, n, nstar] - lowered[X, nstar, n]
        null_n = np.zeros(m)
        null_n[nstar] = d_sigma_star[n, X]
        null_n[n] = -0.5 * lie_pair
        _antisymmetric_fill(null_forms, n, X, null_n)
        null_nstar = np.zeros(m)
        null_nstar[n] = d_sigma[nstar, X]
        null_nstar[nstar] = -0.5 * lie_pair
        _antisymmetric_fill(null_forms, nstar, X, null_nstar)

        for z in (n, nstar):
            _antisymmetric_fill(terms['screen_tau'], z, X,
                                data.screen_sharp(0.5 * lie_metric[z][X]))
            # beta(J X, .) is row X of J^T beta
            _antisymmetric_fill(terms['omega_lie'], z, X,
                                data.screen_sharp(0.25 * (data.matrix.T @ beta[z])[X]))

    bracket = np.where(data.screen_mask(), brackets[n, nstar], 0.0)
    _antisymmetric_fill(terms['null_bracket'], n, nstar, -bracket)
    return terms


def lichnerowicz_torsion(model, J=None, x=None, brackets=None):
    return sum(lichnerowicz_torsion_terms(model, J, x, brackets).values())


def lichnerowicz_jet(model, J=None, x=None):
    """ ConnectionJet of the Lichnerowicz connection at x. """
    data = _hermitian(model, J)
    point = model.origin() if x is None else x
    structure = model.structure
    frame = model.frame_matrix(point)
    brackets, partials = model.backend.structure_function_jet(point)
    torsion = lichnerowicz_torsion(model, data, point, brackets)
    coefficients = coefficients_from_torsion(structure, brackets, torsion)
    m = structure.dimension
    if model.backend.is_constant:
        zeros = np.zeros((m,) * 4)
        return ConnectionJet(frame, brackets, torsion, coefficients, zeros, zeros, zeros)
    torsion_partials = np.stack(
        [lichnerowicz_torsion(model, data, point, partials[..., rho])
         for rho in range(partials.shape[-1])], axis=-1)
    coefficient_partials = np.stack(
        [coefficients_from_torsion(structure, partials[..., rho], torsion_partials[..., rho])
         for rho in range(partials.shape[-1])], axis=-1)
    return ConnectionJet(frame, brackets, torsion, coefficients,
                         frame_derivative(frame, partials),
                         frame_derivative(frame, torsion_partials),
                         frame_derivative(frame, coefficient_partials))


class LichnerowiczReport(object):
    def __init__(self, coefficients, torsion, metricity, parallel_J, block_escape):
        self.coefficients = coefficients
        self.torsion = torsion
        self.metricity = metricity
        self.parallel_J = parallel_J
        self.block_escape = block_escape

    @property
    def residuals(self):
        return {'metricity': self.metricity,
                'parallel_J': self.parallel_J,
                'block_escape': self.block_escape}


def _screen_groups(data):
    groups = np.full(data.dimension, 2)
    groups[data.n] = 0
    groups[data.nstar] = 1
    return groups


def lichnerowicz_connection(model, J=None, x=None):
    """ Lichnerowicz coefficients with metricity, nabla J and block escape residuals. """
    data = _hermitian(model, J)
    structure = model.structure
    brackets = structure_functions(model, x)
    torsion = lichnerowicz_torsion(model, data, x, brackets)
    coefficients = coefficients_from_torsion(structure, brackets, torsion)

    lowered = np.einsum('abk,kc->abc', coefficients, structure.gram)
    metricity = np.max(np.abs(lowered + np.transpose(lowered, (0, 2, 1))))
    parallel = covariant_derivative(model, data.matrix, 'ud', x, coefficients=coefficients)
    groups = _screen_groups(data)
    escaping = groups[np.newaxis, :] != groups[:, np.newaxis]
    block_escape = np.max(np.abs(coefficients) * escaping[np.newaxis, :, :])
    return LichnerowiczReport(coefficients, torsion, float(metricity),
                              float(np.max(np.abs(parallel))), float(block_escape))


class FeffermanData(object):
    """
    Base curvature inputs pulled back to the frame: the Ricci form, the
    scalar curvature with its frame differential and the Reeb derivative of
    the Webster metric. Each is a callable of the chart point.
    """

    def __init__(self, cr_dimension, ricci_form=None, scalar=None, scalar_differential=None,
                 reeb_lie_g=None, expressions=None):
        self.cr_dimension = int(cr_dimension)
        self.expressions = expressions
        if self.cr_dimension < 1:
            raise ModelDefinitionException(
                'CR dimension must be positive, got {}'.format(cr_dimension))
        m = 2 * self.cr_dimension + 2
        self.ricci_form = ricci_form or (lambda x: np.zeros((m, m)))
        self.scalar = scalar or (lambda x: 0.0)
        self.scalar_differential = scalar_differential or (lambda x: np.zeros(m))
        self.reeb_lie_g = reeb_lie_g or (lambda x: np.zeros((m, m)))

    @classmethod
    def flat(cls, cr_dimension):
        return cls(cr_dimension)

    def is_pseudo_einstein_sasaki(self, model, data, points, tolerance=1e-12):
        """ L_xi g^W = 0, constant scalar and ricci = -(s/m) omega on the screen. """
        S = np.ix_(data.screen, data.screen)
        scalars = [self.scalar(x) for x in points]
        if max(scalars) - min(scalars) > tolerance:
            return False
        for x, s in zip(points, scalars):
            if np.max(np.abs(self.reeb_lie_g(x)[S])) > tolerance:
                return False
            expected = -(s / self.cr_dimension) * data.omega
            if np.max(np.abs(self.ricci_form(x)[S] - expected[S])) > tolerance:
                return False
        return True


class FeffermanDiagnostic(object):
    def __init__(self, lambda1_drift, lambda2_residual, acceleration_residual,
                 sasaki_residual, sasaki_applicable):
        self.lambda1_drift = lambda1_drift
        self.lambda2_residual = lambda2_residual
        self.acceleration_residual = acceleration_residual
        self.sasaki_residual = sasaki_residual
        self.sasaki_applicable = sasaki_applicable

    def to_dict(self):
        return {'lambda1_drift': self.lambda1_drift,
                'lambda2_residual': self.lambda2_residual,
                'acceleration_residual': self.acceleration_residual,
                'sasaki_residual': self.sasaki_residual,
                'sasaki_applicable': self.sasaki_applicable}


def fefferman_multiplier_diagnostic(model, fdata=None, trajectory=None, J=None):
    """
    Checks a normal sub-Riemannian run on a Fefferman model: lambda1 stays
    at k1, lambda2 follows its integral expression from the base curvature
    inputs, and the acceleration matches the J c' form (general and
    pseudo-Einstein Sasaki).
    """
    fdata = model.fefferman if fdata is None else fdata
    if fdata is None or model.null_pair is None or model.complex_structure is None and J is None:
        raise NotFeffermanModelException(
            'Model {} carries no Fefferman data, null pair and complex structure'.format(
                model.name))
    if trajectory is None or trajectory.multipliers is None:
        raise NotFeffermanModelException('The trajectory carries no multipliers')
    data = _hermitian(model, J)
    nstar = data.nstar
    m = fdata.cr_dimension
    times = trajectory.times
    k1, k2 = trajectory.multipliers[0]
    lambda1_drift = float(np.max(np.abs(trajectory.multipliers[:, 0] - k1)))

    ricci_nstar, scalar_rate, reeb_energy, scalars = [], [], [], []
    for x, v in zip(trajectory.points, trajectory.velocities):
        ricci = fdata.ricci_form(x)
        ricci_nstar.append(ricci[nstar] @ v)
        scalar_rate.append(fdata.scalar_differential(x) @ v)
        reeb_energy.append(v @ fdata.reeb_lie_g(x) @ v)
        scalars.append(fdata.scalar(x))
    integral_ricci = cumulative_simpson(np.array(ricci_nstar), x=times, initial=0.0)
    integral_scalar = cumulative_simpson(np.array(scalar_rate), x=times, initial=0.0)
    integral_reeb = cumulative_simpson(np.array(reeb_energy), x=times, initial=0.0)
    scalars = np.array(scalars)

    lambda2 = k1 * (integral_ricci - integral_scalar / (2 * (m + 1))) + 0.5 * integral_reeb + k2
    lambda2_residual = float(np.max(np.abs(lambda2 - trajectory.multipliers[:, 1])))

    accelerations = covariant_accelerations(model, trajectory)
    general, sasaki = [], []
    for k, (x, v, acc) in enumerate(zip(trajectory.points, trajectory.velocities, accelerations)):
        coefficient = k1 * scalars[k] / (2 * (m + 1)) + lambda2[k]
        expected = k1 * data.screen_sharp(v @ fdata.ricci_form(x)) + coefficient * (data.matrix @ v)
        general.append(np.max(np.abs(acc - expected)))
        sasaki_coefficient = -k1 * (m + 2) / (2 * m * (m + 1)) * scalars[k] + k2
        sasaki.append(np.max(np.abs(acc - sasaki_coefficient * (data.matrix @ v))))

    applicable = fdata.is_pseudo_einstein_sasaki(model, data, trajectory.points)
    logging.debug('Fefferman diagnostic: lambda1 drift {}, lambda2 residual {}'.format(
        lambda1_drift, lambda2_residual))
    return FeffermanDiagnostic(lambda1_drift, lambda2_residual, float(max(general)),
                               float(max(sasaki)), applicable)


class RobinsonReport(object):
    FIELDS = ('foliation', 'lie_n_sigma', 'lie_nstar_sigma', 'lie_n_sigma_star',
              'lie_nstar_sigma_star', 'parallel_sigma', 'parallel_sigma_star',
              'parallel_d_sigma_star', 'screen_parallel_d_sigma',
              'screen_parallel_lie_nstar_g', 'screen_parallel_R', 'interior_n_R',
              'interior_nstar_R')

    def __init__(self, residuals, samples):
        self.residuals = dict(residuals)
        self.samples = samples

    def max_residual(self):
        return max(self.residuals.values())


def _max_abs(values):
    return float(np.max(np.abs(values))) if np.size(values) else 0.0


def robinson_residuals(model, J=None, x=None):
    data = _hermitian(model, J)
    point = model.origin() if x is None else x
    structure = model.structure
    n, nstar = data.n, data.nstar
    screen = data.screen
    jet = lichnerowicz_jet(model, data, point)
    gamma = jet.coefficients
    lowered = lowered_brackets(structure, jet.brackets)
    lowered_rates = np.einsum('eabk,kc->eabc', jet.bracket_derivatives, structure.gram)

    def nabla(tensor, valence, derivative=None):
        return covariant_derivative(model, tensor, valence, point, derivative=derivative,
                                    coefficients=gamma)

    sigma = structure.gram[nstar]
    sigma_star = structure.gram[n]
    d_sigma = -lowered[:, :, nstar]
    d_sigma_star = -lowered[:, :, n]
    lie_nstar_g = -lowered[nstar] - lowered[nstar].T
    lie_nstar_g_rates = -lowered_rates[:, nstar] - np.transpose(lowered_rates[:, nstar], (0, 2, 1))

    curvature = curvature_from_jet(jet)
    if model.backend.is_constant:
        curvature_rates = np.zeros((model.dimension,) + curvature.shape)
    else:
        curvature_rates = frame_stencil(
            model, point, lambda y: curvature_from_jet(lichnerowicz_jet(model, data, y)))

    SSS = np.ix_(screen, screen, screen)
    return {
        'foliation': _max_abs(np.where(data.screen_mask(), jet.brackets[n, nstar], 0.0)),
        'lie_n_sigma': _max_abs(-lowered[n, :, nstar]),
        'lie_nstar_sigma': _max_abs(-lowered[nstar, :, nstar]),
        'lie_n_sigma_star': _max_abs(-lowered[n, :, n]),
        'lie_nstar_sigma_star': _max_abs(-lowered[nstar, :, n]),
        'parallel_sigma': _max_abs(nabla(sigma, 'd')),
        'parallel_sigma_star': _max_abs(nabla(sigma_star, 'd')),
        'parallel_d_sigma_star': _max_abs(nabla(d_sigma_star, 'dd', -lowered_rates[:, :, :, n])),
        'screen_parallel_d_sigma': _max_abs(
            nabla(d_sigma, 'dd', -lowered_rates[:, :, :, nstar])[SSS]),
        'screen_parallel_lie_nstar_g': _max_abs(nabla(lie_nstar_g, 'dd', lie_nstar_g_rates)[SSS]),
        'screen_parallel_R': _max_abs(nabla(curvature, 'dddu', curvature_rates)[screen]),
        'interior_n_R': _max_abs(curvature[n][SSS]),
        'interior_nstar_R': _max_abs(curvature[nstar][SSS]),
    }


def robinson_symmetric_report(model, J=None, points=None):
    data = _hermitian(model, J)
    points = sample_points(model) if points is None else points
    worst = dict.fromkeys(RobinsonReport.FIELDS, 0.0)
    for point in points:
        for key, value in robinson_residuals(model, data, point).items():
            worst[key] = max(worst[key], value)
    logging.debug('Robinson residuals for {}: {}'.format(model.name, worst))
    return RobinsonReport(worst, len(points))


class NotScreenException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class JNotAdaptedException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class NotFeffermanModelException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)
