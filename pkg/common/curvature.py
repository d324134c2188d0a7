"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging

import numpy as np

from .connection import connection_jet, covariant_derivative
from .sampling import sample_points

# fourth order central stencil along frame directions
STENCIL_STEP = 1e-3
_STENCIL = ((-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0))


def curvature_from_jet(jet):
    """ R[a, b, c, d]: the d-th component of R(E_a, E_b)E_c. """
    gamma = jet.coefficients
    derivative = jet.coefficient_derivatives
    quadratic = np.einsum('bce,aed->abcd', gamma, gamma)
    return (derivative - np.transpose(derivative, (1, 0, 2, 3))
            + quadratic - np.transpose(quadratic, (1, 0, 2, 3))
            - np.einsum('abe,ecd->abcd', jet.brackets, gamma))


def curvature_tensor(model, x=None):
    if model.backend.is_constant:
        return model.memoize('curvature', lambda: curvature_from_jet(connection_jet(model, x)))
    return curvature_from_jet(connection_jet(model, x))


def lowered_curvature(model, x=None, curvature=None):
    """ R_abcd = g(R(E_a, E_b)E_c, E_d). """
    values = curvature_tensor(model, x) if curvature is None else curvature
    return np.einsum('abck,kd->abcd', values, model.gram)


def frame_stencil(model, x, evaluate, step=STENCIL_STEP):
    """
    E_e(f) for every frame direction e, by a fourth order central stencil on
    straight lines with tangent E_e(x). Returns an array with a leading axis e.
    """
    point = np.asarray(x, dtype=float)
    frame = model.frame_matrix(point)
    derivatives = []
    for e in range(model.dimension):
        total = 0.0
        for offset, weight in _STENCIL:
            total = total + weight * evaluate(point + offset * step * frame[:, e])
        derivatives.append(total / step)
    return np.array(derivatives)


def curvature_derivative(model, x=None):
    """ derivative[e, a, b, c, d] = E_e(R[a, b, c, d]); zero on left-invariant frames. """
    point = model.origin() if x is None else np.asarray(x, dtype=float)
    m = model.dimension
    if model.backend.is_constant:
        return np.zeros((m,) * 5)
    return frame_stencil(model, point, lambda y: curvature_tensor(model, y))


def exterior_covariant_derivative(form, derivative, coefficients, brackets, value='vector'):
    """
    d^nabla of a 2-form with values in vectors (form[b, c, d]) or in
    endomorphisms (form[b, c, p, q], E_p -> form[b, c, p, q] E_q).
    derivative[a, ...] holds E_a of the components.

    d^nabla w(X, Y, Z) = sum over cyclic (X, Y, Z) of
    nabla_X (w(Y, Z)) - w([X, Y], Z).
    """
    if value == 'vector':
        transported = derivative + np.einsum('aed,bce->abcd', coefficients, form)
        bracket_term = np.einsum('abe,ecd->abcd', brackets, form)
    elif value == 'endomorphism':
        transported = (derivative
                       + np.einsum('aeq,bcpe->abcpq', coefficients, form)
                       - np.einsum('ape,bceq->abcpq', coefficients, form))
        bracket_term = np.einsum('abe,ecpq->abcpq', brackets, form)
    else:
        raise ValueError('Unknown value type {!r}'.format(value))
    return cyclic_sum(transported - bracket_term)


def cyclic_sum(values):
    """ values[a, b, c, ...] + values[b, c, a, ...] + values[c, a, b, ...]. """
    return (values + np.einsum('bca...->abc...', values)
            + np.einsum('cab...->abc...', values))


def bianchi_residuals(model, x=None):
    """
    (first, second) with first = max |b(R) - d^nabla T| and
    second = max |d^nabla R| over frame triples.
    """
    point = model.origin() if x is None else x
    jet = connection_jet(model, point)
    curvature = curvature_from_jet(jet)

    torsion_exterior = exterior_covariant_derivative(
        jet.torsion, jet.torsion_derivatives, jet.coefficients, jet.brackets, 'vector')
    first = np.max(np.abs(cyclic_sum(curvature) - torsion_exterior))

    curvature_exterior = exterior_covariant_derivative(
        curvature, curvature_derivative(model, point), jet.coefficients, jet.brackets,
        'endomorphism')
    second = np.max(np.abs(curvature_exterior))
    return float(first), float(second)


class BianchiReport(object):
    def __init__(self, first, second, samples):
        self.first = first
        self.second = second
        self.samples = samples

    @property
    def residuals(self):
        return {'first_bianchi': self.first, 'second_bianchi': self.second}


def bianchi_report(model, points=None):
    points = sample_points(model) if points is None else points
    first, second = 0.0, 0.0
    for point in points:
        point_first, point_second = bianchi_residuals(model, point)
        first = max(first, point_first)
        second = max(second, point_second)
    logging.debug('Bianchi residuals for {}: {} {}'.format(model.name, first, second))
    return BianchiReport(first, second, len(points))


class SymmetricSpaceReport(object):
    """
    Residual norms of the necessary conditions for a Witt symmetric space:
    [V+, V+] in V+, T(V-, V-) in V+, T(V+, V-) in V-, R(V+, V-) = 0,
    nabla_{V-} T = 0 and nabla_{V-} R = 0. V+ and V- are the sums of the
    even and odd blocks.
    """

    FIELDS = ('bracket_closure', 'torsion_even', 'torsion_odd',
              'curvature_mixed', 'parallel_T', 'parallel_R')

    def __init__(self, residuals, samples):
        self.residuals = dict(residuals)
        self.samples = samples

    def __getattr__(self, name):
        residuals = self.__dict__.get('residuals', {})
        if name in residuals:
            return residuals[name]
        raise AttributeError(name)

    def max_residual(self):
        return max(self.residuals.values())


def symmetric_space_residuals(model, x=None):
    signs = model.grading.parity_signs()
    even, odd = signs > 0, signs < 0
    point = model.origin() if x is None else x
    jet = connection_jet(model, point)
    curvature = curvature_from_jet(jet)

    def block_max(values):
        return float(np.max(np.abs(values))) if values.size else 0.0

    torsion_parallel = covariant_derivative(
        model, jet.torsion, 'ddu', point, derivative=jet.torsion_derivatives,
        coefficients=jet.coefficients)
    curvature_parallel = covariant_derivative(
        model, curvature, 'dddu', point, derivative=curvature_derivative(model, point),
        coefficients=jet.coefficients)

    return {
        'bracket_closure': block_max(jet.brackets[np.ix_(even, even, odd)]),
        'torsion_even': block_max(jet.torsion[np.ix_(odd, odd, odd)]),
        'torsion_odd': block_max(jet.torsion[np.ix_(even, odd, even)]),
        'curvature_mixed': block_max(curvature[np.ix_(even, odd)]),
        'parallel_T': block_max(torsion_parallel[odd]),
        'parallel_R': block_max(curvature_parallel[odd]),
    }


def symmetric_space_report(model, points=None):
    model.grading.parity_signs()
    points = sample_points(model) if points is None else points
    worst = dict.fromkeys(SymmetricSpaceReport.FIELDS, 0.0)
    for point in points:
        for key, value in symmetric_space_residuals(model, point).items():
            worst[key] = max(worst[key], value)
    logging.debug('Symmetric space residuals for {}: {}'.format(model.name, worst))
    return SymmetricSpaceReport(worst, len(points))
