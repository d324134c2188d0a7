"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.

Canonical Witt connection in frame components. Arrays follow one index
convention: the last axis is the output vector, so torsion[a, b, :] is
T(E_a, E_b) and coefficients[a, b, :] is the covariant derivative of E_b
along E_a.
"""

import logging

import numpy as np

from .sampling import sample_points
from .wittcore import lowered_brackets, structure_functions


def _tau_values(structure, brackets, lowered, i, j):
    """ tau^j(E_a, E_b) for a in block i and b in block j, shape (|i|, |j|, m). """
    grading = structure.grading
    rows, cols = grading.slots(i), grading.slots(j)
    if i == j:
        return np.zeros((len(rows), len(cols), structure.dimension))

    # (L_{E_a} E_b^flat)(E_c) = -g(E_b, [E_a, E_c])
    lie = -np.einsum('acb->abc', lowered)[np.ix_(rows, cols)]
    if j.is_isotropic and i == j.star():
        lie = lie - np.einsum('bca->abc', lowered)[np.ix_(rows, cols)]

    vectors = lie @ structure.gram_inverse
    return 0.5 * (vectors - brackets[np.ix_(rows, cols)]) * grading.mask([j])


def tau_tensor(model, x, i, j):
    """
    Values of the tau^k tensor on frame fields of blocks i and j, as an
    (m, m, m) array that vanishes outside rows of i and columns of j.
    The output always lies in block j.
    """
    structure = model.structure
    grading = structure.grading
    i, j = grading.label(i), grading.label(j)
    brackets = structure_functions(model, x)
    lowered = lowered_brackets(structure, brackets)

    values = np.zeros((structure.dimension,) * 3)
    values[np.ix_(grading.slots(i), grading.slots(j))] = _tau_values(
        structure, brackets, lowered, i, j)
    return values


def torsion_from_brackets(structure, brackets):
    """ Torsion of the canonical Witt connection for given structure functions (linear in them). """
    grading = structure.grading
    lowered = lowered_brackets(structure, brackets)
    torsion = np.zeros_like(brackets)
    for i in grading.labels:
        rows = grading.slots(i)
        for j in grading.labels:
            cols = grading.slots(j)
            outside = ~grading.mask([i, j])
            block = -brackets[np.ix_(rows, cols)] * outside
            if i != j:
                forward = _tau_values(structure, brackets, lowered, i, j)
                backward = _tau_values(structure, brackets, lowered, j, i)
                block = block + forward - np.transpose(backward, (1, 0, 2))
            torsion[np.ix_(rows, cols)] = block
    return torsion


def lowered_torsion(structure, torsion):
    return np.einsum('abk,kc->abc', torsion, structure.gram)


def contorsion(structure, torsion):
    """ K[a, b, c] = 1/2 (g(T(a,b),c) - g(T(b,c),a) + g(T(c,a),b)). """
    lowered = lowered_torsion(structure, torsion)
    return 0.5 * (lowered - np.einsum('bca->abc', lowered) + np.einsum('cab->abc', lowered))


def coefficients_from_torsion(structure, brackets, torsion):
    """ Koszul formula with contorsion; constant Gram entries leave only bracket terms. """
    lowered = lowered_brackets(structure, brackets)
    koszul = 0.5 * (lowered - np.einsum('bca->abc', lowered) + np.einsum('cab->abc', lowered))
    return (koszul + contorsion(structure, torsion)) @ structure.gram_inverse


def canonical_torsion(model, x=None):
    return model.memoize('torsion', lambda: torsion_from_brackets(
        model.structure, structure_functions(model, x)))


def connection_coefficients(model, x=None):
    def compute():
        brackets = structure_functions(model, x)
        torsion = torsion_from_brackets(model.structure, brackets)
        return coefficients_from_torsion(model.structure, brackets, torsion)
    return model.memoize('coefficients', compute)


class ConnectionJet(object):
    """
    Structure functions, torsion and connection coefficients at a point
    together with their frame derivatives: derivative[a, ...] = E_a(value).
    """

    def __init__(self, frame, brackets, torsion, coefficients,
                 bracket_derivatives, torsion_derivatives, coefficient_derivatives):
        self.frame = frame
        self.brackets = brackets
        self.torsion = torsion
        self.coefficients = coefficients
        self.bracket_derivatives = bracket_derivatives
        self.torsion_derivatives = torsion_derivatives
        self.coefficient_derivatives = coefficient_derivatives


def frame_derivative(frame, coordinate_derivatives):
    """ E_a(t) = F[rho, a] d_rho t for coordinate derivatives stacked on the last axis. """
    return np.einsum('ra,...r->a...', frame, coordinate_derivatives)


def connection_jet(model, x=None):
    point = model.origin() if x is None else x
    structure = model.structure
    frame = model.frame_matrix(point)

    if model.backend.is_constant:
        m = structure.dimension
        brackets = structure_functions(model, point)
        zeros = np.zeros((m,) * 4)
        return ConnectionJet(frame, brackets, canonical_torsion(model),
                             connection_coefficients(model), zeros, zeros, zeros)

    brackets, partials = model.backend.structure_function_jet(point)
    torsion = torsion_from_brackets(structure, brackets)
    coefficients = coefficients_from_torsion(structure, brackets, torsion)
    # every map below is linear in the structure functions
    torsion_partials = np.stack(
        [torsion_from_brackets(structure, partials[..., rho])
         for rho in range(partials.shape[-1])], axis=-1)
    coefficient_partials = np.stack(
        [coefficients_from_torsion(structure, partials[..., rho], torsion_partials[..., rho])
         for rho in range(partials.shape[-1])], axis=-1)
    return ConnectionJet(frame, brackets, torsion, coefficients,
                         frame_derivative(frame, partials),
                         frame_derivative(frame, torsion_partials),
                         frame_derivative(frame, coefficient_partials))


def covariant_derivative(model, tensor, valence, x=None, derivative=None, coefficients=None):
    """
    Frame components of the covariant derivative of a tensor field.

    valence holds one character per axis: 'u' for vector slots and 'd' for
    covector slots. derivative[a, ...] supplies E_a of the components (zero
    when omitted). The result has a leading direction axis a.
    """
    values = np.asarray(tensor, dtype=float)
    if len(valence) != values.ndim or set(valence) - {'u', 'd'}:
        raise ValueError('Valence {!r} does not match a tensor of rank {}'.format(
            valence, values.ndim))
    gamma = connection_coefficients(model, x) if coefficients is None else coefficients
    m = gamma.shape[0]
    if derivative is None:
        result = np.zeros((m,) + values.shape)
    else:
        result = np.array(derivative, dtype=float)

    for axis, kind in enumerate(valence):
        moved = np.moveaxis(values, axis, 0)
        if kind == 'd':
            term = -np.tensordot(gamma, moved, axes=([2], [0]))
        else:
            term = np.tensordot(np.transpose(gamma, (0, 2, 1)), moved, axes=([2], [0]))
        result += np.moveaxis(term, 1, axis + 1)
    return result


def one_form_derivative_identity(model, x, X, Y, Z):
    """
    Both sides of (nabla_X Z^flat)(Y) = 1/2 (dZ^flat(X,Y) - Z^flat(T(X,Y))
    + (L_Z g)(X,Y) - g(T(Z,X),Y) - g(T(Z,Y),X)) for frame-constant X, Y, Z.
    """
    structure = model.structure
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    derivative = covariant_derivative(model, structure.flat(Z), 'd', x)
    left = float(X @ derivative @ Y)

    brackets = structure_functions(model, x)
    torsion = canonical_torsion(model, x)

    def bracket(u, v):
        return np.einsum('a,b,abk->k', u, v, brackets)

    def torsion_of(u, v):
        return np.einsum('a,b,abk->k', u, v, torsion)

    inner = structure.inner
    exterior = -inner(Z, bracket(X, Y))
    lie_metric = -inner(bracket(Z, X), Y) - inner(X, bracket(Z, Y))
    right = 0.5 * (exterior - inner(Z, torsion_of(X, Y)) + lie_metric
                   - inner(torsion_of(Z, X), Y) - inner(torsion_of(Z, Y), X))
    return left, right


def connection_residuals(structure, coefficients, brackets, torsion):
    """
    Metricity, block escape and torsion round-trip of the given coefficients.
    """
    lowered = np.einsum('abk,kc->abc', coefficients, structure.gram)
    metricity = np.max(np.abs(lowered + np.transpose(lowered, (0, 2, 1))))

    slots = structure.grading.frame_slots
    escaping = np.array([[slots[k] != slots[b] for k in range(len(slots))]
                         for b in range(len(slots))])
    block_escape = np.max(np.abs(coefficients) * escaping[np.newaxis, :, :])

    recomputed = coefficients - np.transpose(coefficients, (1, 0, 2)) - brackets
    roundtrip = np.max(np.abs(recomputed - torsion))
    return {'metricity': float(metricity),
            'block_escape': float(block_escape),
            'torsion_roundtrip': float(roundtrip)}


class CompatibilityReport(object):
    def __init__(self, metricity, block_escape, torsion_roundtrip, samples):
        self.metricity = metricity
        self.block_escape = block_escape
        self.torsion_roundtrip = torsion_roundtrip
        self.samples = samples

    @property
    def residuals(self):
        return {'metricity': self.metricity,
                'block_escape': self.block_escape,
                'torsion_roundtrip': self.torsion_roundtrip}

    def max_residual(self):
        return max(self.residuals.values())


def compatibility_report(model, points=None):
    points = sample_points(model) if points is None else points
    worst = {'metricity': 0.0, 'block_escape': 0.0, 'torsion_roundtrip': 0.0}
    for point in points:
        brackets = structure_functions(model, point)
        torsion = torsion_from_brackets(model.structure, brackets)
        coefficients = coefficients_from_torsion(model.structure, brackets, torsion)
        residuals = connection_residuals(model.structure, coefficients, brackets, torsion)
        for key, value in residuals.items():
            worst[key] = max(worst[key], value)
    logging.debug('Compatibility residuals for {}: {}'.format(model.name, worst))
    return CompatibilityReport(worst['metricity'], worst['block_escape'],
                               worst['torsion_roundtrip'], len(points))
