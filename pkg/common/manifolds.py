"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging

import numpy as np

from .errors import ModelDefinitionException
from .expressions import parse_expression
from .framebackends import ChartBackend, LieConstantBackend
from .hermitian import FeffermanData
from .wittcore import (BlockLabel, DistinguishedNullPair, FrameModel, WittGrading,
                       validate_witt_structure)

BUILTIN_MODELS = ('abelian', 'osc', 'osh', 'fefferman_heisenberg')


def builtin_model(name, params=None, **kwargs):
    """
    Built-in frame model by name. Parameters come as a dict, keyword
    arguments or both: dim and null_pair (abelian), lambda (osc, osh),
    m (fefferman_heisenberg).
    """
    params = dict(params or {})
    params.update(kwargs)
    builders = {'abelian': _abelian_params,
                'osc': _oscillator_params,
                'osh': _oscillator_params,
                'fefferman_heisenberg': _fefferman_params}
    if name not in builders:
        raise UnknownModelException(
            'Unknown model {!r}. Built-in models: {}'.format(name, ', '.join(BUILTIN_MODELS)))
    model = builders[name](name, params)
    logging.debug('Built model {} with params {}'.format(name, model.params))
    return model


def _abelian_params(name, params):
    dim = _positive_int(params.get('dim', 4), 'dim')
    null_pair = bool(params.get('null_pair', False))
    return abelian(dim, null_pair, params.get('gram'))


def _oscillator_params(name, params):
    lam = params.get('lambda', params.get('lam', (1.0,)))
    return oscillator(lam) if name == 'osc' else hyperbolic_oscillator(lam)


def _fefferman_params(name, params):
    return fefferman_heisenberg(_positive_int(params.get('m', 1), 'm'))


def _positive_int(value, field):
    try:
        number = int(float(value))
        integral = float(value) == number
    except (TypeError, ValueError):
        raise BadParamsException('{} must be an integer, got {!r}'.format(field, value))
    if not integral or number < 1:
        raise BadParamsException('{} must be a positive integer, got {!r}'.format(field, value))
    return number


def _lambdas(lam):
    values = np.atleast_1d(np.asarray(lam, dtype=float))
    if values.ndim != 1 or len(values) == 0:
        raise BadParamsException('lambda must be a non-empty list, got {!r}'.format(lam))
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise BadParamsException('lambda entries must be positive, got {}'.format(values.tolist()))
    if values[0] < 1.0 or np.any(np.diff(values) < 0):
        logging.warning('lambda {} is not normalized as 1 <= lambda_1 <= ... <= lambda_m'.format(
            values.tolist()))
    return values


def standard_complex_structure(dimension):
    """ J e_i = e_{k+i}, J e_{k+i} = -e_i on a 2k-dimensional block. """
    half = dimension // 2
    J = np.zeros((dimension, dimension))
    J[half:, :half] = np.eye(half)
    J[:half, half:] = -np.eye(half)
    return J


def abelian(dim, null_pair=False, gram=None):
    """
    Flat model on R^dim. Without a null pair a single Riemannian block; with
    one the frame is (n, n*, screen) and an even screen gets the standard J.
    """
    params = {'dim': dim, 'null_pair': null_pair}
    constants = np.zeros((dim, dim, dim))
    if not null_pair:
        grading = WittGrading([(BlockLabel.anisotropic(1), dim)])
        matrix = np.eye(dim) if gram is None else np.array(gram, dtype=float)
        structure = validate_witt_structure(grading, matrix)
        return FrameModel(structure, LieConstantBackend(constants), name='abelian', params=params)

    if dim < 3:
        raise BadParamsException('An abelian model with a null pair needs dim >= 3')
    screen = dim - 2
    grading = WittGrading([(BlockLabel.isotropic(1), 1),
                           (BlockLabel.isotropic(1).star(), 1),
                           (BlockLabel.anisotropic(1), screen)])
    matrix = np.zeros((dim, dim))
    matrix[0, 1] = matrix[1, 0] = 1.0
    matrix[2:, 2:] = np.eye(screen) if gram is None else np.array(gram, dtype=float)
    structure = validate_witt_structure(grading, matrix)
    J = standard_complex_structure(screen) if screen % 2 == 0 else None
    return FrameModel(structure, LieConstantBackend(constants), DistinguishedNullPair(0, 1),
                      name='abelian', complex_structure=J, params=params)


def _oscillator_frame(m):
    """ Frame order e_1..e_m, e_{m+1}..e_{2m}, eps0, eps1. """
    eps0, eps1 = 2 * m, 2 * m + 1
    return eps0, eps1, 2 * m + 2


def oscillator(lam):
    """ osc_lambda with n = eps1 (p1), n* = eps0 (p1*) and q1, q2 the e-blocks. """
    values = _lambdas(lam)
    m = len(values)
    eps0, eps1, dim = _oscillator_frame(m)
    constants = np.zeros((dim, dim, dim))
    for i, value in enumerate(values):
        _set_bracket(constants, eps1, i, m + i, value)
        _set_bracket(constants, eps1, m + i, i, -value)
        _set_bracket(constants, i, m + i, eps0, 1.0)

    matrix = np.zeros((dim, dim))
    matrix[eps0, eps1] = matrix[eps1, eps0] = 1.0
    for i, value in enumerate(values):
        matrix[i, i] = matrix[m + i, m + i] = value / 2.0

    p1, q1, q2 = BlockLabel.isotropic(1), BlockLabel.anisotropic(1), BlockLabel.anisotropic(2)
    grading = WittGrading([(p1, 1), (p1.star(), 1), (q1, m), (q2, m)],
                          [q1] * m + [q2] * m + [p1.star(), p1])
    structure = validate_witt_structure(grading, matrix)
    J = np.zeros((dim, dim))
    J[:2 * m, :2 * m] = standard_complex_structure(2 * m)
    return FrameModel(structure, LieConstantBackend(constants), DistinguishedNullPair(eps1, eps0),
                      name='osc', complex_structure=J, params={'lambda': values.tolist()})


def hyperbolic_oscillator(lam):
    """ osh_lambda: the e-blocks become the isotropic pair p2, p2*. """
    values = _lambdas(lam)
    m = len(values)
    eps0, eps1, dim = _oscillator_frame(m)
    constants = np.zeros((dim, dim, dim))
    for i, value in enumerate(values):
        _set_bracket(constants, eps1, i, i, value)
        _set_bracket(constants, eps1, m + i, m + i, -value)
        _set_bracket(constants, i, m + i, eps0, 1.0)

    matrix = np.zeros((dim, dim))
    matrix[eps0, eps1] = matrix[eps1, eps0] = 1.0
    for i, value in enumerate(values):
        matrix[i, m + i] = matrix[m + i, i] = value / 2.0

    p1, p2 = BlockLabel.isotropic(1), BlockLabel.isotropic(2)
    grading = WittGrading([(p1, 1), (p1.star(), 1), (p2, m), (p2.star(), m)],
                          [p2] * m + [p2.star()] * m + [p1.star(), p1])
    structure = validate_witt_structure(grading, matrix)
    return FrameModel(structure, LieConstantBackend(constants), DistinguishedNullPair(eps1, eps0),
                      name='osh', params={'lambda': values.tolist()})


def _set_bracket(constants, a, b, k, value):
    constants[a, b, k] = value
    constants[b, a, k] = -value


def fefferman_coordinates(m):
    return (['phi', 't'] + ['x{}'.format(i + 1) for i in range(m)]
            + ['y{}'.format(i + 1) for i in range(m)])


def fefferman_heisenberg(m):
    """
    Fefferman space of the flat Heisenberg group H^m. Coordinates
    (phi, t, x_i, y_i), theta = dt + 1/2 (x dy - y dx); frame n = d_phi,
    n* = d_t, X_i = d_x_i + (y_i/2) d_t, Y_i = d_y_i - (x_i/2) d_t; J X_i = Y_i.
    """
    coordinates = fefferman_coordinates(m)
    dim = 2 * m + 2
    rows = []
    for a in range(dim):
        row = ['0'] * dim
        if a < 2:
            row[a] = '1'
        elif a < 2 + m:
            i = a - 2
            row[2 + i] = '1'
            row[1] = '{} / 2'.format(coordinates[2 + m + i])
        else:
            i = a - 2 - m
            row[2 + m + i] = '1'
            row[1] = '-{} / 2'.format(coordinates[2 + i])
        rows.append([parse_expression(entry, coordinates) for entry in row])

    p1 = BlockLabel.isotropic(1)
    grading = WittGrading([(p1, 1), (p1.star(), 1), (BlockLabel.anisotropic(1), 2 * m)])
    matrix = np.eye(dim)
    matrix[:2, :2] = [[0.0, 1.0], [1.0, 0.0]]
    structure = validate_witt_structure(grading, matrix)
    J = np.zeros((dim, dim))
    J[2:, 2:] = standard_complex_structure(2 * m)
    return FrameModel(structure, ChartBackend(coordinates, rows), DistinguishedNullPair(0, 1),
                      name='fefferman_heisenberg', complex_structure=J,
                      fefferman=FeffermanData.flat(m), params={'m': m})


class UnknownModelException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class BadParamsException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)
