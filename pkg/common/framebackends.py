"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

from abc import abstractmethod, ABC

import numpy as np
from scipy.linalg import expm

from .errors import ModelDefinitionException, NumericFailureException
from .expressions import jet_eval

SINGULAR_FRAME_CONDITION = 1e12


class FrameBackend(ABC):
    """
    Supplies the adapted frame of a model: the frame matrix in coordinates
    (columns are the frame fields E_a) and the structure functions c[a, b, k],
    the k-th frame component of [E_a, E_b].
    """

    is_constant = False
    jet_order = 2

    @property
    @abstractmethod
    def chart_dimension(self):
        pass

    @abstractmethod
    def frame_matrix(self, x):
        pass

    @abstractmethod
    def structure_functions(self, x):
        pass

    @abstractmethod
    def structure_function_jet(self, x):
        """ Returns (c, dc) with dc[a, b, k, rho] the partial derivative along coordinate rho. """
        pass

    def check_point(self, x):
        point = np.asarray(x, dtype=float)
        if point.shape != (self.chart_dimension,):
            raise ModelDefinitionException(
                'Expected a point with {} coordinates, got {}'.format(
                    self.chart_dimension, point.shape))
        if not np.all(np.isfinite(point)):
            raise NonFiniteException('Point {} is not finite'.format(point))
        return point


class LieConstantBackend(FrameBackend):
    """
    Left-invariant frame of a Lie group given by structure constants. Points
    are exponential coordinates of the first kind.
    """

    is_constant = True

    def __init__(self, structure_constants):
        constants = np.array(structure_constants, dtype=float)
        if constants.ndim != 3 or len(set(constants.shape)) != 1:
            raise InvalidStructureConstantsException(
                'Structure constants must be an m x m x m array, got {}'.format(
                    constants.shape))
        if not np.array_equal(constants, -np.transpose(constants, (1, 0, 2))):
            raise InvalidStructureConstantsException(
                'Structure constants are not antisymmetric in the bracket slots')
        constants.setflags(write=False)
        self._constants = constants
        self._is_abelian = not np.any(constants)

    @property
    def chart_dimension(self):
        return self._constants.shape[0]

    @property
    def structure_constants(self):
        return self._constants

    def jacobi_residual(self):
        c = self._constants
        # [[E_a,E_b],E_d] + cyclic, component k
        term = np.einsum('abe,edk->abdk', c, c)
        cyclic = term + np.transpose(term, (1, 2, 0, 3)) + np.transpose(term, (2, 0, 1, 3))
        return float(np.max(np.abs(cyclic))) if cyclic.size else 0.0

    def frame_matrix(self, x):
        point = self.check_point(x)
        dimension = self.chart_dimension
        if self._is_abelian:
            return np.eye(dimension)
        adjoint = np.einsum('a,abk->kb', point, self._constants)
        generator = np.zeros((2 * dimension, 2 * dimension))
        generator[:dimension, :dimension] = -adjoint
        generator[:dimension, dimension:] = np.eye(dimension)
        # upper right block of the exponential is (1 - exp(-ad_X)) / ad_X
        left_trivialized = expm(generator)[:dimension, dimension:]
        return _inverse_frame(left_trivialized, point)

    def structure_functions(self, x):
        return self._constants

    def structure_function_jet(self, x):
        dimension = self.chart_dimension
        return self._constants, np.zeros((dimension,) * 4)


class ChartBackend(FrameBackend):
    """
    Frame fields given as expression trees over a single chart.
    frame[a][mu] is the mu-th coordinate component of E_a.
    """

    def __init__(self, coordinates, frame, domain=None, jet_order=2):
        self.coordinates = list(coordinates)
        self.frame = [list(row) for row in frame]
        dimension = len(self.coordinates)
        if len(self.frame) != dimension or any(len(row) != dimension for row in self.frame):
            raise ModelDefinitionException(
                'The frame must be a square {0} x {0} matrix of expressions'.format(dimension))
        if jet_order not in (1, 2):
            raise ModelDefinitionException('Jet order must be 1 or 2, got {}'.format(jet_order))
        self.jet_order = jet_order
        self.domain = None if domain is None else np.array(domain, dtype=float)
        if self.domain is not None and self.domain.shape != (dimension, 2):
            raise ModelDefinitionException(
                'The domain must hold one [low, high] pair per coordinate')

    @property
    def chart_dimension(self):
        return len(self.coordinates)

    def check_point(self, x):
        point = super().check_point(x)
        if self.domain is not None:
            outside = (point < self.domain[:, 0]) | (point > self.domain[:, 1])
            if np.any(outside):
                raise StepOutOfDomainException(
                    'Point {} left the chart domain {}'.format(point, self.domain.tolist()))
        return point

    def frame_matrix(self, x):
        point = self.check_point(x)
        values = [float(value) for value in point]
        matrix = np.array([[entry.evaluate(values) for entry in row] for row in self.frame],
                          dtype=float).T
        _check_condition(matrix, point)
        return matrix

    def _frame_jets(self, point, order):
        dimension = self.chart_dimension
        frame = np.zeros((dimension, dimension))
        gradient = np.zeros((dimension, dimension, dimension))
        hessian = np.zeros((dimension,) * 4) if order >= 2 else None
        for a, row in enumerate(self.frame):
            for mu, entry in enumerate(row):
                jet = jet_eval(entry, point, order)
                frame[mu, a] = jet.value
                gradient[mu, a] = jet.gradient
                if hessian is not None:
                    hessian[mu, a] = jet.hessian
        return frame, gradient, hessian

    def structure_functions(self, x):
        point = self.check_point(x)
        frame, gradient, _ = self._frame_jets(point, 1)
        inverse = _inverse_frame(frame, point)
        return np.einsum('km,abm->abk', inverse, _coordinate_brackets(frame, gradient))

    def structure_function_jet(self, x):
        if self.jet_order < 2:
            raise Order2UnavailableException(
                'The chart backend was declared with jet order {}'.format(self.jet_order))
        point = self.check_point(x)
        frame, gradient, hessian = self._frame_jets(point, 2)
        inverse = _inverse_frame(frame, point)
        brackets = _coordinate_brackets(frame, gradient)

        bracket_derivative = (np.einsum('nar,mbn->abmr', gradient, gradient)
                              + np.einsum('na,mbnr->abmr', frame, hessian))
        bracket_derivative = bracket_derivative - np.transpose(bracket_derivative, (1, 0, 2, 3))
        inverse_derivative = -np.einsum('kn,nar,am->kmr', inverse, gradient, inverse)

        values = np.einsum('km,abm->abk', inverse, brackets)
        derivatives = (np.einsum('kmr,abm->abkr', inverse_derivative, brackets)
                       + np.einsum('km,abmr->abkr', inverse, bracket_derivative))
        return values, derivatives


def _coordinate_brackets(frame, gradient):
    # [E_a, E_b]^mu = E_a^nu d_nu E_b^mu - E_b^nu d_nu E_a^mu
    directional = np.einsum('na,mbn->abm', frame, gradient)
    return directional - np.transpose(directional, (1, 0, 2))


def _check_condition(matrix, point):
    condition = np.linalg.cond(matrix)
    if not np.isfinite(condition) or condition > SINGULAR_FRAME_CONDITION:
        raise SingularFrameException(
            'Frame matrix is singular at {} (condition number {})'.format(point, condition))


def _inverse_frame(matrix, point):
    _check_condition(matrix, point)
    return np.linalg.inv(matrix)


class InvalidStructureConstantsException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class SingularFrameException(NumericFailureException):
    def __init__(self, message):
        super().__init__(message)


class StepOutOfDomainException(NumericFailureException):
    def __init__(self, message):
        super().__init__(message)


class NonFiniteException(NumericFailureException):
    def __init__(self, message):
        super().__init__(message)


class Order2UnavailableException(NumericFailureException):
    def __init__(self, message):
        super().__init__(message)
