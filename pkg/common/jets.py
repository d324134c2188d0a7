"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import math

import numpy as np

from .errors import NumericFailureException

DIVISION_GUARD = 1e-14


class Jet2(object):
    """
    Second order forward-mode jet: value, gradient and hessian with respect
    to the chart coordinates. A jet created with order=1 carries no hessian.
    """

    __slots__ = ('value', 'gradient', 'hessian')
    # numpy scalars hand mixed arithmetic back to the jet operators
    __array_ufunc__ = None

    def __init__(self, value, gradient, hessian=None):
        self.value = float(value)
        self.gradient = gradient
        self.hessian = hessian

    @classmethod
    def variable(cls, value, index, dimension, order=2):
        gradient = np.zeros(dimension)
        gradient[index] = 1.0
        hessian = np.zeros((dimension, dimension)) if order >= 2 else None
        return cls(value, gradient, hessian)

    @classmethod
    def constant(cls, value, dimension, order=2):
        hessian = np.zeros((dimension, dimension)) if order >= 2 else None
        return cls(value, np.zeros(dimension), hessian)

    @property
    def order(self):
        return 1 if self.hessian is None else 2

    def _coerce(self, other):
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, len(self.gradient), self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return Jet2(self.value + other.value,
                    self.gradient + other.gradient,
                    _combine(self.hessian, other.hessian, lambda a, b: a + b))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet2(self.value - other.value,
                    self.gradient - other.gradient,
                    _combine(self.hessian, other.hessian, lambda a, b: a - b))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        hessian = None if self.hessian is None else -self.hessian
        return Jet2(-self.value, -self.gradient, hessian)

    def __mul__(self, other):
        other = self._coerce(other)
        value = self.value * other.value
        gradient = self.gradient * other.value + self.value * other.gradient
        hessian = None
        if self.hessian is not None and other.hessian is not None:
            cross = np.outer(self.gradient, other.gradient)
            hessian = (self.hessian * other.value + cross + cross.T
                       + self.value * other.hessian)
        return Jet2(value, gradient, hessian)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def reciprocal(self):
        if abs(self.value) < DIVISION_GUARD:
            raise DomainGuardException(
                'Division by {} is below the guard {}'.format(self.value, DIVISION_GUARD))
        inverse = 1.0 / self.value
        return self._chain(inverse, -inverse ** 2, 2.0 * inverse ** 3)

    def sin(self):
        return self._chain(math.sin(self.value), math.cos(self.value),
                           -math.sin(self.value))

    def cos(self):
        return self._chain(math.cos(self.value), -math.sin(self.value),
                           -math.cos(self.value))

    def exp(self):
        value = math.exp(self.value)
        return self._chain(value, value, value)

    def _chain(self, value, first, second):
        hessian = None
        if self.hessian is not None:
            hessian = second * np.outer(self.gradient, self.gradient) + first * self.hessian
        return Jet2(value, first * self.gradient, hessian)

    def __repr__(self):
        return 'Jet2(value={}, gradient={})'.format(self.value, self.gradient)


def _combine(left, right, operation):
    if left is None or right is None:
        return None
    return operation(left, right)


def guarded_divide(numerator, denominator):
    """ Float division with the same guard the jets apply. """
    if abs(denominator) < DIVISION_GUARD:
        raise DomainGuardException(
            'Division by {} is below the guard {}'.format(denominator, DIVISION_GUARD))
    return numerator / denominator


class DomainGuardException(NumericFailureException):
    def __init__(self, message):
        super().__init__(message)
