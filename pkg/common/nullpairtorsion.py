"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.

Torsion of the canonical Witt connection written out for a rank one null
pair (n, n*) with g(n, n*) = 1, sigma = n*^flat and sigma* = n^flat. This
path works case by case from the null pair and never calls the general
block construction in connection.py, so the two can be compared.
"""

import numpy as np

from .wittcore import NotNullPairModelException, lowered_brackets, structure_functions


class _NullPairFrame(object):
    def __init__(self, model, x):
        pair = model.null_pair
        if pair is None:
            raise NotNullPairModelException(
                'Model {} has no distinguished null pair'.format(model.name))
        grading = model.grading
        if not pair.is_rank_one(grading):
            raise NotNullPairModelException(
                'The null pair of {} spans a block of rank {}'.format(
                    model.name, grading.block_dimension(grading.block_of(pair.n_slot))))
        self.structure = model.structure
        self.grading = grading
        self.n, self.nstar = pair.slots
        self.null_blocks = pair.null_blocks(grading)
        self.brackets = structure_functions(model, x)
        self.lowered = lowered_brackets(self.structure, self.brackets)
        self.dimension = self.structure.dimension

    def block(self, slot):
        return self.grading.block_of(slot)

    def is_null(self, slot):
        return slot in (self.n, self.nstar)

    def unit(self, slot):
        vector = np.zeros(self.dimension)
        vector[slot] = 1.0
        return vector

    def d_sigma(self, a, b):
        return -self.lowered[a, b, self.nstar]

    def d_sigma_star(self, a, b):
        return -self.lowered[a, b, self.n]

    def lie_metric(self, z, a, b):
        """ (L_{E_z} g)(E_a, E_b) for a constant Gram matrix. """
        return -self.lowered[z, a, b] - self.lowered[z, b, a]

    def bracket_outside(self, a, b, excluded):
        """ [E_a, E_b] with the null blocks and the excluded blocks removed. """
        skip = set(excluded) | set(self.null_blocks)
        keep = np.array([label not in skip for label in self.grading.frame_slots])
        return np.where(keep, self.brackets[a, b], 0.0)

    def tau(self, a, b):
        """ tau^j(E_a, E_b), j the block of b, found from the j/j* pairing. """
        i, j = self.block(a), self.block(b)
        rows = self.grading.slots(j)
        dual = self.grading.slots(j.star())
        lowered = self.lowered
        lie = np.array([-lowered[a, z, b] for z in dual])
        if j.is_isotropic and i == j.star():
            lie = lie - np.array([lowered[b, z, a] for z in dual])
        rhs = 0.5 * (lie - lowered[a, b, dual])
        pairing = self.structure.gram[np.ix_(rows, dual)]
        vector = np.zeros(self.dimension)
        vector[rows] = np.linalg.solve(pairing.T, rhs)
        return vector


def null_pair_torsion(model, x=None):
    """
    T[a, b, :] for a model carrying a rank one null pair and any number of
    further blocks.
    """
    frame = _NullPairFrame(model, x)
    m = frame.dimension
    torsion = np.zeros((m, m, m))
    for a in range(m):
        for b in range(a + 1, m):
            value = _null_pair_value(frame, a, b)
            torsion[a, b] = value
            torsion[b, a] = -value
    return torsion


def _null_pair_value(frame, a, b):
    n, nstar = frame.n, frame.nstar
    if frame.is_null(a) and frame.is_null(b):
        value = -frame.bracket_outside(n, nstar, [])
        return value if a == n else -value
    if frame.is_null(b):
        return -_null_pair_value(frame, b, a)
    if a == n:
        return (-frame.bracket_outside(n, b, [frame.block(b)])
                + frame.d_sigma_star(n, b) * frame.unit(nstar)
                - 0.5 * frame.lie_metric(b, n, nstar) * frame.unit(n)
                + frame.tau(n, b))
    if a == nstar:
        return (-frame.bracket_outside(nstar, b, [frame.block(b)])
                + frame.d_sigma(nstar, b) * frame.unit(n)
                - 0.5 * frame.lie_metric(b, n, nstar) * frame.unit(nstar)
                + frame.tau(nstar, b))

    i, j = frame.block(a), frame.block(b)
    value = (-frame.bracket_outside(a, b, [i, j])
             + frame.d_sigma(a, b) * frame.unit(n)
             + frame.d_sigma_star(a, b) * frame.unit(nstar))
    if i != j:
        value = value + frame.tau(a, b) - frame.tau(b, a)
    return value


def screen_torsion(model, x=None):
    """
    Torsion for the Lorentzian form (p1 + p1*) + q1: screen pairs only see
    d sigma and d sigma*, and the screen part of T(n, X) is the sharp of
    1/2 (L_n g)(X, .) on the screen.
    """
    frame = _NullPairFrame(model, x)
    screen = [label for label in frame.grading.labels if label not in frame.null_blocks]
    if len(screen) != 1 or screen[0].is_isotropic:
        raise NotNullPairModelException(
            'Expected one anisotropic screen block next to the null pair, got {}'.format(
                [label.name for label in screen]))
    screen_slots = frame.grading.slots(screen[0])
    structure = frame.structure
    n, nstar = frame.n, frame.nstar
    m = frame.dimension
    torsion = np.zeros((m, m, m))

    def screen_part(null_slot, X):
        form = np.zeros(m)
        form[screen_slots] = [0.5 * frame.lie_metric(null_slot, X, y) for y in screen_slots]
        return structure.restricted_sharp(form, [screen[0]])

    for X in screen_slots:
        for Y in screen_slots:
            torsion[X, Y] = (frame.d_sigma(X, Y) * frame.unit(n)
                             + frame.d_sigma_star(X, Y) * frame.unit(nstar))
        lie = frame.lie_metric(X, n, nstar)
        torsion[n, X] = (frame.d_sigma_star(n, X) * frame.unit(nstar)
                         - 0.5 * lie * frame.unit(n) + screen_part(n, X))
        torsion[nstar, X] = (frame.d_sigma(nstar, X) * frame.unit(n)
                             - 0.5 * lie * frame.unit(nstar) + screen_part(nstar, X))
        torsion[X, n] = -torsion[n, X]
        torsion[X, nstar] = -torsion[nstar, X]

    torsion[n, nstar] = -structure.project(frame.brackets[n, nstar], screen[0])
    torsion[nstar, n] = -torsion[n, nstar]
    return torsion
