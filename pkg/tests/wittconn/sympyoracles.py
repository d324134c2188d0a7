"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import numpy as np
import sympy


class CoordinateOracle(object):
    """
    Symbolic Levi-Civita connection and curvature of the metric a frame
    model induces on its chart, reported in frame components.
    """

    def __init__(self, coordinates, frame_rows, gram):
        self.symbols = sympy.symbols(coordinates)
        names = dict(zip(coordinates, self.symbols))
        rows = [[sympy.sympify(str(entry), locals=names) for entry in row] for row in frame_rows]
        self.frame = sympy.Matrix(rows).T
        self.inverse = self.frame.inv()
        metric = self.inverse.T * sympy.Matrix(gram) * self.inverse
        self.dimension = len(self.symbols)
        metric_inverse = metric.inv()
        d, s = self.dimension, self.symbols
        self.christoffel = [[[sum(metric_inverse[r, q] * (sympy.diff(metric[q, n], s[m])
                                                          + sympy.diff(metric[q, m], s[n])
                                                          - sympy.diff(metric[m, n], s[q]))
                                  for q in range(d)) / 2
                              for n in range(d)] for m in range(d)] for r in range(d)]

    def _at(self, expression, point):
        return float(expression.subs(dict(zip(self.symbols, point))))

    def coefficients(self, point):
        """ Gamma[a, b, c]: c-th frame component of nabla_{E_a} E_b. """
        d, s, F, gamma = self.dimension, self.symbols, self.frame, self.christoffel
        result = np.zeros((d, d, d))
        for a in range(d):
            for b in range(d):
                vector = [sum(F[m, a] * sympy.diff(F[r, b], s[m]) for m in range(d))
                          + sum(gamma[r][m][n] * F[m, a] * F[n, b]
                                for m in range(d) for n in range(d))
                          for r in range(d)]
                components = self.inverse * sympy.Matrix(vector)
                result[a, b] = [self._at(value, point) for value in components]
        return result

    def curvature(self, point):
        """ R[a, b, c, d]: d-th frame component of R(E_a, E_b)E_c. """
        d, s, gamma = self.dimension, self.symbols, self.christoffel
        riemann = [[[[sympy.diff(gamma[r][n][q], s[m]) - sympy.diff(gamma[r][m][q], s[n])
                      + sum(gamma[r][m][l] * gamma[l][n][q] - gamma[r][n][l] * gamma[l][m][q]
                            for l in range(d))
                      for n in range(d)] for m in range(d)] for q in range(d)] for r in range(d)]
        values = np.array([[[[self._at(riemann[r][q][m][n], point) for n in range(d)]
                             for m in range(d)] for q in range(d)] for r in range(d)])
        substitution = dict(zip(s, point))
        frame = np.array(self.frame.subs(substitution), dtype=float)
        inverse = np.array(self.inverse.subs(substitution), dtype=float)
        return np.einsum('rqmn,ma,nb,qc,dr->abcd', values, frame, frame, frame, inverse)
