"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import numpy as np

ZERO_CUTOFF = 1e-15


class StringWriter():
    def __init__(self):
        self.result = ""

    def write(self, string_to_append):
        self.result += string_to_append

    def write_line(self, string_to_append=''):
        self.write(string_to_append + '\n')

    def write_rule(self, char='-', width=60):
        self.write_line(char * width)

    def write_matrix(self, matrix, indent='  '):
        for row in np.asarray(matrix, dtype=float):
            self.write_line(indent + ' '.join('{:>10.4g}'.format(value) for value in row))

    def write_entries(self, name, tensor, indent='  '):
        """ Non-zero entries of a tensor with 1-based frame indices. """
        values = np.asarray(tensor, dtype=float)
        found = False
        for index in zip(*np.nonzero(np.abs(values) > ZERO_CUTOFF)):
            label = ','.join(str(int(k) + 1) for k in index)
            self.write_line('{}{}[{}] = {:.12g}'.format(indent, name, label, values[index]))
            found = True
        if not found:
            self.write_line('{}{} = 0'.format(indent, name))

    def to_string(self):
        return self.result
