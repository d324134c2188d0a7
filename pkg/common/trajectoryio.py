"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import csv
import json
import logging

import numpy as np

from .errors import ModelDefinitionException

TRAJECTORY_FORMATS = ('csv', 'json')


def trajectory_columns(model, trajectory, residuals=None):
    """
    Ordered (name, values) columns: t, coordinates, frame velocities v1..vm,
    then lambda1, lambda2 and any residual columns.
    """
    coordinates = getattr(model.backend, 'coordinates', None) or \
        ['x{}'.format(k + 1) for k in range(model.backend.chart_dimension)]
    reserved = {'t', 'lambda1', 'lambda2'} | {'v{}'.format(a + 1) for a in range(model.dimension)}
    # chart coordinates may reuse column names, the Fefferman chart has t
    coordinates = ['{}_coord'.format(name) if name in reserved else name for name in coordinates]
    columns = [('t', trajectory.times)]
    columns += [(name, trajectory.points[:, k]) for k, name in enumerate(coordinates)]
    columns += [('v{}'.format(a + 1), trajectory.velocities[:, a])
                for a in range(trajectory.velocities.shape[1])]
    if trajectory.multipliers is not None:
        columns += [('lambda1', trajectory.multipliers[:, 0]),
                    ('lambda2', trajectory.multipliers[:, 1])]
    for name, values in (residuals or {}).items():
        values = np.broadcast_to(np.asarray(values, dtype=float), trajectory.times.shape)
        columns.append((name, values))
    return columns


def write_trajectory(model, trajectory, path, fmt='csv', residuals=None):
    if fmt not in TRAJECTORY_FORMATS:
        raise UnknownFormatException(
            'Unknown trajectory format {!r}. Formats: {}'.format(
                fmt, ', '.join(TRAJECTORY_FORMATS)))
    columns = trajectory_columns(model, trajectory, residuals)
    with open(path, 'w', newline='') as handle:
        if fmt == 'csv':
            writer = csv.writer(handle)
            writer.writerow([name for name, _ in columns])
            for row in range(len(trajectory)):
                writer.writerow([repr(float(values[row])) for _, values in columns])
        else:
            document = {'kind': trajectory.kind,
                        'columns': [name for name, _ in columns],
                        'rows': [[float(values[row]) for _, values in columns]
                                 for row in range(len(trajectory))]}
            handle.write(json.dumps(document, indent=1) + '\n')
    logging.debug('Wrote {} rows of {} to {}'.format(len(trajectory), trajectory.kind, path))
    return path


def read_trajectory_table(path):
    """ Column name -> array for csv or json trajectory files. """
    with open(path, 'r', newline='') as handle:
        if path.endswith('.json'):
            document = json.load(handle)
            rows = np.array(document['rows'], dtype=float)
            names = document['columns']
        else:
            reader = csv.reader(handle)
            names = next(reader)
            rows = np.array([[float(value) for value in row] for row in reader], dtype=float)
    return {name: rows[:, k] for k, name in enumerate(names)}


class UnknownFormatException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)
