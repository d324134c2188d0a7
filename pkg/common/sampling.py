"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging

import numpy as np
from scipy.stats import qmc

DEFAULT_CHART_SAMPLES = 32
SAMPLING_SEED = 20190611
DEFAULT_BOX = (-1.0, 1.0)


def sample_points(model, count=None, box=None):
    """
    Deterministic sample points of a model. Left-invariant models need one
    point; chart models get a scrambled Sobol sequence with a fixed seed,
    clipped to the chart domain when one is declared.
    """
    if model.backend.is_constant:
        return [model.origin()]

    count = DEFAULT_CHART_SAMPLES if count is None else int(count)
    if count < 1:
        raise ValueError('At least one sample point is required, got {}'.format(count))
    dimension = model.backend.chart_dimension
    low, high = _bounds(model, dimension, box)

    sampler = qmc.Sobol(d=dimension, scramble=True, seed=SAMPLING_SEED)
    # Sobol balance needs powers of two; extra points are dropped
    unit = sampler.random_base2(m=int(np.ceil(np.log2(count))))[:count]
    points = qmc.scale(unit, low, high)
    logging.debug('Sampled {} points of {} in [{}, {}]'.format(
        count, model.name, low.tolist(), high.tolist()))
    return [np.array(point) for point in points]


def _bounds(model, dimension, box):
    low, high = DEFAULT_BOX if box is None else box
    low = np.full(dimension, float(low))
    high = np.full(dimension, float(high))
    domain = getattr(model.backend, 'domain', None)
    if domain is not None:
        # samples keep stencil clearance from the domain edge
        margin = 0.05 * (domain[:, 1] - domain[:, 0])
        low = np.maximum(low, domain[:, 0] + margin)
        high = np.minimum(high, domain[:, 1] - margin)
    return low, high
