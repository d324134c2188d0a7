"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import json
import math


def get_check_results():
    return CheckResults()


class CheckResults(object):
    """ Residuals of every suite run against one model, in request order. """

    def __init__(self, model_name='', samples=0):
        self.model_name = model_name
        self.samples = samples
        self.results = []
        self.num_failures = 0
        self.total_execution_time = 0

    def append(self, residual_result):
        if not isinstance(residual_result, ResidualResult):
            raise TypeError("Can only append ResidualResult to CheckResults")

        self.results.append(residual_result)
        if not residual_result.passed:
            self.num_failures += 1
        self.total_execution_time += residual_result.execution_time

    def extend(self, residual_results):
        for residual_result in residual_results:
            self.append(residual_result)

    @property
    def checks(self):
        return len(self.results)

    def suites(self):
        names = []
        for result in self.results:
            if result.suite not in names:
                names.append(result.suite)
        return names

    def by_suite(self, suite):
        return [result for result in self.results if result.suite == suite]

    def passed(self):
        return all(result.passed for result in self.results)

    def to_dict(self):
        suites = {}
        for suite in self.suites():
            suites[suite] = {result.name: result.to_dict() for result in self.by_suite(suite)}
        return {'model': self.model_name,
                'samples': self.samples,
                'passed': self.passed(),
                'failures': self.num_failures,
                'suites': suites}

    def serialize(self):
        # execution times are left out so identical runs give identical reports
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'

    @classmethod
    def deserialize(cls, text):
        document = json.loads(text)
        results = cls(document['model'], document['samples'])
        for suite, residuals in document['suites'].items():
            for name, entry in residuals.items():
                results.append(ResidualResult(suite, name, entry['value'], entry['tolerance']))
        return results

    def __eq__(self, other):
        if not isinstance(self, other.__class__):
            return False
        if len(self.results) != len(other.results):
            return False
        return all(item in self.results for item in other.results)


class ResidualResult(object):
    def __init__(self, suite, name, value, tolerance, execution_time=0, exception=None):
        self.suite = suite
        self.name = name
        self.value = float(value)
        self.tolerance = float(tolerance)
        self.execution_time = execution_time
        self.exception = exception

    @property
    def passed(self):
        if self.exception is not None or not math.isfinite(self.value):
            return False
        return self.value <= self.tolerance

    @property
    def check_name(self):
        return '{}.{}'.format(self.suite, self.name)

    def to_dict(self):
        entry = {'value': self.value, 'tolerance': self.tolerance, 'passed': self.passed}
        if self.exception is not None:
            entry['error'] = '{}: {}'.format(type(self.exception).__name__, self.exception)
        return entry

    def __eq__(self, other):
        if isinstance(self, other.__class__):
            return self.suite == other.suite \
                and self.name == other.name \
                and self.passed == other.passed \
                and (self.value == other.value or
                     math.isnan(self.value) and math.isnan(other.value))
        return False
