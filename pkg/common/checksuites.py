"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import enum
import logging
import time

import numpy as np

from . import scheduler
from .checkresults import CheckResults, ResidualResult
from .connection import canonical_torsion, compatibility_report
from .curvature import bianchi_report, symmetric_space_report
from .errors import ModelDefinitionException
from .hermitian import lichnerowicz_connection, robinson_symmetric_report
from .nullpairtorsion import null_pair_torsion, screen_torsion
from .sampling import sample_points
from .statuseventhandler import StatusEventsHandler
from .wittcore import CHART_TOLERANCE, NotNullPairModelException

CHART_BIANCHI_TOLERANCE = 1e-8


class CheckSuites(enum.Enum):
    Compatibility = 'compatibility'
    Bianchi = 'bianchi'
    Specialization = 'specialization'
    Symmetric = 'symmetric'
    Robinson = 'robinson'
    Lichnerowicz = 'lichnerowicz'

    @classmethod
    def parse(cls, names):
        if isinstance(names, str):
            names = [name for name in names.split(',') if name.strip()]
        suites = []
        for name in names:
            try:
                suite = cls(str(name).strip().lower())
            except ValueError:
                raise UnknownSuiteException(
                    'Unknown suite {!r}. Suites: {}'.format(
                        name, ', '.join(suite.value for suite in cls)))
            if suite not in suites:
                suites.append(suite)
        return suites


class WittStatusEvents(enum.Enum):
    SuitesListing = 1
    SuiteScheduling = 2
    SuiteExecuted = 3
    SuiteExecutionResult = 4


class Tolerances(object):
    """ Pass thresholds by backend kind; an override applies to every suite. """

    def __init__(self, model, override=None):
        self.base = model.default_tolerance if override is None else float(override)
        self.bianchi = self.base
        if override is None and not model.backend.is_constant:
            self.bianchi = CHART_BIANCHI_TOLERANCE
        self.override = override

    def for_suite(self, suite):
        return self.bianchi if suite is CheckSuites.Bianchi else self.base

    def to_dict(self):
        return {suite.value: self.for_suite(suite) for suite in CheckSuites}


def default_suites(model):
    suites = [CheckSuites.Compatibility, CheckSuites.Bianchi]
    if model.null_pair is not None and model.null_pair.is_rank_one(model.grading):
        suites.append(CheckSuites.Specialization)
    return suites


def get_checker(event_handler=None):
    return WittChecker(event_handler)


class WittChecker(object):
    """ Runs residual suites on a model, possibly in parallel. """

    def __init__(self, event_handler=None):
        self._events_processor = StatusEventsHandler(event_handler)

    def run_checks(self, model, suites=None, samples=None, box=None, tolerance=None,
                   max_parallel_suites=1):
        suites = default_suites(model) if suites is None else CheckSuites.parse(suites)
        points = sample_points(model, samples, box)
        tolerances = Tolerances(model, tolerance)
        self._add_status_event(WittStatusEvents.SuitesListing, len(suites))

        suite_scheduler = scheduler.get_scheduler(max_parallel_suites)
        for order, suite in enumerate(suites):
            self._add_status_event(WittStatusEvents.SuiteScheduling, suite.value)
            suite_scheduler.add_function(self._execute_suite, key=order, suite=suite,
                                         model=model, points=points, tolerances=tolerances)
        job_results = suite_scheduler.run_and_wait()

        results = CheckResults(model.name, len(points))
        for job_result in job_results:
            if job_result.exception is not None:
                raise job_result.exception
            results.extend(job_result.value)
        return results

    def _execute_suite(self, suite, model, points, tolerances):
        logging.debug('Running suite {} on {}'.format(suite.value, model.name))
        start = time.perf_counter()
        tolerance = tolerances.for_suite(suite)
        try:
            residuals = SUITE_RUNNERS[suite](model, points)
            elapsed = time.perf_counter() - start
            results = [ResidualResult(suite.value, name, value, tolerance, elapsed)
                       for name, value in residuals.items()]
        except ModelDefinitionException as error:
            # a suite that does not apply to the model fails without stopping the others
            logging.debug('Suite {} failed: {}'.format(suite.value, error))
            results = [ResidualResult(suite.value, 'applicable', float('nan'), tolerance,
                                      time.perf_counter() - start, error)]
        self._add_status_event(WittStatusEvents.SuiteExecuted, results)
        self._add_status_event(WittStatusEvents.SuiteExecutionResult, suite.value)
        return results

    def events_processor_wait(self):
        self._events_processor.wait()

    def _add_status_event(self, name, status):
        self._events_processor.add_event(name, status)


def compatibility_suite(model, points):
    return compatibility_report(model, points).residuals


def bianchi_suite(model, points):
    return bianchi_report(model, points).residuals


def specialization_suite(model, points):
    """ Canonical torsion against the case-by-case null pair evaluators. """
    if model.null_pair is None:
        raise NotNullPairModelException(
            'The specialization suite needs a null pair, model {} has none'.format(model.name))
    null_pair, screen = 0.0, None
    for point in points:
        canonical = canonical_torsion(model, point)
        difference = np.max(np.abs(null_pair_torsion(model, point) - canonical))
        null_pair = max(null_pair, float(difference))
        try:
            value = float(np.max(np.abs(screen_torsion(model, point) - canonical)))
        except NotNullPairModelException:
            continue
        screen = value if screen is None else max(screen, value)
    residuals = {'null_pair_torsion': null_pair}
    if screen is not None:
        residuals['screen_torsion'] = screen
    return residuals


def symmetric_suite(model, points):
    return symmetric_space_report(model, points).residuals


def robinson_suite(model, points):
    return robinson_symmetric_report(model, points=points).residuals


def lichnerowicz_suite(model, points):
    worst = {}
    for point in points:
        for name, value in lichnerowicz_connection(model, x=point).residuals.items():
            worst[name] = max(worst.get(name, 0.0), value)
    return worst


SUITE_RUNNERS = {
    CheckSuites.Compatibility: compatibility_suite,
    CheckSuites.Bianchi: bianchi_suite,
    CheckSuites.Specialization: specialization_suite,
    CheckSuites.Symmetric: symmetric_suite,
    CheckSuites.Robinson: robinson_suite,
    CheckSuites.Lichnerowicz: lichnerowicz_suite,
}


class UnknownSuiteException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)
