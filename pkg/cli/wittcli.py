"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import fire
import json
import logging
import datetime

import numpy as np

from .cli import get_cli_version
from common.checksuites import Tolerances, get_checker
from common.connection import canonical_torsion, connection_coefficients
from common.errors import ModelDefinitionException, NumericFailureException
from common.geodesics import (DEFAULT_STEPS, integrate_geodesic, integrate_normal_sr_geodesic,
                              lightlike_residual, lightlike_terms)
from common.hermitian import fefferman_multiplier_diagnostic
from common.manifolds import builtin_model
from common.manifoldspec import (build_model, emit_manifold_spec, load_manifold_spec_file,
                                 model_to_spec)
from common.trajectoryio import write_trajectory

import common.resultsview as view
from .eventhandlers import ConsoleEventHandler
from .resultsvalidator import CheckFailureException, CheckResultsValidator
from .reportsman import ReportWriters, ReportWritersTypes
from . import reportsman as reports

EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERIC_FAILURE = 3
LIGHTLIKE_VERIFY_TOLERANCE = 1e-6


def get_cli_header():
    header = 'wittconn Version {}\n'.format(get_cli_version())
    header += '+' * 50
    header += '\n'

    return header


def resolve_model(model=None, spec=None, parity=None, **params):
    """ Built-in or spec-file model, optionally with signed block indices. """
    if bool(model) == bool(spec):
        raise UsageException('Exactly one of --model or --spec must be given')
    if model:
        resolved = builtin_model(str(model), params)
    else:
        if params:
            raise UsageException(
                'Model parameters {} only apply to built-in models'.format(sorted(params)))
        resolved = build_model(load_manifold_spec_file(spec))
    if parity:
        if isinstance(parity, str):
            parity = json.loads(parity)
        resolved = resolved.with_grading(resolved.grading.with_indices(parity))
    return resolved


def _vector(value, name, length=None):
    if isinstance(value, str):
        value = json.loads(value)
    vector = np.atleast_1d(np.asarray(value, dtype=float))
    if vector.ndim != 1 or (length is not None and len(vector) != length):
        raise UsageException('--{} must be a list of {} numbers, got {!r}'.format(
            name, length if length is not None else 'some', value))
    if not np.all(np.isfinite(vector)):
        raise UsageException('--{} must be finite, got {!r}'.format(name, value))
    return vector


class WittCLI(object):

    def __init__(self, debug=False, log_to_file=False, version=False):
        self._logger = logging.getLogger('WittCLI')
        self._handle_show_version(version)

        # CLI only logger so the output is not dictated
        # by the logging configuration of all the other components
        self._set_debugging(debug, log_to_file)
        self._debug = debug
        self._print_cli_header()
        super().__init__()

    def inspect(self, model=None, spec=None, point=None, parity=None, **params):
        self._execute(self._inspect, model, spec, point, parity, params)

    def check(self, model=None, spec=None, suite=None, samples=None, box=None, tol=None,
              parity=None, out=None, junit_report=False, max_parallel_suites=1, **params):
        self._execute(self._check, model, spec, suite, samples, box, tol, parity, out,
                      junit_report, max_parallel_suites, params)

    def geodesic(self, model=None, spec=None, point=None, v0=None, lambda0=None,
                 span=(0.0, 1.0), steps=DEFAULT_STEPS, normal_sr=False, lightlike=False,
                 out=None, format='csv', tol=None, parity=None, **params):
        self._execute(self._geodesic, model, spec, point, v0, lambda0, span, steps, normal_sr,
                      lightlike, out, format, tol, parity, params)

    def export(self, model=None, spec=None, out=None, parity=None, **params):
        self._execute(self._export, model, spec, out, parity, params)

    def _execute(self, command, *args):
        try:
            command(*args)
        except CheckFailureException as error:
            self._logger.fatal(error)
            exit(EXIT_CHECK_FAILURE)
        except NumericFailureException as error:
            self._logger.fatal('{}: {}'.format(type(error).__name__, error))
            exit(EXIT_NUMERIC_FAILURE)
        except (ModelDefinitionException, OSError, ValueError, TypeError) as error:
            self._logger.fatal('{}: {}'.format(type(error).__name__, error))
            exit(EXIT_USAGE)

    def _inspect(self, model, spec, point, parity, params):
        resolved = resolve_model(model, spec, parity, **params)
        x = resolved.origin() if point is None \
            else _vector(point, 'point', resolved.backend.chart_dimension)
        inspect_view = view.get_inspect_view(resolved, x, canonical_torsion(resolved, x),
                                             connection_coefficients(resolved, x))
        view.print_results_view(inspect_view)

    def _check(self, model, spec, suite, samples, box, tol, parity, out, junit_report,
               max_parallel_suites, params):
        resolved = resolve_model(model, spec, parity, **params)
        logging.debug('Checking {} suites: {} samples: {} box: {} tol: {}'.format(
            resolved.name, suite, samples, box, tol))
        checker = get_checker(ConsoleEventHandler(self._debug))
        results = checker.run_checks(resolved, suite, samples,
                                     None if box is None else tuple(_vector(box, 'box', 2)),
                                     tol, int(max_parallel_suites))
        checker.events_processor_wait()
        view.print_results_view(view.get_check_results_view(results))

        report_man = self._get_report_writer_manager(out, junit_report)
        report_man.add_result(results, Tolerances(resolved, tol).to_dict())
        for provider in report_man.providers_names():
            print('Writing {} report.'.format(provider.name))
        for file_name in report_man.write():
            print('File {} written'.format(file_name))

        CheckResultsValidator().validate(results)

    def _get_report_writer_manager(self, out, junit_report):
        writers = ReportWriters.JSON
        if junit_report:
            writers = writers + ReportWriters.JUNIT
        paths = {ReportWritersTypes.JSON: out}
        return reports.get_report_writer_manager(writers, paths)

    def _geodesic(self, model, spec, point, v0, lambda0, span, steps, normal_sr, lightlike, out,
                  fmt, tol, parity, params):
        if normal_sr and lightlike:
            raise UsageException('--normal_sr and --lightlike are exclusive')
        if v0 is None:
            raise UsageException('--v0 is required')
        resolved = resolve_model(model, spec, parity, **params)
        x0 = resolved.origin() if point is None \
            else _vector(point, 'point', resolved.backend.chart_dimension)
        velocity = _vector(v0, 'v0', resolved.dimension)
        interval = tuple(_vector(span, 'span', 2))
        residuals = {}

        if normal_sr:
            multipliers = (0.0, 0.0) if lambda0 is None else _vector(lambda0, 'lambda0', 2)
            trajectory = integrate_normal_sr_geodesic(resolved, x0, velocity, multipliers,
                                                      interval, int(steps))
        else:
            trajectory = integrate_geodesic(resolved, x0, velocity, interval, int(steps))
        residuals['g_vv'] = np.array([resolved.structure.inner(v, v)
                                      for v in trajectory.velocities])

        failure = None
        if lightlike:
            tolerance = LIGHTLIKE_VERIFY_TOLERANCE if tol is None else float(tol)
            first, second = lightlike_residual(resolved, trajectory)
            residuals['lightlike_n'], residuals['lightlike_nstar'] = \
                lightlike_terms(resolved, trajectory)
            print('Lightlike residuals: {:.3e} {:.3e} (tol {:.1e})'.format(
                first, second, tolerance))
            if max(first, second) > tolerance:
                failure = 'Lightlike residual {:.3e} exceeds {:.1e}'.format(
                    max(first, second), tolerance)

        file_name = out or 'wittconn-trajectory.{0:%Y.%m.%d.%H%M%S%f}.{1}'.format(
            datetime.datetime.now(datetime.timezone.utc), fmt)
        write_trajectory(resolved, trajectory, file_name, fmt, residuals)
        view.print_results_view(view.get_trajectory_view(trajectory, file_name))

        if normal_sr and resolved.fefferman is not None:
            diagnostic = fefferman_multiplier_diagnostic(resolved, trajectory=trajectory)
            for key, value in diagnostic.to_dict().items():
                print('{}: {}'.format(key, value))
        if failure is not None:
            raise CheckFailureException(failure)

    def _export(self, model, spec, out, parity, params):
        resolved = resolve_model(model, spec, parity, **params)
        document = emit_manifold_spec(model_to_spec(resolved))
        if out is None:
            print(document, end='')
            return
        with open(out, 'w') as handle:
            handle.write(document)
        print('File {} written'.format(out))

    def _print_cli_header(self):
        print(get_cli_header())

    def _handle_show_version(self, version):
        if not version:
            return
        print(self._get_version_label())
        exit(0)

    def _get_version_label(self):
        version = get_cli_version()
        return 'wittconn Version {}'.format(version)

    def _set_debugging(self, debug, log_to_file):
        if debug:
            log_name = None
            if log_to_file:
                log_name = 'wittconn-exec-{0:%Y.%m.%d.%H%M%S%f}.log'.format(
                    datetime.datetime.now(datetime.timezone.utc))
            logging.basicConfig(
                filename=log_name,
                format="%(asctime)s:%(levelname)s:%(message)s",
                level=logging.DEBUG)


class UsageException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


def main():
    fire.Fire(WittCLI)


if __name__ == '__main__':
    main()
