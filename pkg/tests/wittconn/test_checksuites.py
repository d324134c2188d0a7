"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import math

import numpy as np
import pytest

from common.checksuites import (CHART_BIANCHI_TOLERANCE, CheckSuites, Tolerances,
                                UnknownSuiteException, WittChecker, WittStatusEvents,
                                default_suites, get_checker)
from common.manifolds import abelian, fefferman_heisenberg, oscillator
from common.wittcore import FrameModel, ParityUnassignedException


def test__parse__comma_separated_with_repeats__ordered_unique():
    suites = CheckSuites.parse('bianchi, Compatibility,bianchi,')

    assert suites == [CheckSuites.Bianchi, CheckSuites.Compatibility]


def test__parse__unknown_name__unknown_suite():
    with pytest.raises(UnknownSuiteException) as error:
        CheckSuites.parse(['bianchi', 'ricci'])

    assert 'lichnerowicz' in str(error.value)


params = [
    (oscillator([1.0]), ['compatibility', 'bianchi', 'specialization']),
    (abelian(4), ['compatibility', 'bianchi']),
    (abelian(4, True), ['compatibility', 'bianchi', 'specialization']),
]
@pytest.mark.parametrize('model, expected', params)
def test__default_suites__by_null_pair(model, expected):
    assert [suite.value for suite in default_suites(model)] == expected


def test__tolerances__lie_model__one_tolerance_for_all():
    tolerances = Tolerances(oscillator([1.0]))

    assert set(tolerances.to_dict().values()) == {1e-12}


def test__tolerances__chart_model__looser_bianchi():
    tolerances = Tolerances(fefferman_heisenberg(1))

    assert tolerances.for_suite(CheckSuites.Compatibility) == 1e-9
    assert tolerances.for_suite(CheckSuites.Bianchi) == CHART_BIANCHI_TOLERANCE


def test__tolerances__override__applies_to_every_suite():
    tolerances = Tolerances(fefferman_heisenberg(1), '1e-3')

    assert set(tolerances.to_dict().values()) == {1e-3}


def test__run_checks__osc_default_suites__all_pass():
    results = get_checker().run_checks(oscillator([1.0, 2.0]))

    assert results.passed()
    assert results.model_name == 'osc'
    assert results.samples == 1
    assert results.suites() == ['compatibility', 'bianchi', 'specialization']
    assert [result.name for result in results.by_suite('specialization')] == ['null_pair_torsion']


def test__run_checks__abelian_null_pair__screen_torsion_checked():
    results = get_checker().run_checks(abelian(4, True), ['specialization'])

    names = [result.name for result in results.results]
    assert names == ['null_pair_torsion', 'screen_torsion']
    assert all(result.value == 0.0 for result in results.results)


def test__run_checks__symmetric_without_parity__applicable_failure_others_run():
    results = get_checker().run_checks(oscillator([1.0]), 'compatibility,symmetric')

    failure = results.by_suite('symmetric')[0]
    assert failure.name == 'applicable'
    assert math.isnan(failure.value)
    assert isinstance(failure.exception, ParityUnassignedException)
    assert results.num_failures == 1
    assert all(result.passed for result in results.by_suite('compatibility'))


def test__run_checks__fefferman_chart__all_suites_pass():
    model = fefferman_heisenberg(1)

    results = get_checker().run_checks(model, 'compatibility,bianchi,specialization,lichnerowicz',
                                       samples=2)

    assert results.samples == 2
    failing = [result.check_name for result in results.results if not result.passed]
    assert failing == []


def test__run_checks__parallel_suites__same_order_as_sequential():
    model = oscillator([1.0])
    suites = 'lichnerowicz,bianchi,compatibility,specialization'

    sequential = get_checker().run_checks(model, suites)
    parallel = get_checker().run_checks(model, suites, max_parallel_suites=4)

    assert parallel.suites() == sequential.suites() == \
        ['lichnerowicz', 'bianchi', 'compatibility', 'specialization']
    assert parallel == sequential


def test__run_checks__tolerance_override__recorded_on_results():
    results = get_checker().run_checks(oscillator([1.0]), ['bianchi'], tolerance=0.5)

    assert {result.tolerance for result in results.results} == {0.5}


def test__run_checks__status_events__listing_then_one_pair_per_suite(mocker):
    mocker.patch.object(WittChecker, '_add_status_event')
    checker = get_checker()

    checker.run_checks(abelian(3), ['compatibility', 'bianchi'])

    events = [call.args[0] for call in checker._add_status_event.call_args_list]
    assert events[0] == WittStatusEvents.SuitesListing
    assert events.count(WittStatusEvents.SuiteScheduling) == 2
    assert events.count(WittStatusEvents.SuiteExecuted) == 2
    assert events.count(WittStatusEvents.SuiteExecutionResult) == 2


def test__run_checks__unexpected_error__propagates(mocker):
    mocker.patch('common.checksuites.bianchi_report', side_effect=RuntimeError('boom'))

    with pytest.raises(RuntimeError):
        get_checker().run_checks(abelian(3), ['bianchi'])


def test__run_checks__lichnerowicz_with_twisted_structure__passes():
    # J X1 = X2, J Y1 = -Y2 on slots n, n*, X1, X2, Y1, Y2
    base = fefferman_heisenberg(2)
    J = np.zeros((6, 6))
    J[3, 2], J[2, 3], J[5, 4], J[4, 5] = 1.0, -1.0, -1.0, 1.0
    model = FrameModel(base.structure, base.backend, base.null_pair, base.name, J,
                       base.fefferman, base.params)

    results = get_checker().run_checks(model, ['lichnerowicz'], samples=2)

    assert [result.check_name for result in results.results if not result.passed] == []
    assert len(results.by_suite('lichnerowicz')) == 3
