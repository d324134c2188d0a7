"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

from abc import abstractmethod, ABC
from .checkresults import CheckResults
from junit_xml import TestSuite, TestCase
import datetime
import json
import logging


class CheckResultsReportWriter(ABC):
    """
    """

    @abstractmethod
    def add_result(self, check_results, tolerances=None):
        pass

    @abstractmethod
    def to_file(self, path):
        pass

    @abstractmethod
    def has_data(self):
        pass

    @abstractmethod
    def default_name(self):
        pass

    def write(self, path=None):
        report_name = path or self.default_name()
        self.to_file(report_name)
        return report_name

    def _validate_add_results(self, check_results):
        if not isinstance(check_results, CheckResults):
            raise ValueError('Expected an instance of CheckResults')


def _timestamped(prefix, extension):
    return '{0}.{1:%Y.%m.%d.%H%M%S%f}.{2}'.format(
        prefix, datetime.datetime.now(datetime.timezone.utc), extension)


class JsonReportWriter(CheckResultsReportWriter):
    """ One JSON document per model; tolerances are echoed next to the residuals. """

    def __init__(self):
        super().__init__()
        self._reports = []

    def add_result(self, check_results, tolerances=None):
        self._validate_add_results(check_results)
        document = check_results.to_dict()
        if tolerances is not None:
            document['tolerances'] = tolerances
        self._reports.append(document)

    def has_data(self):
        return len(self._reports) > 0

    def default_name(self):
        return _timestamped('wittconn-report', 'json')

    def to_file(self, path):
        payload = self._reports[0] if len(self._reports) == 1 else self._reports
        with open(path, 'w') as file:
            file.write(json.dumps(payload, indent=2, sort_keys=True) + '\n')


class JunitXMLReportWriter(CheckResultsReportWriter):
    def __init__(self):
        super().__init__()
        self.all_test_suites = []

    def add_result(self, check_results, tolerances=None):
        self._validate_add_results(check_results)

        t_suite = self._to_junitxml(check_results)
        self.all_test_suites.append(t_suite)

    def _to_junitxml(self, check_results):
        tsuite = TestSuite('wittconn.{}'.format(check_results.model_name))
        for result in check_results.results:
            outcome = 'value={!r} tolerance={!r}'.format(result.value, result.tolerance)
            t_case = TestCase(result.check_name,
                              classname=check_results.model_name,
                              stdout=outcome)
            if not result.passed:
                message = 'FAILED'
                if result.exception is not None:
                    message = '{}: {}'.format(type(result.exception).__name__, result.exception)
                logging.debug('Check {} failed: {}'.format(result.check_name, message))
                t_case.add_failure_info(message, outcome)

            tsuite.test_cases.append(t_case)
        return tsuite

    def has_data(self):
        return len(self.all_test_suites) > 0

    def default_name(self):
        return _timestamped('wittconn-result', 'xml')

    def to_file(self, path):
        with open(path, 'w') as file:
            file.write(TestSuite.to_xml_string(self.all_test_suites))
