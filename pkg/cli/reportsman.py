"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import importlib
import logging
from enum import Enum
from enum import IntEnum

from common.resultreports import CheckResultsReportWriter


def get_report_writer_manager(writers, paths=None):
    return ReportWriterManager(writers, paths)


def get_report_writer(writer):
    module = importlib.import_module('common.resultreports')
    instance = getattr(module, writer)()
    if not isinstance(instance, CheckResultsReportWriter):
        raise ValueError(
            'The report writer must a class derived from CheckResultsReportWriter')
    return instance


class ReportWriterManager(object):

    def __init__(self, report_writers, paths=None):
        self._paths = dict(paths or {})
        self._set_providers(report_writers)
        super().__init__()

    def _set_providers(self, report_writers):
        self._providers = {}
        logging.debug(
            'Setting the following report writers: {}'.format(report_writers))

        if ReportWriters.JSON & report_writers:
            self._providers[ReportWritersTypes.JSON] = get_report_writer(
                ReportWritersTypes.JSON.value)

        if ReportWriters.JUNIT & report_writers:
            self._providers[ReportWritersTypes.JUNIT] = get_report_writer(
                ReportWritersTypes.JUNIT.value)

    def add_result(self, check_results, tolerances=None):
        for key, provider in self._providers.items():
            logging.debug('Adding check results to {} provider.'.format(key))
            provider.add_result(check_results, tolerances)

    def write(self):
        file_names = []
        for key, provider in self._providers.items():
            if not provider.has_data():
                logging.debug('No check results to write for {}.'.format(key))
                continue
            file_names.append(provider.write(self._paths.get(key)))
        return file_names

    def providers_names(self):
        return [key for key, value in self._providers.items()]

    def has_providers(self):
        return len(self._providers) > 0


class ReportWritersTypes(Enum):
    JSON = 'JsonReportWriter'
    JUNIT = 'JunitXMLReportWriter'


class ReportWriters(IntEnum):
    JSON = 1
    JUNIT = 2
