"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

from common.checkresults import CheckResults
import logging


class CheckResultsValidator(object):
    def validate(self, results):
        if not isinstance(results, CheckResults):
            raise ValueError("Invalid results. Expected CheckResults")

        failing = [result for result in results.results if not result.passed]
        for result in failing:
            logging.debug('Check {} failed with {} (tolerance {})'.format(
                result.check_name, result.value, result.tolerance))
        if failing:
            names = ', '.join(result.check_name for result in failing)
            raise CheckFailureException(
                '{} of {} checks failed on {}: {}'.format(
                    len(failing), results.checks, results.model_name, names))


class CheckFailureException(Exception):
    def __init__(self, message):
        super().__init__(message)
