"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging
import sys
from common.checksuites import WittStatusEvents
from common.statuseventhandler import EventHandler


class ConsoleEventHandler(EventHandler):
    def __init__(self, debug):
        self._debug = debug
        self._listed_suites = 0
        self._scheduled_suites = 0
        self._done_suites = 0
        super().__init__()

    def handle(self, event_queue):
        while True:
            self._get_and_handle(event_queue)

    def _get_and_handle(self, event_queue):
        try:
            event_instance = event_queue.get()
            if self._debug:
                logging.debug(
                    'Message from queue: {}'.format(event_instance))
                return
            output = self._get_output(event_instance)
            self._print_output(output)
        except Exception as ex:
            print(ex)
            logging.debug(ex)
        finally:
            event_queue.task_done()

    def _print_output(self, output):
        if output is None:
            return
        print(output, end='', file=sys.stdout, flush=True)

    def _get_output(self, event_instance):
        event_output = self._get_event_output(event_instance)
        if not event_output:
            return None
        return '--> {}\n'.format(event_output)

    def _get_event_output(self, event_instance):
        if event_instance.event is WittStatusEvents.SuitesListing:
            return self._handle_suiteslisting(event_instance)
        if event_instance.event is WittStatusEvents.SuiteScheduling:
            return self._handle_suitescheduling(event_instance)
        if event_instance.event is WittStatusEvents.SuiteExecuted:
            return self._handle_suiteexecuted(event_instance)
        if event_instance.event is WittStatusEvents.SuiteExecutionResult:
            return self._handle_suiteexecutionresult(event_instance)
        return ''

    def _handle_suiteslisting(self, event):
        self._listed_suites = event.data
        return '{} suites requested'.format(self._listed_suites)

    def _handle_suitescheduling(self, event):
        self._scheduled_suites += 1
        return '{} of {} suites scheduled ({})'.format(
            self._scheduled_suites, self._listed_suites, event.data)

    def _handle_suiteexecuted(self, event):
        results = event.data
        if not results:
            return ''
        passed = all(result.passed for result in results)
        return '{} Success:{}'.format(results[0].suite, passed)

    def _handle_suiteexecutionresult(self, event):
        self._done_suites += 1
        return '{} of {} suites executed'.format(self._done_suites, self._listed_suites)
