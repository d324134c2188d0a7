"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging
import time
from queue import Queue, Empty
from threading import Thread

MAX_WORKERS = 15


def get_scheduler(num_of_workers):
    return Scheduler(num_of_workers)


class Scheduler(object):
    """
    Runs queued jobs on a pool of worker threads. Results come back
    sorted by job key, whatever the finishing order.
    """

    def __init__(self, num_of_workers):
        if num_of_workers < 1 or num_of_workers > MAX_WORKERS:
            raise ValueError(
                'Number of workers is invalid. It must be a value between 1 and {}'.format(
                    MAX_WORKERS))
        self._num_of_workers = num_of_workers
        self._jobs = Queue()
        self._done = Queue()
        self._scheduled = 0

    def add_function(self, function, key=None, **kwargs):
        key = self._scheduled if key is None else key
        self._jobs.put(ScheduledJob(key, function, kwargs))
        self._scheduled += 1

    def run_and_wait(self):
        num_of_workers = max(1, min(self._num_of_workers, self._scheduled))
        logging.debug('Starting {} workers for {} jobs'.format(num_of_workers, self._scheduled))
        workers = [JobWorker(self._jobs, self._done) for _ in range(num_of_workers)]
        for worker in workers:
            worker.start()
        for _ in workers:
            self._jobs.put(None)
        for worker in workers:
            worker.join()
        return sorted(self._drain(), key=lambda result: result.key)

    def _drain(self):
        results = []
        while True:
            try:
                results.append(self._done.get_nowait())
            except Empty:
                return results


class JobWorker(Thread):
    def __init__(self, jobs, done):
        super().__init__(daemon=True)
        self._jobs = jobs
        self._done = done

    def run(self):
        while True:
            job = self._jobs.get()
            if job is None:
                return
            self._done.put(job.run())


class ScheduledJob(object):
    def __init__(self, key, function, kwargs):
        self.key = key
        self._function = function
        self._kwargs = kwargs

    def run(self):
        start = time.perf_counter()
        try:
            value = self._function(**self._kwargs)
            return JobResult(self.key, value, None, time.perf_counter() - start)
        except Exception as ex:
            logging.debug('Job {} raised {}'.format(self.key, ex))
            return JobResult(self.key, None, ex, time.perf_counter() - start)


class JobResult(object):
    def __init__(self, key, value, exception, elapsed):
        self.key = key
        self.value = value
        self.exception = exception
        self.elapsed = elapsed
