"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

from abc import abstractmethod, ABC
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from queue import Queue
from threading import Thread
from typing import Any
import logging


class StatusEventsHandler(object):
    """
    Hands check progress events to a handler draining the queue on a daemon
    thread. Without a handler the events go to the debug log.
    """

    def __init__(self, handler=None):
        self._event_queue = Queue()
        self._handler = handler or LoggingEventHandler()
        Thread(target=self._handler.handle, args=(self._event_queue,), daemon=True).start()

    def add_event(self, event, data):
        self._event_queue.put(StatusEvent(event, data))

    def wait(self):
        self._event_queue.join()


@dataclass(repr=False)
class StatusEvent:
    event: Enum
    data: Any
    timestamp: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def __post_init__(self):
        if not isinstance(self.event, Enum):
            raise ValueError('Invalid event. Must be an Enum')

    def __repr__(self):
        return 'StatusEvent({}, {!r})'.format(self.event.name, self.data)


class EventHandler(ABC):

    @abstractmethod
    def handle(self, queue):
        pass


class LoggingEventHandler(EventHandler):
    def handle(self, queue):
        while True:
            event = queue.get()
            try:
                logging.debug('Status event: {}'.format(event))
            finally:
                queue.task_done()
