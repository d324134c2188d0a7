"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import enum
import logging
import threading

import pytest

from common.statuseventhandler import EventHandler, StatusEvent, StatusEventsHandler


def test__add_event_and_wait__1_event__handler_receives_it():
    test_handler = TestEventHandler()
    status_handler = StatusEventsHandler(test_handler)

    status_handler.add_event(TestStatusEvent.AnEvent, 'added')
    item = test_handler.get_item()
    status_handler.wait()

    assert item.event == TestStatusEvent.AnEvent
    assert item.data == 'added'


def test__add_event_and_wait__2_events__handler_receives_them_in_order():
    test_handler = TestEventHandler()
    status_handler = StatusEventsHandler(test_handler)

    status_handler.add_event(TestStatusEvent.AnEvent, 'first')
    status_handler.add_event(TestStatusEvent.OtherEvent, 'second')
    item = test_handler.get_item()
    item2 = test_handler.get_item()
    status_handler.wait()

    assert item.event == TestStatusEvent.AnEvent
    assert item.data == 'first'

    assert item2.event == TestStatusEvent.OtherEvent
    assert item2.data == 'second'


def test__add_event_and_wait__no_handler__event_logged(caplog):
    status_handler = StatusEventsHandler()

    with caplog.at_level(logging.DEBUG):
        status_handler.add_event(TestStatusEvent.AnEvent, 7)
        status_handler.wait()

    assert 'StatusEvent(AnEvent, 7)' in caplog.text


def test__status_event__not_an_enum__raises_valueerror():
    with pytest.raises(ValueError):
        StatusEvent('AnEvent', None)


class TestEventHandler(EventHandler):
    def __init__(self):
        self._queue = None
        self._ready = threading.Event()
        super().__init__()

    def handle(self, queue):
        self._queue = queue
        self._ready.set()

    def get_item(self):
        self._ready.wait(5)
        item = self._queue.get()
        self._queue.task_done()
        return item


class TestStatusEvent(enum.Enum):
    AnEvent = 1
    OtherEvent = 2
