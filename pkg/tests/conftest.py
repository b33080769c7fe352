"""Shared test setup.

The suite must run fully offline: any attempt to open a network connection
is a test failure, enforced by blocking socket.connect for the session.
In-process ASGI clients and mocked judge sessions never hit a socket.
"""

import socket

import pytest


@pytest.fixture(autouse=True, scope="session")
def no_network():
    real_connect = socket.socket.connect

    def blocked_connect(self, address):
        raise RuntimeError(f"network access blocked in tests: connect to {address!r}")

    socket.socket.connect = blocked_connect
    yield
    socket.socket.connect = real_connect
