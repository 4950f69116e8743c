"""Shared fixtures for the test suite."""

from __future__ import annotations

import random

import pytest

from scpabe.fixtures import worked_2x3
from scpabe.pairing import get_provider


class ScriptedRng:
    """Randomness source that replays a fixed script of values.

    ``randrange(n)`` pops the next scripted value (asserting it is in
    range); ``randbytes`` derives bytes deterministically.  Used to pin
    hand-computed algebra where every random draw is chosen by the test.
    """

    def __init__(self, values):
        self.values = list(values)

    def randrange(self, *args):
        if not self.values:
            raise AssertionError("scripted rng exhausted")
        value = self.values.pop(0)
        if len(args) == 1:
            low, high = 0, args[0]
        else:
            low, high = args[0], args[1]
        assert low <= value < high, f"scripted value {value} outside [{low}, {high})"
        return value

    def randbytes(self, n):
        return bytes((i * 37 + 11) % 256 for i in range(n))


@pytest.fixture
def transparent():
    return get_provider("transparent")


@pytest.fixture
def production():
    return get_provider("production")


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def fixture_2x3():
    return worked_2x3()
