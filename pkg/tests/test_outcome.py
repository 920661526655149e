# Copyright 2025 The dtools.projective Contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from __future__ import annotations

from typing import Never
import pytest
from dtools.projective.outcome import Outcome, OK, FAILED


def gt42(x: int) -> bool | Never:
    """contrived check that fails for 42"""
    if x > 42:
        return True
    if x < 42:
        return False
    raise ValueError('x = 42')


def inverse(x: float) -> float:
    return 1.0 / x


def half_even(x: int) -> Outcome[int, str]:
    if x % 2:
        return Outcome(f'{x} is odd', FAILED)
    return Outcome(x // 2, OK)


class TestOutcome:
    def test_equality(self) -> None:
        o1: Outcome[int, str] = Outcome(42, OK)
        o2: Outcome[int, str] = Outcome(42)
        o3: Outcome[int, str] = Outcome('not 42', FAILED)
        o4: Outcome[int, str] = Outcome('not 42', FAILED)
        o5: Outcome[int, str] = Outcome(42, FAILED)  # type: ignore[arg-type]
        assert o1 == o2
        assert o3 == o4
        assert o1 != o3
        assert o1 != o5
        assert o1 is not o2
        assert hash(o1) == hash(o2)

    def test_bool_and_iter(self) -> None:
        ok: Outcome[int, str] = Outcome(7)
        bad: Outcome[int, str] = Outcome('boom', FAILED)
        assert ok
        assert not bad
        assert list(ok) == [7]
        assert list(bad) == []
        assert repr(ok) == 'Outcome(7, OK)'
        assert repr(bad) == "Outcome('boom', FAILED)"

    def test_get(self) -> None:
        ok: Outcome[int, str] = Outcome(7)
        bad: Outcome[int, str] = Outcome('boom', FAILED)
        assert ok.get() == 7
        assert bad.get_or(42) == 42
        assert ok.get_or(42) == 7
        assert bad.get_error() == 'boom'
        with pytest.raises(ValueError):
            bad.get()
        with pytest.raises(ValueError):
            ok.get_error()

    def test_map_bind(self) -> None:
        ok: Outcome[int, str] = Outcome(8)
        bad: Outcome[int, str] = Outcome('boom', FAILED)
        assert ok.map(lambda x: x + 1) == Outcome(9)
        assert bad.map(lambda x: x + 1) == bad
        assert ok.bind(half_even).bind(half_even) == Outcome(2)
        assert ok.bind(half_even).bind(half_even).bind(half_even).bind(half_even) == Outcome(
            '1 is odd', FAILED
        )
        assert bad.bind(half_even) is bad

    def test_failable_call(self) -> None:
        assert Outcome.failable_call(gt42, 43) == Outcome(True)
        assert Outcome.failable_call(gt42, 41) == Outcome(False)
        failed = Outcome.failable_call(gt42, 42)
        assert not failed
        assert isinstance(failed.get_error(), ValueError)
        assert str(failed.get_error()) == 'x = 42'
        zero = Outcome.failable_call(inverse, 0.0)
        assert isinstance(zero.get_error(), ZeroDivisionError)
        assert Outcome.failable_call(inverse, 4.0).get() == 0.25

    def test_sequence(self) -> None:
        good = [Outcome[int, str](ii) for ii in range(5)]
        assert Outcome.sequence(good) == Outcome((0, 1, 2, 3, 4))
        mixed = good + [Outcome[int, str]('first', FAILED), Outcome[int, str]('second', FAILED)]
        assert Outcome.sequence(mixed) == Outcome('first', FAILED)
        assert Outcome.sequence([]) == Outcome(())
