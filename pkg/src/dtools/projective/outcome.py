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

"""### Module dtools.projective.outcome - checks that may fail

Functional data type used by the report layer in lieu of exceptions.

- *class* Outcome: left biased container holding either the value a check
  produced or the exception that stopped it
  - `Outcome.failable_call` runs a check and captures domain failures
  - `Outcome.sequence` collects a batch of outcomes, first failure wins

"""

from __future__ import annotations

__all__ = ['Outcome', 'OK', 'FAILED']

from collections.abc import Callable, Iterator, Sequence
from typing import cast, Never, overload, TypeVar
from dtools.fp.bool import Bool as Both, Truth as Ok, Lie as Failed
from dtools.fp.singletons import Sentinel as _Sentinel

V = TypeVar('V', covariant=True)
E = TypeVar('E', covariant=True)

OK = Ok('OK')
FAILED = Failed('FAILED')

#: Exceptions a check may raise without indicating a bug in the engine.
CHECK_FAILURES = (
    LookupError,
    ValueError,
    TypeError,
    ArithmeticError,
    RecursionError,
    RuntimeError,
)


class Outcome[V, E]:
    """Result of a check: either a value or the error that stopped it.

    - `Outcome(value, OK)` holds a value, `Outcome(error, FAILED)` an error
    - `True` in a Boolean context when it holds a value
    - immutable, `map` and `bind` return new instances

    """

    __slots__ = '_value', '_side'
    __match_args__ = ('_value', '_side')

    U = TypeVar('U', covariant=True)
    T = TypeVar('T')

    @overload
    def __init__(self, value: V, side: Ok) -> None: ...
    @overload
    def __init__(self, value: E, side: Failed) -> None: ...

    def __init__(self, value: V | E, side: Both = OK) -> None:
        self._value = value
        self._side = side

    def __hash__(self) -> int:
        return hash((_Sentinel('Outcome'), self._value, self._side))

    def __bool__(self) -> bool:
        return self._side == OK

    def __iter__(self) -> Iterator[V]:
        if self:
            yield cast(V, self._value)

    def __repr__(self) -> str:
        if self:
            return 'Outcome(' + repr(self._value) + ', OK)'
        return 'Outcome(' + repr(self._value) + ', FAILED)'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, type(self)):
            return False
        if bool(self) != bool(other):
            return False
        return self._value is other._value or self._value == other._value

    def get(self) -> V | Never:
        """Return the value, raise `ValueError` if the check failed."""
        if self._side == FAILED:
            msg = f'Outcome: get called on a failed outcome: {self._value!r}'
            raise ValueError(msg)
        return cast(V, self._value)

    def get_error(self) -> E | Never:
        """Return the error, raise `ValueError` if the check succeeded."""
        if self._side == OK:
            msg = 'Outcome: get_error called on a successful outcome'
            raise ValueError(msg)
        return cast(E, self._value)

    def get_or(self, alt: V) -> V:
        if self:
            return cast(V, self._value)
        return alt

    def map[U](self, f: Callable[[V], U]) -> Outcome[U, E]:
        """Map over a successful value. Return new instance."""
        if self._side == FAILED:
            return cast(Outcome[U, E], self)
        return Outcome(f(cast(V, self._value)), OK)

    def bind[U](self, f: Callable[[V], Outcome[U, E]]) -> Outcome[U, E]:
        """Flatmap over the successful value, propagate failures."""
        if self:
            return f(cast(V, self._value))
        return cast(Outcome[U, E], self)

    @staticmethod
    def sequence[U, T](outcomes: Sequence[Outcome[U, T]]) -> Outcome[tuple[U, ...], T]:
        """Collect outcomes into one.

        - if every outcome succeeded, return the tuple of their values
        - otherwise return the first failure encountered

        """
        values: list[U] = []
        for outcome in outcomes:
            if not outcome:
                return Outcome(outcome.get_error(), FAILED)
            values.append(outcome.get())
        return Outcome(tuple(values), OK)

    @staticmethod
    def failable_call[T, U](f: Callable[[T], U], arg: T) -> Outcome[U, Exception]:
        """Return the Outcome of a call that can fail with a domain error."""
        try:
            result = Outcome[U, Exception](f(arg), OK)
        except CHECK_FAILURES as exc:
            result = Outcome(exc, FAILED)
        return result
