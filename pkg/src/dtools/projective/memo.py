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

"""Write-once cell for values derived lazily from immutable data.

- `Memo()` starts empty, `Memo.get_or_compute(thunk)` fills it on first use
- once filled the value never changes, a second `fill` raises `ValueError`
- used to cache Jacobians, inverse Jacobians and sample point tables

"""

from __future__ import annotations

__all__ = ['Memo']

from collections.abc import Callable, Iterator
from typing import cast, Final, Never, TypeVar
from dtools.fp.singletons import Sentinel

D = TypeVar('D')

_empty: Final[Sentinel] = Sentinel('Memo')


class Memo[D]:
    """Cell holding at most one lazily computed value."""

    __slots__ = ('_item',)
    __match_args__ = ('_item',)

    def __init__(self) -> None:
        self._item: D | Sentinel = _empty

    def __bool__(self) -> bool:
        return self._item is not _empty

    def __iter__(self) -> Iterator[D]:
        if self:
            yield cast(D, self._item)

    def __repr__(self) -> str:
        if self:
            return 'Memo(' + repr(self._item) + ')'
        return 'Memo()'

    def get(self) -> D | Never:
        if self._item is _empty:
            msg = 'Memo: get from an unfilled cell'
            raise ValueError(msg)
        return cast(D, self._item)

    def fill(self, item: D) -> None | Never:
        if self._item is not _empty:
            msg = 'Memo: cell already filled'
            raise ValueError(msg)
        self._item = item
        return None

    def get_or_compute(self, thunk: Callable[[], D]) -> D:
        """Return the cached value, computing and storing it on first use."""
        if self._item is _empty:
            self._item = thunk()
        return cast(D, self._item)
