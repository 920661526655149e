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

"""
### dtools.projective.components

Immutable tensor component storage. Implemented by inheriting from tuple.

- class `Components`
  - inherits from tuple, "is-a" implementation
    - entries stored flat in row-major order
    - carries a `shape`, indexed with `at(i, j, k)`
    - hashable when its entries are
  - function `components`
    - build `Components` of a given shape from a function of the indices

"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator
from itertools import product
from math import prod
from typing import TypeVar
from dtools.iterables import concat

__all__ = ['Components', 'components']

D = TypeVar('D', covariant=True)


class Components[D](tuple[D, ...]):
    """Flat tuple of tensor components with a shape.

    - `Components(entries, shape)`, `len(entries)` must equal the product of `shape`
    - two `Components` are equal when shapes and entries agree
    - `map`, `zip_with` and `foldl` return new instances

    """

    L = TypeVar('L')
    U = TypeVar('U')
    W = TypeVar('W')

    shape: tuple[int, ...]

    def __new__(cls, entries: Iterable[D], shape: tuple[int, ...]) -> Components[D]:
        obj = super().__new__(cls, entries)
        if len(obj) != prod(shape):
            msg = f'Components: {len(obj)} entries do not fill shape {shape}'
            raise ValueError(msg)
        obj.shape = tuple(shape)
        return obj

    def __getnewargs__(self) -> tuple[tuple[D, ...], tuple[int, ...]]:  # type: ignore[override]
        return tuple(self), self.shape

    def __repr__(self) -> str:
        return f'Components({list(self)!r}, shape={self.shape!r})'

    def __eq__(self, other: object, /) -> bool:
        if not isinstance(other, Components):
            return False
        return self.shape == other.shape and tuple.__eq__(self, other)

    def __ne__(self, other: object, /) -> bool:
        return not self == other

    def __hash__(self) -> int:
        return hash((self.shape, tuple.__hash__(self)))

    def _offset(self, idx: tuple[int, ...]) -> int:
        if len(idx) != len(self.shape):
            msg = f'Components: index {idx} does not match shape {self.shape}'
            raise IndexError(msg)
        offset = 0
        for ii, extent in zip(idx, self.shape):
            if not 0 <= ii < extent:
                msg = f'Components: index {idx} out of range for shape {self.shape}'
                raise IndexError(msg)
            offset = offset * extent + ii
        return offset

    def at(self, *idx: int) -> D:
        """Entry at a multi-index."""
        return self[self._offset(idx)]

    def indices(self) -> Iterator[tuple[int, ...]]:
        """Multi-indices in storage order."""
        return product(*(range(extent) for extent in self.shape))

    def items(self) -> Iterator[tuple[tuple[int, ...], D]]:
        return zip(self.indices(), self)

    def map[U](self, f: Callable[[D], U], /) -> Components[U]:
        return Components(map(f, self), self.shape)

    def zip_with[U, W](
        self, other: Components[U], f: Callable[[D, U], W], /
    ) -> Components[W]:
        if self.shape != other.shape:
            msg = f'Components: shape {self.shape} does not match {other.shape}'
            raise ValueError(msg)
        return Components(map(f, self, other), self.shape)

    def foldl[L](self, f: Callable[[L, D], L], start: L, /) -> L:
        """Fold left, first argument of `f` is the accumulated value."""
        acc = start
        for v in self:
            acc = f(acc, v)
        return acc

    def replace(self, idx: tuple[int, ...], value: D) -> Components[D]:  # type: ignore[misc]
        entries = list(self)
        entries[self._offset(idx)] = value
        return Components(entries, self.shape)

    def tolist(self) -> list[object]:
        """Nested lists following the shape."""
        def nest(flat: list[D], shape: tuple[int, ...]) -> list[object]:
            if len(shape) == 1:
                return list(flat)
            step = prod(shape[1:])
            return [nest(flat[ii * step:(ii + 1) * step], shape[1:]) for ii in range(shape[0])]

        if not self.shape:
            return list(self)
        return nest(list(self), self.shape)

    @staticmethod
    def stack[U](parts: Iterable[Components[U]]) -> Components[U]:
        """Stack equally shaped components along a new leading axis."""
        blocks = list(parts)
        if not blocks:
            msg = 'Components.stack: nothing to stack'
            raise ValueError(msg)
        inner = blocks[0].shape
        for block in blocks:
            if block.shape != inner:
                msg = f'Components.stack: shape {block.shape} does not match {inner}'
                raise ValueError(msg)
        return Components(concat(*blocks), (len(blocks),) + inner)


def components[U](shape: tuple[int, ...], f: Callable[..., U]) -> Components[U]:
    """Build `Components` of `shape` whose entry at `idx` is `f(*idx)`."""
    return Components(
        (f(*idx) for idx in product(*(range(extent) for extent in shape))),
        shape,
    )
