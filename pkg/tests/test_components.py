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

import pytest
from dtools.projective.components import Components, components


class TestComponents:
    def test_shape_and_at(self) -> None:
        c = components((2, 3), lambda i, j: 10 * i + j)
        assert c.shape == (2, 3)
        assert len(c) == 6
        assert c.at(0, 2) == 2
        assert c.at(1, 0) == 10
        assert c.at(1, 2) == 12
        assert list(c.indices())[:3] == [(0, 0), (0, 1), (0, 2)]
        assert dict(c.items())[1, 1] == 11
        with pytest.raises(IndexError):
            c.at(2, 0)
        with pytest.raises(IndexError):
            c.at(0)

    def test_bad_shape(self) -> None:
        with pytest.raises(ValueError):
            Components((1, 2, 3), (2, 2))

    def test_equality_needs_shape(self) -> None:
        flat = Components(range(4), (4,))
        square = Components(range(4), (2, 2))
        assert flat != square
        assert flat == Components([0, 1, 2, 3], (4,))
        assert hash(square) == hash(Components((0, 1, 2, 3), (2, 2)))
        assert isinstance(flat, tuple)

    def test_map_zip_fold(self) -> None:
        c = components((2, 2), lambda i, j: i + j)
        doubled = c.map(lambda x: 2 * x)
        assert doubled.shape == (2, 2)
        assert doubled.tolist() == [[0, 2], [2, 4]]
        summed = c.zip_with(doubled, lambda a, b: a + b)
        assert summed.tolist() == [[0, 3], [3, 6]]
        assert c.foldl(lambda acc, x: acc + x, 0) == 4
        with pytest.raises(ValueError):
            c.zip_with(Components(range(4), (4,)), lambda a, b: a)

    def test_replace_returns_copy(self) -> None:
        c = components((2, 2), lambda i, j: 0)
        d = c.replace((1, 0), 5)
        assert c.at(1, 0) == 0
        assert d.at(1, 0) == 5
        assert d.shape == c.shape

    def test_stack(self) -> None:
        rows = [components((2,), lambda j, i=i: i * j) for i in range(3)]
        stacked = Components.stack(rows)
        assert stacked.shape == (3, 2)
        assert stacked.tolist() == [[0, 0], [0, 1], [0, 2]]
        with pytest.raises(ValueError):
            Components.stack([])
        with pytest.raises(ValueError):
            Components.stack([Components((1,), (1,)), Components((1, 2), (2,))])

    def test_tolist_three_index(self) -> None:
        c = components((2, 2, 2), lambda i, j, k: (i, j, k))
        assert c.tolist()[1][0][1] == (1, 0, 1)
