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

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtools.projective.components import Components
from dtools.projective.curvature import riemann, schouten, schouten_shift_residual
from dtools.projective.fixtures import projective_disk
from dtools.projective.geometry import Chart, ConnectionField, OneFormField, projective_shift
from dtools.projective.symexpr import Const, Expr, Power, Product, Sum, Var, ZERO, parse, simplify
from dtools.projective.zerotest import ProvablyZero, Sampler, is_zero


def cube(n: int) -> Chart:
    coords = tuple(f'x{i}' for i in range(n))
    return Chart(f'cube{n}', coords, {c: (-1.0, 1.0) for c in coords})


def polynomial(coords: tuple[str, ...], coeffs: list[int]) -> Expr:
    """Constant, linear and pure quadratic terms with the given coefficients."""
    monomials: list[Expr] = [Const(1)]
    monomials += [Var(c) for c in coords]
    monomials += [Power(Var(c), 2) for c in coords]
    terms = [Product((Const(a), m)) for a, m in zip(coeffs, monomials) if a]
    return simplify(Sum(tuple(terms))) if terms else ZERO


def random_pair(n: int, seed: int) -> tuple[ConnectionField, OneFormField]:
    chart = cube(n)
    rng = np.random.default_rng(seed)
    width = 1 + 2 * n

    def draw() -> list[int]:
        return [int(a) for a in rng.integers(-2, 3, size=width)]

    entries = {
        (i, j, k): polynomial(chart.coords, draw())
        for i in range(n) for j in range(n) for k in range(j, n)
    }
    upsilon = OneFormField(chart, Components([polynomial(chart.coords, draw()) for _ in range(n)], (n,)))
    return ConnectionField.from_entries(chart, entries), upsilon


def vanishes(c: Components[Expr], sampler: Sampler) -> bool:
    return all(is_zero(e, sampler).holds for e in c)


class TestRiemann:
    def test_flat(self) -> None:
        rm = riemann(ConnectionField.zero(cube(3)))
        assert rm.rm.shape == (3, 3, 3, 3)
        assert all(e == ZERO for e in rm.rm)
        assert rm.ricci() is rm.ricci()

    def test_flat_in_polar_coordinates(self) -> None:
        scene = projective_disk().scene
        polar = scene.chart('polar')
        rm = riemann(scene.connection('polar'))
        assert vanishes(rm.rm, polar.sampler(count=16))

    def test_symmetries(self) -> None:
        gamma, _ = random_pair(3, seed=1)
        rm = riemann(gamma)
        sampler = gamma.chart.sampler(count=8)
        for i, j, k, l in product(range(3), repeat=4):
            assert rm.at(i, j, k, l) == simplify(-rm.at(i, j, l, k))
            cyclic = rm.at(i, j, k, l) + rm.at(i, k, l, j) + rm.at(i, l, j, k)
            assert is_zero(cyclic, sampler).holds

    def test_exact_shift_curvature(self) -> None:
        chart = cube(2)
        upsilon = OneFormField(chart, Components([parse('sin(x0)'), ZERO], (2,)))
        shifted = projective_shift(ConnectionField.zero(chart), upsilon)
        p = schouten(shifted)
        sampler = chart.sampler(count=16)
        assert is_zero(p.at(0, 0) - parse('-cos(x0) + sin(x0)^2'), sampler).holds
        assert is_zero(p.at(0, 1), sampler) == ProvablyZero()
        assert is_zero(p.at(1, 1), sampler) == ProvablyZero()


class TestSchouten:
    def test_symmetric_part(self) -> None:
        gamma, _ = random_pair(2, seed=4)
        ric = riemann(gamma).ricci()
        p = schouten(gamma)
        sampler = gamma.chart.sampler(count=8)
        for a, b in product(range(2), repeat=2):
            symmetrized = p.at(a, b) + p.at(b, a) - ric.at(a, b) - ric.at(b, a)
            assert is_zero(symmetrized, sampler).holds

    @given(st.integers(min_value=0, max_value=2**16))
    @settings(max_examples=10, deadline=None)
    def test_shift_law_plane(self, seed: int) -> None:
        gamma, upsilon = random_pair(2, seed)
        residual = schouten_shift_residual(gamma, upsilon)
        assert vanishes(residual, gamma.chart.sampler(count=16, seed=seed))

    @pytest.mark.parametrize('seed', range(10))
    def test_shift_law_space(self, seed: int) -> None:
        gamma, upsilon = random_pair(3, seed)
        residual = schouten_shift_residual(gamma, upsilon)
        assert vanishes(residual, gamma.chart.sampler(count=16, seed=seed))
