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

import math

import pytest
from hypothesis import given, settings, strategies as st

from dtools.projective.components import Components
from dtools.projective.fixtures import flat_half_space, mobius_map, projective_disk
from dtools.projective.geometry import (
    BoundaryPointError, Chart, ChartError, ConnectionField, MapField,
    NonInvertibleError, OneFormField, Scene, compose_transitions,
    christoffel_transform, covariant_derivative, extract_upsilon,
    is_projective_transformation, is_projectively_equivalent, matrix_det,
    matrix_inverse, projective_shift, pullback_connection, require_on_boundary,
    restrict_field, restrict_to_boundary, thomas_parameters, thomas_transform, value_at,
)
from dtools.projective.symexpr import Expr, Var, ZERO, parse, simplify
from dtools.projective.zerotest import NonzeroWitness, Sampler, Tri, is_zero

half = Chart('half', ('x0', 'x1'), {'x0': (0.0, 1.0), 'x1': (-1.0, 1.0)}, boundary=True)
samples = half.sampler(count=16, seed=5)


def curved() -> ConnectionField:
    """Connection with `Γ^0_11 = x0` and `Γ^1_01 = x1^2`."""
    return ConnectionField.from_entries(half, {(0, 1, 1): Var('x0'), (1, 0, 1): parse('x1^2')})


def one_form(*texts: str) -> OneFormField:
    return OneFormField(half, Components([half.parse(t) for t in texts], (len(texts),)))


def quadratic(coeffs: list[int]) -> str:
    """Polynomial of degree at most 2 in `x0`, `x1`."""
    monomials = ('1', 'x0', 'x1', 'x0^2', 'x0*x1', 'x1^2')
    return ' + '.join(f'({c})*{m}' for c, m in zip(coeffs, monomials))


coefficients = st.lists(st.integers(min_value=-3, max_value=3), min_size=6, max_size=6)


def shear() -> MapField:
    return MapField(half, half, Components([parse('x0'), parse('x1 + x0^2')], (2,)))


def same(a: Expr, b: Expr, sampler: Sampler) -> bool:
    return is_zero(simplify(a - b), sampler).holds


def same_connection(a: ConnectionField, b: ConnectionField, sampler: Sampler) -> bool:
    return all(same(a.at(*idx), b.at(*idx), sampler) for idx in a.gamma.indices())


class TestCharts:
    def test_aliases_and_parse(self) -> None:
        polar = Chart('polar', ('r', 't'), {'r': (0.0, 1.0), 't': (-3.0, 3.0)}, boundary=True)
        assert polar.aliases == {'x0': 'r', 'x1': 't'}
        assert polar.parse('x0*t') == parse('r*t')
        assert polar.parse('a*r', ('a',)) == parse('a*r')

    def test_bad_charts(self) -> None:
        with pytest.raises(ChartError):
            Chart('bad', ('x', 'x'), {'x': (0.0, 1.0)})
        with pytest.raises(ChartError):
            Chart('bad', ('x', 'y'), {'x': (0.0, 1.0)})
        with pytest.raises(ChartError):
            Chart('bad', ('x', 'y'), {'x': (-1.0, 1.0), 'y': (0.0, 1.0)}, boundary=True)
        with pytest.raises(ChartError):
            Chart('interior', ('x', 'y'), {'x': (0.0, 1.0), 'y': (0.0, 1.0)}).boundary_sampler()

    def test_boundary_helpers(self) -> None:
        face = half.boundary_face()
        assert face.coords == ('x1',)
        assert all(p['x0'] == 0.0 for p in half.boundary_sampler(count=4).points())
        assert restrict_to_boundary(parse('x0*x1 + x1'), half) == Var('x1')
        restricted = restrict_field(Components([parse('x0 + x1'), parse('x0*x1')], (2,)), half)
        assert restricted == Components([Var('x1'), ZERO], (2,))
        require_on_boundary(half, (0.0, 0.3))
        with pytest.raises(BoundaryPointError):
            require_on_boundary(half, (0.1, 0.3))
        with pytest.raises(BoundaryPointError):
            require_on_boundary(half, (0.0,))

    def test_value_at(self) -> None:
        assert value_at(parse('x0*x1 + beta'), half, (0.5, 2.0), {'beta': 1.0}) == 2.0

    def test_scene_lookup(self) -> None:
        other = Chart('other', ('u', 'v'), {'u': (0.0, 1.0), 'v': (0.0, 1.0)})
        scene = Scene(2, (half,), (ConnectionField.zero(half),))
        assert scene.chart('half') is half
        assert scene.boundary_charts() == [half]
        with pytest.raises(ChartError):
            scene.map('nope')
        with pytest.raises(ChartError):
            scene.connection('other')
        with pytest.raises(ChartError):
            Scene(2, (half,), (ConnectionField.zero(other),))
        with pytest.raises(ChartError):
            Scene(1, ())


class TestFields:
    def test_torsion_free(self) -> None:
        gamma = Components([ZERO] * 8, (2, 2, 2)).replace((0, 0, 1), Var('x1'))
        with pytest.raises(ValueError):
            ConnectionField(half, gamma)
        assert curved().at(1, 1, 0) == curved().at(1, 0, 1)

    def test_matrices(self) -> None:
        m = Components([parse('x0'), parse('1'), ZERO, parse('x1')], (2, 2))
        assert matrix_det(m) == simplify(parse('x0*x1'))
        inv = matrix_inverse(m)
        for i in range(2):
            for j in range(2):
                entry = sum((inv.at(i, k) * m.at(k, j) for k in range(2)), ZERO)
                assert same(entry, parse('1') if i == j else ZERO, samples)
        singular = Components([Var('x0')] * 4, (2, 2))
        with pytest.raises(NonInvertibleError):
            matrix_inverse(singular)

    def test_covariant_derivative_flat(self) -> None:
        nabla = covariant_derivative(ConnectionField.zero(half), one_form('x1', 'x0^2'))
        assert nabla.at(0, 0) == ZERO
        assert nabla.at(0, 1) == simplify(parse('2*x0'))
        assert nabla.at(1, 0) == simplify(parse('1'))
        assert nabla.at(1, 1) == ZERO


class TestProjectiveClass:
    @given(coefficients, coefficients)
    @settings(max_examples=25, deadline=None)
    def test_shift_then_extract(self, first: list[int], second: list[int]) -> None:
        gamma = curved()
        upsilon = one_form(quadratic(first), quadratic(second))
        extracted = extract_upsilon(projective_shift(gamma, upsilon), gamma)
        for k in range(2):
            assert is_zero(simplify(extracted.at(k) - upsilon.at(k)), samples).holds

    def test_equivalence_report(self) -> None:
        gamma = curved()
        shifted = projective_shift(gamma, one_form('x1', 'exp(x0)'))
        report = is_projectively_equivalent(shifted, gamma, samples)
        assert report.test.holds
        assert report.verdict is Tri.TRUE
        bent = ConnectionField.from_entries(half, {(0, 1, 1): parse('x0 + 1')})
        report = is_projectively_equivalent(bent, gamma, samples)
        assert report.verdict is Tri.FALSE

    def test_thomas_parameters(self) -> None:
        gamma = curved()
        pi = thomas_parameters(gamma)
        for k in range(2):
            assert same(pi.at(0, 0, k) + pi.at(1, 1, k), ZERO, samples)
        shifted = projective_shift(gamma, one_form('x0*x1', 'cos(x1)'))
        assert same_connection(thomas_parameters(shifted), pi, samples)

    def test_thomas_transform(self) -> None:
        gamma = curved()
        phi = shear()
        expected = thomas_parameters(pullback_connection(gamma, phi))
        assert same_connection(thomas_transform(thomas_parameters(gamma), phi), expected, samples)


class TestProjectiveMaps:
    def test_mobius(self) -> None:
        phi = mobius_map(beta=1.2, gamma=0.3)
        flat = ConnectionField.zero(phi.target)
        sampler = phi.source.sampler(phi.params, count=16)
        report = is_projective_transformation(phi, flat, sampler)
        assert report.test.holds
        points = sampler.points()
        assert len(points) == 16
        for p in points:
            at = (p['x0'], p['x1'])
            expected = -0.3 / (1 + 0.3 * p['x0'])
            assert value_at(report.upsilon.at(0), phi.source, at, phi.params) == pytest.approx(expected, abs=1e-10)
            assert value_at(report.upsilon.at(1), phi.source, at, phi.params) == pytest.approx(0.0, abs=1e-10)

    def test_mobius_thomas_invariant(self) -> None:
        phi = mobius_map(beta=-0.5, gamma=0.7)
        pi = thomas_parameters(ConnectionField.zero(phi.target))
        sampler = phi.source.sampler(phi.params, count=16)
        assert same_connection(thomas_transform(pi, phi), pi, sampler)

    def test_shear_is_not_projective(self) -> None:
        report = is_projective_transformation(shear(), ConnectionField.zero(half), samples)
        assert isinstance(report.test, NonzeroWitness)
        assert report.test.label == 'residual[1,0,0]'
        assert report.test.value == pytest.approx(2.0)
        assert report.verdict is Tri.FALSE

    def test_needs_source_between_charts(self) -> None:
        scene = flat_half_space(2).scene
        bar = scene.chart('half_bar')
        phi = scene.transitions[0].as_map()
        with pytest.raises(ChartError):
            is_projective_transformation(phi, scene.connection('half'), bar.sampler(count=8))
        report = is_projective_transformation(
            phi, scene.connection('half'), bar.sampler(count=8), source=scene.connection('half_bar')
        )
        assert report.test.holds


class TestTransitions:
    def test_polar_christoffel(self) -> None:
        scene = projective_disk().scene
        to_polar = next(t for t in scene.transitions if t.target.name == 'polar')
        polar = scene.chart('polar')
        computed = christoffel_transform(scene.connection('affine'), to_polar, polar.sampler(count=8))
        assert same_connection(computed, scene.connection('polar'), polar.sampler(count=16))

    def test_parabolic_christoffel(self) -> None:
        scene = projective_disk().scene
        to_parabolic = next(t for t in scene.transitions if t.target.name == 'parabolic')
        parabolic = scene.chart('parabolic')
        computed = christoffel_transform(scene.connection('affine'), to_parabolic)
        assert same_connection(computed, scene.connection('parabolic'), parabolic.sampler(count=16))

    def test_compose_with_reverse(self) -> None:
        to_bar = flat_half_space(2).scene.transitions[0]
        loop = compose_transitions(to_bar, to_bar.reversed())
        assert loop.source is to_bar.source
        assert loop.target is to_bar.source
        for x, e in zip(half.coords, loop.inverse):
            assert same(e, Var(x), samples)

    def test_transform_through_composite(self) -> None:
        to_bar = flat_half_space(2).scene.transitions[0]
        source = to_bar.source
        gamma = ConnectionField.from_entries(
            source, {(0, 1, 1): Var('x0'), (1, 0, 1): parse('x1^2'), (0, 0, 0): parse('x0*x1')}
        )
        back = to_bar.reversed()
        sampler = source.sampler(count=16, seed=3)
        stepwise = christoffel_transform(christoffel_transform(gamma, to_bar), back)
        direct = christoffel_transform(gamma, compose_transitions(to_bar, back))
        assert same_connection(stepwise, direct, sampler)
        assert same_connection(stepwise, gamma, sampler)

    def test_transform_is_pullback_along_inverse(self) -> None:
        to_bar = flat_half_space(2).scene.transitions[0]
        gamma = ConnectionField.from_entries(
            to_bar.source, {(0, 1, 1): Var('x0'), (1, 0, 1): parse('x1^2')}
        )
        transformed = christoffel_transform(gamma, to_bar)
        pulled = pullback_connection(gamma, to_bar.as_map())
        assert transformed.chart == pulled.chart == to_bar.target
        assert transformed.gamma == pulled.gamma

    def test_map_point(self) -> None:
        to_bar = flat_half_space(2).scene.transitions[0]
        xb = to_bar.map_point((0.5, 0.2))
        assert xb == pytest.approx((0.5 * math.exp(0.2), 0.2))
        to_polar = next(t for t in projective_disk().scene.transitions if t.target.name == 'polar')
        with pytest.raises(ChartError):
            to_polar.map_point((0.1, 0.1))
        with pytest.raises(ChartError):
            to_polar.reversed()

    def test_components_cached(self) -> None:
        phi = shear()
        assert phi.jacobian() is phi.jacobian()
        assert phi.hessian().at(1, 0, 0) == simplify(parse('2'))
        assert phi.jacobian().at(1, 0) == simplify(parse('2*x0'))
