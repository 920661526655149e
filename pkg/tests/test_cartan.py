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

import numpy as np
import pytest

from dtools.projective.cartan import (
    G_TILDE, H, H_TILDE, K, MASKS, MaskError, NonRigidityViolation,
    SingularJetError, CurvatureMatrix, GaugeMatrix, Jet2Element,
    adjoint_curvature, affine_gauge, boundary_pullback, chart_gauge_transition,
    check_normality_traces, check_torsion_free, flat_model_gauge,
    gauge_curvature, gauge_transform, h_embed, h_extract,
    induce_boundary_connection, is_h_element, jet2_compose, jet2_identity,
    jet2_inverse, mod_k_project, normal_gauge, pullback_gauge, schouten_compare,
)
from dtools.projective.components import Components
from dtools.projective.fixtures import flat_half_space, geodesic_boundary, projective_disk
from dtools.projective.geometry import Chart, ConnectionField, christoffel_transform
from dtools.projective.symexpr import Expr, ONE, Var, ZERO, parse, simplify
from dtools.projective.zerotest import NonzeroWitness, ProvablyZero, Sampler, is_zero

half = Chart('half', ('x0', 'x1'), {'x0': (0.0, 1.0), 'x1': (-1.0, 1.0)}, boundary=True)
samples = half.sampler(count=12, seed=2)


def curved(chart: Chart = half) -> ConnectionField:
    return ConnectionField.from_entries(chart, {(0, 1, 1): Var('x0'), (1, 0, 1): parse('x1^2')})


def h_matrix() -> Components[Expr]:
    """Polynomial gauge change with zeros above the corner of the last column."""
    return Components(
        [ONE, parse('x1'), ZERO, ZERO, ONE, ZERO, parse('x0'), parse('x1^2'), ONE], (3, 3)
    )


def agree(
    a: GaugeMatrix | CurvatureMatrix, b: GaugeMatrix | CurvatureMatrix, sampler: Sampler
) -> bool:
    return all(is_zero(simplify(x - y), sampler).holds for x, y in zip(a.entries, b.entries))


def random_jet(rng: np.random.Generator, n: int) -> Jet2Element:
    u = np.eye(n) + 0.2 * rng.standard_normal((n, n))
    uu = rng.standard_normal((n, n, n))
    return Jet2Element(u, uu + uu.transpose(0, 2, 1))


class TestGauges:
    def test_flat_normal_gauge(self) -> None:
        omega = normal_gauge(ConnectionField.zero(half))
        assert omega == flat_model_gauge(half)
        assert all(e == ZERO for e in gauge_curvature(omega).entries)
        assert omega.trace() == (ZERO, ZERO)

    def test_disk_is_flat(self) -> None:
        scene = projective_disk().scene
        for name in ('polar', 'parabolic'):
            chart = scene.chart(name)
            curvature = gauge_curvature(normal_gauge(scene.connection(name)))
            sampler = chart.sampler(count=12)
            assert all(is_zero(e, sampler).holds for e in curvature.entries)

    def test_normality(self) -> None:
        curvature = gauge_curvature(normal_gauge(curved()))
        assert check_torsion_free(curvature, samples).holds
        report = check_normality_traces(curvature, samples)
        assert report.passed
        assert report.failing() == []

    def test_affine_gauge_is_not_normal(self) -> None:
        curvature = gauge_curvature(affine_gauge(geodesic_boundary(2).scene.connection('half')))
        report = check_normality_traces(curvature, samples)
        assert report.torsion.holds
        assert not report.passed
        assert 'trace[1,1]' in report.failing()

    def test_trace_free(self) -> None:
        omega = normal_gauge(curved())
        for t in omega.trace():
            assert is_zero(t, samples).holds


class TestGaugeChanges:
    def test_curvature_equivariance(self) -> None:
        omega = normal_gauge(curved())
        h = h_matrix()
        transformed = gauge_curvature(gauge_transform(omega, h))
        expected = adjoint_curvature(h, gauge_curvature(omega))
        assert agree(transformed, expected, samples)

    def test_h_pattern_enforced(self) -> None:
        bad = h_matrix().replace((0, 2), Var('x0'))
        with pytest.raises(MaskError):
            gauge_transform(normal_gauge(curved()), bad)
        with pytest.raises(ValueError):
            gauge_transform(normal_gauge(curved()), Components([ONE], (1, 1)))

    def test_chart_change(self) -> None:
        to_bar = flat_half_space(2).scene.transitions[0]
        gamma = curved(to_bar.source)
        pulled = pullback_gauge(normal_gauge(gamma), to_bar)
        moved = gauge_transform(pulled, chart_gauge_transition(to_bar))
        expected = normal_gauge(christoffel_transform(gamma, to_bar))
        assert moved.chart == to_bar.target
        assert agree(moved, expected, to_bar.target.sampler(count=12))

    def test_pullback_needs_matching_chart(self) -> None:
        to_bar = flat_half_space(2).scene.transitions[0]
        with pytest.raises(ValueError):
            pullback_gauge(flat_model_gauge(to_bar.target), to_bar)


class TestBoundary:
    def test_flat_boundary_member(self) -> None:
        pulled = boundary_pullback(normal_gauge(ConnectionField.zero(half)), half.boundary_sampler(count=8))
        assert pulled.membership == ProvablyZero()
        projected = mod_k_project(pulled)
        assert projected == flat_model_gauge(pulled.gauge.chart)

    def test_disk_boundary_not_member(self) -> None:
        scene = projective_disk().scene
        polar = scene.chart('polar')
        pulled = boundary_pullback(normal_gauge(scene.connection('polar')), polar.boundary_sampler(count=8))
        assert isinstance(pulled.membership, NonzeroWitness)
        assert pulled.membership.label.startswith('g~[0,')
        with pytest.raises(MaskError):
            mod_k_project(pulled)

    def test_induced_connection(self) -> None:
        gamma = geodesic_boundary(3).scene.connection('half')
        induced = induce_boundary_connection(gamma, gamma.chart.boundary_sampler(count=8))
        assert induced.chart.coords == ('x1', 'x2')
        assert all(e == ZERO for e in induced.gamma)

    def test_induced_connection_violation(self) -> None:
        scene = projective_disk().scene
        polar = scene.chart('polar')
        with pytest.raises(NonRigidityViolation) as info:
            induce_boundary_connection(scene.connection('polar'), polar.boundary_sampler(count=8))
        assert info.value.witness.value == pytest.approx(1.0)
        assert info.value.witness.label == 'Gamma[0,1,1]'

    def test_induced_connection_undecided(self) -> None:
        gamma = ConnectionField.from_entries(half, {(0, 1, 1): parse('log(x0 - 1 - x1^2)')})
        with pytest.raises(NonRigidityViolation) as info:
            induce_boundary_connection(gamma, half.boundary_sampler(count=8))
        assert info.value.witness is None

    def test_schouten_compare(self) -> None:
        flat3 = flat_half_space(3).scene.connection('half')
        comparison = schouten_compare(flat3, flat3.chart.boundary_sampler(count=8))
        assert comparison.restricted.shape == (2, 2)
        assert comparison.induced is not None
        assert comparison.difference is not None
        assert all(e == ZERO for e in comparison.difference)
        disk = projective_disk().scene.connection('parabolic')
        plane = schouten_compare(disk, disk.chart.boundary_sampler(count=8))
        assert plane.induced is None
        assert plane.restricted.shape == (1, 1)

    def test_schouten_compare_needs_geodesic_boundary(self) -> None:
        chart = Chart('c', ('x0', 'x1', 'x2'), {'x0': (0.0, 1.0), 'x1': (-1.0, 1.0), 'x2': (-1.0, 1.0)}, True)
        gamma = ConnectionField.from_entries(chart, {(0, 1, 1): ONE})
        with pytest.raises(NonRigidityViolation):
            schouten_compare(gamma, chart.boundary_sampler(count=8))


class TestMasks:
    def test_patterns(self) -> None:
        assert H.zeros(3) == [(0, 2), (1, 2)]
        assert G_TILDE.zeros(3) == [(0, 1), (0, 2)]
        assert H_TILDE.zeros(3) == [(0, 1), (0, 2), (1, 2)]
        assert set(MASKS) == {'h', 'g~', 'h~', 'k'}

    def test_numeric_membership(self) -> None:
        m = np.array([[1.0, 0.0, 0.0], [2.0, 3.0, 0.0], [4.0, 0.0, 3.0]])
        assert K.contains_numeric(m)
        assert G_TILDE.contains_numeric(m)
        assert H_TILDE.contains_numeric(m)
        m[2, 2] = 5.0
        assert not K.contains_numeric(m)
        assert G_TILDE.contains_numeric(m)
        m[1, 2] = 1.0
        assert not H.contains_numeric(m)

    def test_symbolic_membership(self) -> None:
        m = Components([ONE, ZERO, ZERO, Var('x0'), Var('x1'), ZERO, ONE, ZERO, Var('x1')], (3, 3))
        assert K.contains_matrix(m, samples).holds
        assert isinstance(G_TILDE.contains_matrix(m.replace((0, 2), Var('x0')), samples), NonzeroWitness)


class TestJetGroup:
    @pytest.mark.parametrize('n', [2, 3])
    def test_group_axioms(self, n: int) -> None:
        rng = np.random.default_rng(n)
        e = jet2_identity(n)
        for _ in range(50):
            a, b, c = (random_jet(rng, n) for _ in range(3))
            left = jet2_compose(jet2_compose(a, b), c)
            right = jet2_compose(a, jet2_compose(b, c))
            assert left.distance(right) < 1e-10
            assert jet2_compose(a, e).distance(a) < 1e-12
            assert jet2_compose(e, a).distance(a) < 1e-12
            assert jet2_compose(a, jet2_inverse(a)).distance(e) < 1e-10
            assert jet2_compose(jet2_inverse(a), a).distance(e) < 1e-10

    @pytest.mark.parametrize('n', [2, 3])
    def test_h_subgroup(self, n: int) -> None:
        rng = np.random.default_rng(10 + n)
        for _ in range(20):
            a = np.eye(n) + 0.2 * rng.standard_normal((n, n))
            b = np.eye(n) + 0.2 * rng.standard_normal((n, n))
            ups, psi = rng.standard_normal(n), rng.standard_normal(n)
            x, y = h_embed(a, ups), h_embed(b, psi)
            assert is_h_element(x)
            product = jet2_compose(x, y)
            assert is_h_element(product)
            aa, recovered = h_extract(product)
            np.testing.assert_allclose(aa, a @ b, atol=1e-12)
            np.testing.assert_allclose(recovered, ups @ b + psi, atol=1e-10)
            assert is_h_element(jet2_inverse(x))
        assert not is_h_element(random_jet(rng, n))

    def test_bad_jets(self) -> None:
        with pytest.raises(SingularJetError):
            Jet2Element(np.zeros((2, 2)), np.zeros((2, 2, 2)))
        uu = np.zeros((2, 2, 2))
        uu[0, 0, 1] = 1.0
        with pytest.raises(ValueError):
            Jet2Element(np.eye(2), uu)
        with pytest.raises(SingularJetError):
            h_embed(np.zeros((2, 2)), np.ones(2))
