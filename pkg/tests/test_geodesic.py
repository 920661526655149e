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

import numpy as np
import pytest

from dtools.projective.fixtures import flat_half_space, projective_disk
from dtools.projective.geometry import BoundaryPointError, Chart, ConnectionField
from dtools.projective.geodesic import (
    geodesic_integrate, straightness, tangency_drift, trace_distance,
)

plane = Chart('plane', ('u', 'w'), {'u': (-5.0, 5.0), 'w': (-5.0, 5.0)})


def damped(k: str = '1') -> ConnectionField:
    """`ü = −k u̇²`, so `u(t) = log(1 + k t)/k` from rest at the origin with unit speed."""
    return ConnectionField.from_entries(plane, {(0, 0, 0): plane.parse(k, ('k',))})


def endpoint_error(h: float) -> float:
    traj = geodesic_integrate(damped(), (0.0, 0.0), (1.0, 0.0), h, round(1.0 / h))
    return abs(traj.points[-1, 0] - math.log(2.0))


class TestIntegrate:
    def test_flat_lines_are_exact(self) -> None:
        traj = geodesic_integrate(ConnectionField.zero(plane), (0.1, -0.2), (0.5, 0.25), 0.1, 10)
        assert len(traj) == 11
        assert not traj.exited
        np.testing.assert_allclose(traj.points[-1], [0.6, 0.05], atol=1e-14)
        np.testing.assert_allclose(traj.velocities, np.tile([0.5, 0.25], (11, 1)))
        assert traj.times[-1] == pytest.approx(1.0)
        assert straightness(traj.points) < 1e-14

    def test_fourth_order(self) -> None:
        coarse, fine = endpoint_error(0.1), endpoint_error(0.05)
        assert 3.5 < math.log2(coarse / fine) < 4.5

    def test_parameters(self) -> None:
        traj = geodesic_integrate(damped('k'), (0.0, 0.0), (1.0, 0.0), 0.01, 100, {'k': 2.0})
        assert traj.points[-1, 0] == pytest.approx(math.log(3.0) / 2.0, abs=1e-8)

    def test_disk_lines_are_straight(self) -> None:
        polar = projective_disk().scene.connection('polar')
        traj = geodesic_integrate(polar, (0.3, 0.2), (0.1, 0.5), 0.002, 250)
        r, t = traj.points[:, 0], traj.points[:, 1]
        affine = np.column_stack(((1 - r) * np.cos(t), (1 - r) * np.sin(t)))
        assert not traj.exited
        assert straightness(affine) < 1e-8
        assert straightness(traj.points) > 1e-3

    def test_leaving_the_box(self) -> None:
        traj = geodesic_integrate(flat_half_space(2).scene.connection('half'), (0.5, 0.0), (1.0, 0.0), 0.1, 100)
        assert traj.exited
        assert len(traj) < 10
        assert traj.points[-1, 0] <= 1.0
        free = geodesic_integrate(
            flat_half_space(2).scene.connection('half'), (0.5, 0.0), (1.0, 0.0), 0.1, 100, bounded=False
        )
        assert not free.exited
        assert free.points[-1, 0] == pytest.approx(10.5)

    def test_bad_arguments(self) -> None:
        gamma = ConnectionField.zero(plane)
        with pytest.raises(ValueError):
            geodesic_integrate(gamma, (0.0,), (1.0, 0.0), 0.1, 1)
        with pytest.raises(ValueError):
            geodesic_integrate(gamma, (0.0, 0.0), (1.0, 0.0), 0.0, 1)
        with pytest.raises(ValueError):
            geodesic_integrate(gamma, (0.0, 0.0), (1.0, 0.0), 0.1, -1)
        with pytest.raises(ValueError):
            geodesic_integrate(gamma, (9.0, 0.0), (1.0, 0.0), 0.1, 1)


class TestDrift:
    def test_disk_boundary_is_left(self) -> None:
        polar = projective_disk().scene.connection('polar')
        drift = tangency_drift(polar, (0.0, 0.4), (0.0, 1.0), steps=100)
        assert drift.quadratic == pytest.approx(-0.5, abs=1e-3)
        assert drift.max_abs == pytest.approx(math.sqrt(1.01) - 1.0, rel=1e-3)

    def test_parabolic_rate(self) -> None:
        parabolic = projective_disk().scene.connection('parabolic')
        drift = tangency_drift(parabolic, (0.0, 0.0), (0.0, 1.0), steps=100)
        assert drift.quadratic == pytest.approx(-1.0, abs=1e-3)

    def test_flat_boundary_is_kept(self) -> None:
        gamma = flat_half_space(3).scene.connection('half')
        drift = tangency_drift(gamma, (0.0, 0.1, 0.2), (0.0, 0.3, -0.4))
        assert drift.max_abs <= 1e-10
        assert abs(drift.quadratic) <= 1e-8

    def test_preconditions(self) -> None:
        polar = projective_disk().scene.connection('polar')
        with pytest.raises(BoundaryPointError):
            tangency_drift(polar, (0.1, 0.0), (0.0, 1.0))
        with pytest.raises(ValueError):
            tangency_drift(polar, (0.0, 0.0), (1.0, 1.0))


class TestDistances:
    def test_trace_distance(self) -> None:
        line = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        pts = np.array([[0.5, 0.1], [1.2, 0.5], [2.0, 2.0]])
        assert trace_distance(pts, line) == pytest.approx(math.sqrt(2.0))
        assert trace_distance(pts[:2], line) == pytest.approx(0.2)
        assert trace_distance(np.array([[3.0, 4.0]]), np.array([[0.0, 0.0]])) == pytest.approx(5.0)

    def test_straightness(self) -> None:
        assert straightness(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])) == pytest.approx(0.0, abs=1e-15)
        assert straightness(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])) == pytest.approx(1.0)
        assert straightness(np.array([[1.0, 1.0], [1.0, 2.0], [1.0, 1.0]])) == pytest.approx(1.0)
