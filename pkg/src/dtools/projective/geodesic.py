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

"""### Module dtools.projective.geodesic - geodesics and boundary tangency

- *class* `Trajectory`: fixed step states `(x, v)` with an exit flag
- *function* `geodesic_integrate`: classic RK4 for `ẍ^i + Γ^i_jk ẋ^j ẋ^k = 0`
- *function* `tangency_drift`: how far a geodesic tangent to the boundary
  leaves it, with the fitted `t²` coefficient
- *function* `trace_distance`: one sided distance of sampled points to a polyline
- *function* `straightness`: distance of points to the chord of their end points

"""

from __future__ import annotations

__all__ = [
    'Trajectory', 'Drift', 'geodesic_integrate', 'tangency_drift',
    'trace_distance', 'straightness',
]

import logging
from collections.abc import Callable, Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from .geometry import BoundaryPointError, ConnectionField
from .symexpr import EvalDomainError, ZERO, lambdify, simplify

log = logging.getLogger(__name__)


class Trajectory:
    """States `(x^i, v^i)` at affine parameter `t = k·h`."""

    __slots__ = ('chart', 'h', 'states', 'exited')
    __match_args__ = ('chart', 'h', 'states', 'exited')

    def __init__(self, chart: str, h: float, states: NDArray[np.float64], exited: bool) -> None:
        self.chart = chart
        self.h = h
        self.states = states
        self.exited = exited

    @property
    def n(self) -> int:
        return self.states.shape[1] // 2

    @property
    def points(self) -> NDArray[np.float64]:
        return self.states[:, :self.n]

    @property
    def velocities(self) -> NDArray[np.float64]:
        return self.states[:, self.n:]

    @property
    def times(self) -> NDArray[np.float64]:
        return self.h * np.arange(self.states.shape[0])

    def __len__(self) -> int:
        return self.states.shape[0]

    def __repr__(self) -> str:
        flag = ', exited' if self.exited else ''
        return f'Trajectory({self.chart!r}, h={self.h}, steps={len(self) - 1}{flag})'


def _christoffel_function(
    gamma: ConnectionField, params: Mapping[str, float]
) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    n = gamma.n
    names = gamma.chart.coords + tuple(params)
    fixed = list(params.values())
    entries = []
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                e = simplify(gamma.at(i, j, k))
                if e != ZERO:
                    entries.append((i, j, k, lambdify(e, names)))

    def at(x: NDArray[np.float64]) -> NDArray[np.float64]:
        values = [*map(float, x), *fixed]
        out = np.zeros((n, n, n))
        for i, j, k, f in entries:
            out[i, j, k] = out[i, k, j] = f(values)
        return out

    return at


def geodesic_integrate(
    gamma: ConnectionField,
    x0: Sequence[float],
    v0: Sequence[float],
    h: float,
    steps: int,
    params: Mapping[str, float] | None = None,
    bounded: bool = True,
) -> Trajectory:
    """Integrate the geodesic through `x0` with velocity `v0`.

    - `bounded`: stop with `exited` set once the trajectory leaves the
      chart box, the last state kept is inside it
    - a domain error or a non-finite state also stops the run

    """
    chart = gamma.chart
    n = gamma.n
    box = np.array([chart.box[c] for c in chart.coords])
    x = np.asarray(x0, dtype=float)
    v = np.asarray(v0, dtype=float)
    if x.shape != (n,) or v.shape != (n,):
        msg = f'geodesic_integrate: expected {n} coordinates and {n} velocity components'
        raise ValueError(msg)
    if h <= 0 or steps < 0:
        msg = f'geodesic_integrate: need h > 0 and steps >= 0, got {h}, {steps}'
        raise ValueError(msg)

    def inside(y: NDArray[np.float64]) -> bool:
        return bool(np.all(y >= box[:, 0]) and np.all(y <= box[:, 1]))

    if bounded and not inside(x):
        msg = f'geodesic_integrate: initial point {tuple(x)} outside the box of {chart.name!r}'
        raise ValueError(msg)
    christoffel = _christoffel_function(gamma, dict(params or {}))

    def rhs(state: NDArray[np.float64]) -> NDArray[np.float64]:
        pos, vel = state[:n], state[n:]
        acc = -np.einsum('ijk,j,k->i', christoffel(pos), vel, vel)
        return np.concatenate((vel, acc))

    states = [np.concatenate((x, v))]
    exited = False
    for _ in range(steps):
        state = states[-1]
        try:
            k1 = rhs(state)
            k2 = rhs(state + 0.5 * h * k1)
            k3 = rhs(state + 0.5 * h * k2)
            k4 = rhs(state + h * k3)
        except EvalDomainError as exc:
            log.debug('geodesic_integrate: %s', exc)
            exited = True
            break
        nxt = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(nxt)) or (bounded and not inside(nxt[:n])):
            exited = True
            break
        states.append(nxt)
    if exited:
        log.info('geodesic_integrate: left %s after %d steps', chart.name, len(states) - 1)
    return Trajectory(chart.name, h, np.array(states), exited)


class Drift:
    """Largest `|x0(t)|` along the run and the fitted `t²` coefficient of `x0(t)`."""

    __slots__ = ('max_abs', 'quadratic', 'trajectory')
    __match_args__ = ('max_abs', 'quadratic', 'trajectory')

    def __init__(self, max_abs: float, quadratic: float, trajectory: Trajectory) -> None:
        self.max_abs = max_abs
        self.quadratic = quadratic
        self.trajectory = trajectory

    def __repr__(self) -> str:
        return f'Drift(max_abs={self.max_abs!r}, quadratic={self.quadratic!r})'


def tangency_drift(
    gamma: ConnectionField,
    y0: Sequence[float],
    v: Sequence[float],
    h: float = 1e-3,
    steps: int = 200,
    params: Mapping[str, float] | None = None,
) -> Drift:
    """Follow the geodesic starting tangent to the boundary.

    Near the start `x0(t) ≈ −½ Γ^0_μν v^μ v^ν t²`; the run is not stopped
    when `x0` turns negative.

    """
    chart = gamma.chart
    chart.require_boundary()
    if abs(y0[0]) > 1e-12:
        msg = f'tangency_drift: {tuple(y0)} is not on the boundary of {chart.name!r}'
        raise BoundaryPointError(msg)
    if abs(v[0]) > 1e-12:
        msg = f'tangency_drift: velocity {tuple(v)} is not tangent to the boundary'
        raise ValueError(msg)
    traj = geodesic_integrate(gamma, y0, v, h, steps, params, bounded=False)
    r = traj.points[:, 0]
    t = traj.times
    quadratic = float(np.polyfit(t, r, 4)[2]) if len(t) > 4 else float('nan')
    return Drift(float(np.max(np.abs(r))), quadratic, traj)


def _segment_distance(p: NDArray[np.float64], a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    ab = b - a
    denom = float(ab @ ab)
    s = 0.0 if denom == 0.0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + s * ab)))


def trace_distance(points: NDArray[np.float64], polyline: NDArray[np.float64]) -> float:
    """Largest distance from a sampled point to the polyline."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    line = np.atleast_2d(np.asarray(polyline, dtype=float))
    if len(line) == 1:
        return float(np.max(np.linalg.norm(pts - line[0], axis=1)))
    return max(
        min(_segment_distance(p, line[i], line[i + 1]) for i in range(len(line) - 1))
        for p in pts
    )


def straightness(points: NDArray[np.float64]) -> float:
    """Largest distance of the points to the line through the first and last one."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = pts[0], pts[-1]
    direction = b - a
    length = float(np.linalg.norm(direction))
    if length == 0.0:
        return float(np.max(np.linalg.norm(pts - a, axis=1)))
    unit = direction / length
    offsets = pts - a
    normal = offsets - np.outer(offsets @ unit, unit)
    return float(np.max(np.linalg.norm(normal, axis=1)))
