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

"""### Module dtools.projective.fixtures - built-in scenes

#### Scenes

- `flat_half_space(n)`: flat connection on `{x0 >= 0}`, not rigid, with a
  second boundary chart `(x0·exp(x1), x1, ...)`
- `projective_disk()`: the unit disk with its flat projective structure in
  an affine chart, a polar boundary chart and a parabolic boundary chart;
  rigid
- `degenerate_conic_halfspace(n)`: flat half space with the maps fixing
  the boundary hyperplane
- `geodesic_boundary(n)`: `Γ^0_11 = x0`, totally geodesic boundary of a
  curved connection
- `mixed_boundary()`: `Γ^0_11 = x1 + |x1|`, rigid on half the boundary

#### Maps

- `mobius_map(beta, gamma)`: `(x0/(γx0+1), (βx0+x1)/(γx0+1))`
- `o21_map(theta, psi, phi, chart)`: the disk automorphism
  `Rz(θ)·Bxz(ψ)·Rz(φ)` in the affine or the parabolic chart
- `o21_boundary_residual`: largest displacement of boundary points under
  that automorphism

"""

from __future__ import annotations

__all__ = [
    'Fixture', 'FIXTURES', 'flat_half_space', 'mobius_map', 'projective_disk',
    'disk_charts', 'o21_map', 'o21_matrix', 'o21_boundary_residual',
    'degenerate_conic_halfspace', 'geodesic_boundary', 'mixed_boundary',
]

import math
from collections.abc import Callable, Mapping, Sequence
from fractions import Fraction
from typing import Final

import numpy as np

from .components import Components
from .geometry import (
    Chart, ConnectionField, MapField, Scene, Transition, christoffel_transform,
)
from .symexpr import Call, Const, Expr, ONE, ZERO, Product, Sum, Var, simplify


class Fixture:
    """A scene with the verdicts and values it is known to produce."""

    __slots__ = ('name', 'scene', 'expected', 'notes')
    __match_args__ = ('name', 'scene', 'expected')

    def __init__(self, name: str, scene: Scene, expected: Mapping[str, object], notes: str = '') -> None:
        self.name = name
        self.scene = scene
        self.expected = dict(expected)
        self.notes = notes

    def __repr__(self) -> str:
        return f'Fixture({self.name!r}, {self.scene!r})'


def _exprs(chart: Chart, texts: Sequence[str], params: Sequence[str] = ()) -> Components[Expr]:
    return Components([chart.parse(t, params) for t in texts], (len(texts),))


def _half_chart(n: int, name: str = 'half', x0_max: float = 1.0) -> Chart:
    coords = tuple(f'x{i}' for i in range(n))
    box = {c: (-1.0, 1.0) for c in coords}
    box['x0'] = (0.0, x0_max)
    return Chart(name, coords, box, boundary=True)


def _connection(chart: Chart, entries: Mapping[tuple[int, int, int], str]) -> ConnectionField:
    return ConnectionField.from_entries(chart, {k: chart.parse(v) for k, v in entries.items()})


def mobius_map(beta: float = 1.2, gamma: float = 0.3) -> MapField:
    """Projective map of the flat half plane fixing the boundary line.

    `beta` and `gamma` stay symbolic, their values are the map's default
    parameters. When `γ < 0` puts the pole `x0 = −1/γ` inside the box the
    box is shrunk to `x0 <= 0.9/|γ|`.

    """
    x0_max = 1.0
    if gamma < 0 and -1.0 / gamma <= 1.0:
        x0_max = 0.9 / abs(gamma)
    chart = _half_chart(2, x0_max=x0_max)
    comps = _exprs(chart, ('x0/(gamma*x0 + 1)', '(beta*x0 + x1)/(gamma*x0 + 1)'), ('beta', 'gamma'))
    return MapField(chart, chart, comps, {'beta': beta, 'gamma': gamma})


def flat_half_space(n: int = 2) -> Fixture:
    if n < 2:
        msg = f'flat_half_space: n must be at least 2, got {n}'
        raise ValueError(msg)
    half = _half_chart(n)
    bar_coords = tuple(f'xb{i}' for i in range(n))
    bar_box = {c: (-1.0, 1.0) for c in bar_coords}
    bar_box['xb0'] = (0.0, math.e)
    bar = Chart('half_bar', bar_coords, bar_box, boundary=True)
    to_bar = Transition(
        half,
        bar,
        _exprs(bar, ('xb0*exp(-xb1)',) + bar_coords[1:]),
        _exprs(half, ('x0*exp(x1)',) + half.coords[1:]),
    )
    flat = ConnectionField.zero(half)
    maps = {'identity': MapField.identity(half)}
    if n == 2:
        maps['mobius'] = mobius_map()
        maps['shear'] = MapField(half, half, _exprs(half, ('x0', 'x1 + x0^2')))
    scene = Scene(
        n, (half, bar), (flat, christoffel_transform(flat, to_bar)), maps, transitions=(to_bar,)
    )
    return Fixture(
        f'flat_half_space_{n}',
        scene,
        {
            'rigidity': 'NONRIGID_CANDIDATE',
            'jet_dimension': n,
            'verify_map': {'identity': True, 'mobius': True, 'shear': False},
        },
        'flat half space, boundary totally geodesic, Möbius family of automorphisms',
    )


def disk_charts() -> dict[str, Chart]:
    """Affine, polar and parabolic charts of the unit disk."""
    return {
        'affine': Chart('affine', ('x', 'y'), {'x': (-0.7, 0.7), 'y': (-0.7, 0.7)}),
        'polar': Chart('polar', ('r', 't'), {'r': (0.0, 0.9), 't': (-math.pi, math.pi)}, boundary=True),
        'parabolic': Chart('parabolic', ('r', 's'), {'r': (0.0, 0.9), 's': (-1.0, 1.0)}, boundary=True),
    }


def o21_matrix() -> list[list[Expr]]:
    """`Rz(θ)·Bxz(ψ)·Rz(φ)` with symbolic `theta`, `psi`, `phi`."""

    def rz(angle: str) -> list[list[Expr]]:
        c, s = Call('cos', Var(angle)), Call('sin', Var(angle))
        return [[c, Product((Const(-1), s)), ZERO], [s, c, ZERO], [ZERO, ZERO, ONE]]

    ch, sh = Call('cosh', Var('psi')), Call('sinh', Var('psi'))
    boost: list[list[Expr]] = [[ch, ZERO, sh], [ZERO, ONE, ZERO], [sh, ZERO, ch]]

    def mul(p: list[list[Expr]], q: list[list[Expr]]) -> list[list[Expr]]:
        return [
            [simplify(Sum(tuple(Product((p[i][k], q[k][j])) for k in range(3)))) for j in range(3)]
            for i in range(3)
        ]

    return mul(mul(rz('theta'), boost), rz('phi'))


def _apply(g: list[list[Expr]], v: Sequence[Expr]) -> list[Expr]:
    return [simplify(Sum(tuple(Product((g[i][j], v[j])) for j in range(3)))) for i in range(3)]


def o21_map(theta: float = 0.1, psi: float = 0.2, phi: float = -0.1, chart: str = 'affine') -> MapField:
    """Disk automorphism in the `affine` or `parabolic` chart.

    Both charts are rational images of the disk, so the map is rational in
    the coordinates with trigonometric and hyperbolic coefficients in the
    parameters.

    """
    charts = disk_charts()
    g = o21_matrix()
    values = {'theta': theta, 'psi': psi, 'phi': phi}
    match chart:
        case 'affine':
            x, y = Var('x'), Var('y')
            big_x, big_y, big_z = _apply(g, (x, y, ONE))
            comps = [simplify(big_x / big_z), simplify(big_y / big_z)]
        case 'parabolic':
            r, s = Var('r'), Var('s')
            half = Const(Fraction(1, 2))
            start = (s, half * (ONE - r - s * s), half * (ONE + r + s * s))
            big_x, big_y, big_z = _apply(g, start)
            u = big_x / (big_z + big_y)
            v = (big_z - big_y) / (big_z + big_y)
            comps = [simplify(v - u * u), simplify(u)]
        case _:
            msg = f'o21_map: no rational form in chart {chart!r}'
            raise ValueError(msg)
    target = charts[chart]
    return MapField(target, target, Components(comps, (2,)), values)


def o21_boundary_residual(theta: float, psi: float, phi: float, samples: int = 64) -> float:
    """Largest `|g(cos t, sin t) − (cos t, sin t)|` over equally spaced `t`."""

    def rz(a: float) -> np.ndarray:
        return np.array([[math.cos(a), -math.sin(a), 0.0], [math.sin(a), math.cos(a), 0.0], [0.0, 0.0, 1.0]])

    boost = np.array([
        [math.cosh(psi), 0.0, math.sinh(psi)],
        [0.0, 1.0, 0.0],
        [math.sinh(psi), 0.0, math.cosh(psi)],
    ])
    g = rz(theta) @ boost @ rz(phi)
    t = np.linspace(-math.pi, math.pi, samples, endpoint=False)
    circle = np.stack((np.cos(t), np.sin(t), np.ones_like(t)))
    image = g @ circle
    moved = image[:2] / image[2]
    return float(np.max(np.linalg.norm(moved - circle[:2], axis=0)))


def projective_disk() -> Fixture:
    charts = disk_charts()
    affine, polar, parabolic = charts['affine'], charts['polar'], charts['parabolic']
    to_polar = Transition(affine, polar, _exprs(polar, ('(1 - r)*cos(t)', '(1 - r)*sin(t)')))
    to_parabolic = Transition(
        affine,
        parabolic,
        _exprs(parabolic, ('2*s/(1 + r + s^2)', '(1 - r - s^2)/(1 + r + s^2)')),
        _exprs(affine, ('(1 - y)/(1 + y) - x^2/(1 + y)^2', 'x/(1 + y)')),
    )
    connections = (
        ConnectionField.zero(affine),
        _connection(polar, {(0, 1, 1): '1 - r', (1, 0, 1): '-1/(1 - r)'}),
        _connection(parabolic, {(0, 1, 1): '2'}),
    )
    maps = {
        'identity': MapField.identity(affine),
        'o21': o21_map(),
        'o21_parabolic': o21_map(chart='parabolic'),
    }
    scene = Scene(2, charts.values(), connections, maps, transitions=(to_polar, to_parabolic))
    return Fixture(
        'projective_disk',
        scene,
        {
            'rigidity': 'RIGID',
            'obstruction': {'polar': 1.0, 'parabolic': 2.0},
            'jet_dimension': 0,
            'verify_map': {'identity': True, 'o21': True, 'o21_parabolic': True},
        },
        'unit disk, the boundary circle is a nondegenerate conic',
    )


def degenerate_conic_halfspace(n: int = 3) -> Fixture:
    """Flat half space with the projective maps fixing `{x0 = 0}` pointwise."""
    if n < 2:
        msg = f'degenerate_conic_halfspace: n must be at least 2, got {n}'
        raise ValueError(msg)
    chart = _half_chart(n, name='conic')
    betas = tuple(f'beta{mu}' for mu in range(1, n))
    texts = ['x0/(gamma*x0 + 1)'] + [
        f'({b}*x0 + x{mu})/(gamma*x0 + 1)' for mu, b in enumerate(betas, start=1)
    ]
    params = {'gamma': 0.3} | {b: 0.5 * mu for mu, b in enumerate(betas, start=1)}
    mobius = MapField(chart, chart, _exprs(chart, texts, ('gamma',) + betas), params)
    scene = Scene(
        n, (chart,), (ConnectionField.zero(chart),),
        {'identity': MapField.identity(chart), 'mobius': mobius},
    )
    return Fixture(
        f'degenerate_conic_halfspace_{n}',
        scene,
        {
            'rigidity': 'NONRIGID_CANDIDATE',
            'jet_dimension': n,
            'verify_map': {'identity': True, 'mobius': True},
        },
        'boundary hyperplane of a degenerate conic, flat induced structure',
    )


def geodesic_boundary(n: int = 2) -> Fixture:
    """Curved connection whose boundary is totally geodesic, `Γ^0_11 = x0`."""
    chart = _half_chart(n)
    scene = Scene(n, (chart,), (_connection(chart, {(0, 1, 1): 'x0'}),))
    return Fixture(
        f'geodesic_boundary_{n}',
        scene,
        {'rigidity': 'NONRIGID_CANDIDATE'},
        'Γ^0_11 vanishes on the boundary only',
    )


def mixed_boundary() -> Fixture:
    """`Γ^0_11 = x1 + |x1|`, obstruction vanishes exactly where `x1 <= 0`."""
    chart = _half_chart(2)
    scene = Scene(2, (chart,), (_connection(chart, {(0, 1, 1): 'x1 + sqrt(x1^2)'}),))
    return Fixture('mixed_boundary', scene, {'rigidity': 'MIXED'}, 'rigid for x1 > 0 only')


FIXTURES: Final[dict[str, Callable[[], Fixture]]] = {
    'flat_half_space': lambda: flat_half_space(2),
    'flat_half_space_3': lambda: flat_half_space(3),
    'projective_disk': projective_disk,
    'degenerate_conic_halfspace': lambda: degenerate_conic_halfspace(3),
    'geodesic_boundary': lambda: geodesic_boundary(2),
    'geodesic_boundary_3': lambda: geodesic_boundary(3),
    'mixed_boundary': mixed_boundary,
}
