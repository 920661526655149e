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

"""### Module dtools.projective.geometry - charts and projective classes

Local coordinate description of manifolds with boundary and of torsion-free
connections up to projective equivalence.

#### Types

- *class* `Chart`: named coordinates, a sample box, boundary flag
  - in a boundary chart the first coordinate (alias `x0`) defines the
    boundary `{x0 = 0}` and the box has `x0 >= 0`
- *class* `Transition`: coordinate change between two charts
- *class* `ConnectionField`: Christoffel symbols `Γ^i_jk`, symmetric in `jk`
- *class* `OneFormField`: components `Υ_i`
- *class* `MapField`: map components `φ^i` with cached derivatives
- *class* `Scene`: charts, transitions, connections, maps and parameters

#### Operations

- `christoffel_transform`, `compose_transitions`
- `projective_shift`, `extract_upsilon`, `is_projectively_equivalent`
- `thomas_parameters`, `thomas_transform`
- `pullback_connection`, `is_projective_transformation`
- `covariant_derivative`, `restrict_to_boundary`, `restrict_field`
- symbolic `matrix_det` and `matrix_inverse`

"""

from __future__ import annotations

__all__ = [
    'Chart', 'Transition', 'ConnectionField', 'OneFormField', 'MapField', 'Scene',
    'ProjectiveReport', 'ChartError', 'NonInvertibleError', 'BoundaryPointError',
    'christoffel_transform', 'compose_transitions', 'projective_shift',
    'extract_upsilon', 'is_projectively_equivalent', 'thomas_parameters',
    'thomas_transform', 'pullback_connection', 'is_projective_transformation',
    'covariant_derivative', 'restrict_to_boundary', 'restrict_field',
    'matrix_det', 'matrix_inverse', 'symmetric_field', 'delta', 'value_at',
    'require_on_boundary',
]

import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from fractions import Fraction
from typing import Never

from .components import Components, components
from .memo import Memo
from .symexpr import (
    EvalDomainError, Expr, ONE, ZERO, Const, Neg, Product, Quotient, Sum,
    Var, diff, free_variables, lambdify, parse,
    simplify, substitute,
)
from .zerotest import DEFAULT_SAMPLES, DEFAULT_TOL, Sampler, Tri, ZeroTest, all_zero, labelled

log = logging.getLogger(__name__)


class ChartError(ValueError):
    """Objects living on different or unknown charts were combined."""


class NonInvertibleError(ValueError):
    """A Jacobian vanishes at a sample point."""


class BoundaryPointError(ValueError):
    """A point required on the boundary `{x0 = 0}` is not there."""


def delta(i: int, j: int) -> Expr:
    return ONE if i == j else ZERO


def _sum(terms: Iterable[Expr]) -> Expr:
    kept = tuple(t for t in terms if t != ZERO)
    if not kept:
        return ZERO
    return kept[0] if len(kept) == 1 else Sum(kept)


def _prod(*factors: Expr) -> Expr:
    if any(f == ZERO for f in factors):
        return ZERO
    kept = tuple(f for f in factors if f != ONE)
    if not kept:
        return ONE
    return kept[0] if len(kept) == 1 else Product(kept)


# -- Charts --------------------------------------------------------------------


class Chart:
    """Coordinate chart.

    - `coords`: coordinate names, `x0..x9` alias them positionally
    - `box`: sample interval per coordinate
    - `boundary`: when set, `coords[0]` is boundary defining and the box
      starts at `0` in that coordinate

    """

    __slots__ = ('name', 'coords', 'boundary', 'box')

    def __init__(
        self,
        name: str,
        coords: Sequence[str],
        box: Mapping[str, tuple[float, float]],
        boundary: bool = False,
    ) -> None:
        self.name = name
        self.coords = tuple(coords)
        self.boundary = boundary
        self.box = {c: (float(box[c][0]), float(box[c][1])) for c in self.coords if c in box}
        if not self.coords:
            msg = f'Chart {name!r}: no coordinates'
            raise ChartError(msg)
        if len(set(self.coords)) != len(self.coords):
            msg = f'Chart {name!r}: repeated coordinate names {self.coords}'
            raise ChartError(msg)
        missing = [c for c in self.coords if c not in box]
        if missing:
            msg = f'Chart {name!r}: no box interval for {missing}'
            raise ChartError(msg)
        if boundary and self.box[self.coords[0]][0] < 0:
            msg = f'Chart {name!r}: boundary coordinate {self.coords[0]!r} must be >= 0 on the box'
            raise ChartError(msg)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def aliases(self) -> dict[str, str]:
        return {f'x{ii}': c for ii, c in enumerate(self.coords)}

    def __repr__(self) -> str:
        flag = ', boundary' if self.boundary else ''
        return f'Chart({self.name!r}, {self.coords}{flag})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chart):
            return False
        return (self.name, self.coords, self.boundary, self.box) == (
            other.name, other.coords, other.boundary, other.box
        )

    def __hash__(self) -> int:
        return hash((self.name, self.coords, self.boundary))

    def parse(self, text: str, params: Iterable[str] = ()) -> Expr:
        """Parse text over this chart's coordinates and the given parameters."""
        return parse(text, allowed=set(self.coords) | set(params), aliases=self.aliases)

    def sampler(
        self,
        params: Mapping[str, float] | None = None,
        count: int = DEFAULT_SAMPLES,
        seed: int = 0,
        tol: float = DEFAULT_TOL,
    ) -> Sampler:
        return Sampler(self.box, params, count, seed, tol)

    def boundary_sampler(
        self,
        params: Mapping[str, float] | None = None,
        count: int = DEFAULT_SAMPLES,
        seed: int = 0,
        tol: float = DEFAULT_TOL,
    ) -> Sampler:
        """Sampler on the boundary face `{x0 = 0}` of a boundary chart."""
        self.require_boundary()
        return Sampler(self.box, {**(params or {}), self.coords[0]: 0.0}, count, seed, tol)

    def boundary_face(self) -> Chart:
        """Chart of the boundary, coordinates `x1..x{n-1}`."""
        self.require_boundary()
        return Chart(self.name + '.boundary', self.coords[1:], self.box)

    def require_boundary(self) -> None | Never:
        if not self.boundary:
            msg = f'Chart {self.name!r} is not a boundary chart'
            raise ChartError(msg)
        return None


def _same_chart(a: Chart, b: Chart, what: str) -> None | Never:
    if a != b:
        msg = f'{what}: chart {a.name!r} does not match chart {b.name!r}'
        raise ChartError(msg)
    return None


# -- Symbolic matrices ---------------------------------------------------------


def matrix_det(m: Components[Expr]) -> Expr:
    """Determinant of a square matrix of expressions, Laplace expansion."""
    size = m.shape[0]
    rows = [[m.at(i, j) for j in range(size)] for i in range(size)]

    def det(rs: list[list[Expr]]) -> Expr:
        if len(rs) == 1:
            return rs[0][0]
        if len(rs) == 2:
            return _sum((_prod(rs[0][0], rs[1][1]), Neg(_prod(rs[0][1], rs[1][0]))))
        terms: list[Expr] = []
        for jj, entry in enumerate(rs[0]):
            if entry == ZERO:
                continue
            minor = [row[:jj] + row[jj + 1:] for row in rs[1:]]
            term = _prod(entry, det(minor))
            terms.append(term if jj % 2 == 0 else Neg(term))
        return _sum(terms)

    return simplify(det(rows))


def matrix_inverse(m: Components[Expr]) -> Components[Expr]:
    """Inverse of a square matrix of expressions via the adjugate."""
    size = m.shape[0]
    determinant = matrix_det(m)
    if determinant == ZERO:
        msg = 'matrix_inverse: determinant is identically zero'
        raise NonInvertibleError(msg)
    if size == 1:
        return Components((simplify(Quotient(ONE, determinant)),), (1, 1))

    def cofactor(i: int, j: int) -> Expr:
        minor = Components(
            (m.at(r, c) for r in range(size) if r != i for c in range(size) if c != j),
            (size - 1, size - 1),
        )
        d = matrix_det(minor)
        return d if (i + j) % 2 == 0 else Neg(d)

    return components((size, size), lambda i, j: simplify(Quotient(cofactor(j, i), determinant)))


def _check_invertible(
    jac: Components[Expr], sampler: Sampler | None, what: str
) -> None | Never:
    if sampler is None:
        return None
    determinant = matrix_det(jac)
    names = sampler.names
    if not free_variables(determinant) <= set(names):
        return None
    f = lambdify(determinant, names)
    for point in sampler.points():
        try:
            value = f([point[n] for n in names])
        except EvalDomainError:
            continue
        if abs(value) < 1e-12:
            msg = f'{what}: Jacobian determinant vanishes at {point}'
            raise NonInvertibleError(msg)
    return None


# -- Fields --------------------------------------------------------------------


def symmetric_field(n: int, f: Callable[[int, int, int], Expr]) -> Components[Expr]:
    """Shape `(n, n, n)` components, `f` evaluated for `j <= k` and mirrored."""
    cache: dict[tuple[int, int, int], Expr] = {}

    def entry(i: int, j: int, k: int) -> Expr:
        key = (i, min(j, k), max(j, k))
        if key not in cache:
            cache[key] = simplify(f(*key))
        return cache[key]

    return components((n, n, n), entry)


class ConnectionField:
    """Christoffel symbols of a torsion-free connection on one chart."""

    __slots__ = ('chart', 'gamma')
    __match_args__ = ('chart', 'gamma')

    def __init__(self, chart: Chart, gamma: Components[Expr]) -> None:
        n = chart.n
        if gamma.shape != (n, n, n):
            msg = f'ConnectionField: shape {gamma.shape} on a {n}-dimensional chart'
            raise ChartError(msg)
        for i in range(n):
            for j in range(n):
                for k in range(j + 1, n):
                    if simplify(gamma.at(i, j, k)) != simplify(gamma.at(i, k, j)):
                        msg = f'ConnectionField: Γ^{i}_{j}{k} and Γ^{i}_{k}{j} differ'
                        raise ValueError(msg)
        self.chart = chart
        self.gamma = gamma

    @property
    def n(self) -> int:
        return self.chart.n

    def at(self, i: int, j: int, k: int) -> Expr:
        return self.gamma.at(i, j, k)

    def __repr__(self) -> str:
        return f'ConnectionField({self.chart.name!r}, {self.gamma!r})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConnectionField):
            return False
        return self.chart == other.chart and self.gamma == other.gamma

    def __hash__(self) -> int:
        return hash((self.chart, self.gamma))

    @staticmethod
    def zero(chart: Chart) -> ConnectionField:
        n = chart.n
        return ConnectionField(chart, Components((ZERO,) * n**3, (n, n, n)))

    @staticmethod
    def from_entries(chart: Chart, entries: Mapping[tuple[int, int, int], Expr]) -> ConnectionField:
        """Connection from its nonzero entries, one of each symmetric pair suffices."""

        def entry(i: int, j: int, k: int) -> Expr:
            return entries.get((i, j, k), entries.get((i, k, j), ZERO))

        return ConnectionField(chart, symmetric_field(chart.n, entry))


class OneFormField:
    """Components `Υ_i` of a 1-form on one chart."""

    __slots__ = ('chart', 'comps')
    __match_args__ = ('chart', 'comps')

    def __init__(self, chart: Chart, comps: Components[Expr]) -> None:
        if comps.shape != (chart.n,):
            msg = f'OneFormField: shape {comps.shape} on a {chart.n}-dimensional chart'
            raise ChartError(msg)
        self.chart = chart
        self.comps = comps

    def at(self, i: int) -> Expr:
        return self.comps.at(i)

    def __repr__(self) -> str:
        return f'OneFormField({self.chart.name!r}, {list(self.comps)!r})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OneFormField):
            return False
        return self.chart == other.chart and self.comps == other.comps

    def __hash__(self) -> int:
        return hash((self.chart, self.comps))

    @staticmethod
    def zero(chart: Chart) -> OneFormField:
        return OneFormField(chart, Components((ZERO,) * chart.n, (chart.n,)))


class MapField:
    """Map between charts given by target coordinates as functions of source ones.

    - `params`: default values for parameters occurring in the components
    - Jacobian `∂φ^i/∂x^j`, Hessians and the inverse Jacobian are computed
      on first use and cached

    """

    __slots__ = ('source', 'target', 'comps', 'params', '_jac', '_hess', '_inv')

    def __init__(
        self,
        source: Chart,
        target: Chart,
        comps: Components[Expr],
        params: Mapping[str, float] | None = None,
    ) -> None:
        if source.n != target.n or comps.shape != (target.n,):
            msg = f'MapField: {comps.shape} components from {source.name!r} to {target.name!r}'
            raise ChartError(msg)
        self.source = source
        self.target = target
        self.comps = comps
        self.params = dict(params or {})
        self._jac: Memo[Components[Expr]] = Memo()
        self._hess: Memo[Components[Expr]] = Memo()
        self._inv: Memo[Components[Expr]] = Memo()

    @property
    def n(self) -> int:
        return self.source.n

    def __repr__(self) -> str:
        return f'MapField({self.source.name!r} -> {self.target.name!r}, {list(self.comps)!r})'

    def jacobian(self) -> Components[Expr]:
        """`g^i_j = ∂φ^i/∂x^j` in source coordinates."""
        xs = self.source.coords
        return self._jac.get_or_compute(
            lambda: components((self.n, self.n), lambda i, j: diff(self.comps.at(i), xs[j]))
        )

    def hessian(self) -> Components[Expr]:
        """`∂²φ^i/∂x^j∂x^k` in source coordinates."""
        xs = self.source.coords
        jac = self.jacobian()
        return self._hess.get_or_compute(
            lambda: symmetric_field(self.n, lambda i, j, k: diff(jac.at(i, j), xs[k]))
        )

    def inverse_jacobian(self) -> Components[Expr]:
        return self._inv.get_or_compute(lambda: matrix_inverse(self.jacobian()))

    def compose_into(self, e: Expr) -> Expr:
        """`e ∘ φ` for an expression in target coordinates."""
        return substitute(e, dict(zip(self.target.coords, self.comps)))

    @staticmethod
    def identity(chart: Chart) -> MapField:
        return MapField(chart, chart, Components(tuple(Var(c) for c in chart.coords), (chart.n,)))


class Transition:
    """Coordinate change from `source` to `target`.

    - `inverse`: source coordinates as functions of target coordinates,
      the only part needed to transform connections
    - `forward`: target coordinates as functions of source coordinates,
      optional, used to carry points over

    """

    __slots__ = ('source', 'target', 'inverse', 'forward')

    def __init__(
        self,
        source: Chart,
        target: Chart,
        inverse: Components[Expr],
        forward: Components[Expr] | None = None,
    ) -> None:
        if source.n != target.n or inverse.shape != (source.n,):
            msg = f'Transition {source.name!r} -> {target.name!r}: bad component shape'
            raise ChartError(msg)
        if forward is not None and forward.shape != (target.n,):
            msg = f'Transition {source.name!r} -> {target.name!r}: bad forward shape'
            raise ChartError(msg)
        self.source = source
        self.target = target
        self.inverse = inverse
        self.forward = forward

    def __repr__(self) -> str:
        return f'Transition({self.source.name!r} -> {self.target.name!r})'

    def as_map(self) -> MapField:
        """The transition seen as the map `x̄ ↦ x(x̄)` from target to source chart."""
        return MapField(self.target, self.source, self.inverse)

    def reversed(self) -> Transition:
        if self.forward is None:
            msg = f'{self!r} has no forward components to reverse'
            raise ChartError(msg)
        return Transition(self.target, self.source, self.forward, self.inverse)

    def map_point(
        self, point: Sequence[float], params: Mapping[str, float] | None = None
    ) -> tuple[float, ...]:
        """Source coordinates of a point to target coordinates."""
        if self.forward is None:
            msg = f'{self!r} has no forward components'
            raise ChartError(msg)
        names = self.source.coords + tuple(params or {})
        values = list(point) + list((params or {}).values())
        return tuple(lambdify(simplify(e), names)(values) for e in self.forward)


class Scene:
    """Charts, transitions, connections per chart, declared maps and parameters."""

    __slots__ = ('dimension', 'charts', 'transitions', 'connections', 'maps', 'params')

    def __init__(
        self,
        dimension: int,
        charts: Iterable[Chart],
        connections: Iterable[ConnectionField] = (),
        maps: Mapping[str, MapField] | None = None,
        params: Mapping[str, float] | None = None,
        transitions: Iterable[Transition] = (),
    ) -> None:
        self.dimension = dimension
        self.charts = {c.name: c for c in charts}
        self.transitions = tuple(transitions)
        self.connections = {g.chart.name: g for g in connections}
        self.maps = dict(maps or {})
        self.params = dict(params or {})
        if dimension < 2:
            msg = f'Scene: dimension must be at least 2, got {dimension}'
            raise ChartError(msg)
        for chart in self.charts.values():
            if chart.n != dimension:
                msg = f'Scene: chart {chart.name!r} has dimension {chart.n}, scene {dimension}'
                raise ChartError(msg)
        for what, chart in (
            [('connection', g.chart) for g in self.connections.values()]
            + [(f'map {k!r}', m.source) for k, m in self.maps.items()]
            + [(f'map {k!r}', m.target) for k, m in self.maps.items()]
            + [('transition', t.source) for t in self.transitions]
            + [('transition', t.target) for t in self.transitions]
        ):
            if self.charts.get(chart.name) != chart:
                msg = f'Scene: {what} references unknown chart {chart.name!r}'
                raise ChartError(msg)

    def __repr__(self) -> str:
        return f'Scene(n={self.dimension}, charts={list(self.charts)}, maps={list(self.maps)})'

    def chart(self, name: str) -> Chart:
        if name not in self.charts:
            msg = f'Scene: no chart named {name!r}'
            raise ChartError(msg)
        return self.charts[name]

    def connection(self, chart_name: str) -> ConnectionField:
        if chart_name not in self.connections:
            msg = f'Scene: no connection on chart {chart_name!r}'
            raise ChartError(msg)
        return self.connections[chart_name]

    def map(self, name: str) -> MapField:
        if name not in self.maps:
            msg = f'Scene: no map named {name!r}'
            raise ChartError(msg)
        return self.maps[name]

    def boundary_charts(self) -> list[Chart]:
        return [c for c in self.charts.values() if c.boundary]

    def transitions_from(self, chart_name: str) -> list[Transition]:
        return [t for t in self.transitions if t.source.name == chart_name]

    def params_for(self, m: MapField | None = None) -> dict[str, float]:
        """Parameter values, scene values override a map's defaults."""
        base = dict(m.params) if m is not None else {}
        return {**base, **self.params}


# -- Coordinate changes --------------------------------------------------------


def _change_of_frame(
    composed: Components[Expr],
    jac: Components[Expr],
    hess: Components[Expr],
    inv: Components[Expr],
) -> Components[Expr]:
    """`(g⁻¹)^i_l (∂_j∂_k φ^l + Γ^l_sm g^s_j g^m_k)` with `Γ` already composed with `φ`."""
    n = jac.shape[0]

    def entry(i: int, j: int, k: int) -> Expr:
        terms: list[Expr] = []
        for l in range(n):
            if inv.at(i, l) == ZERO:
                continue
            inner = [hess.at(l, j, k)]
            for s in range(n):
                for m in range(n):
                    inner.append(_prod(composed.at(l, s, m), jac.at(s, j), jac.at(m, k)))
            terms.append(_prod(inv.at(i, l), _sum(inner)))
        return _sum(terms)

    return symmetric_field(n, entry)


def christoffel_transform(
    gamma: ConnectionField, t: Transition, sampler: Sampler | None = None
) -> ConnectionField:
    """Christoffel symbols of `gamma` in the target chart of `t`.

    `Γ̄^i_jk = (∂x̄^i/∂x^l)(∂²x^l/∂x̄^j∂x̄^k + Γ^l_sm (∂x^s/∂x̄^j)(∂x^m/∂x̄^k))`,
    everything expressed in target coordinates. When a sampler over the
    target chart is given the Jacobian is checked there first.

    """
    _same_chart(gamma.chart, t.source, 'christoffel_transform')
    back = t.as_map()
    jac = back.jacobian()
    _check_invertible(jac, sampler, 'christoffel_transform')
    hess = back.hessian()
    inv = back.inverse_jacobian()
    composed = gamma.gamma.map(back.compose_into)
    log.debug('christoffel_transform: %s -> %s', t.source.name, t.target.name)
    return ConnectionField(t.target, _change_of_frame(composed, jac, hess, inv))


def compose_transitions(first: Transition, second: Transition) -> Transition:
    """Transition `first.source -> second.target` through `first.target`."""
    _same_chart(first.target, second.source, 'compose_transitions')
    middle = dict(zip(first.target.coords, second.inverse))
    inverse = first.inverse.map(lambda e: simplify(substitute(e, middle)))
    forward = None
    if first.forward is not None and second.forward is not None:
        start = dict(zip(first.target.coords, first.forward))
        forward = second.forward.map(lambda e: simplify(substitute(e, start)))
    return Transition(first.source, second.target, inverse, forward)


# -- Projective class ----------------------------------------------------------


def projective_shift(gamma: ConnectionField, upsilon: OneFormField) -> ConnectionField:
    """`Γ̂^i_jk = Γ^i_jk + δ^i_j Υ_k + δ^i_k Υ_j`."""
    _same_chart(gamma.chart, upsilon.chart, 'projective_shift')

    def entry(i: int, j: int, k: int) -> Expr:
        return _sum((
            gamma.at(i, j, k),
            _prod(delta(i, j), upsilon.at(k)),
            _prod(delta(i, k), upsilon.at(j)),
        ))

    return ConnectionField(gamma.chart, symmetric_field(gamma.n, entry))


def _trace(gamma: ConnectionField | Components[Expr], n: int, k: int) -> Expr:
    g = gamma.gamma if isinstance(gamma, ConnectionField) else gamma
    return _sum(g.at(i, i, k) for i in range(n))


def extract_upsilon(gamma_hat: ConnectionField, gamma: ConnectionField) -> OneFormField:
    """`Υ_k = (Γ̂^i_ik − Γ^i_ik)/(n+1)`."""
    _same_chart(gamma_hat.chart, gamma.chart, 'extract_upsilon')
    n = gamma.n
    scale = Const(Fraction(1, n + 1))
    comps = Components(
        (
            simplify(_prod(scale, _sum((_trace(gamma_hat, n, k), Neg(_trace(gamma, n, k))))))
            for k in range(n)
        ),
        (n,),
    )
    return OneFormField(gamma.chart, comps)


class ProjectiveReport:
    """Outcome of a projective equivalence test.

    - `test`: zero test of the residual components
    - `upsilon`: the extracted 1-form
    - `residual`: `Γ̂ − shift(Γ, Υ)`, simplified

    """

    __slots__ = ('test', 'upsilon', 'residual')
    __match_args__ = ('test', 'upsilon', 'residual')

    def __init__(self, test: ZeroTest, upsilon: OneFormField, residual: Components[Expr]) -> None:
        self.test = test
        self.upsilon = upsilon
        self.residual = residual

    @property
    def verdict(self) -> Tri:
        return self.test.verdict

    def __repr__(self) -> str:
        return f'ProjectiveReport({self.test!r}, {self.upsilon!r})'


def is_projectively_equivalent(
    gamma_hat: ConnectionField, gamma: ConnectionField, sampler: Sampler
) -> ProjectiveReport:
    """Test `Γ̂ = shift(Γ, Υ)` with `Υ` extracted from the traces."""
    upsilon = extract_upsilon(gamma_hat, gamma)
    shifted = projective_shift(gamma, upsilon)
    residual = gamma_hat.gamma.zip_with(shifted.gamma, lambda a, b: simplify(_sum((a, Neg(b)))))
    test = all_zero(labelled('residual', residual.items()), sampler)
    return ProjectiveReport(test, upsilon, residual)


def thomas_parameters(gamma: ConnectionField) -> ConnectionField:
    """Trace-free `Π^i_jk = Γ^i_jk − (δ^i_j Γ^l_lk + δ^i_k Γ^l_lj)/(n+1)`."""
    n = gamma.n
    scale = Const(Fraction(-1, n + 1))
    traces = [_trace(gamma, n, k) for k in range(n)]

    def entry(i: int, j: int, k: int) -> Expr:
        correction = _sum((_prod(delta(i, j), traces[k]), _prod(delta(i, k), traces[j])))
        return _sum((gamma.at(i, j, k), _prod(scale, correction)))

    return ConnectionField(gamma.chart, symmetric_field(n, entry))


def pullback_connection(gamma: ConnectionField, phi: MapField) -> ConnectionField:
    """Connection `φ*Γ` on the source chart of `φ`.

    `Γ̃^i_jk = (g⁻¹)^i_l (∂²φ^l/∂x^j∂x^k + (Γ^l_sm∘φ) g^s_j g^m_k)`
    with `g = ∂φ/∂x`.

    """
    _same_chart(gamma.chart, phi.target, 'pullback_connection')
    jac = phi.jacobian()
    hess = phi.hessian()
    inv = phi.inverse_jacobian()
    composed = gamma.gamma.map(phi.compose_into)
    return ConnectionField(phi.source, _change_of_frame(composed, jac, hess, inv))


def thomas_transform(pi: ConnectionField, phi: MapField) -> ConnectionField:
    """Transformation law of Thomas parameters under a diffeomorphism.

    `Π̃ = φ*Π − (δ^i_j T_k + δ^i_k T_j)/(n+1)` with
    `T_k = (g⁻¹)^a_l ∂_a∂_k φ^l` the derivative of `log det g`.

    """
    pulled = pullback_connection(pi, phi)
    hess = phi.hessian()
    inv = phi.inverse_jacobian()
    n = pi.n
    trace_terms = [
        _sum(_prod(inv.at(a, l), hess.at(l, a, k)) for a in range(n) for l in range(n))
        for k in range(n)
    ]
    scale = Const(Fraction(-1, n + 1))

    def entry(i: int, j: int, k: int) -> Expr:
        correction = _sum((_prod(delta(i, j), trace_terms[k]), _prod(delta(i, k), trace_terms[j])))
        return _sum((pulled.at(i, j, k), _prod(scale, correction)))

    return ConnectionField(phi.source, symmetric_field(n, entry))


def is_projective_transformation(
    phi: MapField,
    gamma: ConnectionField,
    sampler: Sampler,
    source: ConnectionField | None = None,
) -> ProjectiveReport:
    """Test whether `φ` maps the projective class of `source` to that of `gamma`.

    - `gamma` lives on the target chart of `φ`
    - `source` defaults to `gamma` when `φ` maps a chart to itself

    """
    if source is None:
        if phi.source != phi.target:
            msg = 'is_projective_transformation: source connection required between charts'
            raise ChartError(msg)
        source = gamma
    _same_chart(source.chart, phi.source, 'is_projective_transformation')
    _check_invertible(phi.jacobian(), sampler, 'is_projective_transformation')
    pulled = pullback_connection(gamma, phi)
    return is_projectively_equivalent(pulled, source, sampler)


def covariant_derivative(gamma: ConnectionField, upsilon: OneFormField) -> Components[Expr]:
    """`∇_aΥ_b = ∂_aΥ_b − Γ^c_ab Υ_c`."""
    _same_chart(gamma.chart, upsilon.chart, 'covariant_derivative')
    xs = gamma.chart.coords
    n = gamma.n
    return components(
        (n, n),
        lambda a, b: simplify(_sum((
            diff(upsilon.at(b), xs[a]),
            Neg(_sum(_prod(gamma.at(c, a, b), upsilon.at(c)) for c in range(n))),
        ))),
    )


def restrict_to_boundary(e: Expr, chart: Chart) -> Expr:
    """`e` at `x0 = 0`, simplified."""
    chart.require_boundary()
    return simplify(substitute(e, {chart.coords[0]: ZERO}))


def restrict_field(c: Components[Expr], chart: Chart) -> Components[Expr]:
    """Every component at `x0 = 0`."""
    return c.map(lambda e: restrict_to_boundary(e, chart))


def value_at(
    e: Expr, chart: Chart, point: Sequence[float], params: Mapping[str, float] | None = None
) -> float:
    """Numeric value of `e` at a point of `chart`, parameters fixed."""
    fixed = dict(params or {})
    names = chart.coords + tuple(fixed)
    return lambdify(simplify(e), names)([*point, *fixed.values()])


def require_on_boundary(chart: Chart, point: Sequence[float], tol: float = 1e-12) -> None | Never:
    chart.require_boundary()
    if len(point) != chart.n:
        msg = f'{chart.name!r}: point {tuple(point)} has {len(point)} coordinates, expected {chart.n}'
        raise BoundaryPointError(msg)
    if abs(point[0]) > tol:
        msg = f'{chart.name!r}: point {tuple(point)} is not on the boundary {chart.coords[0]} = 0'
        raise BoundaryPointError(msg)
    return None
