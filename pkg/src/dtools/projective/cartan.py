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

"""### Module dtools.projective.cartan - Cartan gauges of projective structures

Matrices of coordinate 1-forms of size `(n+1)×(n+1)`. Row and column `n`
are the translation slot: the last column of a normal gauge carries the
coordinate differentials, the bottom row the negated Schouten tensor.
Matrices stand for classes modulo the center, the canonical representative
is trace-free.

#### Gauges and curvature

- *class* `GaugeMatrix`: entries `ω^A_B`, each a 1-form
- *class* `CurvatureMatrix`: entries `Ω^A_B`, each a 2-form
- *function* `normal_gauge`, `affine_gauge`, `flat_model_gauge`
- *function* `gauge_curvature`: `Ω = dω + ω∧ω`
- *function* `check_torsion_free`, `check_normality_traces`
- *function* `gauge_transform`: `ω' = h⁻¹dh + h⁻¹ωh` modulo the center
- *function* `adjoint_curvature`: `h⁻¹Ωh`
- *function* `chart_gauge_transition`, `pullback_gauge`

#### Subalgebras

- *class* `AlgebraMask`: zero patterns of `h`, `g̃`, `h̃`, `k`

#### Boundary

- *function* `boundary_pullback`: restriction to `{x0 = 0}`, `g̃` membership
- *function* `mod_k_project`: induced gauge of dimension `n`
- *function* `induce_boundary_connection`, `schouten_compare`

#### Second order jet group

- *class* `Jet2Element`: `(u^i_j, u^i_jk)`, numeric
- *function* `jet2_compose`, `jet2_identity`, `jet2_inverse`
- *function* `h_embed`, `h_extract`, `is_h_element`

"""

from __future__ import annotations

__all__ = [
    'GaugeMatrix', 'CurvatureMatrix', 'AlgebraMask', 'NormalityReport',
    'BoundaryPullback', 'SchoutenComparison', 'Jet2Element',
    'MaskError', 'NonRigidityViolation', 'SingularJetError',
    'H', 'G_TILDE', 'H_TILDE', 'K', 'MASKS',
    'normal_gauge', 'affine_gauge', 'flat_model_gauge', 'gauge_curvature',
    'check_torsion_free', 'check_normality_traces', 'gauge_transform',
    'adjoint_curvature', 'chart_gauge_transition', 'pullback_gauge',
    'boundary_pullback', 'mod_k_project', 'induce_boundary_connection',
    'schouten_compare', 'jet2_compose', 'jet2_identity', 'jet2_inverse',
    'h_embed', 'h_extract', 'is_h_element',
]

import logging
from collections.abc import Callable, Iterator
from fractions import Fraction
from typing import Final

import numpy as np
from numpy.typing import NDArray

from .components import Components, components
from .curvature import schouten
from .geometry import (
    Chart, ConnectionField, MapField, Transition, delta,
    matrix_inverse, restrict_field, restrict_to_boundary, symmetric_field,
)
from .symexpr import Const, Expr, Neg, ONE, Product, Sum, ZERO, diff, simplify
from .zerotest import NonzeroWitness, Sampler, ZeroTest, all_zero, labelled

log = logging.getLogger(__name__)


class MaskError(ValueError):
    """A matrix does not fit the zero pattern of a subalgebra."""


class NonRigidityViolation(ValueError):
    """The boundary is not totally geodesic where it was required to be."""

    def __init__(self, msg: str, witness: NonzeroWitness | None = None) -> None:
        super().__init__(msg)
        self.witness = witness


class SingularJetError(ValueError):
    """The linear part of a jet is not invertible."""


def _add(*terms: Expr) -> Expr:
    return simplify(Sum(terms))


# -- Matrices of forms ---------------------------------------------------------


class GaugeMatrix:
    """Square matrix of 1-forms on a chart.

    `entries.at(A, B, k)` is the `dx^k` coefficient of `ω^A_B`.

    """

    __slots__ = ('chart', 'entries')
    __match_args__ = ('chart', 'entries')

    def __init__(self, chart: Chart, entries: Components[Expr]) -> None:
        size = entries.shape[0]
        if entries.shape != (size, size, chart.n):
            msg = f'GaugeMatrix: shape {entries.shape} on a {chart.n}-dimensional chart'
            raise ValueError(msg)
        self.chart = chart
        self.entries = entries

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def at(self, a: int, b: int, k: int) -> Expr:
        return self.entries.at(a, b, k)

    def form(self, a: int, b: int) -> tuple[Expr, ...]:
        return tuple(self.entries.at(a, b, k) for k in range(self.chart.n))

    def with_form(self, a: int, b: int, form: tuple[Expr, ...]) -> GaugeMatrix:
        """Copy with `ω^a_b` replaced."""
        entries = self.entries
        for k, e in enumerate(form):
            entries = entries.replace((a, b, k), e)
        return GaugeMatrix(self.chart, entries)

    def trace(self) -> tuple[Expr, ...]:
        return tuple(
            _add(*(self.at(a, a, k) for a in range(self.size))) for k in range(self.chart.n)
        )

    def __repr__(self) -> str:
        return f'GaugeMatrix({self.chart.name!r}, size={self.size})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GaugeMatrix):
            return False
        return self.chart == other.chart and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.chart, self.entries))


class CurvatureMatrix:
    """Square matrix of 2-forms, `entries.at(A, B, k, l) = Ω^A_B(∂_k, ∂_l)`."""

    __slots__ = ('chart', 'entries')
    __match_args__ = ('chart', 'entries')

    def __init__(self, chart: Chart, entries: Components[Expr]) -> None:
        self.chart = chart
        self.entries = entries

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def at(self, a: int, b: int, k: int, l: int) -> Expr:
        return self.entries.at(a, b, k, l)

    def __repr__(self) -> str:
        return f'CurvatureMatrix({self.chart.name!r}, size={self.size})'


def _trace_free(chart: Chart, raw: Callable[[int, int, int], Expr], size: int) -> GaugeMatrix:
    entries = components((size, size, chart.n), lambda a, b, k: simplify(raw(a, b, k)))
    scale = Const(Fraction(-1, size))
    traces = [_add(*(entries.at(a, a, k) for a in range(size))) for k in range(chart.n)]
    if all(t == ZERO for t in traces):
        return GaugeMatrix(chart, entries)
    return GaugeMatrix(
        chart,
        components(
            (size, size, chart.n),
            lambda a, b, k: _add(entries.at(a, b, k), Product((delta(a, b), scale, traces[k]))),
        ),
    )


def normal_gauge(gamma: ConnectionField) -> GaugeMatrix:
    """Normal gauge of the projective class of `gamma` in its chart.

    - gl block `Γ^i_jk dx^k − τ δ^i_j` with `τ = Γ^l_lk dx^k/(n+1)`
    - last column `dx^i`, bottom row `−P_kj dx^k`, corner `−τ`

    """
    n = gamma.n
    p = schouten(gamma).p
    scale = Const(Fraction(1, n + 1))
    tau = [simplify(Product((scale, Sum(tuple(gamma.at(l, l, k) for l in range(n)))))) for k in range(n)]

    def entry(a: int, b: int, k: int) -> Expr:
        if a < n and b < n:
            return _add(gamma.at(a, b, k), Neg(Product((delta(a, b), tau[k]))))
        if a < n:
            return delta(a, k)
        if b < n:
            return simplify(Neg(p.at(k, b)))
        return simplify(Neg(tau[k]))

    return GaugeMatrix(gamma.chart, components((n + 1, n + 1, n), entry))


def affine_gauge(gamma: ConnectionField) -> GaugeMatrix:
    """Gauge of `gamma` as an affine connection: gl block `Γ^i_jk dx^k`, last column `dx^i`."""
    n = gamma.n

    def entry(a: int, b: int, k: int) -> Expr:
        if a < n and b < n:
            return gamma.at(a, b, k)
        if a < n:
            return delta(a, k)
        return ZERO

    return GaugeMatrix(gamma.chart, components((n + 1, n + 1, n), entry))


def flat_model_gauge(chart: Chart) -> GaugeMatrix:
    """Maurer-Cartan form of the flat model, only the last column is nonzero."""
    n = chart.n
    return GaugeMatrix(
        chart,
        components((n + 1, n + 1, n), lambda a, b, k: delta(a, k) if b == n and a < n else ZERO),
    )


def gauge_curvature(omega: GaugeMatrix) -> CurvatureMatrix:
    """`Ω(∂_k, ∂_l) = ∂_kω_l − ∂_lω_k + ω_kω_l − ω_lω_k`."""
    size = omega.size
    xs = omega.chart.coords
    n = omega.chart.n
    half: dict[tuple[int, int, int, int], Expr] = {}
    for a in range(size):
        for b in range(size):
            for k in range(n):
                for l in range(k + 1, n):
                    terms: list[Expr] = [
                        diff(omega.at(a, b, l), xs[k]),
                        Neg(diff(omega.at(a, b, k), xs[l])),
                    ]
                    for c in range(size):
                        left_k, left_l = omega.at(a, c, k), omega.at(a, c, l)
                        if left_k != ZERO and omega.at(c, b, l) != ZERO:
                            terms.append(Product((left_k, omega.at(c, b, l))))
                        if left_l != ZERO and omega.at(c, b, k) != ZERO:
                            terms.append(Neg(Product((left_l, omega.at(c, b, k)))))
                    half[a, b, k, l] = simplify(Sum(tuple(terms)))

    def entry(a: int, b: int, k: int, l: int) -> Expr:
        if k == l:
            return ZERO
        if k < l:
            return half[a, b, k, l]
        return simplify(Neg(half[a, b, l, k]))

    return CurvatureMatrix(omega.chart, components((size, size, n, n), entry))


def check_torsion_free(omega_curv: CurvatureMatrix, sampler: Sampler) -> ZeroTest:
    """Zero test of the last column of `Ω` above the corner."""
    top = omega_curv.size - 1
    entries = (
        ((i, top, k, l), omega_curv.at(i, top, k, l))
        for i in range(top)
        for k in range(omega_curv.chart.n)
        for l in range(k + 1, omega_curv.chart.n)
    )
    return all_zero(labelled('torsion', entries), sampler)


class NormalityReport:
    """Torsion test and the trace tests `Σ_i Ω^i_j(∂_i, ∂_k)` keyed by `(j, k)`."""

    __slots__ = ('torsion', 'traces')
    __match_args__ = ('torsion', 'traces')

    def __init__(self, torsion: ZeroTest, traces: dict[tuple[int, int], ZeroTest]) -> None:
        self.torsion = torsion
        self.traces = traces

    @property
    def passed(self) -> bool:
        return self.torsion.holds and all(t.holds for t in self.traces.values())

    def failing(self) -> list[str]:
        names = [] if self.torsion.holds else ['torsion']
        return names + [f'trace[{j},{k}]' for (j, k), t in self.traces.items() if not t.holds]

    def __repr__(self) -> str:
        return f'NormalityReport(passed={self.passed}, failing={self.failing()})'


def check_normality_traces(omega_curv: CurvatureMatrix, sampler: Sampler) -> NormalityReport:
    n = omega_curv.chart.n
    traces = {
        (j, k): all_zero(
            [(f'trace[{j},{k}]', _add(*(omega_curv.at(i, j, i, k) for i in range(n))))], sampler
        )
        for j in range(n)
        for k in range(n)
    }
    return NormalityReport(check_torsion_free(omega_curv, sampler), traces)


# -- Gauge changes -------------------------------------------------------------


class AlgebraMask:
    """Zero pattern of a subalgebra of `sl(n+1)` modulo the center.

    - `zeros(size)`: entries forced to vanish
    - `scalar_block`: the lower right `n×n` block must be a multiple of
      the identity

    """

    __slots__ = ('name', '_zeros', 'scalar_block')

    def __init__(
        self,
        name: str,
        zeros: Callable[[int], Iterator[tuple[int, int]]],
        scalar_block: bool = False,
    ) -> None:
        self.name = name
        self._zeros = zeros
        self.scalar_block = scalar_block

    def __repr__(self) -> str:
        return f'AlgebraMask({self.name!r})'

    def zeros(self, size: int) -> list[tuple[int, int]]:
        return sorted(set(self._zeros(size)))

    def conditions[T](self, entry: Callable[[int, int], T], size: int) -> list[tuple[str, T, T | None]]:
        """Pairs that must agree, `(label, left, right)`, `None` meaning zero."""
        out: list[tuple[str, T, T | None]] = [
            (f'{self.name}[{a},{b}]', entry(a, b), None) for a, b in self.zeros(size)
        ]
        if self.scalar_block:
            for a in range(1, size):
                for b in range(1, size):
                    if a != b:
                        out.append((f'{self.name}[{a},{b}]', entry(a, b), None))
                    elif a > 1:
                        out.append((f'{self.name}[{a},{a}]', entry(a, a), entry(1, 1)))
        return out

    def contains_numeric(self, m: NDArray[np.float64], tol: float = 1e-12) -> bool:
        size = m.shape[0]
        return all(
            abs(left - (0.0 if right is None else right)) <= tol
            for _, left, right in self.conditions(lambda a, b: float(m[a, b]), size)
        )

    def contains_matrix(self, m: Components[Expr], sampler: Sampler) -> ZeroTest:
        size = m.shape[0]
        return all_zero(
            (
                (label, left if right is None else Sum((left, Neg(right))))
                for label, left, right in self.conditions(m.at, size)
            ),
            sampler,
        )

    def contains_gauge(self, omega: GaugeMatrix, sampler: Sampler) -> ZeroTest:
        """Every `dx^k` component of `ω` lies in the subalgebra."""
        return ZeroTest.sequence(
            self.contains_matrix(
                components((omega.size, omega.size), lambda a, b, k=k: omega.at(a, b, k)),
                sampler,
            )
            for k in range(omega.chart.n)
        )


def _h_zeros(size: int) -> Iterator[tuple[int, int]]:
    top = size - 1
    return ((i, top) for i in range(top))


def _g_tilde_zeros(size: int) -> Iterator[tuple[int, int]]:
    return ((0, b) for b in range(1, size))


def _h_tilde_zeros(size: int) -> Iterator[tuple[int, int]]:
    yield from _g_tilde_zeros(size)
    yield from _h_zeros(size)


H: Final[AlgebraMask] = AlgebraMask('h', _h_zeros)
G_TILDE: Final[AlgebraMask] = AlgebraMask('g~', _g_tilde_zeros)
H_TILDE: Final[AlgebraMask] = AlgebraMask('h~', _h_tilde_zeros)
K: Final[AlgebraMask] = AlgebraMask('k', _g_tilde_zeros, scalar_block=True)
MASKS: Final[dict[str, AlgebraMask]] = {m.name: m for m in (H, G_TILDE, H_TILDE, K)}


def _require_h(h: Components[Expr]) -> None:
    for a, b in H.zeros(h.shape[0]):
        if simplify(h.at(a, b)) != ZERO:
            msg = f'gauge_transform: h[{a},{b}] = {h.at(a, b)} is outside the h pattern'
            raise MaskError(msg)


def gauge_transform(omega: GaugeMatrix, h: Components[Expr]) -> GaugeMatrix:
    """`ω' = h⁻¹dh + h⁻¹ωh`, made trace-free.

    `h` is a matrix of expressions in the chart coordinates fitting the
    zero pattern of `H`.

    """
    size = omega.size
    if h.shape != (size, size):
        msg = f'gauge_transform: h of shape {h.shape} for a gauge of size {size}'
        raise ValueError(msg)
    _require_h(h)
    hinv = matrix_inverse(h)
    xs = omega.chart.coords
    dh = components((size, size, len(xs)), lambda a, b, k: diff(h.at(a, b), xs[k]))

    def raw(a: int, b: int, k: int) -> Expr:
        terms: list[Expr] = []
        for c in range(size):
            if hinv.at(a, c) == ZERO:
                continue
            terms.append(Product((hinv.at(a, c), dh.at(c, b, k))))
            for d in range(size):
                if omega.at(c, d, k) != ZERO and h.at(d, b) != ZERO:
                    terms.append(Product((hinv.at(a, c), omega.at(c, d, k), h.at(d, b))))
        return Sum(tuple(terms))

    return _trace_free(omega.chart, raw, size)


def adjoint_curvature(h: Components[Expr], omega_curv: CurvatureMatrix) -> CurvatureMatrix:
    """`h⁻¹Ωh`, the curvature of a transformed gauge."""
    size = omega_curv.size
    hinv = matrix_inverse(h)
    n = omega_curv.chart.n

    def entry(a: int, b: int, k: int, l: int) -> Expr:
        return _add(*(
            Product((hinv.at(a, c), omega_curv.at(c, d, k, l), h.at(d, b)))
            for c in range(size)
            for d in range(size)
            if hinv.at(a, c) != ZERO and h.at(d, b) != ZERO
        ))

    return CurvatureMatrix(omega_curv.chart, components((size, size, n, n), entry))


def chart_gauge_transition(t: Transition) -> Components[Expr]:
    """`h = [[∂x/∂x̄, 0], [0, 1]]` in target coordinates of `t`."""
    jac = t.as_map().jacobian()
    n = t.source.n

    def entry(a: int, b: int) -> Expr:
        if a < n and b < n:
            return jac.at(a, b)
        return ONE if a == b else ZERO

    return components((n + 1, n + 1), entry)


def pullback_gauge(omega: GaugeMatrix, along: Transition | MapField) -> GaugeMatrix:
    """Pull the 1-forms of `ω` back to the new chart.

    A transition pulls back along `x(x̄)`, a map along `φ`.

    """
    phi = along.as_map() if isinstance(along, Transition) else along
    if omega.chart != phi.target:
        msg = f'pullback_gauge: gauge on {omega.chart.name!r}, map into {phi.target.name!r}'
        raise ValueError(msg)
    jac = phi.jacobian()
    composed = omega.entries.map(phi.compose_into)
    n = phi.n
    return GaugeMatrix(
        phi.source,
        components(
            (omega.size, omega.size, n),
            lambda a, b, j: _add(*(
                Product((composed.at(a, b, k), jac.at(k, j)))
                for k in range(n)
                if composed.at(a, b, k) != ZERO
            )),
        ),
    )


# -- Boundary ------------------------------------------------------------------


class BoundaryPullback:
    """Gauge restricted to the boundary face and its `g̃` membership test."""

    __slots__ = ('gauge', 'membership')
    __match_args__ = ('gauge', 'membership')

    def __init__(self, gauge: GaugeMatrix, membership: ZeroTest) -> None:
        self.gauge = gauge
        self.membership = membership

    def __repr__(self) -> str:
        return f'BoundaryPullback({self.gauge!r}, {self.membership!r})'


def boundary_pullback(omega: GaugeMatrix, sampler: Sampler) -> BoundaryPullback:
    """Substitute `x0 = 0` and drop the `dx0` components.

    The sampler ranges over the boundary face chart.

    """
    chart = omega.chart
    face = chart.boundary_face()
    n = chart.n
    entries = restrict_field(
        components((omega.size, omega.size, n - 1), lambda a, b, k: omega.at(a, b, k + 1)), chart
    )
    gauge = GaugeMatrix(face, entries)
    membership = G_TILDE.contains_gauge(gauge, sampler)
    log.debug('boundary_pullback: %s membership %r', chart.name, membership)
    return BoundaryPullback(gauge, membership)


def mod_k_project(pulled: BoundaryPullback) -> GaugeMatrix:
    """Lower right block of a `g̃` valued boundary gauge, trace removed."""
    if not pulled.membership.holds:
        msg = f'mod_k_project: boundary gauge is not g~ valued, {pulled.membership!r}'
        raise MaskError(msg)
    gauge = pulled.gauge
    size = gauge.size - 1
    return _trace_free(gauge.chart, lambda a, b, k: gauge.at(a + 1, b + 1, k), size)


def _obstruction_test(gamma: ConnectionField, sampler: Sampler) -> ZeroTest:
    chart = gamma.chart
    n = gamma.n
    entries = (
        ((0, mu, nu), restrict_to_boundary(gamma.at(0, mu, nu), chart))
        for mu in range(1, n)
        for nu in range(mu, n)
    )
    return all_zero(labelled('Gamma', entries), sampler)


def induce_boundary_connection(gamma: ConnectionField, sampler: Sampler) -> ConnectionField:
    """`Γ̃^μ_ντ(y) = Γ^μ_ντ(0, y)` on the boundary face.

    Raises `NonRigidityViolation` unless `Γ^0_μν` is shown to vanish on the
    boundary. The exception carries the witness when one was found and
    `None` when no sample could be evaluated.

    """
    chart = gamma.chart
    test = _obstruction_test(gamma, sampler)
    if isinstance(test, NonzeroWitness):
        msg = f'induce_boundary_connection: boundary of {chart.name!r} is not totally geodesic'
        raise NonRigidityViolation(msg, test)
    if not test.holds:
        msg = f'induce_boundary_connection: boundary of {chart.name!r} undecided, {test!r}'
        raise NonRigidityViolation(msg)
    face = chart.boundary_face()
    return ConnectionField(
        face,
        restrict_field(symmetric_field(face.n, lambda i, j, k: gamma.at(i + 1, j + 1, k + 1)), chart),
    )


class SchoutenComparison:
    """Schouten tensors on the boundary from ambient and induced curvature.

    - `restricted`: from the ambient curvature, restricted to `x0 = 0`
    - `induced`: from the curvature of the induced connection, `None` for `n = 2`
    - `difference`: `restricted − induced`, `None` for `n = 2`

    """

    __slots__ = ('restricted', 'induced', 'difference')
    __match_args__ = ('restricted', 'induced', 'difference')

    def __init__(
        self,
        restricted: Components[Expr],
        induced: Components[Expr] | None,
        difference: Components[Expr] | None,
    ) -> None:
        self.restricted = restricted
        self.induced = induced
        self.difference = difference

    def __repr__(self) -> str:
        return f'SchoutenComparison({list(self.restricted)!r}, {self.induced!r})'


def _trace_schouten(
    omega_curv: CurvatureMatrix, indices: range, scale: Fraction, trace_weight: Fraction
) -> Components[Expr]:
    """`scale·(Σ_i Ω^i_ν(e_σ, e_i) − w·(Σ_i Ω^i_i)(e_σ, e_ν))` over boundary indices."""
    m = len(indices)

    def entry(s: int, v: int) -> Expr:
        sigma, nu = indices[s], indices[v]
        contracted = Sum(tuple(omega_curv.at(i, nu, sigma, i) for i in range(omega_curv.chart.n)))
        traced = Sum(tuple(omega_curv.at(i, i, sigma, nu) for i in range(omega_curv.chart.n)))
        return simplify(Product((Const(scale), Sum((contracted, Product((Const(-trace_weight), traced)))))))

    return components((m, m), entry)


def schouten_compare(gamma: ConnectionField, sampler: Sampler) -> SchoutenComparison:
    """Compare ambient and induced Schouten tensors along the boundary.

    Both come from curvature traces of affine gauges. The induced one needs
    `n >= 3` and a totally geodesic boundary.

    """
    chart = gamma.chart
    chart.require_boundary()
    n = gamma.n
    ambient = gauge_curvature(affine_gauge(gamma))
    restricted = restrict_field(
        _trace_schouten(ambient, range(1, n), Fraction(-1, n - 1), Fraction(1, n + 1)), chart
    )
    if n < 3:
        log.info('schouten_compare: induced Schouten tensor needs n >= 3, got %d', n)
        return SchoutenComparison(restricted, None, None)
    induced_conn = induce_boundary_connection(gamma, sampler)
    boundary = gauge_curvature(affine_gauge(induced_conn))
    induced = _trace_schouten(boundary, range(n - 1), Fraction(-1, n - 2), Fraction(1, n))
    difference = restricted.zip_with(induced, lambda a, b: _add(a, Neg(b)))
    return SchoutenComparison(restricted, induced, difference)


# -- Jet group -----------------------------------------------------------------


class Jet2Element:
    """Element `(u^i_j, u^i_jk)` of the second order jet group."""

    __slots__ = ('u', 'uu')
    __match_args__ = ('u', 'uu')

    def __init__(self, u: NDArray[np.float64], uu: NDArray[np.float64]) -> None:
        u = np.asarray(u, dtype=float)
        uu = np.asarray(uu, dtype=float)
        n = u.shape[0]
        if u.shape != (n, n) or uu.shape != (n, n, n):
            msg = f'Jet2Element: shapes {u.shape} and {uu.shape} do not fit'
            raise ValueError(msg)
        if not np.allclose(uu, uu.transpose(0, 2, 1), rtol=0.0, atol=1e-12):
            msg = 'Jet2Element: quadratic part not symmetric in its lower indices'
            raise ValueError(msg)
        if abs(np.linalg.det(u)) < 1e-14:
            msg = 'Jet2Element: singular linear part'
            raise SingularJetError(msg)
        self.u = u
        self.uu = uu

    @property
    def n(self) -> int:
        return self.u.shape[0]

    def distance(self, other: Jet2Element) -> float:
        return float(max(np.max(np.abs(self.u - other.u)), np.max(np.abs(self.uu - other.uu))))

    def __repr__(self) -> str:
        return f'Jet2Element(u={self.u.tolist()!r}, uu={self.uu.tolist()!r})'


def jet2_identity(n: int) -> Jet2Element:
    return Jet2Element(np.eye(n), np.zeros((n, n, n)))


def jet2_compose(a: Jet2Element, b: Jet2Element) -> Jet2Element:
    """`(u s, u^i_pq s^p_j s^q_k + u^i_p s^p_jk)`."""
    u = a.u @ b.u
    uu = np.einsum('ipq,pj,qk->ijk', a.uu, b.u, b.u) + np.einsum('ip,pjk->ijk', a.u, b.uu)
    return Jet2Element(u, uu)


def jet2_inverse(a: Jet2Element) -> Jet2Element:
    v = np.linalg.inv(a.u)
    vv = -np.einsum('ip,pqr,qj,rk->ijk', v, a.uu, v, v)
    return Jet2Element(v, vv)


def h_embed(a: NDArray[np.float64], upsilon: NDArray[np.float64]) -> Jet2Element:
    """`(A^i_j, −(A^i_j Υ_k + A^i_k Υ_j))`."""
    a = np.asarray(a, dtype=float)
    upsilon = np.asarray(upsilon, dtype=float)
    if abs(np.linalg.det(a)) < 1e-14:
        msg = 'h_embed: singular linear part'
        raise SingularJetError(msg)
    quad = np.einsum('ij,k->ijk', a, upsilon)
    return Jet2Element(a, -(quad + quad.transpose(0, 2, 1)))


def h_extract(el: Jet2Element) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Recover `(A, Υ)` from `−(n+1)Υ_k = Σ_i (A⁻¹ u^·_··)^i_ik`."""
    q = np.einsum('ip,pjk->ijk', np.linalg.inv(el.u), el.uu)
    upsilon = -np.einsum('iik->k', q) / (el.n + 1)
    return el.u.copy(), upsilon


def is_h_element(el: Jet2Element, tol: float = 1e-10) -> bool:
    a, upsilon = h_extract(el)
    return h_embed(a, upsilon).distance(el) <= tol
