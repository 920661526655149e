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

"""### Module dtools.projective.rigidity - boundary rigidity

An automorphism of a projective structure fixing the boundary pointwise is
determined by its 2-jet there. Writing it in a boundary chart as

    φ⁰ = r + a r² + ...,    φ^μ = y^μ + b^μ r + c^μ r² + ...

the unknowns `(a, b^μ, ∂_νb^μ)` solve a linear system at each boundary point,
and `c^μ` follows by back substitution. When some `Γ^0_μν` is nonzero at a
boundary point the only solution is zero and the boundary is rigid.

#### Obstruction

- *enum* `Verdict`: `RIGID`, `NONRIGID_CANDIDATE`, `MIXED`, `UNDETERMINED`
- *function* `boundary_obstruction`: `Γ^0_μν` at a boundary point and its verdict
- *function* `rigidity_scan`: sampled verdicts with projective shift and
  chart change cross-checks

#### 2-jets

- *function* `jet_system_assemble`, `solve_boundary_jets`
- *function* `boundary_taylor`: `(a, b, c)` of a map fixing the boundary

"""

from __future__ import annotations

__all__ = [
    'Verdict', 'Obstruction', 'PointVerdict', 'RigidityReport',
    'JetSystem', 'JetVector', 'JetSolution', 'TaylorJet',
    'PreconditionError', 'NormalizationError',
    'boundary_obstruction', 'rigidity_scan', 'random_shift', 'synthetic_transition',
    'jet_system_assemble', 'solve_boundary_jets', 'boundary_taylor',
]

import logging
from collections.abc import Mapping, Sequence
from enum import Enum
from fractions import Fraction

import numpy as np
from numpy.typing import NDArray

from .components import Components
from .geometry import (
    Chart, ConnectionField, MapField, OneFormField, Scene, Transition,
    christoffel_transform, projective_shift, require_on_boundary,
    restrict_to_boundary, value_at,
)
from .symexpr import (
    Call, Const, EvalDomainError, Expr, Neg, Product, Sum, Var, diff, simplify,
)
from .zerotest import DEFAULT_TOL, NonzeroWitness, Sampler, is_zero

log = logging.getLogger(__name__)


class PreconditionError(ValueError):
    """A map does not restrict to the identity on the boundary."""

    def __init__(self, msg: str, witness: NonzeroWitness) -> None:
        super().__init__(msg)
        self.witness = witness


class NormalizationError(ValueError):
    """`∂φ⁰/∂r` is not `1` at the boundary point, `factor` rescales `r`."""

    def __init__(self, msg: str, factor: float) -> None:
        super().__init__(msg)
        self.factor = factor


class Verdict(Enum):
    RIGID = 'RIGID'
    NONRIGID_CANDIDATE = 'NONRIGID_CANDIDATE'
    MIXED = 'MIXED'
    UNDETERMINED = 'UNDETERMINED'


# -- Obstruction ---------------------------------------------------------------


class Obstruction:
    """`Γ^0_μν` at a boundary point, `μ, ν` ranging over `1..n-1`."""

    __slots__ = ('point', 'matrix', 'verdict')
    __match_args__ = ('point', 'matrix', 'verdict')

    def __init__(self, point: tuple[float, ...], matrix: NDArray[np.float64], verdict: Verdict) -> None:
        self.point = point
        self.matrix = matrix
        self.verdict = verdict

    @property
    def max_abs(self) -> float:
        if self.matrix.size == 0 or not np.all(np.isfinite(self.matrix)):
            return float('nan')
        return float(np.max(np.abs(self.matrix)))

    def __repr__(self) -> str:
        return f'Obstruction({self.point}, {self.matrix.tolist()}, {self.verdict.value})'


def boundary_obstruction(
    gamma: ConnectionField,
    point: Sequence[float],
    params: Mapping[str, float] | None = None,
    tol: float = DEFAULT_TOL,
) -> Obstruction:
    """Evaluate `Γ^0_μν` at a boundary point.

    - `RIGID` when some entry exceeds `tol` in magnitude
    - `NONRIGID_CANDIDATE` when all entries are within `tol`
    - `UNDETERMINED` when an entry cannot be evaluated there

    """
    chart = gamma.chart
    require_on_boundary(chart, point)
    m = gamma.n - 1
    matrix = np.full((m, m), np.nan)
    verdict = Verdict.NONRIGID_CANDIDATE
    try:
        for mu in range(m):
            for nu in range(mu, m):
                e = restrict_to_boundary(gamma.at(0, mu + 1, nu + 1), chart)
                matrix[mu, nu] = matrix[nu, mu] = value_at(e, chart, point, params)
    except EvalDomainError as exc:
        log.debug('boundary_obstruction: %s at %s', exc, tuple(point))
        verdict = Verdict.UNDETERMINED
    else:
        if np.max(np.abs(matrix)) > tol:
            verdict = Verdict.RIGID
    return Obstruction(tuple(float(x) for x in point), matrix, verdict)


class PointVerdict:
    """Verdict at one boundary point with its cross-checks.

    `cross_checks` maps a check name to the verdict obtained after a
    projective shift or a change of chart; `agree` is `False` when one of
    them contradicts the base verdict.

    """

    __slots__ = ('chart', 'obstruction', 'cross_checks')
    __match_args__ = ('chart', 'obstruction', 'cross_checks')

    def __init__(self, chart: str, obstruction: Obstruction, cross_checks: dict[str, Verdict]) -> None:
        self.chart = chart
        self.obstruction = obstruction
        self.cross_checks = cross_checks

    @property
    def verdict(self) -> Verdict:
        return self.obstruction.verdict

    @property
    def agree(self) -> bool:
        comparable = [v for v in self.cross_checks.values() if v is not Verdict.UNDETERMINED]
        if self.verdict is Verdict.UNDETERMINED:
            return True
        return all(v is self.verdict for v in comparable)

    def __repr__(self) -> str:
        return f'PointVerdict({self.chart!r}, {self.obstruction!r}, agree={self.agree})'


class RigidityReport:
    """Sampled verdicts keyed by `(chart name, point)`."""

    __slots__ = ('points',)
    __match_args__ = ('points',)

    def __init__(self, points: dict[tuple[str, tuple[float, ...]], PointVerdict]) -> None:
        self.points = points

    @property
    def verdict(self) -> Verdict:
        verdicts = {p.verdict for p in self.points.values()}
        if not verdicts or Verdict.UNDETERMINED in verdicts:
            return Verdict.UNDETERMINED
        if verdicts == {Verdict.RIGID}:
            return Verdict.RIGID
        if verdicts == {Verdict.NONRIGID_CANDIDATE}:
            return Verdict.NONRIGID_CANDIDATE
        return Verdict.MIXED

    @property
    def theorem_applies(self) -> bool:
        """One rigid boundary point suffices."""
        return any(p.verdict is Verdict.RIGID for p in self.points.values())

    @property
    def agreement(self) -> bool:
        return all(p.agree for p in self.points.values())

    def disagreements(self) -> list[PointVerdict]:
        return [p for p in self.points.values() if not p.agree]

    def witnesses(self) -> list[PointVerdict]:
        return [p for p in self.points.values() if p.verdict is Verdict.RIGID]

    def __repr__(self) -> str:
        return f'RigidityReport({self.verdict.value}, points={len(self.points)}, agreement={self.agreement})'


def _quarter(rng: np.random.Generator) -> Const:
    return Const(Fraction(int(rng.integers(-4, 5)), 4))


def random_shift(chart: Chart, seed: int = 0) -> OneFormField:
    """1-form with seeded affine coefficients in the chart coordinates."""
    rng = np.random.default_rng(seed)
    comps = []
    for _ in range(chart.n):
        terms: list[Expr] = [_quarter(rng)]
        terms.extend(Product((_quarter(rng), Var(c))) for c in chart.coords)
        comps.append(simplify(Sum(tuple(terms))))
    return OneFormField(chart, Components(comps, (chart.n,)))


def synthetic_transition(chart: Chart, seed: int = 0) -> Transition:
    """Boundary compatible chart change fixing the boundary pointwise.

    Given by its inverse `x⁰ = x̄⁰ exp(−c x̄¹)`, `x^μ = x̄^μ + d^μ x̄⁰ + e^μ (x̄⁰)²`
    with seeded coefficients.

    """
    chart.require_boundary()
    rng = np.random.default_rng(seed)
    coords = tuple(c + '_' for c in chart.coords)
    target = Chart(chart.name + '~', coords, dict(zip(coords, chart.box.values())), boundary=True)
    r, y1 = Var(coords[0]), Var(coords[1])
    first = Product((r, Call('exp', Product((Neg(_quarter(rng)), y1)))))
    rest = [
        Sum((Var(c), Product((_quarter(rng), r)), Product((_quarter(rng), r, r))))
        for c in coords[1:]
    ]
    return Transition(chart, target, Components([simplify(e) for e in (first, *rest)], (chart.n,)))


def rigidity_scan(
    scene: Scene,
    sampler_count: int = 32,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> RigidityReport:
    """Boundary obstruction at sampled points of every boundary chart.

    Each point is re-tested after a seeded projective shift, in a seeded
    boundary compatible chart, and in every declared target chart reachable
    by a transition with forward components.

    """
    charts = [c for c in scene.boundary_charts() if c.name in scene.connections]
    if not charts:
        msg = 'rigidity_scan: scene has no boundary chart carrying a connection'
        raise ValueError(msg)
    if sampler_count < 1:
        msg = 'rigidity_scan: empty sampler'
        raise ValueError(msg)
    params = scene.params
    points: dict[tuple[str, tuple[float, ...]], PointVerdict] = {}
    for chart in charts:
        gamma = scene.connection(chart.name)
        shifted = projective_shift(gamma, random_shift(chart, seed))
        synthetic = synthetic_transition(chart, seed)
        moved = christoffel_transform(gamma, synthetic)
        declared = [
            (t, christoffel_transform(gamma, t))
            for t in scene.transitions_from(chart.name)
            if t.forward is not None and t.target.boundary
        ]
        sampler = chart.boundary_sampler(params, sampler_count, seed, tol)
        for sample in sampler.points():
            point = tuple(sample[c] for c in chart.coords)
            base = boundary_obstruction(gamma, point, params, tol)
            checks = {
                'projective_shift': boundary_obstruction(shifted, point, params, tol).verdict,
                'chart_change': boundary_obstruction(moved, point, params, tol).verdict,
            }
            for t, transformed in declared:
                try:
                    image = t.map_point(point, params)
                    image = (0.0, *image[1:]) if abs(image[0]) < 1e-12 else image
                    checks[f'transition:{t.target.name}'] = boundary_obstruction(
                        transformed, image, params, tol
                    ).verdict
                except (EvalDomainError, ValueError) as exc:
                    log.debug('rigidity_scan: transition %r at %s: %s', t, point, exc)
                    checks[f'transition:{t.target.name}'] = Verdict.UNDETERMINED
            verdict = PointVerdict(chart.name, base, checks)
            if not verdict.agree:
                log.warning('rigidity_scan: cross-checks disagree at %s in %s: %r', point, chart.name, checks)
            points[chart.name, point] = verdict
    report = RigidityReport(points)
    log.info('rigidity_scan: %r', report)
    return report


# -- 2-jet system --------------------------------------------------------------


class JetVector:
    """One 2-jet `(a, b, ∂b, c)` with `Υ₀ = a + Γ^0_0μ b^μ`; `Υ_μ` vanishes."""

    __slots__ = ('a', 'b', 'db', 'c', 'upsilon0')
    __match_args__ = ('a', 'b', 'db', 'c', 'upsilon0')

    def __init__(
        self,
        a: float,
        b: NDArray[np.float64],
        db: NDArray[np.float64],
        c: NDArray[np.float64],
        upsilon0: float,
    ) -> None:
        self.a = a
        self.b = b
        self.db = db
        self.c = c
        self.upsilon0 = upsilon0

    def unknowns(self) -> NDArray[np.float64]:
        return np.concatenate(([self.a], self.b, self.db.ravel()))

    def __repr__(self) -> str:
        return (
            f'JetVector(a={self.a!r}, b={self.b.tolist()!r}, db={self.db.tolist()!r}, '
            f'c={self.c.tolist()!r})'
        )


class JetSystem:
    """Linear system in `(a, b^μ, ∂_νb^μ)` at one boundary point.

    Rows, with `μ, ν, σ, τ` boundary indices:

    - `b^μ Γ^0_ντ = 0`
    - `∂_νb^μ − b^μ Γ^0_ν0 + Γ^μ_ντ b^τ − δ^μ_ν (a + Γ^0_0σ b^σ) = 0`
    - `∂_σb^μ Γ^0_ντ + b^μ ∂_σΓ^0_ντ = 0`, the first rows differentiated
      along the boundary, without which `b = 0` does not force `a = 0`

    """

    __slots__ = ('gamma', 'point', 'matrix', 'rows', 'values')

    def __init__(
        self,
        gamma: ConnectionField,
        point: tuple[float, ...],
        matrix: NDArray[np.float64],
        rows: list[str],
        values: NDArray[np.float64],
    ) -> None:
        self.gamma = gamma
        self.point = point
        self.matrix = matrix
        self.rows = rows
        self.values = values

    @property
    def m(self) -> int:
        return self.gamma.n - 1

    def unknowns(self) -> list[str]:
        m = self.m
        return ['a'] + [f'b{mu + 1}' for mu in range(m)] + [
            f'db{mu + 1}_{nu + 1}' for mu in range(m) for nu in range(m)
        ]

    def residual(self, vector: NDArray[np.float64]) -> float:
        if self.matrix.shape[0] == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix @ vector)))

    def complete(self, vector: NDArray[np.float64]) -> JetVector:
        """Back substitute `c` and `Υ₀` for a solution of the linear rows."""
        m = self.m
        g = self.values
        a = float(vector[0])
        b = np.asarray(vector[1:1 + m], dtype=float)
        db = np.asarray(vector[1 + m:], dtype=float).reshape(m, m)
        g0_0b = g[0, 0, 1:] @ b
        quad = np.einsum('mst,s,t->m', g[1:, 1:, 1:], b, b)
        lin = g[1:, 0, 1:] @ b
        c = (2 * b * a + b * g[0, 0, 0] + 2 * b * g0_0b - 2 * lin - quad) / 2
        return JetVector(a, b, db, c, a + float(g0_0b))


def _gamma_values(
    gamma: ConnectionField, point: Sequence[float], params: Mapping[str, float] | None
) -> NDArray[np.float64]:
    n = gamma.n
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                out[i, j, k] = out[i, k, j] = value_at(gamma.at(i, j, k), gamma.chart, point, params)
    return out


def jet_system_assemble(
    gamma: ConnectionField,
    point: Sequence[float],
    params: Mapping[str, float] | None = None,
) -> JetSystem:
    chart = gamma.chart
    require_on_boundary(chart, point)
    point = tuple(float(x) for x in point)
    g = _gamma_values(gamma, point, params)
    m = gamma.n - 1
    size = 1 + m + m * m

    def b_col(mu: int) -> int:
        return 1 + mu

    def db_col(mu: int, nu: int) -> int:
        return 1 + m + mu * m + nu

    rows: list[NDArray[np.float64]] = []
    labels: list[str] = []
    for mu in range(m):
        for nu in range(m):
            for tau in range(nu, m):
                row = np.zeros(size)
                row[b_col(mu)] = g[0, nu + 1, tau + 1]
                rows.append(row)
                labels.append(f'tangency[{mu + 1};{nu + 1},{tau + 1}]')
    for mu in range(m):
        for nu in range(m):
            row = np.zeros(size)
            row[db_col(mu, nu)] += 1.0
            row[b_col(mu)] -= g[0, nu + 1, 0]
            for tau in range(m):
                row[b_col(tau)] += g[mu + 1, nu + 1, tau + 1]
            if mu == nu:
                row[0] -= 1.0
                for sigma in range(m):
                    row[b_col(sigma)] -= g[0, 0, sigma + 1]
            rows.append(row)
            labels.append(f'first_order[{mu + 1},{nu + 1}]')
    for nu in range(m):
        for tau in range(nu, m):
            obstruction = gamma.at(0, nu + 1, tau + 1)
            for sigma in range(m):
                d_obstruction = value_at(diff(obstruction, chart.coords[sigma + 1]), chart, point, params)
                for mu in range(m):
                    row = np.zeros(size)
                    row[db_col(mu, sigma)] = g[0, nu + 1, tau + 1]
                    row[b_col(mu)] += d_obstruction
                    rows.append(row)
                    labels.append(f'tangency_d{sigma + 1}[{mu + 1};{nu + 1},{tau + 1}]')
    return JetSystem(gamma, point, np.array(rows), labels, g)


def _rref(m: NDArray[np.float64], tol: float = 1e-10) -> NDArray[np.float64]:
    out = m.astype(float).copy()
    rows, cols = out.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = r + int(np.argmax(np.abs(out[r:, c])))
        if abs(out[pivot, c]) < tol:
            continue
        out[[r, pivot]] = out[[pivot, r]]
        out[r] /= out[r, c]
        for i in range(rows):
            if i != r:
                out[i] -= out[i, c] * out[r]
        r += 1
    out[np.abs(out) < tol] = 0.0
    return out[:r]


class JetSolution:
    """Solution space of a `JetSystem`.

    - `basis`: completed jets, the linear parts form a reduced row echelon basis
    - `diagnostic`: non-empty when the numerical rank is ambiguous

    """

    __slots__ = ('system', 'basis', 'singular_values', 'diagnostic')
    __match_args__ = ('system', 'basis', 'singular_values', 'diagnostic')

    def __init__(
        self,
        system: JetSystem,
        basis: list[JetVector],
        singular_values: NDArray[np.float64],
        diagnostic: str = '',
    ) -> None:
        self.system = system
        self.basis = basis
        self.singular_values = singular_values
        self.diagnostic = diagnostic

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def bound(self) -> int:
        n = self.system.gamma.n
        return n * (n + 2)

    @property
    def determined(self) -> bool:
        return not self.diagnostic

    def contains(self, vector: NDArray[np.float64], tol: float = 1e-9) -> bool:
        """Whether linear jet data `(a, b, ∂b)` lies in the span of the basis."""
        v = np.asarray(vector, dtype=float)
        scale = max(1.0, float(np.max(np.abs(v))))
        if not self.basis:
            return float(np.max(np.abs(v))) <= tol
        span = np.array([j.unknowns() for j in self.basis]).T
        coef, *_ = np.linalg.lstsq(span, v, rcond=None)
        return float(np.max(np.abs(span @ coef - v))) <= tol * scale

    def __repr__(self) -> str:
        return f'JetSolution(dimension={self.dimension}, {self.diagnostic!r})'


def solve_boundary_jets(
    gamma: ConnectionField,
    point: Sequence[float],
    params: Mapping[str, float] | None = None,
) -> JetSolution:
    """Nullspace of the 2-jet system at a boundary point.

    Singular values below `1e-9·max(1, s_max)` count as zero; values
    between that and `1e-6·max(1, s_max)` make the rank ambiguous and are
    reported with the condition number.

    """
    system = jet_system_assemble(gamma, point, params)
    a = system.matrix
    size = a.shape[1]
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    rank = int(np.sum(s > 1e-9 * scale))
    ambiguous = [float(x) for x in s if 1e-9 * scale < x < 1e-6 * scale]
    diagnostic = ''
    if ambiguous:
        cond = float(s[0] / min(ambiguous))
        diagnostic = f'ambiguous numerical rank, condition number {cond:.3e}'
        log.warning('solve_boundary_jets: %s at %s', diagnostic, system.point)
    null = vt[rank:size]
    basis_rows = _rref(null) if null.shape[0] else np.zeros((0, size))
    basis = [system.complete(row) for row in basis_rows]
    for jet in basis:
        residual = system.residual(jet.unknowns())
        if residual > 1e-10 * scale:
            diagnostic = diagnostic or f'basis residual {residual:.3e} above tolerance'
    if len(basis) > gamma.n * (gamma.n + 2):
        diagnostic = diagnostic or f'solution space of dimension {len(basis)} exceeds {gamma.n * (gamma.n + 2)}'
    log.debug('solve_boundary_jets: rank %d of %d at %s', rank, size, system.point)
    return JetSolution(system, basis, s, diagnostic)


class TaylorJet:
    """`a = ½∂²_rφ⁰`, `b^μ = ∂_rφ^μ`, `c^μ = ½∂²_rφ^μ`, `db = ∂_νb^μ` at a point."""

    __slots__ = ('a', 'b', 'c', 'db')
    __match_args__ = ('a', 'b', 'c', 'db')

    def __init__(
        self, a: float, b: NDArray[np.float64], c: NDArray[np.float64], db: NDArray[np.float64]
    ) -> None:
        self.a = a
        self.b = b
        self.c = c
        self.db = db

    def unknowns(self) -> NDArray[np.float64]:
        return np.concatenate(([self.a], self.b, self.db.ravel()))

    def __repr__(self) -> str:
        return f'TaylorJet(a={self.a!r}, b={self.b.tolist()!r}, c={self.c.tolist()!r})'


def boundary_taylor(
    phi: MapField,
    point: Sequence[float],
    params: Mapping[str, float] | None = None,
    sampler: Sampler | None = None,
) -> TaylorJet:
    """Boundary Taylor coefficients of a map fixing the boundary.

    - raises `PreconditionError` with a witness when `φ` is not the identity
      on the boundary, checked on `sampler` (default 32 boundary points,
      tolerance `1e-10`)
    - raises `NormalizationError` when `∂_rφ⁰ ≠ 1` at the point

    """
    chart = phi.source
    require_on_boundary(chart, point)
    values = {**phi.params, **(params or {})}
    sampler = sampler or chart.boundary_sampler(values, count=32, tol=1e-10)
    coords = chart.coords
    checks: list[tuple[str, Expr]] = [('phi0', phi.comps.at(0))]
    checks += [(f'phi{mu}', Sum((phi.comps.at(mu), Neg(Var(coords[mu]))))) for mu in range(1, phi.n)]
    for label, e in checks:
        test = is_zero(restrict_to_boundary(e, chart), sampler, label)
        if isinstance(test, NonzeroWitness):
            msg = f'boundary_taylor: map is not the identity on the boundary, {label} = {test.value:.3e}'
            raise PreconditionError(msg, test)
    r = coords[0]
    d_r = [diff(c, r) for c in phi.comps]
    slope = value_at(d_r[0], chart, point, values)
    if abs(slope - 1.0) > 1e-10:
        msg = f'boundary_taylor: ∂φ⁰/∂{r} = {slope!r} at the point, rescale {r} by {1.0 / slope!r}'
        raise NormalizationError(msg, 1.0 / slope)
    m = phi.n - 1
    a = 0.5 * value_at(diff(d_r[0], r), chart, point, values)
    b = np.array([value_at(d_r[mu + 1], chart, point, values) for mu in range(m)])
    c = np.array([0.5 * value_at(diff(d_r[mu + 1], r), chart, point, values) for mu in range(m)])
    db = np.array([
        [value_at(diff(d_r[mu + 1], coords[nu + 1]), chart, point, values) for nu in range(m)]
        for mu in range(m)
    ])
    return TaylorJet(a, b, c, db)
