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

"""### Module dtools.projective.curvature - curvature of connections

- *class* `CurvatureField`: `R^i_jkl`, antisymmetric in `kl`
- *class* `SchoutenField`: projective Schouten tensor `P_ab`
- *function* `riemann`: `R^i_jkl = ∂_kΓ^i_lj − ∂_lΓ^i_kj + Γ^i_kmΓ^m_lj − Γ^i_lmΓ^m_kj`
- *function* `ricci`: `R_ab = R^c_bca`
- *function* `schouten`: `(n−1)P_ab = R_ab − (2/(n+1))R_[ab]`
- *function* `schouten_shift_residual`: change law of `P` under a projective shift

"""

from __future__ import annotations

__all__ = [
    'CurvatureField', 'SchoutenField',
    'riemann', 'ricci', 'schouten', 'schouten_shift_residual',
]

import logging
from fractions import Fraction

from .components import Components, components
from .geometry import (
    Chart, ConnectionField, OneFormField, covariant_derivative, projective_shift,
)
from .memo import Memo
from .symexpr import Const, Expr, Neg, Product, Sum, ZERO, diff, simplify

log = logging.getLogger(__name__)


class CurvatureField:
    """Riemann curvature of a connection, Ricci contraction cached."""

    __slots__ = ('gamma', 'rm', '_ricci')
    __match_args__ = ('gamma', 'rm')

    def __init__(self, gamma: ConnectionField, rm: Components[Expr]) -> None:
        n = gamma.n
        if rm.shape != (n, n, n, n):
            msg = f'CurvatureField: shape {rm.shape} on a {n}-dimensional chart'
            raise ValueError(msg)
        self.gamma = gamma
        self.rm = rm
        self._ricci: Memo[Components[Expr]] = Memo()

    @property
    def chart(self) -> Chart:
        return self.gamma.chart

    @property
    def n(self) -> int:
        return self.gamma.n

    def at(self, i: int, j: int, k: int, l: int) -> Expr:
        return self.rm.at(i, j, k, l)

    def ricci(self) -> Components[Expr]:
        return self._ricci.get_or_compute(lambda: ricci(self))

    def __repr__(self) -> str:
        return f'CurvatureField({self.chart.name!r})'


class SchoutenField:
    __slots__ = ('gamma', 'p')
    __match_args__ = ('gamma', 'p')

    def __init__(self, gamma: ConnectionField, p: Components[Expr]) -> None:
        self.gamma = gamma
        self.p = p

    @property
    def chart(self) -> Chart:
        return self.gamma.chart

    def at(self, a: int, b: int) -> Expr:
        return self.p.at(a, b)

    def __repr__(self) -> str:
        return f'SchoutenField({self.chart.name!r}, {list(self.p)!r})'


def riemann(gamma: ConnectionField) -> CurvatureField:
    n = gamma.n
    xs = gamma.chart.coords
    half: dict[tuple[int, int, int, int], Expr] = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(k + 1, n):
                    terms: list[Expr] = [
                        diff(gamma.at(i, l, j), xs[k]),
                        Neg(diff(gamma.at(i, k, j), xs[l])),
                    ]
                    for m in range(n):
                        terms.append(Product((gamma.at(i, k, m), gamma.at(m, l, j))))
                        terms.append(Neg(Product((gamma.at(i, l, m), gamma.at(m, k, j)))))
                    half[i, j, k, l] = simplify(Sum(tuple(terms)))
    log.debug('riemann: %d independent components on %s', len(half), gamma.chart.name)

    def entry(i: int, j: int, k: int, l: int) -> Expr:
        if k == l:
            return ZERO
        if k < l:
            return half[i, j, k, l]
        return simplify(Neg(half[i, j, l, k]))

    return CurvatureField(gamma, components((n, n, n, n), entry))


def ricci(rm: CurvatureField) -> Components[Expr]:
    """`R_ab = Σ_c R^c_bca`."""
    n = rm.n
    return components(
        (n, n), lambda a, b: simplify(Sum(tuple(rm.at(c, b, c, a) for c in range(n))))
    )


def schouten(gamma: ConnectionField) -> SchoutenField:
    """Projective Schouten tensor of `gamma`.

    The antisymmetric part keeps its `2/(n+1)` weight in every dimension,
    so `n = 2` needs no special case.

    """
    n = gamma.n
    ric = riemann(gamma).ricci()
    skew = Const(Fraction(-1, n + 1))
    scale = Const(Fraction(1, n - 1))

    def entry(a: int, b: int) -> Expr:
        antisym = Sum((ric.at(a, b), Neg(ric.at(b, a))))
        return simplify(Product((scale, Sum((ric.at(a, b), Product((skew, antisym)))))))

    return SchoutenField(gamma, components((n, n), entry))


def schouten_shift_residual(gamma: ConnectionField, upsilon: OneFormField) -> Components[Expr]:
    """`P(shift(Γ, Υ)) − (P(Γ) − ∇Υ + Υ⊗Υ)`, identically zero."""
    shifted = schouten(projective_shift(gamma, upsilon)).p
    base = schouten(gamma).p
    nabla = covariant_derivative(gamma, upsilon)
    n = gamma.n
    return components(
        (n, n),
        lambda a, b: simplify(Sum((
            shifted.at(a, b),
            Neg(base.at(a, b)),
            nabla.at(a, b),
            Neg(Product((upsilon.at(a), upsilon.at(b)))),
        ))),
    )
