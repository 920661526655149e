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

"""### Module dtools.projective.zerotest - deciding whether expressions vanish

- *class* `Sampler`: seeded box of sample points plus fixed parameter values
- *class* `ZeroTest`: tri-state result of a zero test
  - `ProvablyZero`: simplification reduced the expression to `0`
  - `NonzeroWitness(point, value, label)`: a sample exceeded the tolerance
  - `Undetermined(max_abs, valid, diagnostic)`: not proven, no witness found
- *function* `is_zero`: zero test of one expression
- *function* `all_zero`: zero test of labelled expressions, first witness wins
- *enum* `Tri`: three valued verdict used in reports

"""

from __future__ import annotations

__all__ = [
    'Sampler', 'ZeroTest', 'ProvablyZero', 'NonzeroWitness', 'Undetermined',
    'Tri', 'is_zero', 'all_zero', 'labelled', 'DEFAULT_SAMPLES', 'DEFAULT_TOL',
]

import logging
from collections.abc import Iterable, Mapping
from enum import Enum
from typing import Final

import numpy as np

from .memo import Memo
from .symexpr import (
    EvalDomainError, Expr, MissingVariableError, ZERO,
    free_variables, lambdify, simplify,
)

log = logging.getLogger(__name__)

DEFAULT_SAMPLES: Final[int] = 64
DEFAULT_TOL: Final[float] = 1e-9


class Sampler:
    """Deterministic sample points in a box.

    - `box`: variable name to closed interval `(lo, hi)`
    - `fixed`: variables held at one value, parameters and pinned coordinates
    - points are drawn uniformly with `numpy.random.default_rng(seed)`
      and cached on first use

    """

    __slots__ = ('box', 'fixed', 'count', 'seed', 'tol', '_points')

    def __init__(
        self,
        box: Mapping[str, tuple[float, float]],
        fixed: Mapping[str, float] | None = None,
        count: int = DEFAULT_SAMPLES,
        seed: int = 0,
        tol: float = DEFAULT_TOL,
    ) -> None:
        if count < 1:
            msg = f'Sampler: count must be positive, got {count}'
            raise ValueError(msg)
        for name, (lo, hi) in box.items():
            if not lo <= hi:
                msg = f'Sampler: empty interval [{lo}, {hi}] for {name!r}'
                raise ValueError(msg)
        self.fixed = dict(fixed or {})
        self.box = {k: (float(lo), float(hi)) for k, (lo, hi) in box.items() if k not in self.fixed}
        self.count = count
        self.seed = seed
        self.tol = tol
        self._points: Memo[tuple[dict[str, float], ...]] = Memo()

    def __repr__(self) -> str:
        return (
            f'Sampler(box={self.box!r}, fixed={self.fixed!r}, '
            f'count={self.count}, seed={self.seed}, tol={self.tol})'
        )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.box) + tuple(self.fixed)

    def points(self) -> tuple[dict[str, float], ...]:
        def draw() -> tuple[dict[str, float], ...]:
            rng = np.random.default_rng(self.seed)
            names = list(self.box)
            lo = np.array([self.box[n][0] for n in names], dtype=float)
            hi = np.array([self.box[n][1] for n in names], dtype=float)
            table = rng.uniform(lo, hi, size=(self.count, len(names)))
            return tuple(
                {**dict(zip(names, map(float, row))), **self.fixed} for row in table
            )

        return self._points.get_or_compute(draw)

    def pinned(self, **values: float) -> Sampler:
        """Same sampler with some variables held fixed."""
        return Sampler(self.box, {**self.fixed, **values}, self.count, self.seed, self.tol)

    def with_count(self, count: int) -> Sampler:
        return Sampler(self.box, self.fixed, count, self.seed, self.tol)

    def with_seed(self, seed: int) -> Sampler:
        return Sampler(self.box, self.fixed, self.count, seed, self.tol)


class Tri(Enum):
    """Three valued verdict."""

    TRUE = 'true'
    FALSE = 'false'
    UNKNOWN = 'unknown'


class ZeroTest:
    """Tri-state result of a zero test.

    - `holds` is `True` for `ProvablyZero` and for `Undetermined` results
      with at least one valid sample, all of them within tolerance
    - `verdict` maps the result to a `Tri`

    """

    __slots__ = ()

    @property
    def holds(self) -> bool:
        raise NotImplementedError

    @property
    def verdict(self) -> Tri:
        if self.holds:
            return Tri.TRUE
        if isinstance(self, NonzeroWitness):
            return Tri.FALSE
        return Tri.UNKNOWN

    @staticmethod
    def sequence(tests: Iterable[ZeroTest]) -> ZeroTest:
        """Combine zero tests of several expressions.

        - the first `NonzeroWitness` wins
        - all `ProvablyZero` gives `ProvablyZero`
        - otherwise `Undetermined`, with the largest residual seen and the
          smallest count of valid samples

        """
        proven = True
        max_abs = 0.0
        valid: int | None = None
        diagnostics: list[str] = []
        for test in tests:
            match test:
                case NonzeroWitness():
                    return test
                case Undetermined(m, v, diagnostic):
                    proven = False
                    max_abs = max(max_abs, m)
                    valid = v if valid is None else min(valid, v)
                    if diagnostic and diagnostic not in diagnostics:
                        diagnostics.append(diagnostic)
        if proven:
            return ProvablyZero()
        return Undetermined(max_abs, valid or 0, '; '.join(diagnostics))


class ProvablyZero(ZeroTest):
    __slots__ = ()

    @property
    def holds(self) -> bool:
        return True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProvablyZero)

    def __hash__(self) -> int:
        return hash('ProvablyZero')

    def __repr__(self) -> str:
        return 'ProvablyZero()'


class NonzeroWitness(ZeroTest):
    __slots__ = ('point', 'value', 'label')
    __match_args__ = ('point', 'value', 'label')

    def __init__(self, point: Mapping[str, float], value: float, label: str = '') -> None:
        self.point = dict(point)
        self.value = value
        self.label = label

    @property
    def holds(self) -> bool:
        return False

    def relabel(self, label: str) -> NonzeroWitness:
        return NonzeroWitness(self.point, self.value, label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NonzeroWitness):
            return False
        return (self.point, self.value, self.label) == (other.point, other.value, other.label)

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.point.items())), self.value, self.label))

    def __repr__(self) -> str:
        where = f' at {self.label}' if self.label else ''
        return f'NonzeroWitness({self.point!r}, {self.value!r}{where})'


class Undetermined(ZeroTest):
    __slots__ = ('max_abs', 'valid', 'diagnostic')
    __match_args__ = ('max_abs', 'valid', 'diagnostic')

    def __init__(self, max_abs: float, valid: int, diagnostic: str = '') -> None:
        self.max_abs = max_abs
        self.valid = valid
        self.diagnostic = diagnostic

    @property
    def holds(self) -> bool:
        return self.valid > 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Undetermined):
            return False
        return (self.max_abs, self.valid, self.diagnostic) == (
            other.max_abs, other.valid, other.diagnostic
        )

    def __hash__(self) -> int:
        return hash((self.max_abs, self.valid, self.diagnostic))

    def __repr__(self) -> str:
        return f'Undetermined(max_abs={self.max_abs!r}, valid={self.valid}, {self.diagnostic!r})'


def is_zero(e: Expr, sampler: Sampler, label: str = '') -> ZeroTest:
    """Decide whether `e` vanishes on the sampler's domain.

    - `ProvablyZero` only if `simplify(e)` is the zero constant
    - `NonzeroWitness` at the first sample whose magnitude exceeds `sampler.tol`
    - `Undetermined` otherwise, with a diagnostic when every sample hit a
      domain error
    - raises `MissingVariableError` when the sampler leaves a variable free

    """
    reduced = simplify(e)
    if reduced == ZERO:
        return ProvablyZero()
    names = sampler.names
    missing = free_variables(reduced) - set(names)
    if missing:
        msg = f'is_zero: sampler provides no values for {sorted(missing)}'
        raise MissingVariableError(msg)
    f = lambdify(reduced, names)
    max_abs = 0.0
    valid = 0
    for point in sampler.points():
        try:
            value = f([point[n] for n in names])
        except EvalDomainError:
            continue
        valid += 1
        if abs(value) > sampler.tol:
            log.debug('is_zero: witness %r = %g', point, value)
            return NonzeroWitness(point, value, label)
        max_abs = max(max_abs, abs(value))
    if valid == 0:
        return Undetermined(0.0, 0, f'all {sampler.count} sample points hit domain errors')
    return Undetermined(max_abs, valid)


def all_zero(exprs: Iterable[tuple[str, Expr]], sampler: Sampler) -> ZeroTest:
    """Zero test of labelled expressions, witnesses carry the label."""
    return ZeroTest.sequence(is_zero(e, sampler, label) for label, e in exprs)


def labelled(name: str, comps: Iterable[tuple[tuple[int, ...], Expr]]) -> list[tuple[str, Expr]]:
    """Label indexed components as `name[i,j,...]` for `all_zero`."""
    return [(name + '[' + ','.join(map(str, idx)) + ']', e) for idx, e in comps]
