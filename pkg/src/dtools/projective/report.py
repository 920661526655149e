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

"""### Module dtools.projective.report - check records and their rendering

- *class* `CheckRecord`: one check, its inputs, verdict, residuals and
  witness points, plus the statement it checks
- *class* `Report`: records of one command run with the scene hash and seed
- *function* `record_from_test`: record for a `ZeroTest`
- *function* `record_from_outcome`: record for a check run through
  `Outcome.failable_call`
- *function* `render_json`, `render_text`: byte deterministic renderings

Exit codes: `0` every check passed, `1` a check failed or errored, `3` no
failure but something undetermined.

"""

from __future__ import annotations

__all__ = [
    'Verdict', 'CheckRecord', 'Report', 'record_from_test',
    'record_from_outcome', 'render_json', 'render_text',
    'EXIT_OK', 'EXIT_FAILED', 'EXIT_INPUT', 'EXIT_UNDETERMINED',
]

import json
import math
from collections.abc import Callable, Mapping
from typing import Any, Final, Literal

from pydantic import BaseModel, ConfigDict, Field

from .outcome import Outcome
from .zerotest import NonzeroWitness, Tri, Undetermined, ZeroTest

type Verdict = Literal['pass', 'fail', 'undetermined', 'error', 'skipped']

EXIT_OK: Final[int] = 0
EXIT_FAILED: Final[int] = 1
EXIT_INPUT: Final[int] = 2
EXIT_UNDETERMINED: Final[int] = 3


def _clean(x: Any) -> Any:
    """JSON safe copy, floats rounded to 12 significant digits."""
    match x:
        case bool() | None | str():
            return x
        case int():
            return x
        case float():
            if math.isnan(x) or math.isinf(x):
                return str(x)
            return float(f'{x:.12g}')
        case Mapping():
            return {str(k): _clean(v) for k, v in x.items()}
        case list() | tuple():
            return [_clean(v) for v in x]
        case _:
            if hasattr(x, 'tolist'):
                return _clean(x.tolist())
            return str(x)


class CheckRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    check: str
    verdict: Verdict
    anchor: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    residuals: dict[str, Any] = Field(default_factory=dict)
    witnesses: list[dict[str, Any]] = Field(default_factory=list)
    details: dict[str, Any] = Field(default_factory=dict)

    def cleaned(self) -> CheckRecord:
        return CheckRecord(
            check=self.check,
            verdict=self.verdict,
            anchor=self.anchor,
            inputs=_clean(self.inputs),
            residuals=_clean(self.residuals),
            witnesses=_clean(self.witnesses),
            details=_clean(self.details),
        )


class Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool: str
    version: str
    command: str
    scene: str
    scene_hash: str
    seed: int
    records: list[CheckRecord] = Field(default_factory=list)

    def exit_code(self) -> int:
        verdicts = {r.verdict for r in self.records}
        if verdicts & {'fail', 'error'}:
            return EXIT_FAILED
        if 'undetermined' in verdicts:
            return EXIT_UNDETERMINED
        return EXIT_OK

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            out[r.verdict] = out.get(r.verdict, 0) + 1
        return dict(sorted(out.items()))


def record_from_test(
    check: str,
    test: ZeroTest,
    anchor: str,
    inputs: Mapping[str, Any] | None = None,
    expect_zero: bool = True,
    details: Mapping[str, Any] | None = None,
) -> CheckRecord:
    """Record for a zero test.

    With `expect_zero` unset the check passes when a nonzero witness is
    found, used for checks that demonstrate a failing hypothesis.

    """
    residuals: dict[str, Any] = {'kind': type(test).__name__}
    witnesses: list[dict[str, Any]] = []
    match test:
        case NonzeroWitness():
            residuals['value'] = test.value
            witnesses.append({'point': dict(test.point), 'value': test.value, 'label': test.label})
        case Undetermined():
            residuals['max_abs'] = test.max_abs
            residuals['valid_samples'] = test.valid
            if test.diagnostic:
                residuals['diagnostic'] = test.diagnostic
    tri = test.verdict
    verdict: Verdict
    if tri is Tri.UNKNOWN and not test.holds:
        verdict = 'undetermined'
    elif test.holds == expect_zero:
        verdict = 'pass'
    else:
        verdict = 'fail'
    return CheckRecord(
        check=check,
        verdict=verdict,
        anchor=anchor,
        inputs=dict(inputs or {}),
        residuals=residuals,
        witnesses=witnesses,
        details=dict(details or {}),
    )


def record_from_outcome[V](
    check: str,
    outcome: Outcome[V, Exception],
    to_record: Callable[[V], CheckRecord],
    anchor: str,
    inputs: Mapping[str, Any] | None = None,
) -> CheckRecord:
    """Record for a check that may have raised, errors become `error` records."""
    if outcome:
        return to_record(outcome.get())
    exc = outcome.get_error()
    return CheckRecord(
        check=check,
        verdict='error',
        anchor=anchor,
        inputs=dict(inputs or {}),
        details={'error': type(exc).__name__, 'message': str(exc)},
    )


def render_json(report: Report) -> str:
    data = report.model_copy(update={'records': [r.cleaned() for r in report.records]})
    return json.dumps(data.model_dump(mode='json'), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return f'{x:.6g}'
    if isinstance(x, (list, tuple)):
        return '(' + ', '.join(_fmt(v) for v in x) + ')'
    if isinstance(x, Mapping):
        return '{' + ', '.join(f'{k}: {_fmt(v)}' for k, v in sorted(x.items())) + '}'
    return str(x)


def render_text(report: Report) -> str:
    lines = [
        f'{report.tool} {report.version} {report.command}',
        f'scene {report.scene} sha256 {report.scene_hash}',
        f'seed {report.seed}',
        '',
    ]
    for r in report.records:
        lines.append(f'[{r.verdict.upper()}] {r.check}')
        lines.append(f'    {r.anchor}')
        for title, block in (('inputs', r.inputs), ('residuals', r.residuals), ('details', r.details)):
            for key in sorted(block):
                lines.append(f'    {title}.{key} = {_fmt(block[key])}')
        for w in r.witnesses:
            lines.append(f'    witness {_fmt(w)}')
    summary = ', '.join(f'{k} {v}' for k, v in report.counts().items())
    lines.extend(['', f'summary: {summary or "no checks"}', f'exit {report.exit_code()}'])
    return '\n'.join(lines) + '\n'
