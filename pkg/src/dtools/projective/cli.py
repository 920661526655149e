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

"""### Module dtools.projective.cli - command line entry point

```
dtools-projective [-v] rigidity   (--scene PATH | --fixture NAME) [--point P]
dtools-projective [-v] verify-map (--scene PATH | --fixture NAME) [--map NAME]
dtools-projective [-v] geodesic   (--scene PATH | --fixture NAME) [--chart C] [--x0 P] [--v0 V] [--h H] [--steps N]
dtools-projective [-v] cartan     (--scene PATH | --fixture NAME) [--chart C]
dtools-projective [-v] jets       (--scene PATH | --fixture NAME) [--chart C] [--point P] [--map NAME]
dtools-projective fixtures list
dtools-projective fixtures export NAME [--out PATH]
```

Common flags: `--seed N`, `--samples N`, `--tol FLOAT`, `--format {text,json}`.
Reports go to stdout, log messages to stderr.

Exit codes: `0` all checks pass, `1` a check failed, `2` input error,
`3` undetermined results present.

"""

from __future__ import annotations

__all__ = ['CheckSettings', 'InputError', 'build_parser', 'main', 'run']

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, Literal, Never

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import __version__
from .cartan import (
    G_TILDE, NonRigidityViolation, boundary_pullback, check_normality_traces,
    gauge_curvature, mod_k_project, normal_gauge, schouten_compare,
)
from .fixtures import FIXTURES
from .geodesic import geodesic_integrate, tangency_drift
from .geometry import (
    BoundaryPointError, Chart, ChartError, ConnectionField, Scene,
    is_projective_transformation, require_on_boundary, value_at,
)
from .outcome import Outcome
from .report import (
    EXIT_INPUT, EXIT_OK, CheckRecord, Report, record_from_outcome,
    record_from_test, render_json, render_text,
)
from .rigidity import (
    Verdict, boundary_obstruction, boundary_taylor, rigidity_scan,
    solve_boundary_jets,
)
from .scenefile import SceneError, dump_scene, load_scene, scene_hash
from .symexpr import ZERO, simplify, to_text
from .zerotest import ZeroTest, all_zero, labelled

log = logging.getLogger(__name__)

TOOL = 'dtools-projective'


class InputError(ValueError):
    """Command line arguments do not fit the scene."""


class CheckSettings(BaseModel):
    """Validated sampling and output flags."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    samples: int = Field(default=32, ge=1)
    tol: float = Field(default=1e-9, gt=0)
    seed: int = Field(default=0, ge=0)
    format: Literal['text', 'json'] = 'text'


# -- Argument handling ---------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(','))
    except ValueError:
        msg = f'expected comma separated numbers, got {text!r}'
        raise argparse.ArgumentTypeError(msg) from None


def _common(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--scene', type=Path, help='scene file (JSON)')
    source.add_argument('--fixture', choices=sorted(FIXTURES), help='built-in scene')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--samples', type=int, default=32)
    parser.add_argument('--tol', type=float, default=1e-9)
    parser.add_argument('--format', default='text', help='text or json')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL, description='Projective structures and boundary rigidity checks.'
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
    sub = parser.add_subparsers(dest='command', required=True)

    cmd = sub.add_parser('rigidity', help='scan boundary charts for the rigidity obstruction')
    _common(cmd)
    cmd.add_argument('--point', type=_floats, help='also report the obstruction at this boundary point')
    cmd.add_argument('--chart', help='chart of --point')

    cmd = sub.add_parser('verify-map', help='test maps for being projective transformations')
    _common(cmd)
    cmd.add_argument('--map', dest='map_name', help='map to test, default all declared maps')

    cmd = sub.add_parser('geodesic', help='integrate a geodesic')
    _common(cmd)
    cmd.add_argument('--chart')
    cmd.add_argument('--x0', type=_floats, help='initial point, default the box center')
    cmd.add_argument('--v0', type=_floats, help='initial velocity, default along the last coordinate')
    cmd.add_argument('--h', type=float, default=1e-3)
    cmd.add_argument('--steps', type=int, default=200)

    cmd = sub.add_parser('cartan', help='normal Cartan gauge checks')
    _common(cmd)
    cmd.add_argument('--chart')

    cmd = sub.add_parser('jets', help='2-jet system at a boundary point')
    _common(cmd)
    cmd.add_argument('--chart')
    cmd.add_argument('--point', type=_floats)
    cmd.add_argument('--map', dest='map_name', help='compare with the Taylor coefficients of this map')

    cmd = sub.add_parser('fixtures', help='list or export built-in scenes')
    fsub = cmd.add_subparsers(dest='action', required=True)
    fsub.add_parser('list')
    export = fsub.add_parser('export')
    export.add_argument('name', choices=sorted(FIXTURES))
    export.add_argument('--out', type=Path)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    root = logging.getLogger('dtools.projective')
    root.handlers[:] = [handler]
    root.setLevel(level)


def _settings(args: argparse.Namespace) -> CheckSettings | Never:
    try:
        return CheckSettings(samples=args.samples, tol=args.tol, seed=args.seed, format=args.format)
    except ValidationError as exc:
        first = exc.errors()[0]
        msg = f'--{first["loc"][0]}: {first["msg"]}'
        raise InputError(msg) from None


def _load(args: argparse.Namespace) -> tuple[Scene, str]:
    if args.fixture is not None:
        return FIXTURES[args.fixture]().scene, f'fixture:{args.fixture}'
    return load_scene(args.scene), str(args.scene)


def _chart_with_connection(scene: Scene, name: str | None, boundary: bool) -> Chart | Never:
    if name is not None:
        chart = scene.chart(name)
        if chart.name not in scene.connections:
            raise InputError(f'no connection on chart {name!r}')
        if boundary and not chart.boundary:
            raise InputError(f'chart {name!r} is not a boundary chart')
        return chart
    for chart_name in scene.connections:
        chart = scene.chart(chart_name)
        if chart.boundary or not boundary:
            return chart
    raise InputError('scene has no boundary chart carrying a connection' if boundary else 'scene has no connection')


def _default_boundary_point(chart: Chart) -> tuple[float, ...]:
    return (0.0, *(0.5 * (lo + hi) for lo, hi in (chart.box[c] for c in chart.coords[1:])))


def _boundary_point(chart: Chart, point: tuple[float, ...] | None) -> tuple[float, ...] | Never:
    if point is None:
        return _default_boundary_point(chart)
    if len(point) != chart.n:
        raise InputError(f'--point needs {chart.n} values for chart {chart.name!r}')
    require_on_boundary(chart, point)
    return point


def _cartan_chart(scene: Scene, name: str | None) -> Chart | Never:
    """Named chart, otherwise the first boundary chart carrying a connection."""
    if name is not None:
        return _chart_with_connection(scene, name, boundary=False)
    charts = [scene.chart(c) for c in scene.connections]
    if not charts:
        raise InputError('scene has no connection')
    return next((c for c in charts if c.boundary), charts[0])


def _unwrap[V](outcome: Outcome[V, Exception]) -> V | Never:
    if not outcome:
        raise outcome.get_error()
    return outcome.get()


def _run(check: str, anchor: str, f: Callable[[], CheckRecord]) -> CheckRecord:
    """Run one check, a raised domain error becomes an `error` record."""
    return record_from_outcome(check, Outcome.failable_call(lambda _: f(), None), lambda r: r, anchor)


def _informational(record: CheckRecord, key: str) -> CheckRecord:
    """Keep residuals and witnesses, report the outcome under `details[key]`."""
    holds = record.verdict == 'pass'
    return record.model_copy(update={'verdict': 'pass', 'details': {**record.details, key: holds}})


def _texts(comps: Any) -> list[str]:
    return [to_text(simplify(e)) for e in comps]


# -- Commands ------------------------------------------------------------------

ANCHOR_RIGIDITY = 'a boundary point with some Γ^0_μν ≠ 0 forces every boundary fixing automorphism to be the identity'
ANCHOR_OBSTRUCTION = 'Γ^0_μν at a boundary point is invariant under projective change and boundary compatible charts'
ANCHOR_MAP = 'φ is projective iff φ*Γ − Γ = δΥ + δΥ for some 1-form Υ'
ANCHOR_GEODESIC = 'geodesics solve ẍ^i + Γ^i_jk ẋ^j ẋ^k = 0'
ANCHOR_TANGENCY = 'the boundary is totally geodesic iff Γ^0_μν vanishes on it, x0(t) ≈ −½Γ^0_μν v^μ v^ν t²'
ANCHOR_GAUGE = 'normal gauge: gl block Γ − δτ, last column dx, bottom row −P'
ANCHOR_NORMAL = 'the normal Cartan connection is torsion free with vanishing curvature traces'
ANCHOR_PULLBACK = 'the boundary pullback of the normal gauge is g~ valued iff the boundary is totally geodesic'
ANCHOR_MOD_K = 'a g~ valued boundary gauge reduces modulo k to a projective structure on the boundary'
ANCHOR_SCHOUTEN = 'Schouten tensors of the ambient and the induced structure along the boundary'
ANCHOR_JETS = 'boundary fixing automorphisms are determined by 2-jets solving a linear system, dimension at most n(n+2)'
ANCHOR_TAYLOR = 'the Taylor coefficients of a boundary fixing projective map solve the 2-jet system'


def cmd_rigidity(scene: Scene, settings: CheckSettings, args: argparse.Namespace) -> list[CheckRecord]:
    records: list[CheckRecord] = []
    point_chart = None
    point = None
    if args.point is None and args.chart is not None:
        msg = '--chart needs --point'
        raise InputError(msg)
    if args.point is not None:
        point_chart = _chart_with_connection(scene, args.chart, boundary=True)
        point = _boundary_point(point_chart, args.point)

    def scan() -> CheckRecord:
        report = rigidity_scan(scene, settings.samples, settings.seed, settings.tol)
        counts: dict[str, int] = {}
        for p in report.points.values():
            counts[p.verdict.value] = counts.get(p.verdict.value, 0) + 1
        witnesses = [
            {'chart': p.chart, 'point': list(p.obstruction.point), 'obstruction': p.obstruction.matrix.tolist()}
            for p in report.witnesses()[:8]
        ]
        witnesses += [
            {'chart': p.chart, 'point': list(p.obstruction.point), 'disagreement': {k: v.value for k, v in p.cross_checks.items()}}
            for p in report.disagreements()
        ]
        return CheckRecord(
            check='rigidity.scan',
            verdict='pass' if report.agreement else 'fail',
            anchor=ANCHOR_RIGIDITY,
            inputs={'samples': settings.samples, 'seed': settings.seed, 'tol': settings.tol},
            residuals={'disagreements': len(report.disagreements())},
            witnesses=witnesses,
            details={
                'verdict': report.verdict.value,
                'theorem_applies': report.theorem_applies,
                'points': len(report.points),
                'counts': dict(sorted(counts.items())),
            },
        )

    records.append(_run('rigidity.scan', ANCHOR_RIGIDITY, scan))

    if point_chart is not None and point is not None:
        chart, at = point_chart, point

        def obstruction() -> CheckRecord:
            obs = boundary_obstruction(scene.connection(chart.name), at, scene.params, settings.tol)
            return CheckRecord(
                check='rigidity.obstruction',
                verdict='undetermined' if obs.verdict is Verdict.UNDETERMINED else 'pass',
                anchor=ANCHOR_OBSTRUCTION,
                inputs={'chart': chart.name, 'point': list(at)},
                residuals={'max_abs': obs.max_abs},
                details={'verdict': obs.verdict.value, 'matrix': obs.matrix.tolist()},
            )

        records.append(_run('rigidity.obstruction', ANCHOR_OBSTRUCTION, obstruction))
    return records


def _verify_one(scene: Scene, settings: CheckSettings, name: str) -> CheckRecord:
    phi = scene.map(name)
    params = scene.params_for(phi)
    sampler = phi.source.sampler(params, settings.samples, settings.seed, settings.tol)
    result = is_projective_transformation(
        phi, scene.connection(phi.target.name), sampler, scene.connection(phi.source.name)
    )
    return record_from_test(
        f'verify_map:{name}', result.test, ANCHOR_MAP,
        inputs={'map': name, 'params': params},
        details={'upsilon': _texts(result.upsilon.comps)},
    )


def cmd_verify_map(scene: Scene, settings: CheckSettings, args: argparse.Namespace) -> list[CheckRecord]:
    names = [args.map_name] if args.map_name else list(scene.maps)
    if not names:
        raise InputError('scene declares no maps')
    for name in names:
        phi = scene.map(name)
        scene.connection(phi.target.name)
        scene.connection(phi.source.name)
    return [
        _run(f'verify_map:{name}', ANCHOR_MAP, lambda name=name: _verify_one(scene, settings, name))
        for name in names
    ]


def cmd_geodesic(scene: Scene, settings: CheckSettings, args: argparse.Namespace) -> list[CheckRecord]:
    chart = _chart_with_connection(scene, args.chart, boundary=False)
    gamma = scene.connection(chart.name)
    x0 = args.x0 or tuple(0.5 * (lo + hi) for lo, hi in (chart.box[c] for c in chart.coords))
    v0 = args.v0 or (0.0,) * (chart.n - 1) + (1.0,)
    if len(x0) != chart.n or len(v0) != chart.n:
        raise InputError(f'--x0 and --v0 need {chart.n} values for chart {chart.name!r}')
    if args.h <= 0 or args.steps < 1:
        raise InputError('--h must be positive and --steps at least 1')
    inputs = {'chart': chart.name, 'x0': list(x0), 'v0': list(v0), 'h': args.h, 'steps': args.steps}

    def integrate() -> CheckRecord:
        traj = geodesic_integrate(gamma, x0, v0, args.h, args.steps, scene.params)
        stride = max(1, (len(traj) - 1) // 20)
        rows = [
            [float(t), *map(float, s)]
            for t, s in zip(traj.times[::stride], traj.states[::stride], strict=True)
        ]
        return CheckRecord(
            check='geodesic.integrate',
            verdict='pass',
            anchor=ANCHOR_GEODESIC,
            inputs=inputs,
            details={
                'steps_taken': len(traj) - 1,
                'exited': traj.exited,
                'columns': ['t', *chart.coords, *(f'd{c}' for c in chart.coords)],
                'trajectory': rows,
            },
        )

    records = [_run('geodesic.integrate', ANCHOR_GEODESIC, integrate)]
    if chart.boundary and abs(x0[0]) <= 1e-12 and abs(v0[0]) <= 1e-12:

        def drift() -> CheckRecord:
            result = tangency_drift(gamma, x0, v0, args.h, args.steps, scene.params)
            m = chart.n
            curv = sum(
                value_at(gamma.at(0, a, b), chart, x0, scene.params) * v0[a] * v0[b]
                for a in range(1, m) for b in range(1, m)
            )
            expected = -0.5 * curv
            error = abs(result.quadratic - expected)
            return CheckRecord(
                check='geodesic.tangency_drift',
                verdict='pass' if error <= 1e-3 * max(1.0, abs(expected)) else 'fail',
                anchor=ANCHOR_TANGENCY,
                inputs=inputs,
                residuals={'quadratic_error': error},
                details={'max_abs': result.max_abs, 'quadratic': result.quadratic, 'expected': expected},
            )

        records.append(_run('geodesic.tangency_drift', ANCHOR_TANGENCY, drift))
    return records


def cmd_cartan(scene: Scene, settings: CheckSettings, args: argparse.Namespace) -> list[CheckRecord]:
    chart = _cartan_chart(scene, args.chart)
    gamma = scene.connection(chart.name)
    params = scene.params
    sampler = chart.sampler(params, settings.samples, settings.seed, settings.tol)
    inputs = {'chart': chart.name}
    omega = normal_gauge(gamma)
    curvature = gauge_curvature(omega)

    def gauge() -> CheckRecord:
        size = omega.size
        nonzero = {
            f'{a},{b}': [to_text(simplify(e)) for e in omega.form(a, b)]
            for a in range(size) for b in range(size)
            if any(simplify(e) != ZERO for e in omega.form(a, b))
        }
        return CheckRecord(
            check='cartan.gauge', verdict='pass', anchor=ANCHOR_GAUGE, inputs=inputs,
            details={'size': size, 'entries': nonzero},
        )

    def flat() -> CheckRecord:
        n = chart.n
        entries = (
            ((a, b, k, l), curvature.at(a, b, k, l))
            for a in range(curvature.size) for b in range(curvature.size)
            for k in range(n) for l in range(k + 1, n)
        )
        test = all_zero(labelled('Omega', entries), sampler)
        return _informational(record_from_test('cartan.curvature', test, ANCHOR_GAUGE, inputs), 'flat')

    def normality() -> CheckRecord:
        report = check_normality_traces(curvature, sampler)
        test = ZeroTest.sequence([report.torsion, *report.traces.values()])
        return record_from_test('cartan.normality', test, ANCHOR_NORMAL, inputs, details={'failing': report.failing()})

    records = [
        _run('cartan.gauge', ANCHOR_GAUGE, gauge),
        _run('cartan.curvature', ANCHOR_GAUGE, flat),
        _run('cartan.normality', ANCHOR_NORMAL, normality),
    ]
    if not chart.boundary:
        return records

    face_sampler = chart.boundary_face().sampler(params, settings.samples, settings.seed, settings.tol)
    boundary_sampler = chart.boundary_sampler(params, settings.samples, settings.seed, settings.tol)
    pulled = Outcome.failable_call(lambda g: boundary_pullback(g, face_sampler), omega)

    def pullback() -> CheckRecord:
        member = _unwrap(pulled)
        record = record_from_test(
            'cartan.boundary_pullback', member.membership, ANCHOR_PULLBACK, inputs,
            details={'mask': G_TILDE.name},
        )
        return _informational(record, 'member')

    records.append(_run('cartan.boundary_pullback', ANCHOR_PULLBACK, pullback))

    if pulled and pulled.get().membership.holds:

        def reduce() -> CheckRecord:
            reduced = mod_k_project(_unwrap(pulled))
            reduced_curv = gauge_curvature(reduced)
            m = reduced.chart.n
            entries = (
                ((a, b, k, l), reduced_curv.at(a, b, k, l))
                for a in range(reduced_curv.size) for b in range(reduced_curv.size)
                for k in range(m) for l in range(k + 1, m)
            )
            test = all_zero(labelled('Omega', entries), face_sampler)
            record = record_from_test(
                'cartan.mod_k', test, ANCHOR_MOD_K, inputs,
                details={'size': reduced.size},
            )
            return _informational(record, 'flat')

        records.append(_run('cartan.mod_k', ANCHOR_MOD_K, reduce))
    else:
        records.append(CheckRecord(
            check='cartan.mod_k', verdict='skipped', anchor=ANCHOR_MOD_K, inputs=inputs,
            details={'reason': 'boundary pullback is not g~ valued'},
        ))

    def compare() -> CheckRecord:
        try:
            result = schouten_compare(gamma, boundary_sampler)
        except NonRigidityViolation as exc:
            w = exc.witness
            if w is None:
                return CheckRecord(
                    check='cartan.schouten_compare', verdict='undetermined', anchor=ANCHOR_SCHOUTEN,
                    inputs=inputs, details={'reason': str(exc)},
                )
            return CheckRecord(
                check='cartan.schouten_compare', verdict='skipped', anchor=ANCHOR_SCHOUTEN, inputs=inputs,
                witnesses=[{'point': dict(w.point), 'value': w.value, 'label': w.label}],
                details={'reason': 'boundary is not totally geodesic'},
            )
        details: dict[str, Any] = {'restricted': _texts(result.restricted)}
        if result.induced is not None and result.difference is not None:
            details['induced'] = _texts(result.induced)
            details['difference'] = _texts(result.difference)
        return CheckRecord(
            check='cartan.schouten_compare', verdict='pass', anchor=ANCHOR_SCHOUTEN,
            inputs=inputs, details=details,
        )

    records.append(_run('cartan.schouten_compare', ANCHOR_SCHOUTEN, compare))
    return records


def cmd_jets(scene: Scene, settings: CheckSettings, args: argparse.Namespace) -> list[CheckRecord]:
    chart = _chart_with_connection(scene, args.chart, boundary=True)
    gamma: ConnectionField = scene.connection(chart.name)
    point = _boundary_point(chart, args.point)
    phi = scene.map(args.map_name) if args.map_name else None
    if phi is not None and phi.source != chart:
        raise InputError(f'map {args.map_name!r} is not defined on chart {chart.name!r}')
    inputs: dict[str, Any] = {'chart': chart.name, 'point': list(point)}
    solution = Outcome.failable_call(lambda p: solve_boundary_jets(gamma, p, scene.params), point)

    def solve() -> CheckRecord:
        sol = _unwrap(solution)
        verdict: Literal['pass', 'fail', 'undetermined']
        if not sol.determined:
            verdict = 'undetermined'
        elif sol.dimension > sol.bound:
            verdict = 'fail'
        else:
            verdict = 'pass'
        basis = [
            {'a': j.a, 'b': j.b.tolist(), 'db': j.db.tolist(), 'c': j.c.tolist(), 'upsilon0': j.upsilon0}
            for j in sol.basis
        ]
        return CheckRecord(
            check='jets.solve',
            verdict=verdict,
            anchor=ANCHOR_JETS,
            inputs=inputs,
            residuals={'diagnostic': sol.diagnostic} if sol.diagnostic else {},
            details={
                'unknowns': sol.system.unknowns(),
                'rows': len(sol.system.rows),
                'singular_values': sol.singular_values.tolist(),
                'dimension': sol.dimension,
                'bound': sol.bound,
                'basis': basis,
            },
        )

    records = [_run('jets.solve', ANCHOR_JETS, solve)]
    if phi is not None:
        map_name = args.map_name

        def taylor() -> CheckRecord:
            jet = boundary_taylor(phi, point, scene.params_for(phi))
            sol = _unwrap(solution)
            member = sol.contains(jet.unknowns())
            return CheckRecord(
                check=f'jets.taylor:{map_name}',
                verdict='pass' if member else 'fail',
                anchor=ANCHOR_TAYLOR,
                inputs={**inputs, 'map': map_name},
                details={'a': jet.a, 'b': jet.b.tolist(), 'c': jet.c.tolist(), 'db': jet.db.tolist()},
            )

        records.append(_run(f'jets.taylor:{map_name}', ANCHOR_TAYLOR, taylor))
    return records


COMMANDS: dict[str, Callable[[Scene, CheckSettings, argparse.Namespace], list[CheckRecord]]] = {
    'rigidity': cmd_rigidity,
    'verify-map': cmd_verify_map,
    'geodesic': cmd_geodesic,
    'cartan': cmd_cartan,
    'jets': cmd_jets,
}


def _fixtures(args: argparse.Namespace) -> int:
    if args.action == 'list':
        for name in sorted(FIXTURES):
            fixture = FIXTURES[name]()
            print(f'{name}: {fixture.notes}')
        return EXIT_OK
    text = dump_scene(FIXTURES[args.name]().scene)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding='utf-8')
        log.info('wrote %s', args.out)
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Parse arguments, run one command, return the exit code and the rendered report."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    if args.command == 'fixtures':
        return _fixtures(args), ''
    try:
        settings = _settings(args)
        scene, scene_name = _load(args)
        records = COMMANDS[args.command](scene, settings, args)
    except (InputError, SceneError, ChartError, BoundaryPointError) as exc:
        print(f'{TOOL}: error: {exc}', file=sys.stderr)
        return EXIT_INPUT, ''
    report = Report(
        tool=TOOL,
        version=__version__,
        command=args.command,
        scene=scene_name,
        scene_hash=scene_hash(scene),
        seed=settings.seed,
        records=records,
    )
    text = render_json(report) if settings.format == 'json' else render_text(report)
    return report.exit_code(), text


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code
