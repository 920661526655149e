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

import json
from pathlib import Path

import pytest

from dtools.projective import __version__
from dtools.projective.cli import main, run
from dtools.projective.fixtures import FIXTURES, flat_half_space
from dtools.projective.report import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_UNDETERMINED
from dtools.projective.scenefile import dump_scene, load_scene


def records(text: str) -> dict[str, dict[str, object]]:
    return {r['check']: r for r in json.loads(text)['records']}


def singular_scene(tmp_path: Path) -> Path:
    path = tmp_path / 'singular.json'
    path.write_text(json.dumps({
        'dimension': 2,
        'charts': [{'name': 'half', 'coords': ['x', 'y'], 'boundary': True,
                    'box': {'x': [0, 1], 'y': [-1, 1]}}],
        'connections': [{'chart': 'half', 'christoffel': {'0,1,1': '1/y'}}],
    }), encoding='utf-8')
    return path


class TestRun:
    def test_rigidity(self) -> None:
        code, text = run(['rigidity', '--fixture', 'projective_disk', '--samples', '4', '--format', 'json'])
        assert code == EXIT_OK
        data = json.loads(text)
        assert data['tool'] == 'dtools-projective'
        assert data['version'] == __version__
        assert data['command'] == 'rigidity'
        assert data['scene'] == 'fixture:projective_disk'
        scan = records(text)['rigidity.scan']
        assert scan['verdict'] == 'pass'
        assert scan['details'] == {
            'verdict': 'RIGID', 'theorem_applies': True, 'points': 8, 'counts': {'RIGID': 8},
        }

    def test_output_is_deterministic(self) -> None:
        argv = ['rigidity', '--fixture', 'mixed_boundary', '--samples', '8', '--seed', '3']
        first = run(argv)
        assert first == run(argv)
        assert first[1].startswith(f'dtools-projective {__version__} rigidity\n')
        assert first[1].endswith('exit 0\n')
        assert run([*argv, '--format', 'json'])[1] == run([*argv, '--format', 'json'])[1]

    def test_obstruction_point(self) -> None:
        code, text = run([
            'rigidity', '--fixture', 'projective_disk', '--samples', '2',
            '--chart', 'parabolic', '--point', '0,0.5', '--format', 'json',
        ])
        assert code == EXIT_OK
        obstruction = records(text)['rigidity.obstruction']
        assert obstruction['details'] == {'verdict': 'RIGID', 'matrix': [[2.0]]}

    def test_verify_map(self) -> None:
        code, text = run(['verify-map', '--fixture', 'flat_half_space', '--samples', '8', '--format', 'json'])
        assert code == EXIT_FAILED
        verdicts = {k: r['verdict'] for k, r in records(text).items()}
        assert verdicts == {
            'verify_map:identity': 'pass', 'verify_map:mobius': 'pass', 'verify_map:shear': 'fail',
        }
        code, _ = run(['verify-map', '--fixture', 'flat_half_space', '--map', 'mobius'])
        assert code == EXIT_OK

    def test_jets(self) -> None:
        code, text = run(['jets', '--fixture', 'flat_half_space', '--map', 'mobius', '--format', 'json'])
        assert code == EXIT_OK
        found = records(text)
        assert found['jets.solve']['details']['dimension'] == 2
        assert found['jets.solve']['details']['bound'] == 8
        assert found['jets.taylor:mobius']['verdict'] == 'pass'
        code, text = run(['jets', '--fixture', 'flat_half_space', '--map', 'shear', '--format', 'json'])
        assert code == EXIT_OK
        assert records(text)['jets.taylor:shear']['details']['c'] == [1.0]

    def test_geodesic(self) -> None:
        code, text = run([
            'geodesic', '--fixture', 'projective_disk', '--chart', 'polar',
            '--x0', '0,0.3', '--v0', '0,1', '--steps', '100', '--format', 'json',
        ])
        assert code == EXIT_OK
        found = records(text)
        assert found['geodesic.tangency_drift']['verdict'] == 'pass'
        assert found['geodesic.tangency_drift']['details']['expected'] == -0.5
        assert found['geodesic.integrate']['details']['exited'] is True
        code, text = run(['geodesic', '--fixture', 'projective_disk', '--steps', '50', '--format', 'json'])
        assert code == EXIT_OK
        integrate = records(text)['geodesic.integrate']['details']
        assert integrate['steps_taken'] == 50
        assert integrate['columns'] == ['t', 'x', 'y', 'dx', 'dy']
        assert 'geodesic.tangency_drift' not in records(text)

    def test_cartan(self) -> None:
        code, text = run(['cartan', '--fixture', 'projective_disk', '--samples', '8', '--format', 'json'])
        assert code == EXIT_OK
        found = records(text)
        assert found['cartan.boundary_pullback']['details']['member'] is False
        assert found['cartan.mod_k']['verdict'] == 'skipped'
        compare = found['cartan.schouten_compare']
        assert compare['verdict'] == 'pass'
        assert 'induced' not in compare['details']

    def test_undetermined(self, tmp_path: Path) -> None:
        path = singular_scene(tmp_path)
        code, text = run(['rigidity', '--scene', str(path), '--samples', '4', '--point', '0,0', '--format', 'json'])
        assert code == EXIT_UNDETERMINED
        assert records(text)['rigidity.obstruction']['verdict'] == 'undetermined'
        assert json.loads(text)['scene'] == str(path)

    @pytest.mark.parametrize('argv', [
        ['rigidity', '--scene', 'no/such/scene.json'],
        ['rigidity', '--fixture', 'projective_disk', '--samples', '0'],
        ['rigidity', '--fixture', 'projective_disk', '--format', 'xml'],
        ['rigidity', '--fixture', 'projective_disk', '--point', '0.5,0'],
        ['rigidity', '--fixture', 'projective_disk', '--chart', 'affine', '--point', '0,0'],
        ['rigidity', '--fixture', 'projective_disk', '--chart', 'polar'],
        ['verify-map', '--fixture', 'flat_half_space', '--map', 'nothing'],
        ['jets', '--fixture', 'projective_disk', '--point', '0,0,0'],
        ['geodesic', '--fixture', 'projective_disk', '--steps', '0'],
    ])
    def test_input_errors(self, argv: list[str]) -> None:
        assert run(argv) == (EXIT_INPUT, '')

    def test_usage_errors(self) -> None:
        with pytest.raises(SystemExit) as info:
            run(['rigidity', '--fixture', 'no_such_fixture'])
        assert info.value.code == 2
        with pytest.raises(SystemExit):
            run(['rigidity'])


class TestFixtureCommands:
    def test_list(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert run(['fixtures', 'list']) == (EXIT_OK, '')
        out = capsys.readouterr().out.splitlines()
        assert [line.split(':')[0] for line in out] == sorted(FIXTURES)

    def test_export(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / 'flat.json'
        assert run(['fixtures', 'export', 'flat_half_space', '--out', str(path)]) == (EXIT_OK, '')
        assert dump_scene(load_scene(path)) == dump_scene(flat_half_space(2).scene)
        assert main(['fixtures', 'export', 'flat_half_space']) == EXIT_OK
        assert capsys.readouterr().out == path.read_text(encoding='utf-8')

    def test_exported_scene_runs(self, tmp_path: Path) -> None:
        path = tmp_path / 'disk.json'
        run(['fixtures', 'export', 'projective_disk', '--out', str(path)])
        code, text = run(['rigidity', '--scene', str(path), '--samples', '4', '--format', 'json'])
        assert code == EXIT_OK
        assert records(text)['rigidity.scan']['details']['verdict'] == 'RIGID'
