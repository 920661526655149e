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

"""### Module dtools.projective.scenefile - JSON scene files

Scene files are JSON objects

```json
{
  "dimension": 2,
  "params": {"beta": 1.2},
  "charts": [
    {"name": "half", "coords": ["x", "y"], "boundary": true,
     "box": {"x": [0, 1], "y": [-1, 1]},
     "transitions": [{"target": "bar", "inverse": ["..."], "forward": ["..."]}]}
  ],
  "connections": [{"chart": "half", "christoffel": {"0,1,1": "x"}}],
  "maps": [{"name": "m", "source": "half", "target": "half",
            "components": ["x", "y + beta*x"], "params": {}}]
}
```

- Christoffel symbols are keyed `"i,j,k"`, one of each pair `jk`, `kj`
  suffices, absent entries are zero
- transition `inverse` components are expressions in the target chart's
  coordinates, `forward` ones in the source chart's
- in a boundary chart the first coordinate is the boundary defining one

#### Functions

- `load_scene(path)`, `scene_from_text(text)`: validated `Scene`, failures
  raise `SceneError` naming the JSON location
- `dump_scene(scene)`: canonical text, sorted keys and two space indent
- `scene_hash(scene)`: sha256 of the canonical text

"""

from __future__ import annotations

__all__ = [
    'SceneError', 'TransitionModel', 'ChartModel', 'ConnectionModel',
    'MapModel', 'SceneModel', 'load_scene', 'scene_from_text', 'scene_to_model',
    'dump_scene', 'scene_hash',
]

import hashlib
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Never

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .components import Components
from .geometry import (
    Chart, ChartError, ConnectionField, MapField, Scene, Transition,
)
from .symexpr import Expr, ExprSyntaxError, ZERO, simplify, to_text

log = logging.getLogger(__name__)


class SceneError(ValueError):
    """Scene file rejected, `location` is a dotted JSON path."""

    def __init__(self, msg: str, location: str = '') -> None:
        super().__init__(f'{location}: {msg}' if location else msg)
        self.location = location


class _Model(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)


class TransitionModel(_Model):
    target: str
    inverse: list[str]
    forward: list[str] | None = None


class ChartModel(_Model):
    name: str = Field(min_length=1)
    coords: list[str] = Field(min_length=1)
    boundary: bool = False
    box: dict[str, tuple[float, float]]
    transitions: list[TransitionModel] = Field(default_factory=list)


class ConnectionModel(_Model):
    chart: str
    christoffel: dict[str, str] = Field(default_factory=dict)


class MapModel(_Model):
    name: str = Field(min_length=1)
    source: str
    target: str
    components: list[str]
    params: dict[str, float] = Field(default_factory=dict)


class SceneModel(_Model):
    dimension: int = Field(ge=2)
    params: dict[str, float] = Field(default_factory=dict)
    charts: list[ChartModel] = Field(min_length=1)
    connections: list[ConnectionModel] = Field(default_factory=list)
    maps: list[MapModel] = Field(default_factory=list)


# -- Loading -------------------------------------------------------------------


def _location(loc: Iterable[int | str]) -> str:
    return '.'.join(str(part) for part in loc)


def _parse_all(
    chart: Chart, texts: Sequence[str], params: Iterable[str], where: str
) -> Components[Expr] | Never:
    params = tuple(params)
    out = []
    for ii, text in enumerate(texts):
        try:
            out.append(chart.parse(text, params))
        except ExprSyntaxError as exc:
            raise SceneError(str(exc), f'{where}.{ii}') from None
    return Components(out, (len(out),))


def _christoffel_key(key: str, n: int, where: str) -> tuple[int, int, int] | Never:
    parts = key.split(',')
    try:
        idx = tuple(int(p.strip()) for p in parts)
    except ValueError:
        idx = ()
    if len(idx) != 3 or not all(0 <= ii < n for ii in idx):
        msg = f'Christoffel key {key!r} is not "i,j,k" with indices below {n}'
        raise SceneError(msg, where)
    return idx[0], idx[1], idx[2]


def _build(model: SceneModel) -> Scene | Never:
    n = model.dimension
    scene_params = tuple(model.params)
    charts: dict[str, Chart] = {}
    for ii, cm in enumerate(model.charts):
        where = f'charts.{ii}'
        if cm.name in charts:
            raise SceneError(f'duplicate chart name {cm.name!r}', f'{where}.name')
        if len(cm.coords) != n:
            msg = f'chart has {len(cm.coords)} coordinates, scene dimension is {n}'
            raise SceneError(msg, f'{where}.coords')
        try:
            charts[cm.name] = Chart(cm.name, cm.coords, cm.box, cm.boundary)
        except ChartError as exc:
            raise SceneError(str(exc), where) from None

    def lookup(name: str, where: str) -> Chart | Never:
        if name not in charts:
            raise SceneError(f'unknown chart {name!r}', where)
        return charts[name]

    transitions: list[Transition] = []
    for ii, cm in enumerate(model.charts):
        source = charts[cm.name]
        for jj, tm in enumerate(cm.transitions):
            where = f'charts.{ii}.transitions.{jj}'
            target = lookup(tm.target, f'{where}.target')
            if len(tm.inverse) != n or (tm.forward is not None and len(tm.forward) != n):
                raise SceneError(f'transition needs {n} components', where)
            inverse = _parse_all(target, tm.inverse, scene_params, f'{where}.inverse')
            forward = None
            if tm.forward is not None:
                forward = _parse_all(source, tm.forward, scene_params, f'{where}.forward')
            transitions.append(Transition(source, target, inverse, forward))

    connections: list[ConnectionField] = []
    for ii, conn in enumerate(model.connections):
        where = f'connections.{ii}'
        chart = lookup(conn.chart, f'{where}.chart')
        if any(g.chart.name == chart.name for g in connections):
            raise SceneError(f'second connection on chart {chart.name!r}', f'{where}.chart')
        entries: dict[tuple[int, int, int], Expr] = {}
        for key, text in conn.christoffel.items():
            at = f'{where}.christoffel.{key}'
            i, j, k = _christoffel_key(key, n, at)
            try:
                e = chart.parse(text, scene_params)
            except ExprSyntaxError as exc:
                raise SceneError(str(exc), at) from None
            twin = entries.get((i, k, j))
            if twin is not None and simplify(twin) != simplify(e):
                msg = f'Γ^{i}_{j}{k} and Γ^{i}_{k}{j} differ, connections must be torsion free'
                raise SceneError(msg, at)
            entries[i, j, k] = e
        connections.append(ConnectionField.from_entries(chart, entries))

    maps: dict[str, MapField] = {}
    for ii, mm in enumerate(model.maps):
        where = f'maps.{ii}'
        if mm.name in maps:
            raise SceneError(f'duplicate map name {mm.name!r}', f'{where}.name')
        source = lookup(mm.source, f'{where}.source')
        target = lookup(mm.target, f'{where}.target')
        if len(mm.components) != n:
            raise SceneError(f'map needs {n} components', f'{where}.components')
        comps = _parse_all(source, mm.components, (*scene_params, *mm.params), f'{where}.components')
        maps[mm.name] = MapField(source, target, comps, mm.params)

    try:
        return Scene(n, charts.values(), connections, maps, model.params, transitions)
    except ChartError as exc:
        raise SceneError(str(exc)) from None


def scene_from_text(text: str, source: str = '<string>') -> Scene | Never:
    try:
        model = SceneModel.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        msg = f'{source}: {first["msg"]}'
        raise SceneError(msg, _location(first['loc'])) from None
    scene = _build(model)
    log.info('loaded scene from %s: %r', source, scene)
    return scene


def load_scene(path: str | Path) -> Scene | Never:
    """Read and validate a scene file."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise SceneError(f'cannot read {path}: {exc.strerror}') from None
    return scene_from_text(text, str(path))


# -- Export --------------------------------------------------------------------


def scene_to_model(scene: Scene) -> SceneModel:
    n = scene.dimension
    charts = []
    for chart in scene.charts.values():
        transitions = [
            TransitionModel(
                target=t.target.name,
                inverse=[to_text(simplify(e)) for e in t.inverse],
                forward=None if t.forward is None else [to_text(simplify(e)) for e in t.forward],
            )
            for t in scene.transitions_from(chart.name)
        ]
        charts.append(ChartModel(
            name=chart.name,
            coords=list(chart.coords),
            boundary=chart.boundary,
            box=dict(chart.box),
            transitions=transitions,
        ))
    connections = []
    for gamma in scene.connections.values():
        entries = {}
        for i in range(n):
            for j in range(n):
                for k in range(j, n):
                    e = simplify(gamma.at(i, j, k))
                    if e != ZERO:
                        entries[f'{i},{j},{k}'] = to_text(e)
        connections.append(ConnectionModel(chart=gamma.chart.name, christoffel=entries))
    maps = [
        MapModel(
            name=name,
            source=m.source.name,
            target=m.target.name,
            components=[to_text(simplify(e)) for e in m.comps],
            params=dict(m.params),
        )
        for name, m in scene.maps.items()
    ]
    return SceneModel(
        dimension=n, params=dict(scene.params), charts=charts,
        connections=connections, maps=maps,
    )


def dump_scene(scene: Scene) -> str:
    """Canonical scene text, equal scenes give equal bytes."""
    data = scene_to_model(scene).model_dump(mode='json', exclude_none=True)
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def scene_hash(scene: Scene) -> str:
    return hashlib.sha256(dump_scene(scene).encode('utf-8')).hexdigest()
