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

"""### Developer Tools - projective structures and boundary rigidity

- *module* `dtools.projective`: projective differential geometry in charts
  - *module* `symexpr`: symbolic expressions, grammar, printer, derivatives
  - *module* `zerotest`: seeded samplers and tri-state zero tests
  - *module* `components`: immutable shaped tuples of tensor components
  - *module* `memo`: write once cells caching derived fields
  - *module* `outcome`: left biased container for checks that may fail
  - *module* `geometry`: charts, scenes, connections, projective change
    - Thomas parameters, pullbacks, projective transformation test
  - *module* `curvature`: Riemann, Ricci and projective Schouten tensors
  - *module* `cartan`: normal Cartan gauges and their curvature
    - subalgebra masks, boundary pullback, mod-k reduction
    - second order jet group
  - *module* `rigidity`: boundary obstruction, rigidity scan, 2-jet system
  - *module* `geodesic`: RK4 geodesics and boundary tangency
  - *module* `fixtures`: built-in scenes
  - *module* `scenefile`: JSON scene files
  - *module* `report`: check records, text and JSON reports
  - *module* `cli`: the `dtools-projective` command

"""

__author__ = 'The dtools.projective Contributors'
__copyright__ = 'Copyright (c) 2025 The dtools.projective Contributors'
__license__ = 'Apache License 2.0'
__version__ = '0.1.0'
