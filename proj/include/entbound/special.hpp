#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The entbound Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

namespace entbound::special {

// Thin wrappers over GSL with its error handler disabled; failures throw DomainError.

double riemann_zeta(double s);
/// sum_{j >= 0} (j + q)^{-s}
double hurwitz_zeta(double s, double q);
double log_gamma(double x);

}  // namespace entbound::special
