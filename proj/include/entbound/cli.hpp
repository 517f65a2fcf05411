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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "entbound/distributions.hpp"

namespace entbound::cli {

/// Process exit codes. Stable; documented in the README.
enum ExitCode : int
{
  kOk                 = 0,
  kError              = 1,
  kUsage              = 2,
  kInadmissibleR      = 3,
  kMissingCertificate = 4,
  kResourceLimit      = 5,
  kSimulationFail     = 6,
};

/// "family:param[,param]", e.g. "poisson:1.0", "negbinomial:2.0,0.3", "tabulated:probs.json".
/// Throws ParseError naming the offending token.
PmfModel parse_model_spec(std::string_view text);

/// Entry point shared by the executable and the tests. args[0] is the program name.
int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

}  // namespace entbound::cli
