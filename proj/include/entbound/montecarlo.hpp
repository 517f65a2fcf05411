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

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entbound/certify.hpp"
#include "entbound/distributions.hpp"
#include "entbound/errors.hpp"
#include "json.hpp"

namespace entbound {

enum class Verdict
{
  kPass,
  kVacuous,
  kFail,
};

std::string to_string(Verdict v);
Verdict     verdict_from_string(std::string const &s);

/// Which point of the certified entropy interval centres the statistic.
enum class Centering
{
  kMidpoint,
  kLower,
  kUpper,
};

struct SimulationConfig
{
  PmfModel              model;
  std::int64_t          n{200};
  std::vector<double>   eps{};
  std::int64_t          replicates{10'000};
  std::uint64_t         seed{0};
  std::optional<double> entropy_tolerance{};  ///< defaults to min(eps) / 100
  std::optional<double> r{};
  double                slack{1e-6};
  Centering             centering{Centering::kMidpoint};
  unsigned              threads{1};  ///< 0 picks std::thread::hardware_concurrency()

  double tolerance() const;
  /// Throws DomainError on violated invariants (replicates >= 100, tolerance <= eps/100, ...).
  void validate() const;
};

struct EpsRecord
{
  double       eps{0.0};
  std::int64_t hit_count{0};
  double       frequency{0.0};
  double       std_error{0.0};
  double       bound_value{0.0};
  Verdict      verdict{Verdict::kPass};

  bool operator==(EpsRecord const &) const = default;
};

struct SimulationReport
{
  std::string            model;
  std::int64_t           n{0};
  std::int64_t           replicates{0};
  std::uint64_t          seed{0};
  MomentCertificate      certificate{};
  EntropyInterval        entropy{};
  double                 centre{0.0};
  std::vector<EpsRecord> records{};
  double                 wall_time_s{0.0};

  /// Equality ignores wall time.
  bool operator==(SimulationReport const &other) const;
};

/// Wald standard error sqrt(f(1-f)/R); below 5 hits, the half-width of the
/// z = 1 Wilson score interval instead.
double standard_error(std::int64_t hits, std::int64_t replicates);

/// VACUOUS iff bound >= 1; otherwise FAIL iff frequency - 3 stderr > bound.
Verdict judge(double frequency, double std_error, double bound);

SimulationReport estimate_deviation_probability(SimulationConfig const &cfg);

/// Per-replicate centred statistic (1/n) sum log P(X_i) + H_centre, in replicate order.
std::vector<double> replicate_deviations(SimulationConfig const &cfg);

struct MgfEstimate
{
  double mean{0.0};
  double std_error{0.0};
};

/// Sample mean of exp(lambda (log P(X) + H_mid)). Draws are split into fixed
/// blocks with derived seeds, so the result does not depend on `threads`.
MgfEstimate estimate_mgf(PmfModel const &model, EntropyInterval const &entropy, double lambda,
                         std::int64_t samples, std::uint64_t seed, unsigned threads = 1);

/// Raised by sweep() when a config fails; carries the reports finished before it.
class SweepAborted : public Error
{
public:
  SweepAborted(std::string const &what, std::vector<SimulationReport> partial,
               std::exception_ptr cause)
    : Error(what)
    , partial_(std::move(partial))
    , cause_(std::move(cause))
  {}

  std::vector<SimulationReport> const &partial() const noexcept
  {
    return partial_;
  }

  /// The exception that stopped the sweep.
  std::exception_ptr cause() const noexcept
  {
    return cause_;
  }

private:
  std::vector<SimulationReport> partial_;
  std::exception_ptr            cause_;
};

/// Runs every config in order; config i is seeded with derive_seed(base_seed, i).
/// `sink` sees each report as soon as it is finished.
std::vector<SimulationReport> sweep(std::span<SimulationConfig const> cfgs, std::uint64_t base_seed,
                                    std::function<void(SimulationReport const &)> const &sink = {});

struct VerdictSummary
{
  std::vector<Verdict> verdicts;
  int                  pass{0};
  int                  vacuous{0};
  int                  fail{0};

  Verdict overall() const noexcept
  {
    return fail > 0 ? Verdict::kFail : (pass > 0 ? Verdict::kPass : Verdict::kVacuous);
  }
};

/// Re-derives each verdict from the stored fields. Throws IntegrityError when
/// frequency, stderr or a stored verdict disagree with the counts.
VerdictSummary verify_bound(SimulationReport const &report);

std::string    csv_header();
std::string    to_csv(std::span<SimulationReport const> reports);
nlohmann::json to_json(SimulationReport const &report);

}  // namespace entbound
