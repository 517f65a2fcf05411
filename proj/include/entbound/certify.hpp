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
#include <optional>
#include <string>

#include "entbound/distributions.hpp"
#include "json.hpp"

namespace entbound {

enum class Provenance
{
  kPowerLaw,
  kRatio,
};

std::string to_string(Provenance p);

/**
 * A verified pair (r, C_r) with sum_k p_k^{1-r} <= C_r <= sum_k p_k^{1-r} + slack.
 *
 * `truncation_index` is the number of exact terms in C_r; the rest of C_r is
 * the slack that covers the certified tail.
 */
struct MomentCertificate
{
  double       r{0.5};
  double       c_r{0.0};
  double       slack{0.0};
  std::int64_t truncation_index{1};
  Provenance   provenance{Provenance::kRatio};

  bool operator==(MomentCertificate const &) const = default;
};

/// Certified bracket on the Shannon entropy in nats.
struct EntropyInterval
{
  double lower{0.0};
  double upper{0.0};
  double tolerance{0.0};

  double midpoint() const noexcept
  {
    return 0.5 * (lower + upper);
  }
  bool contains(double h) const noexcept
  {
    return lower <= h && h <= upper;
  }
};

/// The open interval (0, r_max) of r values for which the moment series converges.
struct AdmissibleInterval
{
  double r_max{1.0};

  bool contains(double r) const noexcept
  {
    return r > 0.0 && r < r_max;
  }
};

AdmissibleInterval admissible_r_interval(PmfModel const &model);
AdmissibleInterval admissible_r_interval(TailCertificate const &cert);

/// Default choice inside the admissible interval: half of r_max for power-law
/// tails, 1/2 for ratio tails.
double default_r(PmfModel const &model);

/**
 * Truncation point for a power-law tail:
 *   k1 = max{k0, ceil((eps * beta / c0)^(-1/beta))},  beta = alpha (1 - r) - 1.
 * Throws InadmissibleRError outside (0, (alpha-1)/alpha) and ResourceLimitError
 * when k1 exceeds kIndexCap.
 */
std::int64_t powerlaw_truncation_index(PowerLawTail const &cert, double r, double eps);

/**
 * C_r for a power-law-dominated tail. Sums p_k^{1-r} exactly up to k1 and adds
 * max(eps, tau), where tau = c0^{1-r} k1^{-beta} / beta bounds the remainder;
 * for c0 >= 1, tau <= eps and the slack is exactly eps.
 */
MomentCertificate certify_moment_powerlaw(PmfModel const &model, PowerLawTail const &cert, double r,
                                          double eps);

/// C_r for a geometric-ratio tail: stops at the first m >= k0 whose geometric
/// envelope p_{m+1}^{1-r} / (1 - q^{1-r}) fits inside eps.
MomentCertificate certify_moment_ratio(PmfModel const &model, RatioTail const &cert, double r,
                                       double eps);

/// Dispatches on the model's tail certificate; `r` defaults to default_r(model).
MomentCertificate certify(PmfModel const &model, std::optional<double> r, double eps);

/// sum_{k <= K} p_k^{1-r}; a lower bound on the full series.
double power_sum_partial(PmfModel const &model, double r, std::int64_t K);

/// Entropy bracket: exact terms up to a doubling truncation K, plus the tail
/// bound sum_{k > K} p_k^{1-r} / (e r).
EntropyInterval entropy_interval(PmfModel const &model, MomentCertificate const &mcert, double tol);

/// C_r / (e r).
double entropy_upper_coarse(MomentCertificate const &mcert);

nlohmann::json    to_json(MomentCertificate const &mcert);
MomentCertificate certificate_from_json(nlohmann::json const &doc);

}  // namespace entbound
