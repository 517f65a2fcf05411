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
#include <numbers>
#include <optional>
#include <span>

#include "entbound/certify.hpp"
#include "entbound/distributions.hpp"

namespace entbound {

inline constexpr double kSqrtPi = 1.772453850905516027298167483341145182798;

/// Denominator constants of the deviation bound 2 exp(-n eps^2 / (c1 + c2 eps)).
struct BernsteinConstants
{
  double            c1{0.0};  ///< 2 C_r / (sqrt(pi) r^2)
  double            c2{0.0};  ///< 2 / r
  MomentCertificate source{};
};

BernsteinConstants bernstein_constants(MomentCertificate const &mcert);

/// 2 exp(-n eps^2 / (c1 + c2 eps)). Values above 1 are returned as they are.
double deviation_bound(BernsteinConstants const &c, std::int64_t n, double eps);

inline bool is_vacuous(double bound) noexcept
{
  return bound >= 1.0;
}

/// log of the envelope exp(C_r lambda^2 / (r^2 (1 - |lambda|/r) 2 sqrt(pi))); requires |lambda| < r.
double mgf_log_bound(MomentCertificate const &mcert, double lambda);

struct ValueInterval
{
  double lower{0.0};
  double upper{0.0};

  bool contains(double x) const noexcept
  {
    return lower <= x && x <= upper;
  }
};

/// Certified bracket on E[exp(lambda (log P(X) + H))].
ValueInterval mgf_exact(PmfModel const &model, MomentCertificate const &mcert,
                        EntropyInterval const &entropy, double lambda, double tol);

/// lambda = t / (n C_r / (sqrt(pi) r^2) + t / r), always inside (0, r).
double chernoff_lambda_star(MomentCertificate const &mcert, std::int64_t n, double t);

/// Smallest n with deviation_bound(c, n, eps) <= delta. delta may be anywhere in (0, 2).
std::int64_t min_sample_size(BernsteinConstants const &c, double eps, double delta);

/// Positive root eps of n eps^2 - c2 L eps - c1 L = 0, L = log(2/delta).
double epsilon_for(BernsteinConstants const &c, std::int64_t n, double delta);

/// Bound for independent, non-identical draws; the certificates must share r
/// and there must be one per draw.
double heterogeneous_deviation_bound(std::span<MomentCertificate const> mcerts, std::int64_t n,
                                     double eps);

/// Grid search over 21 interior points of the admissible interval, keeping the
/// r that minimises c1 + c2 * target_eps. Grid points whose certification hits
/// the index budget are skipped.
MomentCertificate certify_best_r(PmfModel const &model, double slack, double target_eps);

}  // namespace entbound
