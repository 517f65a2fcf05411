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

#include "entbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "entbound/errors.hpp"
#include "entbound/summation.hpp"

namespace entbound {
namespace {

void require_n(std::int64_t n)
{
  if (n < 1)
  {
    throw DomainError("sample size n must be >= 1, got " + std::to_string(n));
  }
}

void require_eps(double eps)
{
  if (!(eps > 0.0) || std::isnan(eps))
  {
    throw DomainError("eps must be > 0");
  }
}

double log_two_over(double delta)
{
  if (!(delta > 0.0 && delta < 2.0))
  {
    throw DomainError("delta must lie in (0, 2)");
  }
  return std::log(2.0 / delta);
}

}  // namespace

BernsteinConstants bernstein_constants(MomentCertificate const &mcert)
{
  double const r = mcert.r;
  return BernsteinConstants{2.0 * mcert.c_r / (kSqrtPi * r * r), 2.0 / r, mcert};
}

double deviation_bound(BernsteinConstants const &c, std::int64_t n, double eps)
{
  require_n(n);
  require_eps(eps);
  // n eps^2 / (c1 + c2 eps), arranged so that neither huge nor tiny eps overflows.
  double const exponent = static_cast<double>(n) * eps / (c.c1 / eps + c.c2);
  return 2.0 * std::exp(-exponent);
}

double mgf_log_bound(MomentCertificate const &mcert, double lambda)
{
  double const ratio = std::abs(lambda) / mcert.r;
  if (!(ratio < 1.0))
  {
    throw DomainError("lambda outside MGF radius: |lambda| must be < r = " + std::to_string(mcert.r));
  }
  return mcert.c_r * ratio * ratio / (1.0 - ratio) / (2.0 * kSqrtPi);
}

ValueInterval mgf_exact(PmfModel const &model, MomentCertificate const &mcert,
                        EntropyInterval const &entropy, double lambda, double tol)
{
  if (!(std::abs(lambda) < mcert.r))
  {
    throw DomainError("lambda outside MGF radius: |lambda| must be < r");
  }
  if (!(tol > 0.0))
  {
    throw DomainError("mgf tolerance must be positive");
  }
  if (lambda == 0.0)
  {
    return ValueInterval{1.0, 1.0};
  }

  auto const         cert  = tail_certificate(model);
  double const       s     = 1.0 + lambda;
  std::int64_t const known = model.known_terms();

  if (!model.finite_support() && tail_power_bound(model, cert, std::min(kIndexCap, known), s) > tol)
  {
    throw ResourceLimitError("mgf tolerance unreachable within the index budget");
  }

  CompensatedSum<> partial;
  std::int64_t     done = 0;
  double           remainder;
  for (std::int64_t K = 64;; K = std::min(2 * K, kIndexCap))
  {
    std::int64_t const end = std::min(K, known);
    for (std::int64_t k = done + 1; k <= end; ++k)
    {
      partial += std::exp(s * model.log_pmf(k));
    }
    done      = end;
    remainder = tail_power_bound(model, cert, end, s);
    if (remainder <= tol)
    {
      break;
    }
    if (end == known || K == kIndexCap)
    {
      throw ResourceLimitError("mgf tolerance unreachable within the index budget");
    }
  }

  double const series_lo = partial.value();
  double const series_hi = series_lo + remainder;
  double const h_small   = lambda > 0.0 ? entropy.lower : entropy.upper;
  double const h_large   = lambda > 0.0 ? entropy.upper : entropy.lower;
  // Widen by a few ulps so rounding in exp/log cannot push the true value out.
  double const round = 16.0 * std::numeric_limits<double>::epsilon();
  return ValueInterval{series_lo * std::exp(lambda * h_small) * (1.0 - round),
                       series_hi * std::exp(lambda * h_large) * (1.0 + round)};
}

double chernoff_lambda_star(MomentCertificate const &mcert, std::int64_t n, double t)
{
  require_n(n);
  if (!(t > 0.0))
  {
    throw DomainError("t must be > 0");
  }
  double const r      = mcert.r;
  double const a      = static_cast<double>(n) * mcert.c_r / (kSqrtPi * r * r);
  double const lambda = t / (a + t / r);
  return lambda < r ? lambda : std::nextafter(r, 0.0);
}

std::int64_t min_sample_size(BernsteinConstants const &c, double eps, double delta)
{
  require_eps(eps);
  double const L    = log_two_over(delta);
  double const need = (c.c1 / eps + c.c2) * L / eps;
  if (!(need < 1e18))
  {
    throw ResourceLimitError("required sample size overflows");
  }
  auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(need)));
  // The closed form can be off by one after rounding; settle on the exact minimum.
  while (deviation_bound(c, n, eps) > delta)
  {
    ++n;
  }
  while (n > 1 && deviation_bound(c, n - 1, eps) <= delta)
  {
    --n;
  }
  return n;
}

double epsilon_for(BernsteinConstants const &c, std::int64_t n, double delta)
{
  require_n(n);
  double const L  = log_two_over(delta);
  double const nn = static_cast<double>(n);
  double const b  = c.c2 * L;
  return (b + std::sqrt(b * b + 4.0 * nn * c.c1 * L)) / (2.0 * nn);
}

double heterogeneous_deviation_bound(std::span<MomentCertificate const> mcerts, std::int64_t n,
                                     double eps)
{
  require_n(n);
  if (mcerts.size() != static_cast<std::size_t>(n))
  {
    throw DomainError("heterogeneous bound needs exactly one certificate per draw");
  }
  double const r = mcerts.front().r;
  // Mean taken relative to the first entry, so equal constants reproduce it exactly.
  CompensatedSum<> offset;
  for (auto const &m : mcerts)
  {
    if (m.r != r)
    {
      throw DomainError("heterogeneous bound needs certificates sharing one r");
    }
    offset += m.c_r - mcerts.front().c_r;
  }
  MomentCertificate pooled = mcerts.front();
  pooled.c_r               = mcerts.front().c_r + offset.value() / static_cast<double>(n);
  return deviation_bound(bernstein_constants(pooled), n, eps);
}

MomentCertificate certify_best_r(PmfModel const &model, double slack, double target_eps)
{
  require_eps(target_eps);
  double const r_max = admissible_r_interval(model).r_max;

  std::optional<MomentCertificate> best;
  double                           best_value = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 21; ++i)
  {
    double const r = r_max * i / 22.0;
    try
    {
      auto const   mcert = certify(model, r, slack);
      auto const   c     = bernstein_constants(mcert);
      double const value = c.c1 + c.c2 * target_eps;
      if (value < best_value)
      {
        best_value = value;
        best       = mcert;
      }
    }
    catch (ResourceLimitError const &)
    {
    }
  }
  if (!best)
  {
    throw ResourceLimitError("no grid value of r can be certified within the index budget");
  }
  return *best;
}

}  // namespace entbound
