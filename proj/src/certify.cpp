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

#include "entbound/certify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "entbound/errors.hpp"
#include "entbound/summation.hpp"

namespace entbound {
namespace {

std::string fmt(double x)
{
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

void require_positive_eps(double eps)
{
  if (!(eps > 0.0) || !std::isfinite(eps))
  {
    throw DomainError("tolerance must be positive and finite, got " + fmt(eps));
  }
}

void require_admissible(double r, double r_max)
{
  if (!(r > 0.0 && r < r_max))
  {
    throw InadmissibleRError("inadmissible r = " + fmt(r) + ": admissible interval is (0, " +
                                 fmt(r_max) + ")",
                             r, r_max);
  }
}

// log p_k for a ratio-certified model, extrapolating past an incomplete table
// with the certificate's envelope (an upper bound, used only for stopping tests).
double log_mass_or_envelope(PmfModel const &model, RatioTail const &cert, std::int64_t k)
{
  std::int64_t const known = model.known_terms();
  if (k <= known)
  {
    return model.log_pmf(k);
  }
  if (model.finite_support())
  {
    return -std::numeric_limits<double>::infinity();
  }
  return model.log_pmf(known) + static_cast<double>(k - known) * std::log(cert.q);
}

}  // namespace

std::string to_string(Provenance p)
{
  return p == Provenance::kPowerLaw ? "powerlaw" : "ratio";
}

AdmissibleInterval admissible_r_interval(TailCertificate const &cert)
{
  if (auto const *t = std::get_if<PowerLawTail>(&cert))
  {
    return AdmissibleInterval{(t->alpha - 1.0) / t->alpha};
  }
  return AdmissibleInterval{1.0};
}

AdmissibleInterval admissible_r_interval(PmfModel const &model)
{
  return admissible_r_interval(tail_certificate(model));
}

double default_r(PmfModel const &model)
{
  auto const cert = tail_certificate(model);
  if (std::holds_alternative<PowerLawTail>(cert))
  {
    return 0.5 * admissible_r_interval(cert).r_max;
  }
  return 0.5;
}

std::int64_t powerlaw_truncation_index(PowerLawTail const &cert, double r, double eps)
{
  require_admissible(r, (cert.alpha - 1.0) / cert.alpha);
  require_positive_eps(eps);

  double const beta  = cert.alpha * (1.0 - r) - 1.0;
  double const bound = std::pow(eps * beta / cert.c0, -1.0 / beta);
  if (!(bound <= static_cast<double>(kIndexCap)))
  {
    throw ResourceLimitError("tolerance too tight: truncation index " + fmt(bound) +
                             " exceeds the 1e9 budget");
  }
  auto const k1 = std::max(cert.k0, static_cast<std::int64_t>(std::ceil(bound)));
  if (k1 > kIndexCap)
  {
    throw ResourceLimitError("tolerance too tight: truncation index exceeds the 1e9 budget");
  }
  return k1;
}

MomentCertificate certify_moment_powerlaw(PmfModel const &model, PowerLawTail const &cert, double r,
                                          double eps)
{
  std::int64_t const k1 = powerlaw_truncation_index(cert, r, eps);
  std::int64_t const K  = std::min(k1, model.known_terms());
  double const       s  = 1.0 - r;

  CompensatedSum<> partial;
  for (std::int64_t k = 1; k <= K; ++k)
  {
    partial += std::exp(s * model.log_pmf(k));
  }
  double const tau   = tail_power_bound(model, cert, K, s);
  double const slack = std::max(eps, tau);
  return MomentCertificate{r, partial.value() + slack, slack, K, Provenance::kPowerLaw};
}

MomentCertificate certify_moment_ratio(PmfModel const &model, RatioTail const &cert, double r,
                                       double eps)
{
  require_admissible(r, 1.0);
  require_positive_eps(eps);

  double const s     = 1.0 - r;
  double const denom = -std::expm1(s * std::log(cert.q));  // 1 - q^s
  std::int64_t const known = model.known_terms();

  CompensatedSum<> partial;
  for (std::int64_t k = 1; k < cert.k0; ++k)
  {
    partial += std::exp(s * model.log_pmf(k));
  }
  double log_p = model.log_pmf(cert.k0);
  for (std::int64_t m = cert.k0;; ++m)
  {
    partial += std::exp(s * log_p);
    double const log_next = log_mass_or_envelope(model, cert, m + 1);
    if (std::exp(s * log_next) / denom <= eps)
    {
      return MomentCertificate{r, partial.value() + eps, eps, m, Provenance::kRatio};
    }
    if (m >= known)
    {
      throw ResourceLimitError("tolerance unreachable with the tabulated masses");
    }
    if (m >= kIndexCap)
    {
      throw ResourceLimitError("tolerance too tight: ratio truncation exceeds the 1e9 budget");
    }
    log_p = log_next;
  }
}

MomentCertificate certify(PmfModel const &model, std::optional<double> r, double eps)
{
  auto const   cert    = tail_certificate(model);
  double const chosen  = r.value_or(default_r(model));
  if (auto const *t = std::get_if<PowerLawTail>(&cert))
  {
    return certify_moment_powerlaw(model, *t, chosen, eps);
  }
  return certify_moment_ratio(model, std::get<RatioTail>(cert), chosen, eps);
}

double power_sum_partial(PmfModel const &model, double r, std::int64_t K)
{
  if (!(r > 0.0 && r < 1.0))
  {
    throw DomainError("power_sum_partial needs r in (0, 1), got " + fmt(r));
  }
  if (K < 1)
  {
    throw DomainError("power_sum_partial needs K >= 1");
  }
  double const     s = 1.0 - r;
  CompensatedSum<> acc;
  for (std::int64_t k = 1, end = std::min(K, model.known_terms()); k <= end; ++k)
  {
    acc += std::exp(s * model.log_pmf(k));
  }
  return acc.value();
}

EntropyInterval entropy_interval(PmfModel const &model, MomentCertificate const &mcert, double tol)
{
  require_positive_eps(tol);
  auto const         cert  = tail_certificate(model);
  double const       s     = 1.0 - mcert.r;
  double const       scale = 1.0 / (std::numbers::e * mcert.r);
  std::int64_t const known = model.known_terms();

  // The envelope part of the remainder is cheap to evaluate, so an unreachable
  // tolerance is detected before any summation.
  if (!model.finite_support() &&
      tail_power_bound(model, cert, std::min(kIndexCap, known), s) * scale > tol)
  {
    throw ResourceLimitError("entropy tolerance " + fmt(tol) +
                             " unreachable within the index budget");
  }

  CompensatedSum<> lower;
  std::int64_t     done = 0;
  for (std::int64_t K = 64;; K = std::min(2 * K, kIndexCap))
  {
    std::int64_t const end = std::min(K, known);
    for (std::int64_t k = done + 1; k <= end; ++k)
    {
      double const log_p = model.log_pmf(k);
      lower += -std::exp(log_p) * log_p;
    }
    done = end;

    // Outward rounding: each term carries a few ulps from exp/log, so widen
    // both ends by a small multiple of machine epsilon.
    double const lo        = lower.value();
    double const margin    = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, lo);
    double const remainder = tail_power_bound(model, cert, end, s) * scale;
    if (remainder + 2.0 * margin <= tol)
    {
      return EntropyInterval{lo - margin, lo + remainder + margin, tol};
    }
    if (end == known || K == kIndexCap)
    {
      throw ResourceLimitError("entropy tolerance " + fmt(tol) +
                               " unreachable within the index budget");
    }
  }
}

double entropy_upper_coarse(MomentCertificate const &mcert)
{
  return mcert.c_r / (std::numbers::e * mcert.r);
}

nlohmann::json to_json(MomentCertificate const &mcert)
{
  return nlohmann::json{{"r", mcert.r},
                        {"C_r", mcert.c_r},
                        {"slack", mcert.slack},
                        {"truncation_index", mcert.truncation_index},
                        {"provenance", to_string(mcert.provenance)}};
}

MomentCertificate certificate_from_json(nlohmann::json const &doc)
{
  MomentCertificate out;
  std::string       provenance;
  try
  {
    out.r                = doc.at("r").get<double>();
    out.c_r              = doc.at("C_r").get<double>();
    out.slack            = doc.at("slack").get<double>();
    out.truncation_index = doc.at("truncation_index").get<std::int64_t>();
    provenance           = doc.at("provenance").get<std::string>();
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
  if (provenance == "powerlaw")
  {
    out.provenance = Provenance::kPowerLaw;
  }
  else if (provenance == "ratio")
  {
    out.provenance = Provenance::kRatio;
  }
  else
  {
    throw ParseError("unknown certificate provenance \"" + provenance + "\"");
  }
  if (!(out.r > 0.0 && out.r < 1.0) || !(out.c_r >= 0.0) || !(out.slack >= 0.0) ||
      out.truncation_index < 1)
  {
    throw ParseError("certificate fields out of range");
  }
  return out;
}

}  // namespace entbound
