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

#include "entbound/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "entbound/errors.hpp"
#include "entbound/special.hpp"
#include "entbound/summation.hpp"

namespace entbound {
namespace {

constexpr double kTableTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double x)
{
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

bool in_open_unit(double x)
{
  return x > 0.0 && x < 1.0;
}

void validate_tail(TailCertificate const &cert)
{
  std::visit(Overloaded{
                 [](PowerLawTail const &t) {
                   if (t.k0 < 1 || !(t.c0 > 0.0) || !std::isfinite(t.c0) || !(t.alpha > 1.0) ||
                       !std::isfinite(t.alpha))
                   {
                     throw DomainError("power-law certificate needs k0 >= 1, c0 > 0, alpha > 1");
                   }
                 },
                 [](RatioTail const &t) {
                   if (t.k0 < 1 || !in_open_unit(t.q))
                   {
                     throw DomainError("ratio certificate needs k0 >= 1 and q in (0, 1)");
                   }
                 },
             },
             cert);
}

// Relative slack used when comparing log-masses against a certificate envelope.
double envelope_tolerance(double log_p)
{
  return 1e-12 * (1.0 + std::abs(log_p));
}

}  // namespace

std::string to_string(TailCertificate const &cert)
{
  return std::visit(Overloaded{
                        [](PowerLawTail const &t) {
                          return "PowerLaw{k0=" + std::to_string(t.k0) + ", c0=" + fmt(t.c0) +
                                 ", alpha=" + fmt(t.alpha) + "}";
                        },
                        [](RatioTail const &t) {
                          return "GeometricRatio{k0=" + std::to_string(t.k0) + ", q=" + fmt(t.q) +
                                 "}";
                        },
                    },
                    cert);
}

PmfModel::PmfModel(Family family)
  : family_(std::move(family))
{}

PmfModel PmfModel::poisson(double rate)
{
  if (!(rate > 0.0) || !std::isfinite(rate))
  {
    throw DomainError("poisson rate must be positive and finite, got " + fmt(rate));
  }
  return PmfModel(Poisson{rate});
}

PmfModel PmfModel::geometric(double p)
{
  if (!in_open_unit(p))
  {
    throw DomainError("geometric success probability must lie in (0, 1), got " + fmt(p));
  }
  return PmfModel(Geometric{p});
}

PmfModel PmfModel::negative_binomial(double size, double p)
{
  if (!(size > 0.0) || !std::isfinite(size))
  {
    throw DomainError("negative binomial size must be positive and finite, got " + fmt(size));
  }
  if (!in_open_unit(p))
  {
    throw DomainError("negative binomial success probability must lie in (0, 1), got " + fmt(p));
  }
  PmfModel model(NegativeBinomial{size, p});
  model.log_norm_ = special::log_gamma(size);
  return model;
}

PmfModel PmfModel::zeta(double exponent)
{
  if (!(exponent > 1.0) || !std::isfinite(exponent))
  {
    throw DomainError("zeta exponent must exceed 1, got " + fmt(exponent));
  }
  PmfModel model(Zeta{exponent});
  model.log_norm_ = -std::log(special::riemann_zeta(exponent));
  return model;
}

PmfModel PmfModel::tabulated(std::vector<double> masses, std::optional<TailCertificate> tail)
{
  if (masses.empty())
  {
    throw DomainError("tabulated model needs at least one mass");
  }
  CompensatedSum<> total;
  for (std::size_t i = 0; i < masses.size(); ++i)
  {
    double const p = masses[i];
    if (!(p > 0.0) || p > 1.0)
    {
      throw DomainError("tabulated mass p_" + std::to_string(i + 1) + " = " + fmt(p) +
                        " is outside (0, 1]");
    }
    total += p;
  }
  double const sum = total.value();
  if (sum > 1.0 + kTableTolerance)
  {
    throw DomainError("tabulated masses sum to " + fmt(sum) + " > 1");
  }
  if (tail)
  {
    validate_tail(*tail);
  }

  auto const len = static_cast<std::int64_t>(masses.size());
  if (sum < 1.0 - kTableTolerance)
  {
    if (!tail)
    {
      throw MissingCertificateError("tabulated masses sum to " + fmt(sum) +
                                    " < 1 and no tail certificate was given");
    }
    double const missing = 1.0 - sum;
    std::visit(Overloaded{
                   [&](PowerLawTail const &t) {
                     if (t.k0 > len)
                     {
                       throw DomainError("tail certificate k0 must not exceed the table length");
                     }
                     double const envelope = t.c0 * std::pow(static_cast<double>(t.k0), 1.0 - t.alpha) /
                                             (t.alpha - 1.0);
                     if (envelope < missing)
                     {
                       throw DomainError("power-law certificate cannot cover the missing mass " +
                                         fmt(missing));
                     }
                   },
                   [&](RatioTail const &t) {
                     if (t.k0 > len)
                     {
                       throw DomainError("tail certificate k0 must not exceed the table length");
                     }
                     double const envelope = masses.back() * t.q / (1.0 - t.q);
                     if (envelope < missing)
                     {
                       throw DomainError("ratio certificate cannot cover the missing mass " +
                                         fmt(missing));
                     }
                   },
               },
               *tail);
  }

  PmfModel model(Tabulated{std::move(masses), tail});
  model.table_mass_ = sum;
  if (tail && !spot_check(model, *tail, 1000))
  {
    throw DomainError("tail certificate " + to_string(*tail) + " is violated by the listed masses");
  }
  return model;
}

std::string PmfModel::name() const
{
  return std::visit(Overloaded{
                        [](Poisson const &f) { return "poisson:" + fmt(f.rate); },
                        [](Geometric const &f) { return "geometric:" + fmt(f.p); },
                        [](NegativeBinomial const &f) {
                          return "negbinomial:" + fmt(f.size) + "," + fmt(f.p);
                        },
                        [](Zeta const &f) { return "zeta:" + fmt(f.exponent); },
                        [](Tabulated const &f) {
                          return "tabulated[" + std::to_string(f.masses.size()) + "]";
                        },
                    },
                    family_);
}

double PmfModel::log_pmf(std::int64_t k) const
{
  if (k < 1)
  {
    throw DomainError("outcome index must be >= 1, got " + std::to_string(k));
  }
  auto const x = static_cast<double>(k);
  return std::visit(
      Overloaded{
          [&](Poisson const &f) {
            double const j = x - 1.0;
            return -f.rate + j * std::log(f.rate) - special::log_gamma(j + 1.0);
          },
          [&](Geometric const &f) { return std::log(f.p) + (x - 1.0) * std::log1p(-f.p); },
          [&](NegativeBinomial const &f) {
            double const j = x - 1.0;
            return special::log_gamma(j + f.size) - log_norm_ - special::log_gamma(j + 1.0) +
                   f.size * std::log(f.p) + j * std::log1p(-f.p);
          },
          [&](Zeta const &f) { return -f.exponent * std::log(x) + log_norm_; },
          [&](Tabulated const &f) {
            if (k <= static_cast<std::int64_t>(f.masses.size()))
            {
              return std::log(f.masses[static_cast<std::size_t>(k - 1)]);
            }
            if (f.tail && finite_support())
            {
              return -std::numeric_limits<double>::infinity();
            }
            throw MassUnknownError("mass unknown: p_" + std::to_string(k) +
                                   " lies beyond the tabulated range of " +
                                   std::to_string(f.masses.size()));
          },
      },
      family_);
}

std::int64_t PmfModel::known_terms() const noexcept
{
  if (auto const *t = std::get_if<Tabulated>(&family_))
  {
    return static_cast<std::int64_t>(t->masses.size());
  }
  return kIndexCap;
}

bool PmfModel::finite_support() const noexcept
{
  return is_tabulated() && table_mass_ >= 1.0 - kTableTolerance;
}

TailCertificate tail_certificate(PmfModel const &model)
{
  return std::visit(
      Overloaded{
          [](Poisson const &f) -> TailCertificate {
            auto const k0 = static_cast<std::int64_t>(std::ceil(2.0 * f.rate));
            return RatioTail{std::max<std::int64_t>(1, k0), 0.5};
          },
          [](Geometric const &f) -> TailCertificate { return RatioTail{1, 1.0 - f.p}; },
          [](NegativeBinomial const &f) -> TailCertificate {
            // Ratio p_{k+1}/p_k = (k - 1 + size) / k * (1 - p) is monotone in k and tends to 1 - p.
            double const q     = 1.0 - 0.5 * f.p;
            auto const   ratio = [&](std::int64_t k) {
              return (static_cast<double>(k) - 1.0 + f.size) / static_cast<double>(k) *
                     (1.0 - f.p);
            };
            if (f.size <= 1.0)
            {
              return RatioTail{1, q};
            }
            double const guess = std::ceil(2.0 * (f.size - 1.0) * (1.0 - f.p) / f.p);
            if (guess > static_cast<double>(kIndexCap))
            {
              throw ResourceLimitError("negative binomial ratio certificate needs k0 beyond 1e9");
            }
            auto k0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(guess));
            while (ratio(k0) > q)
            {
              ++k0;
            }
            while (k0 > 1 && ratio(k0 - 1) <= q)
            {
              --k0;
            }
            return RatioTail{k0, q};
          },
          [&](Zeta const &f) -> TailCertificate {
            return PowerLawTail{1, std::exp(model.log_pmf(1)), f.exponent};
          },
          [](Tabulated const &f) -> TailCertificate {
            if (!f.tail)
            {
              throw MissingCertificateError("no certificate available: tabulated model has no tail certificate");
            }
            return *f.tail;
          },
      },
      model.family());
}

bool spot_check(PmfModel const &model, TailCertificate const &cert, int probes, std::uint64_t seed)
{
  std::mt19937_64 engine(seed);
  std::int64_t const known = model.known_terms();
  // The first half of the probes walks up from the anchor, where violations of
  // a too-optimistic certificate tend to sit; the rest are spread uniformly.
  auto const probe = [&](int i, std::int64_t lo, std::int64_t hi,
                         std::uniform_int_distribution<std::int64_t> &pick) {
    return (i < probes / 2 && lo + i <= hi) ? lo + i : pick(engine);
  };

  return std::visit(
      Overloaded{
          [&](PowerLawTail const &t) {
            std::int64_t const lo = t.k0 + 1;
            std::int64_t const hi = std::min(t.k0 + 1'000'000, known);
            if (hi < lo)
            {
              return true;
            }
            std::uniform_int_distribution<std::int64_t> pick(lo, hi);
            double const log_c0 = std::log(t.c0);
            for (int i = 0; i < probes; ++i)
            {
              std::int64_t const k     = probe(i, lo, hi, pick);
              double const       log_p = model.log_pmf(k);
              double const envelope    = log_c0 - t.alpha * std::log(static_cast<double>(k));
              if (log_p > envelope + envelope_tolerance(log_p))
              {
                return false;
              }
            }
            return true;
          },
          [&](RatioTail const &t) {
            std::int64_t const lo = t.k0;
            std::int64_t const hi = std::min(t.k0 + 1'000'000, known - 1);
            if (hi < lo)
            {
              return true;
            }
            std::uniform_int_distribution<std::int64_t> pick(lo, hi);
            double const log_q = std::log(t.q);
            for (int i = 0; i < probes; ++i)
            {
              std::int64_t const k      = probe(i, lo, hi, pick);
              double const       log_p  = model.log_pmf(k);
              double const       log_p1 = model.log_pmf(k + 1);
              if (log_p1 - log_p > log_q + envelope_tolerance(log_p1))
              {
                return false;
              }
            }
            return true;
          },
      },
      cert);
}

double tail_power_bound(PmfModel const &model, TailCertificate const &cert, std::int64_t K, double s)
{
  if (!(s > 0.0))
  {
    throw DomainError("tail power bound needs a positive exponent");
  }
  K = std::max<std::int64_t>(K, 0);
  std::int64_t const known = model.known_terms();

  // Exact terms over (from, to], clipped to the known masses.
  auto const exact = [&](std::int64_t from, std::int64_t to) {
    CompensatedSum<> acc;
    for (std::int64_t k = from + 1; k <= std::min(to, known); ++k)
    {
      acc += std::exp(s * model.log_pmf(k));
    }
    return acc.value();
  };

  if (model.finite_support())
  {
    return exact(K, known);
  }

  return std::visit(
      Overloaded{
          [&](PowerLawTail const &t) {
            double const beta = t.alpha * s - 1.0;
            if (!(beta > 0.0))
            {
              throw DomainError("power-law envelope diverges for exponent " + fmt(s) +
                                " (alpha * s <= 1)");
            }
            std::int64_t const anchor = std::max(K, t.k0);
            double const       envelope =
                std::exp(s * std::log(t.c0) - beta * std::log(static_cast<double>(anchor))) / beta;
            return exact(K, anchor) + envelope;
          },
          [&](RatioTail const &t) {
            std::int64_t const anchor = std::max(K + 1, t.k0);
            double const       log_q  = std::log(t.q);
            // Past the table, p_k <= p_known * q^(k - known).
            double const log_anchor = anchor <= known
                                          ? model.log_pmf(anchor)
                                          : model.log_pmf(known) +
                                                static_cast<double>(anchor - known) * log_q;
            double const envelope = std::exp(s * log_anchor) / (-std::expm1(s * log_q));
            return exact(K, anchor - 1) + envelope;
          },
      },
      cert);
}

nlohmann::json to_json(TailCertificate const &cert)
{
  return std::visit(Overloaded{
                        [](PowerLawTail const &t) {
                          return nlohmann::json{
                              {"type", "powerlaw"}, {"k0", t.k0}, {"c0", t.c0}, {"alpha", t.alpha}};
                        },
                        [](RatioTail const &t) {
                          return nlohmann::json{{"type", "ratio"}, {"k0", t.k0}, {"q", t.q}};
                        },
                    },
                    cert);
}

TailCertificate tail_from_json(nlohmann::json const &doc)
{
  try
  {
    auto const type = doc.at("type").get<std::string>();
    if (type == "powerlaw")
    {
      return PowerLawTail{doc.at("k0").get<std::int64_t>(), doc.at("c0").get<double>(),
                          doc.at("alpha").get<double>()};
    }
    if (type == "ratio")
    {
      return RatioTail{doc.at("k0").get<std::int64_t>(), doc.at("q").get<double>()};
    }
    throw ParseError("unknown tail type \"" + type + "\" (expected powerlaw or ratio)");
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("malformed tail certificate: ") + e.what());
  }
}

PmfModel tabulated_from_json(nlohmann::json const &doc)
{
  std::vector<double>            probs;
  std::optional<TailCertificate> tail;
  try
  {
    probs = doc.at("probs").get<std::vector<double>>();
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("tabulated document needs a numeric \"probs\" array: ") +
                     e.what());
  }
  if (doc.contains("tail") && !doc.at("tail").is_null())
  {
    tail = tail_from_json(doc.at("tail"));
  }
  return PmfModel::tabulated(std::move(probs), tail);
}

PmfModel load_tabulated(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ParseError("cannot open tabulated model file " + path.string());
  }
  nlohmann::json doc;
  try
  {
    in >> doc;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return tabulated_from_json(doc);
}

}  // namespace entbound
