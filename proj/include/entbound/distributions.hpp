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
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace entbound {

/// Largest index any certified computation may touch.
inline constexpr std::int64_t kIndexCap = 1'000'000'000;

/// Asserts p_k <= c0 * k^{-alpha} for every k > k0.
struct PowerLawTail
{
  std::int64_t k0{1};
  double       c0{1.0};
  double       alpha{2.0};

  bool operator==(PowerLawTail const &) const = default;
};

/// Asserts p_{k+1} / p_k <= q for every k >= k0.
struct RatioTail
{
  std::int64_t k0{1};
  double       q{0.5};

  bool operator==(RatioTail const &) const = default;
};

using TailCertificate = std::variant<PowerLawTail, RatioTail>;

std::string to_string(TailCertificate const &cert);

// Families. Outcomes are 1-based; count-valued families map outcome k to count k - 1.

struct Poisson
{
  double rate;
};

struct Geometric
{
  double p;  ///< success probability, p_k = p (1-p)^{k-1}
};

struct NegativeBinomial
{
  double size;
  double p;  ///< success probability, count j has mass G(j+size)/(G(size) j!) p^size (1-p)^j
};

struct Zeta
{
  double exponent;
};

struct Tabulated
{
  std::vector<double>            masses;
  std::optional<TailCertificate> tail;
};

/**
 * A discrete distribution on {1, 2, ...}. Immutable once built; the factory
 * functions validate every family invariant and throw DomainError otherwise.
 */
class PmfModel
{
public:
  using Family = std::variant<Poisson, Geometric, NegativeBinomial, Zeta, Tabulated>;

  static PmfModel poisson(double rate);
  static PmfModel geometric(double p);
  static PmfModel negative_binomial(double size, double p);
  static PmfModel zeta(double exponent);
  static PmfModel tabulated(std::vector<double> masses, std::optional<TailCertificate> tail = {});

  Family const &family() const noexcept
  {
    return family_;
  }

  /// Canonical model-spec text, e.g. "poisson:1".
  std::string name() const;

  /// log p_k in nats. Throws DomainError for k < 1 and MassUnknownError for
  /// tabulated indices whose mass is not determined by the table.
  double log_pmf(std::int64_t k) const;

  /// Number of leading indices with a known mass (the table length for
  /// tabulated models, kIndexCap otherwise).
  std::int64_t known_terms() const noexcept;

  /// True when a tabulated model lists its full mass, so every index past the
  /// table has probability zero.
  bool finite_support() const noexcept;

  bool is_tabulated() const noexcept
  {
    return std::holds_alternative<Tabulated>(family_);
  }

private:
  explicit PmfModel(Family family);

  Family family_;
  double log_norm_{0.0};  // -log zeta(s) for Zeta, lgamma(size) for NegativeBinomial
  double table_mass_{0.0};
};

inline double log_pmf(PmfModel const &model, std::int64_t k)
{
  return model.log_pmf(k);
}

/// Certificate dominating the model's tail. Throws MissingCertificateError for
/// tabulated models that carry none.
TailCertificate tail_certificate(PmfModel const &model);

/// Checks the certificate at `probes` pseudo-random indices in (k0, k0 + 10^6]
/// (restricted to known masses for tabulated models).
bool spot_check(PmfModel const &model, TailCertificate const &cert, int probes = 100,
                std::uint64_t seed = 0x5eed);

/**
 * Upper bound on sum_{k > K} p_k^s, from exact terms up to the certificate's
 * anchor followed by the certificate's envelope. Throws DomainError when the
 * envelope diverges (alpha * s <= 1).
 */
double tail_power_bound(PmfModel const &model, TailCertificate const &cert, std::int64_t K,
                        double s);

/// Builds a tabulated model from {"probs": [...], "tail": {...}}.
PmfModel tabulated_from_json(nlohmann::json const &doc);
PmfModel load_tabulated(std::filesystem::path const &path);

nlohmann::json to_json(TailCertificate const &cert);
TailCertificate tail_from_json(nlohmann::json const &doc);

}  // namespace entbound
