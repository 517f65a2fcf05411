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

#include "entbound/sampler.hpp"

#include <cmath>
#include <string>

#include "entbound/errors.hpp"
#include "entbound/special.hpp"

namespace entbound {
namespace {

// Remaining mass below this cannot move a 64-bit uniform.
constexpr long double kNegligibleMass = 0x1p-64L;
constexpr double      kLogGate        = -41.0;  // ~1.6e-18
constexpr std::int64_t kMaxOutcome    = 1'000'000'000'000'000'000;

}  // namespace

std::uint64_t splitmix64(std::uint64_t &state) noexcept
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z               = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z               = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept
{
  std::uint64_t mixed = index;
  std::uint64_t state = base ^ splitmix64(mixed);
  return splitmix64(state);
}

Sampler::Sampler(PmfModel model, std::size_t cache_limit)
  : model_(std::move(model))
  , limit_(std::max<std::size_t>(cache_limit, 1))
{
  try
  {
    cert_ = tail_certificate(model_);
  }
  catch (MissingCertificateError const &)
  {
    // Complete tables sample fine without one.
  }
  if (model_.is_tabulated())
  {
    limit_ = static_cast<std::size_t>(model_.known_terms());
  }
  std::size_t const chunks = (limit_ + kChunkSize - 1) / kChunkSize;
  chunks_ = std::make_unique<std::unique_ptr<Entry[]>[]>(chunks);
}

Sampler::~Sampler() = default;

std::size_t Sampler::search(long double u, std::size_t n) const noexcept
{
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  while (lo < hi)
  {
    std::size_t const mid = lo + (hi - lo) / 2;
    if (u < at(mid).cdf)
    {
      hi = mid;
    }
    else
    {
      lo = mid + 1;
    }
  }
  return lo;
}

bool Sampler::exhausted_after(std::int64_t k, double log_p) const
{
  if (model_.is_tabulated() || !cert_ || log_p > kLogGate)
  {
    return false;
  }
  return tail_power_bound(model_, *cert_, k, 1.0) < static_cast<double>(kNegligibleMass);
}

void Sampler::push_locked() const
{
  std::size_t const  n     = size_.load(std::memory_order_relaxed);
  auto const         k     = static_cast<std::int64_t>(n + 1);
  double const       log_p = model_.log_pmf(k);
  long double const  p     = std::exp(static_cast<long double>(log_p));

  long double const t = running_ + p;
  if (std::abs(running_) >= p)
  {
    running_comp_ += (running_ - t) + p;
  }
  else
  {
    running_comp_ += (p - t) + running_;
  }
  running_ = t;

  auto &chunk = chunks_[n >> kChunkBits];
  if (!chunk)
  {
    chunk = std::make_unique<Entry[]>(kChunkSize);
  }
  chunk[n & (kChunkSize - 1)] = Entry{running_ + running_comp_, log_p};
  size_.store(n + 1, std::memory_order_release);
  exhausted_ = exhausted_after(k, log_p);
}

void Sampler::prefill(long double mass) const
{
  std::lock_guard lock(mutex_);
  for (;;)
  {
    std::size_t const n = size_.load(std::memory_order_relaxed);
    if (n >= limit_ || exhausted_ || (n > 0 && at(n - 1).cdf >= mass))
    {
      return;
    }
    push_locked();
  }
}

Draw Sampler::draw(std::uint64_t bits) const
{
  long double const u = std::ldexp(static_cast<long double>(bits), -64);

  std::size_t n = size_.load(std::memory_order_acquire);
  if (n > 0 && u < at(n - 1).cdf)
  {
    std::size_t const i = search(u, n);
    return Draw{static_cast<std::int64_t>(i + 1), at(i).log_p};
  }

  bool found     = false;
  bool exhausted = false;
  {
    std::lock_guard lock(mutex_);
    for (;;)
    {
      n = size_.load(std::memory_order_relaxed);
      if (n > 0 && u < at(n - 1).cdf)
      {
        found = true;
        break;
      }
      if (n >= limit_ || exhausted_)
      {
        exhausted = exhausted_;
        break;
      }
      push_locked();
    }
  }
  if (found)
  {
    std::size_t const i = search(u, n);
    return Draw{static_cast<std::int64_t>(i + 1), at(i).log_p};
  }

  if (model_.is_tabulated())
  {
    if (model_.finite_support())
    {
      return Draw{static_cast<std::int64_t>(n), at(n - 1).log_p};
    }
    throw MassUnknownError("cannot sample tail: draw falls in the mass missing from the table");
  }
  if (exhausted)
  {
    return Draw{static_cast<std::int64_t>(n), at(n - 1).log_p};
  }
  return uncached_draw(u);
}

Draw Sampler::uncached_draw(long double u) const
{
  auto const from = static_cast<std::int64_t>(limit_);
  if (std::holds_alternative<Zeta>(model_.family()))
  {
    return zeta_tail_draw(u, from);
  }

  long double sum;
  long double comp;
  {
    std::lock_guard lock(mutex_);
    sum  = running_;
    comp = running_comp_;
  }
  for (std::int64_t k = from + 1;; ++k)
  {
    if (k > kIndexCap)
    {
      throw ResourceLimitError("sampler passed index 1e9 without covering the uniform draw");
    }
    double const      log_p = model_.log_pmf(k);
    long double const p     = std::exp(static_cast<long double>(log_p));
    long double const t     = sum + p;
    comp += std::abs(sum) >= p ? (sum - t) + p : (p - t) + sum;
    sum = t;
    if (u < sum + comp || exhausted_after(k, log_p))
    {
      return Draw{k, log_p};
    }
  }
}

Draw Sampler::zeta_tail_draw(long double u, std::int64_t from) const
{
  double const alpha    = std::get<Zeta>(model_.family()).exponent;
  double const log_norm = model_.log_pmf(1);
  double const v        = static_cast<double>(1.0L - u);
  // P(X > k) = hurwitz_zeta(alpha, k + 1) / zeta(alpha)
  auto const survival = [&](std::int64_t k) {
    return special::hurwitz_zeta(alpha, static_cast<double>(k) + 1.0) * std::exp(log_norm);
  };

  std::int64_t lo = from;
  std::int64_t hi = std::max<std::int64_t>(2 * from, 2);
  while (survival(hi) >= v)
  {
    if (hi > kMaxOutcome / 2)
    {
      // Survival below this point is ~1e-18 or less; the last few uniforms
      // of the 64-bit grid are folded onto the cap.
      return Draw{kMaxOutcome, model_.log_pmf(kMaxOutcome)};
    }
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1)
  {
    std::int64_t const mid = lo + (hi - lo) / 2;
    if (survival(mid) < v)
    {
      hi = mid;
    }
    else
    {
      lo = mid;
    }
  }
  return Draw{hi, model_.log_pmf(hi)};
}

std::vector<std::int64_t> sample(PmfModel const &model, std::uint64_t seed, std::int64_t count)
{
  if (count < 1)
  {
    throw DomainError("sample count must be >= 1, got " + std::to_string(count));
  }
  Sampler                   sampler(model);
  Engine                    engine(seed);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
  {
    out.push_back(sampler.draw(engine).k);
  }
  return out;
}

}  // namespace entbound
