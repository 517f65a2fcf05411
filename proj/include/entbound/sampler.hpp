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

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "entbound/distributions.hpp"

namespace entbound {

using Engine = std::mt19937_64;

/// One step of the splitmix64 generator; used for seed derivation only.
std::uint64_t splitmix64(std::uint64_t &state) noexcept;

/// Deterministic child seed for stream `index` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

struct Draw
{
  std::int64_t k;
  double       log_p;
};

/**
 * Inverse-CDF sampler with a cumulative-mass cache that grows on demand.
 *
 * The cache is stored in fixed chunks that never move, so lookups read the
 * published prefix without locking; extension happens under a mutex. Draws
 * past `cache_limit` fall through to an uncached path (Hurwitz-zeta survival
 * search for Zeta, sequential accumulation otherwise).
 *
 * CDF values are accumulated in long double so that a 64-bit uniform can
 * resolve masses down to ~1e-19.
 */
class Sampler
{
public:
  explicit Sampler(PmfModel model, std::size_t cache_limit = std::size_t{1} << 20);
  ~Sampler();

  Sampler(Sampler const &)            = delete;
  Sampler &operator=(Sampler const &) = delete;

  PmfModel const &model() const noexcept
  {
    return model_;
  }

  /// Maps 64 uniform random bits (u = bits / 2^64) to an outcome.
  Draw draw(std::uint64_t bits) const;

  Draw draw(Engine &engine) const
  {
    return draw(engine());
  }

  /// Extends the cache until it covers cumulative mass `mass` (or the limit).
  void prefill(long double mass) const;

  std::size_t cached() const noexcept
  {
    return size_.load(std::memory_order_acquire);
  }

private:
  struct Entry
  {
    long double cdf;
    double      log_p;
  };

  static constexpr std::size_t kChunkBits = 16;
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;

  Entry const &at(std::size_t i) const noexcept
  {
    return chunks_[i >> kChunkBits][i & (kChunkSize - 1)];
  }

  std::size_t search(long double u, std::size_t n) const noexcept;
  // Both require mutex_ held.
  void push_locked() const;
  bool exhausted_after(std::int64_t k, double log_p) const;

  Draw uncached_draw(long double u) const;
  Draw zeta_tail_draw(long double u, std::int64_t from) const;

  PmfModel                                   model_;
  std::optional<TailCertificate>             cert_;
  std::size_t                                limit_;
  std::unique_ptr<std::unique_ptr<Entry[]>[]> chunks_;
  mutable std::atomic<std::size_t>           size_{0};
  mutable std::mutex                         mutex_;
  mutable long double                        running_{0};
  mutable long double                        running_comp_{0};
  mutable bool                               exhausted_{false};
};

/// Reproducible i.i.d. draws from `model`: mt19937_64 seeded with `seed`.
std::vector<std::int64_t> sample(PmfModel const &model, std::uint64_t seed, std::int64_t count);

}  // namespace entbound
