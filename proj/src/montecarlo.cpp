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

#include "entbound/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "entbound/bounds.hpp"
#include "entbound/sampler.hpp"
#include "entbound/summation.hpp"

namespace entbound {
namespace {

constexpr std::int64_t kMgfBlock = std::int64_t{1} << 14;

std::string fmt(double x)
{
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

unsigned resolve_threads(unsigned requested)
{
  if (requested == 0)
  {
    requested = std::max(1u, std::thread::hardware_concurrency());
  }
  return requested;
}

// Calls body(begin, end) over contiguous slices of [0, count). Work items must
// not depend on which slice they land in.
template <typename Body>
void parallel_for(std::int64_t count, unsigned threads, Body const &body)
{
  threads = static_cast<unsigned>(std::min<std::int64_t>(resolve_threads(threads), count));
  if (threads <= 1)
  {
    body(std::int64_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread>        pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
  {
    std::int64_t const begin = count * t / threads;
    std::int64_t const end   = count * (t + 1) / threads;
    pool.emplace_back([&, t, begin, end] {
      try
      {
        body(begin, end);
      }
      catch (...)
      {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto &th : pool)
  {
    th.join();
  }
  for (auto const &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

struct Prepared
{
  MomentCertificate mcert;
  EntropyInterval   entropy;
  double            centre;
};

Prepared prepare(SimulationConfig const &cfg)
{
  cfg.validate();
  auto const mcert   = certify(cfg.model, cfg.r, cfg.slack);
  auto const entropy = entropy_interval(cfg.model, mcert, cfg.tolerance());
  double     centre  = entropy.midpoint();
  if (cfg.centering == Centering::kLower)
  {
    centre = entropy.lower;
  }
  else if (cfg.centering == Centering::kUpper)
  {
    centre = entropy.upper;
  }
  return Prepared{mcert, entropy, centre};
}

std::vector<double> run_replicates(SimulationConfig const &cfg, double centre)
{
  Sampler             sampler(cfg.model);
  std::vector<double> out(static_cast<std::size_t>(cfg.replicates));
  double const        inv_n = 1.0 / static_cast<double>(cfg.n);
  parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i)
    {
      Engine engine(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      double sum = 0.0;
      for (std::int64_t j = 0; j < cfg.n; ++j)
      {
        sum += sampler.draw(engine).log_p;
      }
      out[static_cast<std::size_t>(i)] = sum * inv_n + centre;
    }
  });
  return out;
}

}  // namespace

std::string to_string(Verdict v)
{
  switch (v)
  {
  case Verdict::kPass:
    return "PASS";
  case Verdict::kVacuous:
    return "VACUOUS";
  case Verdict::kFail:
    return "FAIL";
  }
  return "?";
}

Verdict verdict_from_string(std::string const &s)
{
  if (s == "PASS")
  {
    return Verdict::kPass;
  }
  if (s == "VACUOUS")
  {
    return Verdict::kVacuous;
  }
  if (s == "FAIL")
  {
    return Verdict::kFail;
  }
  throw ParseError("unknown verdict \"" + s + "\"");
}

double SimulationConfig::tolerance() const
{
  if (entropy_tolerance)
  {
    return *entropy_tolerance;
  }
  return eps.empty() ? 0.0 : *std::min_element(eps.begin(), eps.end()) / 100.0;
}

void SimulationConfig::validate() const
{
  if (n < 1)
  {
    throw DomainError("n must be >= 1");
  }
  if (replicates < 100)
  {
    throw DomainError("replicates must be >= 100, got " + std::to_string(replicates));
  }
  if (eps.empty())
  {
    throw DomainError("at least one eps threshold is required");
  }
  for (double e : eps)
  {
    if (!(e > 0.0) || !std::isfinite(e))
    {
      throw DomainError("eps thresholds must be positive and finite, got " + fmt(e));
    }
  }
  double const tol     = tolerance();
  double const min_eps = *std::min_element(eps.begin(), eps.end());
  if (!(tol > 0.0) || tol > min_eps / 100.0)
  {
    throw DomainError("entropy tolerance must lie in (0, min(eps)/100], got " + fmt(tol));
  }
  if (!(slack > 0.0))
  {
    throw DomainError("slack must be > 0");
  }
}

bool SimulationReport::operator==(SimulationReport const &other) const
{
  return model == other.model && n == other.n && replicates == other.replicates &&
         seed == other.seed && certificate == other.certificate &&
         entropy.lower == other.entropy.lower && entropy.upper == other.entropy.upper &&
         entropy.tolerance == other.entropy.tolerance && centre == other.centre &&
         records == other.records;
}

double standard_error(std::int64_t hits, std::int64_t replicates)
{
  if (replicates < 1)
  {
    throw DomainError("replicates must be >= 1");
  }
  double const R = static_cast<double>(replicates);
  double const f = static_cast<double>(hits) / R;
  if (hits < 5)
  {
    return std::sqrt(f * (1.0 - f) / R + 1.0 / (4.0 * R * R)) / (1.0 + 1.0 / R);
  }
  return std::sqrt(f * (1.0 - f) / R);
}

Verdict judge(double frequency, double std_error, double bound)
{
  if (is_vacuous(bound))
  {
    return Verdict::kVacuous;
  }
  return frequency - 3.0 * std_error > bound ? Verdict::kFail : Verdict::kPass;
}

std::vector<double> replicate_deviations(SimulationConfig const &cfg)
{
  auto const prepared = prepare(cfg);
  return run_replicates(cfg, prepared.centre);
}

SimulationReport estimate_deviation_probability(SimulationConfig const &cfg)
{
  auto const start    = std::chrono::steady_clock::now();
  auto const prepared = prepare(cfg);
  auto const consts   = bernstein_constants(prepared.mcert);
  auto const devs     = run_replicates(cfg, prepared.centre);

  SimulationReport report;
  report.model       = cfg.model.name();
  report.n           = cfg.n;
  report.replicates  = cfg.replicates;
  report.seed        = cfg.seed;
  report.certificate = prepared.mcert;
  report.entropy     = prepared.entropy;
  report.centre      = prepared.centre;
  for (double eps : cfg.eps)
  {
    auto const hits = static_cast<std::int64_t>(
        std::count_if(devs.begin(), devs.end(), [eps](double d) { return std::abs(d) >= eps; }));
    EpsRecord rec;
    rec.eps         = eps;
    rec.hit_count   = hits;
    rec.frequency   = static_cast<double>(hits) / static_cast<double>(cfg.replicates);
    rec.std_error   = standard_error(hits, cfg.replicates);
    rec.bound_value = deviation_bound(consts, cfg.n, eps);
    rec.verdict     = judge(rec.frequency, rec.std_error, rec.bound_value);
    report.records.push_back(rec);
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

MgfEstimate estimate_mgf(PmfModel const &model, EntropyInterval const &entropy, double lambda,
                         std::int64_t samples, std::uint64_t seed, unsigned threads)
{
  double const r_max = admissible_r_interval(model).r_max;
  if (!(std::abs(lambda) < r_max))
  {
    throw DomainError("lambda outside the certified MGF radius (" + fmt(r_max) + ")");
  }
  if (samples < 1)
  {
    throw DomainError("samples must be >= 1");
  }

  double const       centre = entropy.midpoint();
  Sampler            sampler(model);
  std::int64_t const blocks = (samples + kMgfBlock - 1) / kMgfBlock;
  std::vector<double> sums(static_cast<std::size_t>(blocks));
  std::vector<double> squares(static_cast<std::size_t>(blocks));

  parallel_for(blocks, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t b = begin; b < end; ++b)
    {
      Engine             engine(derive_seed(seed, static_cast<std::uint64_t>(b)));
      std::int64_t const count = std::min(kMgfBlock, samples - b * kMgfBlock);
      CompensatedSum<>   sum;
      CompensatedSum<>   sq;
      for (std::int64_t j = 0; j < count; ++j)
      {
        double const x = std::exp(lambda * (sampler.draw(engine).log_p + centre));
        sum += x;
        sq += x * x;
      }
      sums[static_cast<std::size_t>(b)]    = sum.value();
      squares[static_cast<std::size_t>(b)] = sq.value();
    }
  });

  CompensatedSum<> sum;
  CompensatedSum<> sq;
  for (std::size_t b = 0; b < sums.size(); ++b)
  {
    sum += sums[b];
    sq += squares[b];
  }
  double const count = static_cast<double>(samples);
  double const mean  = sum.value() / count;
  double const var   = std::max(0.0, sq.value() / count - mean * mean);
  double const se    = samples > 1 ? std::sqrt(var * count / (count - 1.0) / count) : 0.0;
  return MgfEstimate{mean, se};
}

std::vector<SimulationReport> sweep(std::span<SimulationConfig const> cfgs, std::uint64_t base_seed,
                                    std::function<void(SimulationReport const &)> const &sink)
{
  std::vector<SimulationReport> reports;
  reports.reserve(cfgs.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i)
  {
    SimulationConfig cfg = cfgs[i];
    cfg.seed             = derive_seed(base_seed, i);
    try
    {
      reports.push_back(estimate_deviation_probability(cfg));
    }
    catch (std::exception const &e)
    {
      throw SweepAborted("sweep aborted at config " + std::to_string(i) + " (" +
                             cfg.model.name() + "): " + e.what(),
                         std::move(reports), std::current_exception());
    }
    if (sink)
    {
      sink(reports.back());
    }
  }
  return reports;
}

VerdictSummary verify_bound(SimulationReport const &report)
{
  if (report.replicates < 1)
  {
    throw IntegrityError("report has no replicates");
  }
  VerdictSummary summary;
  for (auto const &rec : report.records)
  {
    if (rec.hit_count < 0 || rec.hit_count > report.replicates)
    {
      throw IntegrityError("hit count outside [0, replicates] at eps = " + fmt(rec.eps));
    }
    double const freq = static_cast<double>(rec.hit_count) / static_cast<double>(report.replicates);
    if (std::abs(freq - rec.frequency) > 1e-12)
    {
      throw IntegrityError("frequency does not equal hit_count / replicates at eps = " +
                           fmt(rec.eps));
    }
    double const se = standard_error(rec.hit_count, report.replicates);
    if (std::abs(se - rec.std_error) > 1e-12 * std::max(1.0, se))
    {
      throw IntegrityError("stderr inconsistent with the counts at eps = " + fmt(rec.eps));
    }
    Verdict const v = judge(rec.frequency, rec.std_error, rec.bound_value);
    if (v != rec.verdict)
    {
      throw IntegrityError("stored verdict " + to_string(rec.verdict) + " contradicts derived " +
                           to_string(v) + " at eps = " + fmt(rec.eps));
    }
    summary.verdicts.push_back(v);
    switch (v)
    {
    case Verdict::kPass:
      ++summary.pass;
      break;
    case Verdict::kVacuous:
      ++summary.vacuous;
      break;
    case Verdict::kFail:
      ++summary.fail;
      break;
    }
  }
  return summary;
}

std::string csv_header()
{
  return "model,n,replicates,seed,r,C_r,slack,eps,hit_count,frequency,stderr,bound,verdict\n";
}

std::string to_csv(std::span<SimulationReport const> reports)
{
  std::ostringstream out;
  out << csv_header();
  for (auto const &rep : reports)
  {
    for (auto const &rec : rep.records)
    {
      out << rep.model << ',' << rep.n << ',' << rep.replicates << ',' << rep.seed << ','
          << fmt(rep.certificate.r) << ',' << fmt(rep.certificate.c_r) << ','
          << fmt(rep.certificate.slack) << ',' << fmt(rec.eps) << ',' << rec.hit_count << ','
          << fmt(rec.frequency) << ',' << fmt(rec.std_error) << ',' << fmt(rec.bound_value) << ','
          << to_string(rec.verdict) << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json(SimulationReport const &report)
{
  nlohmann::json records = nlohmann::json::array();
  for (auto const &rec : report.records)
  {
    records.push_back({{"eps", rec.eps},
                       {"hit_count", rec.hit_count},
                       {"frequency", rec.frequency},
                       {"stderr", rec.std_error},
                       {"bound", rec.bound_value},
                       {"vacuous", is_vacuous(rec.bound_value)},
                       {"verdict", to_string(rec.verdict)}});
  }
  return nlohmann::json{
      {"model", report.model},
      {"n", report.n},
      {"replicates", report.replicates},
      {"seed", report.seed},
      {"certificate", to_json(report.certificate)},
      {"entropy",
       {{"lower", report.entropy.lower},
        {"upper", report.entropy.upper},
        {"tolerance", report.entropy.tolerance}}},
      {"centre", report.centre},
      {"wall_time_s", report.wall_time_s},
      {"records", records},
  };
}

}  // namespace entbound
