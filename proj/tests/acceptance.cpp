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

// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
// against the budget. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "entbound/bounds.hpp"
#include "entbound/certify.hpp"
#include "entbound/cli.hpp"
#include "entbound/errors.hpp"
#include "entbound/montecarlo.hpp"

using namespace entbound;

namespace {

// Collects failed checks for one criterion.
class Checker
{
public:
  void expect(bool ok, std::string const &what)
  {
    if (!ok)
    {
      failures_.push_back(what);
    }
  }

  std::vector<std::string> const &failures() const noexcept
  {
    return failures_;
  }

private:
  std::vector<std::string> failures_;
};

std::string num(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

struct Criterion
{
  char const                          *id;
  char const                          *title;
  double                               budget_s;
  std::function<void(Checker &)>       body;
};

// ---------------------------------------------------------------------------

void power_sum_closed_forms(Checker &check)
{
  double const geo_exact = std::numbers::sqrt2 + 1.0;
  for (double slack : {1e-2, 1e-4, 1e-6})
  {
    auto const mc = certify(PmfModel::geometric(0.5), 0.5, slack);
    check.expect(mc.c_r >= geo_exact && mc.c_r - geo_exact <= slack,
                 "geometric C_r " + num(mc.c_r) + " not within slack " + num(slack));
  }

  double const zeta_exact = boost::math::zeta(1.5) / std::pow(boost::math::zeta(2.0), 0.75);
  auto const   mc         = certify(PmfModel::zeta(2.0), 0.25, 0.01);
  check.expect(mc.c_r >= zeta_exact && mc.c_r - zeta_exact <= 0.01,
               "zeta C_r " + num(mc.c_r) + " does not bracket " + num(zeta_exact));
  check.expect(mc.truncation_index == 14784,
               "zeta truncation index " + std::to_string(mc.truncation_index) + " != 14784");
}

void truncation_formula(Checker &check)
{
  std::mt19937_64                             engine(20240601);
  std::uniform_real_distribution<double>      alpha_d(1.3, 4.0);
  std::uniform_real_distribution<double>      frac(0.05, 0.9);
  std::uniform_real_distribution<double>      log_eps(std::log(1e-3), std::log(0.2));
  std::uniform_real_distribution<double>      c0_d(0.05, 2.0);
  std::uniform_int_distribution<std::int64_t> k0_d(1, 40);

  int accepted = 0;
  while (accepted < 20)
  {
    double const       alpha = alpha_d(engine);
    double const       r     = frac(engine) * (alpha - 1.0) / alpha;
    double const       eps   = std::exp(log_eps(engine));
    double const       c0    = c0_d(engine);
    std::int64_t const k0    = k0_d(engine);

    long double const beta = static_cast<long double>(alpha) * (1.0L - r) - 1.0L;
    long double const x    = powl(static_cast<long double>(eps) * beta / c0, -1.0L / beta);
    if (x > 2e5L)
    {
      continue;  // keep the exact summation inside the runtime budget
    }
    std::int64_t const want = std::max<std::int64_t>(k0, static_cast<std::int64_t>(ceill(x)));
    ++accepted;

    PowerLawTail const tail{k0, c0, alpha};
    auto const         got = certify_moment_powerlaw(PmfModel::zeta(alpha), tail, r, eps);
    check.expect(got.truncation_index == want,
                 "alpha=" + num(alpha) + " r=" + num(r) + " eps=" + num(eps) + " c0=" + num(c0) +
                     " k0=" + std::to_string(k0) + ": " + std::to_string(got.truncation_index) +
                     " != " + std::to_string(want));
    check.expect(powerlaw_truncation_index(tail, r, eps) == want, "direct index mismatch");
  }
}

void entropy_intervals(Checker &check)
{
  auto const geo   = PmfModel::geometric(0.5);
  auto const h_geo = entropy_interval(geo, certify(geo, 0.5, 1e-6), 1e-6);
  check.expect(h_geo.contains(2.0 * std::numbers::ln2),
               "geometric interval [" + num(h_geo.lower) + ", " + num(h_geo.upper) +
                   "] misses 2 log 2");

  // Brute-force oracle: extended-precision sum to k = 200.
  long double oracle = 0.0L;
  for (int j = 0; j < 200; ++j)
  {
    long double const log_p = -1.0L - lgammal(static_cast<long double>(j) + 1.0L);
    oracle -= expl(log_p) * log_p;
  }
  auto const pois   = PmfModel::poisson(1.0);
  auto const h_pois = entropy_interval(pois, certify(pois, 0.5, 1e-6), 1e-6);
  check.expect(h_pois.contains(static_cast<double>(oracle)),
               "poisson interval [" + num(h_pois.lower) + ", " + num(h_pois.upper) +
                   "] misses " + num(static_cast<double>(oracle)));
}

void mgf_dominance(Checker &check)
{
  struct Case
  {
    PmfModel model;
    double   tol;
  };
  for (auto const &c : {Case{PmfModel::geometric(0.5), 1e-8}, Case{PmfModel::zeta(2.0), 1e-3}})
  {
    auto const mc      = certify(c.model, std::nullopt, c.tol);
    auto const entropy = entropy_interval(c.model, mc, c.tol);
    for (int i = 0; i < 41; ++i)
    {
      double const lambda = (-0.9 + 1.8 * i / 40.0) * mc.r;
      double const bound  = std::exp(mgf_log_bound(mc, lambda));
      auto const   exact  = mgf_exact(c.model, mc, entropy, lambda, c.tol);
      check.expect(bound >= exact.lower, c.model.name() + " lambda=" + num(lambda) + ": envelope " +
                                             num(bound) + " < " + num(exact.lower));
      if (i == 20)
      {
        check.expect(std::abs(bound - 1.0) <= 1e-12 && std::abs(exact.lower - 1.0) <= 1e-12 &&
                         std::abs(exact.upper - 1.0) <= 1e-12,
                     c.model.name() + ": values at lambda=0 differ from 1");
      }
    }
  }
}

void simulated_validity(Checker &check)
{
  std::vector<SimulationConfig> cfgs;
  for (auto const &[model, slack] : {std::pair{PmfModel::geometric(0.5), 1e-6},
                                     std::pair{PmfModel::poisson(1.0), 1e-6},
                                     std::pair{PmfModel::zeta(2.0), 1e-2}})
  {
    SimulationConfig cfg{model};
    cfg.n          = 200;
    cfg.eps        = {0.2, 0.4, 0.8};
    cfg.replicates = 100'000;
    cfg.slack      = slack;
    cfg.threads    = 0;
    cfgs.push_back(cfg);
  }
  for (auto const &rep : sweep(cfgs, 20260101))
  {
    auto const summary = verify_bound(rep);
    for (std::size_t i = 0; i < rep.records.size(); ++i)
    {
      auto const &rec = rep.records[i];
      std::printf("    %-14s eps=%-4g freq=%-10.6g bound=%-12.6g %s\n", rep.model.c_str(), rec.eps,
                  rec.frequency, rec.bound_value, to_string(summary.verdicts[i]).c_str());
      check.expect(summary.verdicts[i] != Verdict::kFail,
                   rep.model + " eps=" + num(rec.eps) + " FAIL");
    }
  }
}

void exact_law_n1(Checker &check)
{
  double const h     = 2.0 * std::numbers::ln2;
  auto const   model = PmfModel::geometric(0.5);
  std::vector<double> const eps{0.1, 0.5, 1.0, 2.0};

  SimulationConfig cfg{model};
  cfg.n          = 1;
  cfg.eps        = eps;
  cfg.replicates = 100'000;
  cfg.seed       = 60;
  auto const rep = estimate_deviation_probability(cfg);

  for (std::size_t i = 0; i < eps.size(); ++i)
  {
    long double exact = 0.0L;
    for (int k = 1; k <= 60; ++k)
    {
      double const log_p = model.log_pmf(k);
      if (std::abs(log_p + h) >= eps[i])
      {
        exact += expl(static_cast<long double>(log_p));
      }
    }
    auto const &rec = rep.records[i];
    check.expect(std::abs(rec.frequency - static_cast<double>(exact)) <= 4.0 * rec.std_error,
                 "eps=" + num(eps[i]) + ": frequency " + num(rec.frequency) + " vs exact " +
                     num(static_cast<double>(exact)));
  }
}

void inversion_round_trips(Checker &check)
{
  std::mt19937_64                        engine(77);
  std::uniform_real_distribution<double> log_eps(std::log(0.01), std::log(5.0));
  std::uniform_real_distribution<double> log_delta(std::log(1e-12), std::log(0.9));
  auto const consts = bernstein_constants(certify(PmfModel::zeta(2.0), 0.25, 0.01));
  for (int i = 0; i < 100; ++i)
  {
    double const eps   = std::exp(log_eps(engine));
    double const delta = std::exp(log_delta(engine));
    auto const   n     = min_sample_size(consts, eps, delta);
    check.expect(deviation_bound(consts, n, eps) <= delta, "bound above delta at n");
    check.expect(n == 1 || deviation_bound(consts, n - 1, eps) > delta, "n is not minimal");
    double const e    = epsilon_for(consts, n, delta);
    double const back = deviation_bound(consts, n, e);
    check.expect(std::abs(back - delta) <= 1e-9 * delta,
                 "epsilon_for round trip: " + num(back) + " vs " + num(delta));
  }
}

void admissibility(Checker &check)
{
  for (double alpha : {1.5, 2.0, 3.0})
  {
    auto const   model = PmfModel::zeta(alpha);
    double const r_max = (alpha - 1.0) / alpha;
    for (double r : {r_max, r_max + 1e-9, 0.5 * (r_max + 1.0), 0.999})
    {
      bool rejected = false;
      try
      {
        certify(model, r, 0.05);
      }
      catch (InadmissibleRError const &)
      {
        rejected = true;
      }
      check.expect(rejected, "zeta:" + num(alpha) + " accepted r=" + num(r));
    }
    for (double r : {0.25 * r_max, 0.5 * r_max})
    {
      try
      {
        auto const mc = certify(model, r, 0.05);
        check.expect(mc.r == r, "certificate r mismatch");
      }
      catch (std::exception const &e)
      {
        check.expect(false, "zeta:" + num(alpha) + " rejected r=" + num(r) + ": " + e.what());
      }
    }
  }
}

void determinism(Checker &check)
{
  auto const run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "entbound");
    std::ostringstream out;
    std::ostringstream err;
    int const          code = cli::run(args, out, err);
    return std::pair{code, out.str()};
  };
  std::vector<std::string> const args{"simulate",     "zeta:2", "--n",      "200",  "--eps",
                                      "0.2,0.4,0.8",  "--slack", "0.01",    "--replicates",
                                      "20000",        "--seed", "424242",   "--format", "csv"};
  auto const first  = run(args);
  auto const second = run(args);
  check.expect(first.first == cli::kOk, "simulate exited with " + std::to_string(first.first));
  check.expect(first.second == second.second, "CSV output differs between identical runs");
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "4"});
  check.expect(run(threaded).second == first.second, "threaded CSV differs from serial CSV");

  SimulationConfig cfg{PmfModel::poisson(1.0)};
  cfg.n          = 200;
  cfg.eps        = {0.2, 0.4};
  cfg.replicates = 20000;
  cfg.seed       = 5;
  auto const serial = estimate_deviation_probability(cfg);
  cfg.threads       = 0;
  check.expect(estimate_deviation_probability(cfg) == serial, "parallel report differs from serial");
}

}  // namespace

int main()
{
  std::vector<Criterion> const criteria{
      {"AC1", "power sums bracket closed forms", 5.0, power_sum_closed_forms},
      {"AC2", "truncation index matches the closed expression", 1.0, truncation_formula},
      {"AC3", "entropy intervals contain reference entropies", 1.0, entropy_intervals},
      {"AC4", "MGF envelope dominates the certified MGF", 5.0, mgf_dominance},
      {"AC5", "simulated deviation frequencies respect the bound", 120.0, simulated_validity},
      {"AC6", "n = 1 frequencies match the exact law", 30.0, exact_law_n1},
      {"AC7", "sample size and epsilon inversions round-trip", 1.0, inversion_round_trips},
      {"AC8", "inadmissible r is rejected", 1.0, admissibility},
      {"AC9", "simulation output is deterministic", 120.0, determinism},
  };

  int failed = 0;
  for (auto const &c : criteria)
  {
    Checker    check;
    auto const start = std::chrono::steady_clock::now();
    try
    {
      c.body(check);
    }
    catch (std::exception const &e)
    {
      check.expect(false, std::string("unexpected exception: ") + e.what());
    }
    double const elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.budget_s)
    {
      check.expect(false, "runtime " + num(elapsed) + " s exceeds budget " + num(c.budget_s) + " s");
    }
    bool const ok = check.failures().empty();
    failed += ok ? 0 : 1;
    std::printf("%s %s  %-52s %8.3f s (budget %g s)\n", c.id, ok ? "PASS" : "FAIL", c.title, elapsed,
                c.budget_s);
    for (auto const &f : check.failures())
    {
      std::printf("    - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
