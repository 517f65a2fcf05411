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

#include "entbound/cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "entbound/bounds.hpp"
#include "entbound/certify.hpp"
#include "entbound/errors.hpp"
#include "entbound/montecarlo.hpp"

namespace entbound::cli {
namespace {

constexpr double       kDefaultSlack      = 1e-6;
constexpr std::int64_t kDefaultReplicates = 10'000;

class UsageError : public Error
{
public:
  using Error::Error;
};

std::string fmt(double x)
{
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

double parse_number(std::string_view token, std::string_view whole)
{
  double value   = 0.0;
  auto const *b  = token.data();
  auto const *e  = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e || token.empty())
  {
    throw ParseError("model spec \"" + std::string(whole) + "\": bad number \"" +
                     std::string(token) + "\"");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
  std::vector<std::string_view> parts;
  std::size_t                   start = 0;
  for (;;)
  {
    auto const pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos)
    {
      return parts;
    }
    start = pos + 1;
  }
}

// Output sink: --out path or the command's stdout.
class Output
{
public:
  Output(std::string const &path, std::ostream &fallback)
    : out_(&fallback)
  {
    if (!path.empty())
    {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_)
      {
        throw Error("cannot open output file " + path);
      }
      out_ = &file_;
    }
  }

  std::ostream &stream()
  {
    return *out_;
  }

private:
  std::ofstream file_;
  std::ostream *out_;
};

struct Common
{
  std::string           model;
  std::string           cert_path;
  std::optional<double> r;
  double                slack{kDefaultSlack};
  std::string           format{"text"};
  std::string           out_path;
};

void add_format(CLI::App *cmd, Common &c)
{
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", c.out_path, "Write output to this file instead of stdout");
}

void add_certify_opts(CLI::App *cmd, Common &c)
{
  cmd->add_option("--r", c.r, "Moment exponent r in (0, r_max); default r_max/2 or 1/2");
  cmd->add_option("--slack", c.slack, "Certificate slack (tolerance on C_r)")->capture_default_str();
}

MomentCertificate load_certificate(std::string const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ParseError("cannot open certificate file " + path);
  }
  nlohmann::json doc;
  try
  {
    in >> doc;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return certificate_from_json(doc);
}

void require_slack(double slack)
{
  if (!(slack > 0.0))
  {
    throw UsageError("--slack must be > 0");
  }
}

// Certificate from --cert or by certifying the positional model.
MomentCertificate resolve_certificate(Common const &c, std::string &label)
{
  if (!c.cert_path.empty())
  {
    label = c.cert_path;
    return load_certificate(c.cert_path);
  }
  if (c.model.empty())
  {
    throw UsageError("a model spec or --cert is required");
  }
  require_slack(c.slack);
  auto const model = parse_model_spec(c.model);
  label            = model.name();
  return certify(model, c.r, c.slack);
}

void print_table(std::ostream &out, std::vector<std::string> const &header,
                 std::vector<std::vector<std::string>> const &rows)
{
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    width[i] = header[i].size();
    for (auto const &row : rows)
    {
      width[i] = std::max(width[i], row[i].size());
    }
  }
  auto const line = [&](std::vector<std::string> const &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
      out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (auto const &row : rows)
  {
    line(row);
  }
}

void print_csv(std::ostream &out, std::vector<std::string> const &header,
               std::vector<std::vector<std::string>> const &rows)
{
  auto const line = [&](std::vector<std::string> const &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
      out << (i ? "," : "") << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (auto const &row : rows)
  {
    line(row);
  }
}

// --- certify -----------------------------------------------------------------

int cmd_certify(Common const &c, std::optional<double> optimize_for, std::ostream &stdout_)
{
  if (c.model.empty())
  {
    throw UsageError("certify needs a model spec");
  }
  require_slack(c.slack);
  auto const model    = parse_model_spec(c.model);
  auto const interval = admissible_r_interval(model);
  if (optimize_for && c.r)
  {
    throw UsageError("--r and --optimize-for are mutually exclusive");
  }
  auto const mcert = optimize_for ? certify_best_r(model, c.slack, *optimize_for)
                                  : certify(model, c.r, c.slack);

  Output out(c.out_path, stdout_);
  if (c.format == "json")
  {
    auto doc                = to_json(mcert);
    doc["model"]            = model.name();
    doc["admissible_r_max"] = interval.r_max;
    out.stream() << doc.dump(2) << '\n';
    return kOk;
  }
  std::vector<std::string> const header{"model", "r",     "C_r",      "slack",
                                        "truncation_index", "provenance", "admissible"};
  std::vector<std::vector<std::string>> const rows{
      {model.name(), fmt(mcert.r), fmt(mcert.c_r), fmt(mcert.slack),
       std::to_string(mcert.truncation_index), to_string(mcert.provenance),
       "(0, " + fmt(interval.r_max) + ")"}};
  if (c.format == "csv")
  {
    print_csv(out.stream(), header, rows);
  }
  else
  {
    print_table(out.stream(), header, rows);
  }
  return kOk;
}

// --- bound -------------------------------------------------------------------

int cmd_bound(Common const &c, std::int64_t n, double eps, std::ostream &stdout_)
{
  if (n < 1)
  {
    throw UsageError("--n must be >= 1");
  }
  if (!(eps > 0.0))
  {
    throw UsageError("--eps must be > 0 (nats)");
  }
  std::string  label;
  auto const   mcert  = resolve_certificate(c, label);
  auto const   consts = bernstein_constants(mcert);
  double const bound  = deviation_bound(consts, n, eps);

  Output out(c.out_path, stdout_);
  if (c.format == "json")
  {
    nlohmann::json doc{{"model", label},   {"certificate", to_json(mcert)},
                       {"n", n},           {"eps", eps},
                       {"c1", consts.c1},  {"c2", consts.c2},
                       {"bound", bound},   {"vacuous", is_vacuous(bound)}};
    out.stream() << doc.dump(2) << '\n';
    return kOk;
  }
  std::vector<std::string> const header{"model", "r",  "C_r", "slack", "n",
                                        "eps",   "c1", "c2",  "bound", "vacuous"};
  std::vector<std::vector<std::string>> const rows{
      {label, fmt(mcert.r), fmt(mcert.c_r), fmt(mcert.slack), std::to_string(n), fmt(eps),
       fmt(consts.c1), fmt(consts.c2), fmt(bound), is_vacuous(bound) ? "yes" : "no"}};
  if (c.format == "csv")
  {
    print_csv(out.stream(), header, rows);
  }
  else
  {
    print_table(out.stream(), header, rows);
  }
  return kOk;
}

// --- samplesize --------------------------------------------------------------

int cmd_samplesize(Common const &c, double eps, double delta, std::ostream &stdout_)
{
  if (!(eps > 0.0))
  {
    throw UsageError("--eps must be > 0 (nats)");
  }
  if (!(delta > 0.0 && delta < 2.0))
  {
    throw UsageError("--delta must lie in (0, 2)");
  }
  std::string        label;
  auto const         mcert  = resolve_certificate(c, label);
  auto const         consts = bernstein_constants(mcert);
  std::int64_t const n      = min_sample_size(consts, eps, delta);
  double const       bound  = deviation_bound(consts, n, eps);

  Output out(c.out_path, stdout_);
  if (c.format == "json")
  {
    nlohmann::json doc{{"model", label}, {"certificate", to_json(mcert)},
                       {"eps", eps},     {"delta", delta},
                       {"n", n},         {"bound_at_n", bound}};
    out.stream() << doc.dump(2) << '\n';
    return kOk;
  }
  std::vector<std::string> const header{"model", "r", "C_r", "eps", "delta", "n", "bound_at_n"};
  std::vector<std::vector<std::string>> const rows{{label, fmt(mcert.r), fmt(mcert.c_r), fmt(eps),
                                                    fmt(delta), std::to_string(n), fmt(bound)}};
  if (c.format == "csv")
  {
    print_csv(out.stream(), header, rows);
  }
  else
  {
    print_table(out.stream(), header, rows);
  }
  return kOk;
}

// --- simulate / sweep --------------------------------------------------------

struct SimFlags
{
  std::int64_t          n{200};
  std::vector<double>   eps;
  std::int64_t          replicates{kDefaultReplicates};
  std::uint64_t         seed{0};
  unsigned              threads{1};
  std::optional<double> entropy_tol;
  std::string           config_path;
};

nlohmann::json read_json_file(std::string const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ParseError("cannot open config file " + path);
  }
  try
  {
    nlohmann::json doc;
    in >> doc;
    return doc;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
}

SimulationConfig config_from_json(nlohmann::json const &doc)
{
  try
  {
    SimulationConfig cfg{parse_model_spec(doc.at("model").get<std::string>())};
    cfg.n          = doc.value("n", cfg.n);
    cfg.replicates = doc.value("replicates", cfg.replicates);
    cfg.seed       = doc.value("seed", cfg.seed);
    cfg.slack      = doc.value("slack", cfg.slack);
    cfg.threads    = doc.value("threads", cfg.threads);
    if (doc.contains("eps"))
    {
      auto const &e = doc.at("eps");
      cfg.eps       = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
    }
    if (doc.contains("entropy_tolerance"))
    {
      cfg.entropy_tolerance = doc.at("entropy_tolerance").get<double>();
    }
    if (doc.contains("r"))
    {
      cfg.r = doc.at("r").get<double>();
    }
    return cfg;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ParseError(std::string("malformed simulation config: ") + e.what());
  }
}

// Applies flags the user actually passed on top of `cfg`.
void apply_flags(SimulationConfig &cfg, CLI::App const &cmd, Common const &c, SimFlags const &f)
{
  auto const given = [&](char const *name) { return cmd.count(name) > 0; };
  if (given("--n"))
  {
    cfg.n = f.n;
  }
  if (given("--eps"))
  {
    cfg.eps = f.eps;
  }
  if (given("--replicates"))
  {
    cfg.replicates = f.replicates;
  }
  if (given("--seed"))
  {
    cfg.seed = f.seed;
  }
  if (given("--threads"))
  {
    cfg.threads = f.threads;
  }
  if (given("--entropy-tol"))
  {
    cfg.entropy_tolerance = f.entropy_tol;
  }
  if (given("--r"))
  {
    cfg.r = c.r;
  }
  if (given("--slack"))
  {
    cfg.slack = c.slack;
  }
}

SimulationConfig flags_config(std::string const &model, Common const &c, SimFlags const &f)
{
  SimulationConfig cfg{parse_model_spec(model)};
  cfg.n          = f.n;
  cfg.eps        = f.eps;
  cfg.replicates = f.replicates;
  cfg.seed       = f.seed;
  cfg.threads    = f.threads;
  cfg.slack      = c.slack;
  cfg.r          = c.r;
  if (f.entropy_tol)
  {
    cfg.entropy_tolerance = f.entropy_tol;
  }
  return cfg;
}

void check_config(SimulationConfig const &cfg)
{
  try
  {
    cfg.validate();
  }
  catch (DomainError const &e)
  {
    throw UsageError(e.what());
  }
}

void write_reports(std::vector<SimulationReport> const &reports, Common const &c,
                   std::vector<SimulationConfig> const &cfgs, std::ostream &stdout_)
{
  Output out(c.out_path, stdout_);
  if (c.format == "csv")
  {
    out.stream() << to_csv(reports);
    return;
  }
  if (c.format == "json")
  {
    nlohmann::json doc = nlohmann::json::array();
    for (auto const &rep : reports)
    {
      doc.push_back(to_json(rep));
    }
    out.stream() << doc.dump(2) << '\n';
    return;
  }
  auto &os = out.stream();
  for (std::size_t i = 0; i < reports.size(); ++i)
  {
    auto const &rep = reports[i];
    auto const &cfg = cfgs[std::min(i, cfgs.size() - 1)];
    os << "# model=" << rep.model << " n=" << rep.n << " replicates=" << rep.replicates
       << " seed=" << rep.seed << " r=" << fmt(rep.certificate.r)
       << " C_r=" << fmt(rep.certificate.c_r) << " slack=" << fmt(rep.certificate.slack)
       << " entropy=[" << fmt(rep.entropy.lower) << ", " << fmt(rep.entropy.upper) << "] nats"
       << " entropy_tol=" << fmt(cfg.tolerance()) << '\n';
    std::vector<std::vector<std::string>> rows;
    for (auto const &rec : rep.records)
    {
      rows.push_back({fmt(rec.eps), std::to_string(rec.hit_count), fmt(rec.frequency),
                      fmt(rec.std_error), fmt(rec.bound_value), to_string(rec.verdict)});
    }
    print_table(os, {"eps", "hits", "frequency", "stderr", "bound", "verdict"}, rows);
  }
}

int verdict_code(std::vector<SimulationReport> const &reports)
{
  for (auto const &rep : reports)
  {
    if (verify_bound(rep).overall() == Verdict::kFail)
    {
      return kSimulationFail;
    }
  }
  return kOk;
}

int cmd_simulate(CLI::App const &cmd, Common const &c, SimFlags const &f, std::ostream &stdout_)
{
  SimulationConfig cfg = [&] {
    if (!f.config_path.empty())
    {
      auto const doc = read_json_file(f.config_path);
      if (!doc.is_object())
      {
        throw ParseError("simulate --config expects a single JSON object");
      }
      auto cfg = config_from_json(doc);
      apply_flags(cfg, cmd, c, f);
      return cfg;
    }
    if (c.model.empty())
    {
      throw UsageError("simulate needs a model spec or --config");
    }
    return flags_config(c.model, c, f);
  }();
  check_config(cfg);
  std::vector<SimulationReport> const reports{estimate_deviation_probability(cfg)};
  write_reports(reports, c, {cfg}, stdout_);
  return verdict_code(reports);
}

int cmd_sweep(CLI::App const &cmd, Common const &c, std::vector<std::string> const &models,
              SimFlags const &f, std::ostream &stdout_, std::ostream &stderr_)
{
  std::vector<SimulationConfig> cfgs;
  if (!f.config_path.empty())
  {
    auto const doc = read_json_file(f.config_path);
    if (!doc.is_array())
    {
      throw ParseError("sweep --config expects a JSON array of configs");
    }
    for (auto const &entry : doc)
    {
      auto cfg = config_from_json(entry);
      apply_flags(cfg, cmd, c, f);
      cfgs.push_back(std::move(cfg));
    }
  }
  else
  {
    if (models.empty())
    {
      throw UsageError("sweep needs at least one model spec or --config");
    }
    for (auto const &m : models)
    {
      cfgs.push_back(flags_config(m, c, f));
    }
  }
  for (auto const &cfg : cfgs)
  {
    check_config(cfg);
  }

  try
  {
    auto const reports = sweep(cfgs, f.seed);
    write_reports(reports, c, cfgs, stdout_);
    return verdict_code(reports);
  }
  catch (SweepAborted const &e)
  {
    write_reports(e.partial(), c, cfgs, stdout_);
    stderr_ << "entbound: " << e.what() << '\n';
    std::rethrow_exception(e.cause());
  }
}

int exit_code_for(std::exception_ptr const &error, std::ostream &err)
{
  try
  {
    std::rethrow_exception(error);
  }
  catch (UsageError const &e)
  {
    err << "entbound: usage: " << e.what() << '\n';
    return kUsage;
  }
  catch (ParseError const &e)
  {
    err << "entbound: usage: " << e.what() << '\n';
    return kUsage;
  }
  catch (InadmissibleRError const &e)
  {
    err << "entbound: " << e.what() << '\n';
    return kInadmissibleR;
  }
  catch (MissingCertificateError const &e)
  {
    err << "entbound: " << e.what() << '\n';
    return kMissingCertificate;
  }
  catch (ResourceLimitError const &e)
  {
    err << "entbound: resource limit: " << e.what() << '\n';
    return kResourceLimit;
  }
  catch (std::exception const &e)
  {
    err << "entbound: error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace

PmfModel parse_model_spec(std::string_view text)
{
  auto const colon = text.find(':');
  if (colon == std::string_view::npos)
  {
    throw ParseError("model spec \"" + std::string(text) +
                     "\": expected family:param[,param], e.g. poisson:1.0");
  }
  std::string_view const family = text.substr(0, colon);
  std::string_view const rest   = text.substr(colon + 1);

  if (family == "tabulated")
  {
    if (rest.empty())
    {
      throw ParseError("model spec \"" + std::string(text) + "\": missing file path");
    }
    return load_tabulated(std::filesystem::path(std::string(rest)));
  }

  auto const params = split(rest, ',');
  auto const expect = [&](std::size_t count) {
    if (params.size() != count)
    {
      throw ParseError("model spec \"" + std::string(text) + "\": family \"" +
                       std::string(family) + "\" takes " + std::to_string(count) +
                       " parameter(s)");
    }
  };
  try
  {
    if (family == "poisson")
    {
      expect(1);
      return PmfModel::poisson(parse_number(params[0], text));
    }
    if (family == "geometric")
    {
      expect(1);
      return PmfModel::geometric(parse_number(params[0], text));
    }
    if (family == "negbinomial")
    {
      expect(2);
      return PmfModel::negative_binomial(parse_number(params[0], text),
                                         parse_number(params[1], text));
    }
    if (family == "zeta")
    {
      expect(1);
      return PmfModel::zeta(parse_number(params[0], text));
    }
  }
  catch (DomainError const &e)
  {
    throw ParseError("model spec \"" + std::string(text) + "\": " + e.what());
  }
  throw ParseError("model spec \"" + std::string(text) + "\": unknown family \"" +
                   std::string(family) + "\"");
}

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Certified Bernstein-type concentration bounds for the log-likelihood of "
               "discrete distributions on countable alphabets. Entropies and eps are in nats."};
  app.name(args.empty() ? "entbound" : args.front());
  app.require_subcommand(1);

  Common                   common;
  SimFlags                 sim;
  std::optional<double>    optimize_for;
  std::int64_t             n     = 0;
  double                   eps   = 0.0;
  double                   delta = 0.05;
  std::vector<std::string> models;

  auto *certify_cmd = app.add_subcommand("certify", "Certify sum_k p_k^(1-r) <= C_r");
  certify_cmd->add_option("model", common.model, "Model spec, e.g. zeta:2.0");
  add_certify_opts(certify_cmd, common);
  certify_cmd->add_option("--optimize-for", optimize_for,
                          "Pick r on a 21-point grid minimising c1 + c2 * EPS");
  add_format(certify_cmd, common);

  auto *bound_cmd = app.add_subcommand("bound", "Evaluate 2 exp(-n eps^2 / (c1 + c2 eps))");
  bound_cmd->add_option("model", common.model, "Model spec");
  bound_cmd->add_option("--cert", common.cert_path, "Saved certificate JSON (instead of a model)");
  add_certify_opts(bound_cmd, common);
  bound_cmd->add_option("--n", n, "Sample size")->required();
  bound_cmd->add_option("--eps", eps, "Deviation threshold in nats")->required();
  add_format(bound_cmd, common);

  auto *size_cmd = app.add_subcommand("samplesize", "Smallest n with bound <= delta");
  size_cmd->add_option("model", common.model, "Model spec");
  size_cmd->add_option("--cert", common.cert_path, "Saved certificate JSON (instead of a model)");
  add_certify_opts(size_cmd, common);
  size_cmd->add_option("--eps", eps, "Deviation threshold in nats")->required();
  size_cmd->add_option("--delta", delta, "Target failure probability")->capture_default_str();
  add_format(size_cmd, common);

  auto const add_sim_opts = [&](CLI::App *cmd) {
    add_certify_opts(cmd, common);
    cmd->add_option("--n", sim.n, "Samples per replicate")->capture_default_str();
    cmd->add_option("--eps", sim.eps, "Deviation thresholds in nats (comma separated)")
        ->delimiter(',');
    cmd->add_option("--replicates", sim.replicates, "Replicates per config")
        ->capture_default_str();
    cmd->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--entropy-tol", sim.entropy_tol,
                    "Entropy interval tolerance (default min(eps)/100)");
    cmd->add_option("--config", sim.config_path, "JSON config mirroring SimulationConfig");
    add_format(cmd, common);
  };

  auto *sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the deviation bound");
  sim_cmd->add_option("model", common.model, "Model spec");
  add_sim_opts(sim_cmd);

  auto *sweep_cmd = app.add_subcommand("sweep", "Simulate several models with derived seeds");
  sweep_cmd->add_option("models", models, "Model specs");
  add_sim_opts(sweep_cmd);

  std::vector<char const *> argv;
  argv.reserve(args.size() + 1);
  std::vector<std::string> storage = args;
  if (storage.empty())
  {
    storage.push_back("entbound");
  }
  for (auto const &a : storage)
  {
    argv.push_back(a.c_str());
  }

  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (CLI::ParseError const &e)
  {
    if (e.get_exit_code() == 0)
    {
      app.exit(e, out, err);
      return kOk;
    }
    err << "entbound: usage: " << e.what() << '\n';
    return kUsage;
  }

  try
  {
    if (certify_cmd->parsed())
    {
      return cmd_certify(common, optimize_for, out);
    }
    if (bound_cmd->parsed())
    {
      return cmd_bound(common, n, eps, out);
    }
    if (size_cmd->parsed())
    {
      return cmd_samplesize(common, eps, delta, out);
    }
    if (sim_cmd->parsed())
    {
      return cmd_simulate(*sim_cmd, common, sim, out);
    }
    return cmd_sweep(*sweep_cmd, common, models, sim, out, err);
  }
  catch (...)
  {
    return exit_code_for(std::current_exception(), err);
  }
}

}  // namespace entbound::cli
