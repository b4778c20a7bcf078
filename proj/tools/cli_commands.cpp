#include "cli_commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "horseshoe/errors.hpp"
#include "horseshoe/estimators.hpp"
#include "horseshoe/hierarchical.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/posterior_core.hpp"
#include "horseshoe/simulation.hpp"

namespace horseshoe::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct MethodChoice {
  enum Kind { eb_mmle, eb_simple, hb } kind = eb_mmle;
  PriorFamily family = PriorFamily::truncated_cauchy;
  std::string label;
};

MethodChoice parse_fit_method(const std::string& method, const std::optional<std::string>& prior) {
  MethodChoice c;
  c.label = method;
  if (method == "eb_mmle" || method == "eb_simple") {
    if (prior) throw InvalidArgument("--prior only applies to hierarchical methods");
    c.kind = method == "eb_mmle" ? MethodChoice::eb_mmle : MethodChoice::eb_simple;
    return c;
  }
  c.kind = MethodChoice::hb;
  std::optional<PriorFamily> from_name;
  if (method.rfind("hb_", 0) == 0) {
    const std::string fam = method.substr(3);
    from_name = fam == "cauchy" ? PriorFamily::half_cauchy : parse_prior_family(fam);
  } else if (method != "hb") {
    throw InvalidArgument("unknown method '" + method + "' (expected eb_mmle, eb_simple, hb or hb_<family>)");
  }
  std::optional<PriorFamily> from_flag;
  if (prior) from_flag = *prior == "cauchy" ? PriorFamily::half_cauchy : parse_prior_family(*prior);
  if (from_name && from_flag && *from_name != *from_flag) {
    throw InvalidArgument("--prior conflicts with --method " + method);
  }
  c.family = from_name ? *from_name : from_flag.value_or(PriorFamily::truncated_cauchy);
  c.label = "hb_" + std::string(to_string(c.family));
  return c;
}

void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path || *path == "-") {
    out << text;
  } else {
    write_file_atomic(*path, text);
  }
}

struct FitArgs {
  std::string input;
  std::string method = "eb_mmle";
  double c1 = 2.0;
  double c2 = 1.0;
  std::optional<std::string> prior;
  std::optional<std::size_t> grid_size;
  std::optional<double> level;
  std::optional<std::string> out;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  // Everything is validated before the data are touched.
  const auto method = parse_fit_method(a.method, a.prior);
  if (!(a.c1 > 0.0) || !(a.c2 > 0.0)) throw InvalidArgument("--c1 and --c2 must be positive");
  if (a.level && !(*a.level > 0.0 && *a.level < 1.0)) throw InvalidArgument("--level must lie in (0, 1)");
  if (a.grid_size) {
    if (method.kind == MethodChoice::hb && *a.grid_size < 50) throw InvalidArgument("--grid-size must be >= 50 for hb");
    if (*a.grid_size < 1) throw InvalidArgument("--grid-size must be positive");
  }

  const auto ys = read_observations(a.input);
  std::ostringstream os;
  os << "# method: " << method.label << '\n' << "# n: " << ys.size() << '\n';

  std::vector<CoordinatePosterior> post;
  std::vector<std::pair<double, double>> intervals;
  switch (method.kind) {
    case MethodChoice::eb_simple:
    case MethodChoice::eb_mmle: {
      double tau = 0.0;
      if (method.kind == MethodChoice::eb_simple) {
        tau = simple_estimator(ys, {a.c1, a.c2});
        os << "# c1: " << num(a.c1) << '\n' << "# c2: " << num(a.c2) << '\n';
        os << "# tau_hat: " << num(tau) << '\n';
      } else {
        MMLEOptions opt;
        if (a.grid_size) opt.grid_points = *a.grid_size;
        const auto r = mmle(ys, opt);
        tau = r.tau_hat;
        os << "# tau_hat: " << num(tau) << '\n' << "# boundary: " << to_string(r.boundary) << '\n';
      }
      post = eb_fit(ys, tau);
      if (a.level) {
        intervals.resize(ys.size());
        parallel_for(ys.size(), [&](std::size_t i) { intervals[i] = posterior_interval(ys[i], tau, *a.level); });
      }
      break;
    }
    case MethodChoice::hb: {
      const auto prior = TauPrior::standard(method.family, ys.size());
      const auto tp = tau_posterior(ys, prior, a.grid_size.value_or(400));
      os << "# prior: " << to_string(method.family) << '\n'
         << "# grid_size: " << tp.grid.size() << '\n'
         << "# tau_posterior_mean: " << num(tp.mean()) << '\n';
      post = hb_fit(ys, tp);
      if (a.level) {
        intervals.resize(ys.size());
        parallel_for(ys.size(), [&](std::size_t i) { intervals[i] = hb_interval(ys[i], tp, *a.level); });
      }
      break;
    }
  }

  if (a.level) os << "# level: " << num(*a.level) << '\n';
  os << "index,y,post_mean,post_var" << (a.level ? ",lower,upper" : "") << '\n';
  for (std::size_t i = 0; i < ys.size(); ++i) {
    os << i << ',' << num(ys[i]) << ',' << num(post[i].mean) << ',' << num(post[i].variance);
    if (a.level) os << ',' << num(intervals[i].first) << ',' << num(intervals[i].second);
    os << '\n';
  }
  emit(a.out, os.str(), out);
  return ok;
}

struct ProfileArgs {
  std::string input;
  std::size_t grid_size = 200;
  std::optional<std::string> out;
};

int cmd_profile(const ProfileArgs& a, std::ostream& out) {
  if (a.grid_size < 1) throw InvalidArgument("--grid-size must be positive");
  const auto ys = read_observations(a.input);
  MMLEOptions opt;
  opt.grid_points = a.grid_size;
  opt.keep_profile = true;
  const auto r = mmle(ys, opt);
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.profile.size(); ++i) {
    if (r.profile[i].second > r.profile[best].second) best = i;
  }
  std::ostringstream os;
  os << "# n: " << ys.size() << '\n'
     << "# grid: " << a.grid_size << " log-uniform points on [1/n, 1]\n"
     << "# mmle_tau: " << num(r.tau_hat) << '\n'
     << "# mmle_log_likelihood: " << num(r.log_likelihood_at_max) << '\n'
     << "tau,log_likelihood,mmle\n";
  for (std::size_t i = 0; i < r.profile.size(); ++i) {
    os << num(r.profile[i].first) << ',' << num(r.profile[i].second) << ',' << (i == best ? 1 : 0) << '\n';
  }
  emit(a.out, os.str(), out);
  return ok;
}

struct SimulateArgs {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  ExperimentConfig config;
  if (a.config) {
    std::ifstream in(*a.config);
    if (!in) throw InputError("cannot read config file " + *a.config);
    std::stringstream buf;
    buf << in.rdbuf();
    config = config_from_json(buf.str());
  } else {
    config = ExperimentConfig::preset(a.preset.value_or("figure4"));
  }
  if (a.seed) config.seed = *a.seed;
  config.validate();

  const std::string meta_path = a.out + ".meta.json";
  if (config.experiment == "figure4") {
    const auto start = std::chrono::steady_clock::now();
    const auto rows = run_mtau_curve(log_grid(config.tau_min, config.tau_max, config.tau_points), config.quadrature);
    ExperimentResult meta;
    meta.config = config;
    meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file_atomic(a.out, mtau_csv(rows));
    write_file_atomic(meta_path, result_metadata_json(meta));
    return ok;
  }
  const auto result = config.experiment == "figure2" ? run_estimator_comparison(config) : run_mse_experiment(config);
  write_file_atomic(a.out, result_csv(result));
  write_file_atomic(meta_path, result_metadata_json(result));
  return ok;
}

}  // namespace

std::vector<double> parse_observations(std::istream& in, const std::string& source) {
  std::vector<double> ys;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw InputError(source + ":" + std::to_string(lineno) + ": cannot parse '" + t + "' as a finite number");
    }
    ys.push_back(v);
  }
  if (ys.empty()) throw InputError(source + ": no observations");
  return ys;
}

std::vector<double> read_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return parse_observations(in, path.string());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Horseshoe-prior estimation for sparse normal means"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: HORSESHOE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Posterior summaries for observations, one per line");
  fit_cmd->add_option("input", fit.input, "Input file")->required();
  fit_cmd->add_option("--method", fit.method, "eb_mmle, eb_simple, hb, or hb_<family>");
  fit_cmd->add_option("--c1", fit.c1, "Threshold constant of the simple estimator");
  fit_cmd->add_option("--c2", fit.c2, "Scale constant of the simple estimator");
  fit_cmd->add_option("--prior", fit.prior, "Hyperprior family for hb: truncated_cauchy, uniform, reciprocal, half_cauchy");
  fit_cmd->add_option("--grid-size", fit.grid_size, "MMLE grid points or tau-posterior grid size");
  fit_cmd->add_option("--level", fit.level, "Credible level for equal-tailed intervals");
  fit_cmd->add_option("--out", fit.out, "Output CSV (default: stdout)");
  fit_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  ProfileArgs prof;
  auto* prof_cmd = app.add_subcommand("profile", "Tabulate the log marginal likelihood over tau");
  prof_cmd->add_option("input", prof.input, "Input file")->required();
  prof_cmd->add_option("--grid-size", prof.grid_size, "Number of log-uniform grid points on [1/n, 1]");
  prof_cmd->add_option("--out", prof.out, "Output CSV (default: stdout)");
  prof_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation experiment");
  auto* cfg_opt = sim_cmd->add_option("config", sim.config, "JSON experiment config");
  sim_cmd->add_option("--preset", sim.preset, "figure2, figure3, figure4 or custom")->excludes(cfg_opt);
  sim_cmd->add_option("--seed", sim.seed, "Override the config seed");
  sim_cmd->add_option("--out", sim.out, "Output CSV; metadata goes to <out>.meta.json")->required();
  sim_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (fit_cmd->parsed()) return cmd_fit(fit, out);
    if (prof_cmd->parsed()) return cmd_profile(prof, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const AccuracyError& e) {
    err << "accuracy failure: " << e.what() << '\n';
    return accuracy;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
  return usage;
}

}  // namespace horseshoe::cli
