#include "horseshoe/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

#include "horseshoe/errors.hpp"
#include "horseshoe/estimators.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/posterior_core.hpp"
#include "horseshoe/special_integrals.hpp"

namespace horseshoe {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw InvalidArgument("config field '" + field + "': " + why);
}

struct Summary {
  double mean = kNaN;
  double se = kNaN;
};

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) {
    s.se = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return s;
}

std::vector<ResultRow> aggregate(const ExperimentConfig& config, const std::vector<ReplicationOutcome>& reps) {
  const auto cs = cells(config);
  const double n = static_cast<double>(config.n);
  std::vector<ResultRow> rows;
  for (const auto& cell : cs) {
    const double p = static_cast<double>(cell.p);
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      std::vector<double> overall, nonzero, zero, sse, tau;
      for (const auto& r : reps) {
        if (r.cell.index != cell.index) continue;
        const auto& o = r.methods[m];
        const double total = o.sse_nonzero + o.sse_zero;
        overall.push_back(total / n);
        sse.push_back(total);
        if (cell.p > 0) nonzero.push_back(o.sse_nonzero / p);
        if (cell.p < config.n) zero.push_back(o.sse_zero / (n - p));
        tau.push_back(o.tau);
      }
      ResultRow row;
      row.method = std::string(to_string(config.methods[m]));
      row.p = cell.p;
      row.A = cell.A;
      row.replications = tau.size();
      const auto so = summarize(overall), sn = summarize(nonzero), sz = summarize(zero), ss = summarize(sse),
                 st = summarize(tau);
      row.mse_overall = so.mean;
      row.se_mse_overall = so.se;
      row.mse_nonzero = sn.mean;
      row.se_mse_nonzero = sn.se;
      row.mse_zero = sz.mean;
      row.se_mse_zero = sz.se;
      row.sse = ss.mean;
      row.se_sse = ss.se;
      row.mean_tau = st.mean;
      row.se_mean_tau = st.se;
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentResult run_all(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto cs = cells(config);
  const std::size_t reps = config.replications;
  ExperimentResult result;
  result.config = config;
  result.replications.resize(cs.size() * reps);
  parallel_for(result.replications.size(), [&](std::size_t t) {
    result.replications[t] = run_replication(config, cs[t / reps], t % reps);
  });
  result.rows = aggregate(config, result.replications);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

template <typename T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    std::string expected = "a number";
    if constexpr (std::is_same_v<T, std::string>) expected = "a string";
    if constexpr (std::is_same_v<T, bool>) expected = "a boolean";
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) expected = "a non-negative integer";
    bad_field(key, "expected " + expected);
  }
}

template <typename T>
std::vector<T> get_list(const json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_array()) bad_field(key, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      if constexpr (std::is_integral_v<T>) {
        if (!v[i].is_number_unsigned()) throw std::invalid_argument("type");
      } else {
        if (!v[i].is_number()) throw std::invalid_argument("type");
      }
      out.push_back(v[i].get<T>());
    } catch (const std::exception&) {
      bad_field(key + "[" + std::to_string(i) + "]",
                std::is_integral_v<T> ? "expected a non-negative integer" : "expected a number");
    }
  }
  return out;
}

std::size_t get_count(const json& j, const std::string& key) {
  if (!j.at(key).is_number_unsigned()) bad_field(key, "expected a non-negative integer");
  return j.at(key).get<std::size_t>();
}

}  // namespace

std::string_view to_string(SignalLaw v) { return v == SignalLaw::fixed ? "fixed" : "gaussian"; }
std::string_view to_string(NullLaw v) { return v == NullLaw::zero ? "zero" : "gaussian"; }

std::string_view to_string(Method v) {
  switch (v) {
    case Method::eb_simple:
      return "eb_simple";
    case Method::eb_mmle:
      return "eb_mmle";
    case Method::hb_cauchy:
      return "hb_cauchy";
    case Method::hb_truncated_cauchy:
      return "hb_truncated_cauchy";
  }
  return "eb_simple";
}

SignalLaw parse_signal_law(std::string_view s) {
  if (s == "fixed") return SignalLaw::fixed;
  if (s == "gaussian") return SignalLaw::gaussian;
  throw InvalidArgument("unknown signal law '" + std::string(s) + "' (expected fixed or gaussian)");
}

NullLaw parse_null_law(std::string_view s) {
  if (s == "zero") return NullLaw::zero;
  if (s == "gaussian") return NullLaw::gaussian;
  throw InvalidArgument("unknown null law '" + std::string(s) + "' (expected zero or gaussian)");
}

Method parse_method(std::string_view s) {
  for (auto m : {Method::eb_simple, Method::eb_mmle, Method::hb_cauchy, Method::hb_truncated_cauchy}) {
    if (s == to_string(m)) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(s) +
                        "' (expected eb_simple, eb_mmle, hb_cauchy or hb_truncated_cauchy)");
}

void ExperimentConfig::validate() const {
  if (n < 2) bad_field("n", "must be at least 2");
  if (experiment != "figure4") {
    if (p_values.empty()) bad_field("p_values", "must not be empty");
    for (auto p : p_values) {
      if (p > n) bad_field("p_values", "every p must be <= n (" + std::to_string(p) + " > " + std::to_string(n) + ")");
    }
    if (A_values.empty()) bad_field("A_values", "must not be empty");
    for (double a : A_values) {
      if (!std::isfinite(a)) bad_field("A_values", "values must be finite");
    }
    if (replications < 1) bad_field("replications", "must be at least 1");
    if (methods.empty()) bad_field("methods", "must not be empty");
    if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
      bad_field("methods", "contains duplicates");
    }
  }
  if (!(null_sd > 0.0) || !std::isfinite(null_sd)) bad_field("null_sd", "must be positive");
  if (mmle_grid_points < 1) bad_field("mmle_grid_points", "must be at least 1");
  if (!(mmle_log_tau_tol > 0.0 && mmle_log_tau_tol < 1.0)) bad_field("mmle_log_tau_tol", "must lie in (0, 1)");
  if (tau_grid_size < 50) bad_field("tau_grid_size", "must be at least 50");
  if (!(quadrature.rel >= 1e-14 && quadrature.rel <= 1e-4)) bad_field("quadrature_rel_tol", "must lie in [1e-14, 1e-4]");
  if (!(tau_min > 0.0 && tau_min < tau_max && tau_max < 1.0)) bad_field("tau_min/tau_max", "need 0 < tau_min < tau_max < 1");
  if (tau_points < 1) bad_field("tau_points", "must be at least 1");
}

ExperimentConfig ExperimentConfig::figure2() {
  ExperimentConfig c;
  c.experiment = "figure2";
  c.n = 100;
  c.p_values = {5, 20, 35, 50, 65, 80};
  c.signal_law = SignalLaw::gaussian;
  c.null_law = NullLaw::gaussian;
  c.null_sd = 0.5;
  c.A_values = {1.0, 4.0, 7.0};
  c.replications = 200;
  c.seed = 20170101;
  c.methods = {Method::eb_simple, Method::eb_mmle};
  return c;
}

ExperimentConfig ExperimentConfig::figure3() {
  ExperimentConfig c;
  c.experiment = "figure3";
  c.n = 400;
  c.p_values = {20, 200};
  c.signal_law = SignalLaw::fixed;
  c.null_law = NullLaw::zero;
  c.A_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.replications = 50;
  c.seed = 20170103;
  c.methods = {Method::eb_simple, Method::eb_mmle, Method::hb_cauchy, Method::hb_truncated_cauchy};
  return c;
}

ExperimentConfig ExperimentConfig::figure4() {
  ExperimentConfig c;
  c.experiment = "figure4";
  return c;
}

const std::vector<std::string>& ExperimentConfig::preset_names() {
  static const std::vector<std::string> names{"figure2", "figure3", "figure4", "custom"};
  return names;
}

ExperimentConfig ExperimentConfig::preset(std::string_view name) {
  if (name == "figure2") return figure2();
  if (name == "figure3") return figure3();
  if (name == "figure4") return figure4();
  if (name == "custom") return ExperimentConfig{};
  throw InvalidArgument("unknown experiment preset '" + std::string(name) +
                        "' (valid presets: figure2, figure3, figure4, custom)");
}

std::vector<Cell> cells(const ExperimentConfig& config) {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < config.p_values.size(); ++i) {
    for (std::size_t j = 0; j < config.A_values.size(); ++j) {
      out.push_back({out.size(), config.p_values[i], config.A_values[j]});
    }
  }
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t cell, std::size_t replication) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(cell));
  return splitmix64(s ^ (static_cast<std::uint64_t>(replication) << 1 | 1u));
}

Truth generate_truth(const ExperimentConfig& config, const Cell& cell, std::size_t replication) {
  std::mt19937_64 rng(stream_seed(config.seed, cell.index, replication));
  std::normal_distribution<double> normal(0.0, 1.0);
  Truth t;
  t.theta.resize(config.n);
  t.y.resize(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    if (i < cell.p) {
      t.theta[i] = config.signal_law == SignalLaw::fixed ? cell.A : cell.A + normal(rng);
    } else {
      t.theta[i] = config.null_law == NullLaw::zero ? 0.0 : config.null_sd * normal(rng);
    }
  }
  for (std::size_t i = 0; i < config.n; ++i) t.y[i] = t.theta[i] + normal(rng);
  return t;
}

ReplicationOutcome run_replication(const ExperimentConfig& config, const Cell& cell, std::size_t replication,
                                   bool with_mse) {
  const auto truth = generate_truth(config, cell, replication);
  const auto& y = truth.y;
  const auto& tol = config.quadrature;
  ReplicationOutcome out;
  out.cell = cell;
  out.replication = replication;

  for (Method method : config.methods) {
    MethodOutcome o;
    o.method = method;
    std::vector<CoordinatePosterior> post;
    switch (method) {
      case Method::eb_simple:
        o.tau = simple_estimator(y);
        if (with_mse) post = eb_fit(y, o.tau, tol);
        break;
      case Method::eb_mmle: {
        MMLEOptions opt;
        opt.grid_points = config.mmle_grid_points;
        opt.log_tau_tol = config.mmle_log_tau_tol;
        opt.quadrature = tol;
        o.tau = mmle(y, opt).tau_hat;
        if (with_mse) post = eb_fit(y, o.tau, tol);
        break;
      }
      case Method::hb_cauchy:
      case Method::hb_truncated_cauchy: {
        const auto family =
            method == Method::hb_cauchy ? PriorFamily::half_cauchy : PriorFamily::truncated_cauchy;
        auto tp = tau_posterior(y, TauPrior::standard(family, config.n), config.tau_grid_size, tol);
        o.tau = tp.mean();
        if (with_mse) post = hb_fit(y, tp, tol);
        o.tau_posterior = std::move(tp);
        break;
      }
    }
    if (with_mse) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = post[i].mean - truth.theta[i];
        (i < cell.p ? o.sse_nonzero : o.sse_zero) += e * e;
      }
      if (config.keep_posterior_means) {
        o.posterior_mean.resize(post.size());
        std::transform(post.begin(), post.end(), o.posterior_mean.begin(),
                       [](const CoordinatePosterior& c) { return c.mean; });
      }
    } else {
      o.sse_nonzero = o.sse_zero = kNaN;
    }
    out.methods.push_back(std::move(o));
  }
  return out;
}

ExperimentResult run_estimator_comparison(const ExperimentConfig& config) {
  const auto has = [&](Method m) { return std::find(config.methods.begin(), config.methods.end(), m) != config.methods.end(); };
  if (!has(Method::eb_simple) || !has(Method::eb_mmle)) {
    bad_field("methods", "the estimator comparison needs eb_simple and eb_mmle");
  }
  return run_all(config);
}

ExperimentResult run_mse_experiment(const ExperimentConfig& config) { return run_all(config); }

double e0_mtau_asymptote(double tau) {
  return -(2.0 * std::numbers::sqrt2 / std::pow(std::numbers::pi, 1.5)) * tau / zeta(tau);
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi >= lo)) throw InvalidArgument("log grid needs 0 < lo <= hi");
  if (points == 0) throw InvalidArgument("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<MTauPoint> run_mtau_curve(const std::vector<double>& taus, const quad::Tolerance& tol) {
  for (double t : taus) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("tau grid must lie inside (0, 1)");
  }
  std::vector<MTauPoint> out(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) {
    out[i] = {taus[i], expected_m_tau_null(taus[i], tol), e0_mtau_asymptote(taus[i])};
  });
  return out;
}

std::string library_version() { return "0.1.0"; }

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");

  std::string name = "custom";
  if (j.contains("experiment")) name = get_field<std::string>(j, "experiment");
  ExperimentConfig c = ExperimentConfig::preset(name);

  static const std::set<std::string> known{
      "experiment",   "n",         "p_values",         "signal_law",       "null_law",
      "null_sd",      "A_values",  "replications",     "seed",             "methods",
      "mmle_grid_points", "mmle_log_tau_tol", "tau_grid_size", "quadrature_rel_tol", "tau_min",
      "tau_max",      "tau_points"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) bad_field(key, "unknown field");
  }

  if (j.contains("n")) c.n = get_count(j, "n");
  if (j.contains("p_values")) c.p_values = get_list<std::size_t>(j, "p_values");
  if (j.contains("A_values")) c.A_values = get_list<double>(j, "A_values");
  if (j.contains("signal_law")) {
    try {
      c.signal_law = parse_signal_law(get_field<std::string>(j, "signal_law"));
    } catch (const InvalidArgument& e) {
      bad_field("signal_law", e.what());
    }
  }
  if (j.contains("null_law")) {
    try {
      c.null_law = parse_null_law(get_field<std::string>(j, "null_law"));
    } catch (const InvalidArgument& e) {
      bad_field("null_law", e.what());
    }
  }
  if (j.contains("null_sd")) c.null_sd = get_field<double>(j, "null_sd");
  if (j.contains("replications")) c.replications = get_count(j, "replications");
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(get_count(j, "seed"));
  if (j.contains("methods")) {
    const auto& v = j.at("methods");
    if (!v.is_array()) bad_field("methods", "expected a list");
    c.methods.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string key = "methods[" + std::to_string(i) + "]";
      if (!v[i].is_string()) bad_field(key, "expected a string");
      try {
        c.methods.push_back(parse_method(v[i].get<std::string>()));
      } catch (const InvalidArgument& e) {
        bad_field(key, e.what());
      }
    }
  }
  if (j.contains("mmle_grid_points")) c.mmle_grid_points = get_count(j, "mmle_grid_points");
  if (j.contains("mmle_log_tau_tol")) c.mmle_log_tau_tol = get_field<double>(j, "mmle_log_tau_tol");
  if (j.contains("tau_grid_size")) c.tau_grid_size = get_count(j, "tau_grid_size");
  if (j.contains("quadrature_rel_tol")) c.quadrature.rel = get_field<double>(j, "quadrature_rel_tol");
  if (j.contains("tau_min")) c.tau_min = get_field<double>(j, "tau_min");
  if (j.contains("tau_max")) c.tau_max = get_field<double>(j, "tau_max");
  if (j.contains("tau_points")) c.tau_points = get_count(j, "tau_points");
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["n"] = c.n;
  j["p_values"] = c.p_values;
  j["signal_law"] = std::string(to_string(c.signal_law));
  j["null_law"] = std::string(to_string(c.null_law));
  j["null_sd"] = c.null_sd;
  j["A_values"] = c.A_values;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["mmle_grid_points"] = c.mmle_grid_points;
  j["mmle_log_tau_tol"] = c.mmle_log_tau_tol;
  j["tau_grid_size"] = c.tau_grid_size;
  j["quadrature_rel_tol"] = c.quadrature.rel;
  j["tau_min"] = c.tau_min;
  j["tau_max"] = c.tau_max;
  j["tau_points"] = c.tau_points;
  return j.dump(2);
}

std::string result_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "method,p,A,replications,mse_overall,mse_nonzero,mse_zero,sse,mean_tau,"
        "se_mse_overall,se_mse_nonzero,se_mse_zero,se_sse,se_mean_tau\n";
  for (const auto& r : result.rows) {
    os << r.method << ',' << r.p << ',' << fmt(r.A) << ',' << r.replications << ',' << fmt(r.mse_overall) << ','
       << fmt(r.mse_nonzero) << ',' << fmt(r.mse_zero) << ',' << fmt(r.sse) << ',' << fmt(r.mean_tau) << ','
       << fmt(r.se_mse_overall) << ',' << fmt(r.se_mse_nonzero) << ',' << fmt(r.se_mse_zero) << ','
       << fmt(r.se_sse) << ',' << fmt(r.se_mean_tau) << '\n';
  }
  return os.str();
}

std::string result_metadata_json(const ExperimentResult& result) {
  json j;
  j["config"] = json::parse(config_to_json(result.config));
  j["library_version"] = library_version();
  j["wall_seconds"] = result.wall_seconds;
  j["threads"] = thread_count();
  j["rng"] = {
      {"engine", "mt19937_64"},
      {"stream_seed", "splitmix64 chain over (seed, cell index, replication)"},
      {"cell_order", "p-major: index = i_p * |A_values| + i_A"},
  };
  j["point_estimate"] = "posterior mean";
  j["mse"] = "per-coordinate means; sse = n * mse_overall";
  return j.dump(2) + "\n";
}

std::string mtau_csv(const std::vector<MTauPoint>& rows) {
  std::ostringstream os;
  os << "tau,e0_mtau,asymptote\n";
  for (const auto& r : rows) os << fmt(r.tau) << ',' << fmt(r.e0_mtau) << ',' << fmt(r.asymptote) << '\n';
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace horseshoe
