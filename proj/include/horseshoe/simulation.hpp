#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "horseshoe/hierarchical.hpp"
#include "horseshoe/quadrature.hpp"

namespace horseshoe {

enum class SignalLaw { fixed, gaussian };
enum class NullLaw { zero, gaussian };
enum class Method { eb_simple, eb_mmle, hb_cauchy, hb_truncated_cauchy };

std::string_view to_string(SignalLaw v);
std::string_view to_string(NullLaw v);
std::string_view to_string(Method v);
SignalLaw parse_signal_law(std::string_view s);
NullLaw parse_null_law(std::string_view s);
Method parse_method(std::string_view s);

struct ExperimentConfig {
  std::string experiment = "custom";
  std::size_t n = 100;
  std::vector<std::size_t> p_values;
  /// fixed: nonzero means equal A; gaussian: drawn from N(A, 1).
  SignalLaw signal_law = SignalLaw::fixed;
  /// zero: exact zeros; gaussian: N(0, null_sd^2).
  NullLaw null_law = NullLaw::zero;
  double null_sd = 0.5;
  std::vector<double> A_values;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  std::vector<Method> methods;

  std::size_t mmle_grid_points = 50;
  double mmle_log_tau_tol = 1e-6;
  std::size_t tau_grid_size = 400;
  quad::Tolerance quadrature{};
  /// Keep per-replication posterior means (needed only for stability checks).
  bool keep_posterior_means = false;

  /// Log-uniform tau grid for the E_0 m_tau curve.
  double tau_min = 1e-6;
  double tau_max = 0.99;
  std::size_t tau_points = 40;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  /// n = 100, N(A, 1) signals among N(0, 1/4) nulls, A in {1, 4, 7}.
  static ExperimentConfig figure2();
  /// n = 400, p in {20, 200}, fixed signals A = 1..10 among exact zeros.
  static ExperimentConfig figure3();
  /// The E_0 m_tau curve on a 40-point log grid over [1e-6, 0.99].
  static ExperimentConfig figure4();
  /// Preset by name: figure2, figure3, figure4 or custom.
  static ExperimentConfig preset(std::string_view name);
  static const std::vector<std::string>& preset_names();
};

struct Cell {
  std::size_t index = 0;
  std::size_t p = 0;
  double A = 0.0;
};

/// Cells in p-major order: index = i_p * |A_values| + i_A.
std::vector<Cell> cells(const ExperimentConfig& config);

struct Truth {
  std::vector<double> theta;
  std::vector<double> y;
};

/// Seed of the independent stream for one (cell, replication); used for
/// reproducibility under any schedule.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t cell, std::size_t replication);

/// The first p coordinates carry the signal law, the rest the null law; Y = theta + N(0, 1) noise.
Truth generate_truth(const ExperimentConfig& config, const Cell& cell, std::size_t replication);

struct MethodOutcome {
  Method method = Method::eb_simple;
  /// Plug-in tau for EB methods, posterior mean of tau for HB methods.
  double tau = 0.0;
  double sse_nonzero = 0.0;
  double sse_zero = 0.0;
  std::vector<double> posterior_mean;
  std::optional<TauPosterior> tau_posterior;
};

struct ReplicationOutcome {
  Cell cell;
  std::size_t replication = 0;
  std::vector<MethodOutcome> methods;
};

/// Fits every configured method on one generated data set. with_mse = false
/// skips the posterior means and reports only tau.
ReplicationOutcome run_replication(const ExperimentConfig& config, const Cell& cell, std::size_t replication,
                                   bool with_mse = true);

struct ResultRow {
  std::string method;
  std::size_t p = 0;
  double A = 0.0;
  std::size_t replications = 0;
  /// Per-coordinate mean squared errors; mse_nonzero is NaN when p = 0 and
  /// mse_zero is NaN when p = n.
  double mse_overall = 0.0;
  double mse_nonzero = 0.0;
  double mse_zero = 0.0;
  /// Squared error summed over all n coordinates (n * mse_overall).
  double sse = 0.0;
  double mean_tau = 0.0;
  double se_mse_overall = 0.0;
  double se_mse_nonzero = 0.0;
  double se_mse_zero = 0.0;
  double se_sse = 0.0;
  double se_mean_tau = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::vector<ReplicationOutcome> replications;
  double wall_seconds = 0.0;
};

/// Average tau-hat (and plug-in posterior-mean MSE) of each method per (p, A) cell.
/// Requires eb_simple and eb_mmle among the methods.
ExperimentResult run_estimator_comparison(const ExperimentConfig& config);

/// Posterior-mean MSE per cell and method, split over nonzero and zero coordinates.
ExperimentResult run_mse_experiment(const ExperimentConfig& config);

struct MTauPoint {
  double tau = 0.0;
  double e0_mtau = 0.0;
  double asymptote = 0.0;
};

/// -(2^{3/2} / pi^{3/2}) tau / zeta_tau.
double e0_mtau_asymptote(double tau);

std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<MTauPoint> run_mtau_curve(const std::vector<double>& taus, const quad::Tolerance& tol = {});

std::string library_version();

ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& config);

std::string result_csv(const ExperimentResult& result);
std::string result_metadata_json(const ExperimentResult& result);
std::string mtau_csv(const std::vector<MTauPoint>& rows);

/// Writes via a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace horseshoe
