#pragma once

#include "lrdtest/rng.hpp"
#include "lrdtest/sample.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrd::sim {

/// Coefficients psi_j(d) = Gamma(j+d) / (Gamma(d) Gamma(j+1)), j = 0..J,
/// of the fractional filter (1-B)^-d.
struct FractionalWeights {
  double d = 0.0;
  std::vector<double> psi;

  std::size_t truncation() const { return psi.empty() ? 0 : psi.size() - 1; }
};

/// Stable recursion psi_j = psi_{j-1} (j-1+d)/j. Throws ConfigError unless
/// 0 <= d < 1/2.
FractionalWeights psi_weights(double d, std::size_t truncation);

/// Memory parameter: a constant or a function d(t) on [0, 1].
class MemoryParameter {
 public:
  MemoryParameter(double d = 0.0);  // NOLINT: implicit from a constant
  explicit MemoryParameter(std::function<double(double)> d_of_t,
                           std::string label = "d(t)");

  /// d2(t) = 0.35 + 0.1 cos(2 pi t).
  static MemoryParameter cosine_profile();

  bool is_constant() const { return !fn_; }
  double at(double t) const { return fn_ ? fn_(t) : value_; }
  /// True when d is identically zero (no fractional filtering needed).
  bool is_zero() const { return !fn_ && value_ == 0.0; }
  const std::string& label() const { return label_; }

 private:
  double value_ = 0.0;
  std::function<double(double)> fn_;
  std::string label_;
};

enum class FractionalType {
  /// e_i = sum_{k=0}^{J} psi_k u_{i-k}, infinite past truncated at J lags.
  type_i,
  /// (1-B)^d e_i = u_i 1(i >= 1): only observed shocks enter.
  type_ii,
};

struct FractionalOptions {
  FractionalType type = FractionalType::type_i;
  /// A warning is recorded when psi_J exceeds this for constant d.
  double tail_threshold = 1e-4;
};

struct FilteredSeries {
  std::vector<double> e;
  std::vector<std::string> warnings;
};

/// Applies (1-B)^-d to `u`, whose last n + J entries are u_{1-J}, ..., u_n.
/// For d(t) the weights are frozen at each t_i = i/n.
/// Throws ConfigError if u holds fewer than n + J values.
FilteredSeries fractional_integrate(std::span<const double> u,
                                    const MemoryParameter& d, std::size_t n,
                                    std::size_t truncation,
                                    const FractionalOptions& options = {});

/// Default truncation max(2000, n).
std::size_t default_truncation(std::size_t n);

enum class Model { M0, M1, M2, custom };

/// Coefficient functions of the locally stationary covariate/error filters.
///
/// Covariates (columns 2..p) are independent copies of
///   W(t, F_i) = w_ar(t) W(t, F_{i-1}) + w_scale zeta_i + w_drift(t).
/// The SRD shock is u = B(t, G_i) * sqrt(1 + W^2) when heteroscedastic (W is
/// the first covariate), otherwise u = B, with
///   B(t, G_i) = b_ar(t) B(t, G_{i-1}) + b_scale g_i
/// and g_i = eps_i, or eps_i sigma_i(t) under the optional GARCH(1,1) layer
///   sigma_i^2(t) = garch_c(t) + garch_alpha(t) g_{i-1}^2 + garch_beta(t) sigma_{i-1}^2.
/// All filters are evaluated with coefficients frozen at t (Bernoulli-shift
/// form); t < 0 uses the value at 0.
struct FilterSpec {
  std::function<double(double)> w_ar;
  double w_scale = 0.0;
  std::function<double(double)> w_drift;

  std::function<double(double)> b_ar;
  double b_scale = 0.0;

  bool heteroscedastic = false;

  bool garch = false;
  std::function<double(double)> garch_c;
  std::function<double(double)> garch_alpha;
  std::function<double(double)> garch_beta;

  /// beta_1..beta_p.
  std::vector<std::function<double(double)>> beta;
};

/// The built-in M0, M1 and M2 designs (p = 2).
FilterSpec builtin_filters(Model model);

/// iid innovation law; defaults to N(0, 1).
using InnovationLaw = std::function<double(Rng&)>;

struct SimulationSpec {
  std::size_t n = 500;
  std::size_t p = 2;
  Model model = Model::M1;
  /// Required when model == custom.
  std::optional<FilterSpec> custom;
  MemoryParameter d = 0.0;
  /// Fractional truncation J; default max(2000, n).
  std::optional<std::size_t> truncation;
  /// Pre-sample length for the fractional filter; default (and minimum) J.
  std::optional<std::size_t> burn_in;
  std::uint64_t seed = 1;
  FractionalType type = FractionalType::type_i;
  InnovationLaw innovation;
};

struct SimulatedSample {
  RegressionSample sample;
  std::vector<double> e;  ///< regression error, length n
  std::vector<double> u;  ///< SRD shock on the observed range, length n
  std::vector<double> b;  ///< core error filter B(t_i, G_i), length n
  std::vector<std::string> warnings;
};

/// Validates the spec. Throws ConfigError for n < 8, burn-in below J,
/// d outside [0, 1/2), or alpha(t) + beta(t) >= 1 anywhere on [0, 1].
void validate(const SimulationSpec& spec);

/// Draws one sample; deterministic in spec.seed.
SimulatedSample simulate_model(const SimulationSpec& spec);

}  // namespace lrd::sim
