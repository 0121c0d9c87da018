#include "lrdtest/bootstrap.hpp"

#include "lrdtest/error.hpp"
#include "lrdtest/kernel.hpp"
#include "lrdtest/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <sstream>
#include <thread>

namespace lrd {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::trend ? "trend" : "covariate";
}

ModelKind parse_model_kind(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "trend") return ModelKind::trend;
  if (key == "covariate") return ModelKind::covariate;
  throw ConfigError("unknown model '" + name + "' (expected trend or covariate)");
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Replicates per block; fixed so results do not depend on threading.
constexpr std::size_t kBlock = 64;

// Shared pieces of the rearranged bootstrap sum
//   G_k = sum_{i=l}^{k} [sig_i V_{i,1} - a_i' s_i],
//   s_i = sum_j ker((t_i - t_j)/b) R_j V_j,
// where a_i already carries the 1/(n b) factor.
struct Engine {
  std::size_t n = 0, p = 0;
  TrimRange range;
  std::vector<double> tap;  // ker(k / (n b)), k = 0..reach
  Eigen::MatrixXd A;        // N x p
  Eigen::VectorXd sig;      // N
  std::vector<Eigen::MatrixXd> roots;
  bool root_row = false;  // error term from W(i, .) instead of sig * V(i, .)

  // Paths for a block of replicates whose multipliers sit in V
  // (n x p*Bb, row-major, replicate r in columns r*p..r*p+p-1).
  void paths(const RowMatrix& V, std::size_t Bb, std::vector<std::vector<double>>& out) const {
    const auto nn = static_cast<Eigen::Index>(n), pp = static_cast<Eigen::Index>(p);
    const auto cols = static_cast<Eigen::Index>(p * Bb);
    RowMatrix W(nn, cols);
    for (Eigen::Index j = 0; j < nn; ++j) {
      const auto& R = roots[static_cast<std::size_t>(j)];
      for (std::size_t r = 0; r < Bb; ++r) {
        const auto c0 = static_cast<Eigen::Index>(r * p);
        for (Eigen::Index c = 0; c < pp; ++c) {
          double v = 0.0;
          for (Eigen::Index d = 0; d < pp; ++d) v += R(c, d) * V(j, c0 + d);
          W(j, c0 + c) = v;
        }
      }
    }
    const auto N = static_cast<Eigen::Index>(range.size());
    const auto first = static_cast<Eigen::Index>(range.first);
    const auto reach = static_cast<Eigen::Index>(tap.size()) - 1;
    Eigen::RowVectorXd s(cols);
    out.assign(Bb, std::vector<double>(static_cast<std::size_t>(N)));
    std::vector<double> acc(Bb, 0.0);
    for (Eigen::Index k = 0; k < N; ++k) {
      const Eigen::Index i = first + k;
      s.setZero();
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - reach);
      const Eigen::Index hi = std::min<Eigen::Index>(nn - 1, i + reach);
      for (Eigen::Index j = lo; j <= hi; ++j) {
        const double w = tap[static_cast<std::size_t>(std::abs(i - j))];
        if (w != 0.0) s.noalias() += w * W.row(j);
      }
      for (std::size_t r = 0; r < Bb; ++r) {
        const auto c0 = static_cast<Eigen::Index>(r * p);
        const double lead = root_row ? W(i, c0) : sig(k) * V(i, c0);
        const double g = lead - A.row(k).dot(s.segment(c0, pp));
        acc[r] += g;
        out[r][static_cast<std::size_t>(k)] = acc[r];
      }
    }
  }

  BootstrapDraws run(const BootstrapOptions& opt) const {
    if (opt.B == 0) throw ConfigError("bootstrap: B must be positive");
    BootstrapDraws draws;
    for (auto& v : draws.stat) v.assign(opt.B, 0.0);
    const std::size_t nblocks = (opt.B + kBlock - 1) / kBlock;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      RowMatrix V;
      std::vector<std::vector<double>> block_paths;
      for (std::size_t blk = next++; blk < nblocks; blk = next++) {
        const std::size_t r0 = blk * kBlock;
        const std::size_t Bb = std::min(kBlock, opt.B - r0);
        V.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p * Bb));
        for (std::size_t r = 0; r < Bb; ++r) {
          V.middleCols(static_cast<Eigen::Index>(r * p), static_cast<Eigen::Index>(p)) =
              draw_multipliers(n, p, opt.seed, r0 + r);
        }
        paths(V, Bb, block_paths);
        for (std::size_t r = 0; r < Bb; ++r) {
          const auto f = path_functionals(block_paths[r], n);
          for (int t = 0; t < 4; ++t) draws.stat[static_cast<std::size_t>(t)][r0 + r] = f.value[static_cast<std::size_t>(t)];
        }
      }
    };
    const unsigned nthreads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(nblocks)));
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    return draws;
  }

  std::vector<double> single(const Eigen::MatrixXd& V) const {
    if (static_cast<std::size_t>(V.rows()) != n || static_cast<std::size_t>(V.cols()) != p) {
      throw ConfigError("bootstrap path: multiplier matrix has the wrong shape");
    }
    RowMatrix Vr = V;
    std::vector<std::vector<double>> out;
    paths(Vr, 1, out);
    return out.front();
  }
};

std::vector<double> kernel_taps(std::size_t n, double b, bool jackknife) {
  const double nb = static_cast<double>(n) * b;
  const auto reach = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(nb)));
  std::vector<double> tap(reach + 1);
  for (std::size_t k = 0; k <= reach; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(n);
    tap[k] = jackknife ? kernel::scaled_jackknife(u, b) : kernel::scaled(u, b);
  }
  return tap;
}

Engine trend_engine(const Eigen::VectorXd& sigma, double b, TrendKernel kernel) {
  Engine e;
  e.n = static_cast<std::size_t>(sigma.size());
  e.p = 1;
  e.range = trim_range(e.n, b);
  e.tap = kernel_taps(e.n, b, kernel == TrendKernel::jackknife);
  const auto N = static_cast<Eigen::Index>(e.range.size());
  e.A = Eigen::MatrixXd::Constant(N, 1, 1.0 / (static_cast<double>(e.n) * b));
  e.sig = sigma.segment(static_cast<Eigen::Index>(e.range.first), N);
  e.roots.resize(e.n);
  for (std::size_t j = 0; j < e.n; ++j) {
    e.roots[j] = Eigen::MatrixXd::Constant(1, 1, sigma(static_cast<Eigen::Index>(j)));
  }
  return e;
}

Engine covariate_engine(const Eigen::MatrixXd& X, const MatrixGrid& M_hat,
                        const MatrixGrid& Sigma_root, const Eigen::VectorXd& sigmaH,
                        double b) {
  Engine e;
  e.n = static_cast<std::size_t>(X.rows());
  e.p = static_cast<std::size_t>(X.cols());
  if (M_hat.size() != e.n || Sigma_root.size() != e.n ||
      static_cast<std::size_t>(sigmaH.size()) != e.n) {
    throw ConfigError("boot_covariate: estimate grids do not match the sample size");
  }
  e.range = trim_range(e.n, b);
  e.tap = kernel_taps(e.n, b, true);
  const auto N = static_cast<Eigen::Index>(e.range.size());
  const auto first = static_cast<Eigen::Index>(e.range.first);
  const double scale = 1.0 / (static_cast<double>(e.n) * b);
  e.A.resize(N, X.cols());
  for (Eigen::Index k = 0; k < N; ++k) {
    const Eigen::Index i = first + k;
    // a_i = M^-T x_i, so that a_i' s = x_i' M^-1 s.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M_hat[static_cast<std::size_t>(i)].transpose());
    if (!lu.isInvertible() || lu.rcond() < 1e-12) {
      std::ostringstream os;
      os << "boot_covariate: M_hat singular at t=" << static_cast<double>(i + 1) / static_cast<double>(e.n);
      throw NumericError(os.str());
    }
    e.A.row(k) = scale * lu.solve(Eigen::VectorXd(X.row(i).transpose())).transpose();
  }
  e.sig = sigmaH.segment(first, N);
  e.roots = Sigma_root;
  return e;
}

}  // namespace

Eigen::MatrixXd draw_multipliers(std::size_t n, std::size_t p, std::uint64_t seed,
                                 std::uint64_t r) {
  Rng rng = make_stream(seed, r);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd V(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    for (Eigen::Index c = 0; c < V.cols(); ++c) V(i, c) = gauss(rng);
  }
  return V;
}

BootstrapDraws boot_trend(const Eigen::VectorXd& sigma, double b,
                          const BootstrapOptions& options, TrendKernel kernel) {
  return trend_engine(sigma, b, kernel).run(options);
}

BootstrapDraws boot_covariate(const Eigen::MatrixXd& X, const MatrixGrid& M_hat,
                              const MatrixGrid& Sigma_root,
                              const Eigen::VectorXd& sigmaH, double b,
                              const BootstrapOptions& options) {
  Engine e = covariate_engine(X, M_hat, Sigma_root, sigmaH, b);
  e.root_row = options.error_term == ErrorTerm::root_row;
  return e.run(options);
}

std::vector<double> trend_path(const Eigen::VectorXd& sigma, double b,
                               const Eigen::MatrixXd& V, TrendKernel kernel) {
  return trend_engine(sigma, b, kernel).single(V);
}

std::vector<double> covariate_path(const Eigen::MatrixXd& X, const MatrixGrid& M_hat,
                                   const MatrixGrid& Sigma_root,
                                   const Eigen::VectorXd& sigmaH, double b,
                                   const Eigen::MatrixXd& V, ErrorTerm error_term) {
  Engine e = covariate_engine(X, M_hat, Sigma_root, sigmaH, b);
  e.root_row = error_term == ErrorTerm::root_row;
  return e.single(V);
}

double p_value(double statistic, std::span<const double> boot) {
  if (boot.empty()) throw ConfigError("p_value: empty bootstrap sample");
  const auto below = std::count_if(boot.begin(), boot.end(),
                                   [statistic](double v) { return v <= statistic; });
  return 1.0 - static_cast<double>(below) / static_cast<double>(boot.size());
}

bool rejects(double statistic, std::span<const double> boot, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("rejects: alpha must lie in (0, 1)");
  if (boot.empty()) throw ConfigError("rejects: empty bootstrap sample");
  const auto B = static_cast<double>(boot.size());
  const auto below = std::count_if(boot.begin(), boot.end(),
                                   [statistic](double v) { return v <= statistic; });
  const auto k = static_cast<std::ptrdiff_t>(std::floor(B * (1.0 - alpha) + 1e-9));
  return below >= std::max<std::ptrdiff_t>(k, 1);
}

}  // namespace lrd
