#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lck/hermitian.hpp"

namespace lck {

struct SearchConfig {
  int restarts = 8;
  std::uint64_t seed = 0;
  int max_iters = 300;
  double tol_residual = 1e-9;
  double step0 = 1.0;       // initial line-search step
  double backtrack = 0.5;   // step shrink factor
  double armijo_c = 1e-4;   // sufficient-decrease constant
  double fd_step = 1e-6;    // central finite-difference step
  int threads = 1;          // restarts run in parallel; reduction is by index

  void validate() const {
    if (restarts < 1) throw ValidationError("search needs restarts >= 1");
    if (!(tol_residual > 0)) throw ValidationError("search needs tol_residual > 0");
    if (max_iters < 1) throw ValidationError("search needs max_iters >= 1");
    if (threads < 1) throw ValidationError("search needs threads >= 1");
    if (!(step0 > 0) || !(backtrack > 0) || backtrack >= 1 || !(fd_step > 0))
      throw ValidationError("bad line-search parameters");
  }
};

struct RestartTrace {
  int restart = 0;
  int iterations = 0;
  double residual = 0;
};

struct SearchResult {
  double best_residual;
  int best_restart;
  InnerProduct<double> best_metric;
  std::optional<LckCertificate<double>> certificate;  // re-verified, never assumed
  std::vector<RestartTrace> trace;
};

/// Hermitian projection ½(⟨X,Y⟩ + ⟨JX,JY⟩): idempotent, preserves SPD, and
/// the output is J-compatible.
inline InnerProduct<double> project_hermitian(const InnerProduct<double>& gm,
                                              const Mat<double>& j) {
  Mat<double> g = 0.5 * (gm.matrix() + j.transpose() * (gm.matrix() * j));
  for (int a = 0; a < g.rows(); ++a)  // exact symmetry despite round-off
    for (int b = a + 1; b < g.cols(); ++b) {
      double v = 0.5 * (g(a, b) + g(b, a));
      g(a, b) = v;
      g(b, a) = v;
    }
  return InnerProduct<double>(std::move(g));
}

/// ‖dω − θ∧ω‖ for the fundamental form of (J, gm): the same pipeline the
/// certificate uses (fundamental form, graded differential, Lee form,
/// 3-form inner product).
inline double lck_residual(const LieAlgebra<double>& g, const Mat<double>& j,
                           const InnerProduct<double>& gm, int orientation = 1) {
  int n = g.dim();
  Mat<double> om = j.transpose() * gm.matrix();
  AlternatingForm<double> omega(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      omega.set((1u << a) | (1u << b), om(a, b));
  AlternatingForm<double> d_omega = ce_differential(g, omega);
  AlternatingForm<double> theta = lee_form(g, gm, orientation, j, omega);
  AlternatingForm<double> r = d_omega - wedge(theta, omega);
  return std::sqrt(std::max(0.0, form_inner(gm, r, r)));
}

namespace detail {

// Deterministic, platform-independent generator (std distributions are
// implementation-defined and would break bitwise reproducibility).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

inline Mat<double> unpack_lower(const Vec<double>& x, int n) {
  Mat<double> l(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) l(i, j) = x[k++];
  return l;
}

constexpr double kSearchPenalty = 1e6;  // near-singular candidate guard

// The raw residual is not scale-invariant: under gm -> c·gm it decays like
// c^(-1/2), and it can also be driven to zero along degenerating metrics
// (det -> 0 at bounded trace). Either escape would make every residual floor
// vacuous. Candidates are therefore volume-normalized to det = 1 and
// rejected (penalty) when the normalized trace — a conditioning proxy, since
// tr >= cond^(1/n) at det 1 — exceeds this bound per dimension. Certified
// metrics scale freely, so the normalization never loses a positive; random
// starts (L = I + noise) sit far inside the bound.
constexpr double kTraceBoundPerDim = 4.0;

/// Objective: residual of the J-compatible SPD metric parameterized by the
/// lower-triangular entries x (gm = ½(LLᵀ + Jᵀ LLᵀ J), then det-normalized).
class MetricObjective {
 public:
  MetricObjective(const LieAlgebra<double>& g, const Mat<double>& j)
      : g_(&g), j_(&j), n_(g.dim()) {}

  std::optional<Mat<double>> metric(const Vec<double>& x) const {
    Mat<double> l = unpack_lower(x, n_);
    Mat<double> gm = l * l.transpose();
    gm = 0.5 * (gm + j_->transpose() * (gm * (*j_)));
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        double v = 0.5 * (gm(a, b) + gm(b, a));
        gm(a, b) = v;
        gm(b, a) = v;
      }
    auto factor = cholesky(gm);
    if (!factor) return std::nullopt;
    double det = 1;
    for (int a = 0; a < n_; ++a) det *= (*factor)(a, a);
    det *= det;
    if (!(det > 0) || !std::isfinite(det)) return std::nullopt;
    double scale = std::pow(det, -1.0 / n_);
    if (!std::isfinite(scale)) return std::nullopt;
    gm = scale * gm;
    double tr = 0;
    for (int a = 0; a < n_; ++a) tr += gm(a, a);
    if (tr > kTraceBoundPerDim * n_) return std::nullopt;
    return gm;
  }

  double operator()(const Vec<double>& x) const {
    auto gm = metric(x);
    if (!gm) return kSearchPenalty;
    return lck_residual(*g_, *j_, InnerProduct<double>(std::move(*gm)));
  }

  int variables() const { return n_ * (n_ + 1) / 2; }

 private:
  const LieAlgebra<double>* g_;
  const Mat<double>* j_;
  int n_;
};

template <class F>
Vec<double> fd_gradient(const F& f, const Vec<double>& x, double h) {
  Vec<double> grad(x.size(), 0.0);
  Vec<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    double fp = f(probe);
    probe[i] = x[i] - h;
    double fm = f(probe);
    probe[i] = x[i];
    grad[i] = (fp - fm) / (2 * h);
  }
  return grad;
}

struct RestartOutcome {
  Vec<double> x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

template <class F>
RestartOutcome minimize(const F& f, Vec<double> x, const SearchConfig& cfg) {
  double fx = f(x);
  int it = 0;
  while (it < cfg.max_iters && fx > cfg.tol_residual) {
    Vec<double> grad = fd_gradient(f, x, cfg.fd_step);
    double gsq = dot(grad, grad);
    if (!(gsq > 0) || !std::isfinite(gsq)) break;
    double alpha = cfg.step0;
    bool accepted = false;
    while (alpha > 1e-14) {
      Vec<double> xn = vec_sub(x, vec_scale(alpha, grad));
      double fn = f(xn);
      if (fn <= fx - cfg.armijo_c * alpha * gsq) {
        x = std::move(xn);
        fx = fn;
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    ++it;
    if (!accepted) break;  // no acceptable descent step: local floor
  }
  return {std::move(x), fx, it};
}

inline Vec<double> seeded_start(const MetricObjective& obj, int n,
                                std::uint64_t seed, int restart) {
  std::uint64_t state = seed + 0x9e3779b97f4a7c15ull * std::uint64_t(restart + 1);
  Vec<double> x(obj.variables(), 0.0);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double u = uniform01(state) - 0.5;
      x[k++] = u + (i == j ? 1.0 : 0.0);  // diagonal offset avoids singular L
    }
  return x;
}

}  // namespace detail

/// Multi-start descent over Cholesky-parameterized J-compatible metrics.
/// Deterministic for fixed (input, config) including under parallel restarts:
/// every restart is seeded independently and the reduction is by restart
/// index. A certificate is returned only when the winning metric re-verifies.
inline SearchResult search_lck_metric(const LieAlgebra<double>& g,
                                      const Mat<double>& j,
                                      const SearchConfig& cfg) {
  cfg.validate();
  int n = g.dim();
  if (n < 4 || n % 2 != 0)
    throw PreconditionError("metric search needs even dimension >= 4");
  if (!(j * j + Mat<double>::identity(n)).is_zero_matrix(tol::form_eq))
    throw ValidationError("invalid J: square is not minus the identity");
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Vec<double> ea(n, 0.0), eb(n, 0.0);
      ea[a] = 1.0;
      eb[b] = 1.0;
      if (!vec_is_zero(nijenhuis(g, j, ea, eb), tol::form_eq))
        throw ValidationError("invalid J: not integrable");
    }

  detail::MetricObjective obj(g, j);
  std::vector<detail::RestartOutcome> outcomes(cfg.restarts);
  auto run = [&](int r) {
    outcomes[r] = detail::minimize(obj, detail::seeded_start(obj, n, cfg.seed, r), cfg);
  };
  if (cfg.threads <= 1) {
    for (int r = 0; r < cfg.restarts; ++r) run(r);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r = next.fetch_add(1); r < cfg.restarts; r = next.fetch_add(1))
        run(r);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int best = 0;
  std::vector<RestartTrace> trace;
  for (int r = 0; r < cfg.restarts; ++r) {
    trace.push_back({r, outcomes[r].iterations, outcomes[r].residual});
    if (outcomes[r].residual < outcomes[best].residual) best = r;
  }

  auto gm = obj.metric(outcomes[best].x);
  if (!gm)
    throw std::logic_error("search accepted a metric that fails the SPD guard");
  SearchResult res{outcomes[best].residual, best,
                   InnerProduct<double>(std::move(*gm)), std::nullopt,
                   std::move(trace)};
  if (res.best_residual < cfg.tol_residual) {
    HermitianStructure<double> h(g, res.best_metric, j);
    LckCertificate<double> cert = check_lck(h);
    if (cert.is_lck) res.certificate = std::move(cert);
  }
  return res;
}

struct SweepTarget {
  std::string label;
  LieAlgebra<double> algebra;
  Mat<double> J;
};

struct SweepRow {
  std::string label;
  bool unimodular = false;
  bool bi_invariant_J = false;
  double best_residual = 0;
  bool certified = false;
};

/// Wording required on every report of a residual floor.
inline constexpr const char* kSweepDisclaimer =
    "evidence, not proof: a residual floor from seeded local search is not a "
    "nonexistence certificate";

/// Runs the metric search on each target and tabulates residual floors.
inline std::vector<SweepRow> falsification_sweep(
    const std::vector<SweepTarget>& targets, const SearchConfig& cfg) {
  std::vector<SweepRow> rows;
  for (const auto& t : targets) {
    SearchResult res = search_lck_metric(t.algebra, t.J, cfg);
    JClass jc = classify_J(t.algebra, t.J);
    rows.push_back({t.label, t.algebra.is_unimodular(), jc.bi_invariant,
                    res.best_residual, res.certificate.has_value()});
  }
  return rows;
}

}  // namespace lck
