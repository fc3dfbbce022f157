#pragma once

#include <optional>
#include <stdexcept>

#include "lck/forms.hpp"
#include "lck/lie_algebra.hpp"
#include "lck/linalg.hpp"
#include "lck/scalar.hpp"

namespace lck {

template <class S>
Mat<double> to_float_matrix(const Mat<S>& m) {
  Mat<double> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

template <class S>
AlternatingForm<double> to_float_form(const AlternatingForm<S>& a) {
  AlternatingForm<double> out(a.dim(), a.degree());
  for (const auto& [m, v] : a.terms()) out.set(m, to_double(v));
  return out;
}

template <class S>
LieAlgebra<double> to_float_algebra(const LieAlgebra<S>& g) {
  int n = g.dim();
  std::vector<std::tuple<int, int, int, double>> entries;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!is_zero(g.c(i, j, k), 0.0))
          entries.emplace_back(i, j, k, to_double(g.c(i, j, k)));
  auto out = LieAlgebra<double>::from_brackets(n, entries);
  out.set_labels(g.labels());
  out.set_dual_labels(g.dual_labels());
  return out;
}

/// Nijenhuis expression [JX,JY] − [X,Y] − J([JX,Y] + [X,JY]); identically
/// zero exactly when J is integrable.
template <class S>
Vec<S> nijenhuis(const LieAlgebra<S>& g, const Mat<S>& j, const Vec<S>& x,
                 const Vec<S>& y) {
  Vec<S> jx = j.apply(x), jy = j.apply(y);
  Vec<S> out = vec_sub(g.bracket(jx, jy), g.bracket(x, y));
  return vec_sub(out, j.apply(vec_add(g.bracket(jx, y), g.bracket(x, jy))));
}

struct JClass {
  bool almost_complex = false;
  bool integrable = false;
  bool abelian = false;
  bool bi_invariant = false;
  double worst_almost_complex = 0;
  double worst_integrable = 0;
  double worst_abelian = 0;
  double worst_bi_invariant = 0;
};

/// Classifies an endomorphism as a complex structure type. When J² ≠ −I the
/// remaining classifications are suppressed (reported false).
template <class S>
JClass classify_J(const LieAlgebra<S>& g, const Mat<S>& j) {
  int n = g.dim();
  JClass out;
  if (n % 2 != 0) throw PreconditionError("complex structures need even dimension");
  Mat<S> jsq = j * j + Mat<S>::identity(n);
  out.worst_almost_complex = jsq.max_abs();
  double tl = scalar_traits<S>::exact ? 0.0 : tol::form_eq;
  out.almost_complex = jsq.is_zero_matrix(tl);
  if (!out.almost_complex) return out;
  out.integrable = out.abelian = out.bi_invariant = true;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Vec<S> ea(n, S(0)), eb(n, S(0));
      ea[a] = S(1);
      eb[b] = S(1);
      Vec<S> nij = nijenhuis(g, j, ea, eb);
      out.worst_integrable = std::max(out.worst_integrable, vec_max_abs(nij));
      if (!vec_is_zero(nij, tl)) out.integrable = false;
      Vec<S> ab = vec_sub(g.bracket(j.apply(ea), j.apply(eb)), g.bracket(ea, eb));
      out.worst_abelian = std::max(out.worst_abelian, vec_max_abs(ab));
      if (!vec_is_zero(ab, tl)) out.abelian = false;
    }
  // bi-invariance J[X,Y] = [X,JY] is not symmetric in the arguments
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      Vec<S> ea(n, S(0)), eb(n, S(0));
      ea[a] = S(1);
      eb[b] = S(1);
      Vec<S> bi = vec_sub(j.apply(g.bracket(ea, eb)), g.bracket(ea, j.apply(eb)));
      out.worst_bi_invariant = std::max(out.worst_bi_invariant, vec_max_abs(bi));
      if (!vec_is_zero(bi, tl)) out.bi_invariant = false;
    }
  return out;
}

/// Integrable complex structure + compatible inner product on an
/// even-dimensional Lie algebra. Construction validates all invariants.
template <class S>
class HermitianStructure {
 public:
  HermitianStructure(LieAlgebra<S> g, InnerProduct<S> metric, Mat<S> j,
                     int orientation = 1)
      : g_(std::move(g)), ip_(std::move(metric)), j_(std::move(j)),
        orient_(orientation) {
    int n = g_.dim();
    if (n % 2 != 0) throw ValidationError("Hermitian structure needs even dimension");
    if (ip_.dim() != n || j_.rows() != n || j_.cols() != n)
      throw ValidationError("dimension mismatch between algebra, metric and J");
    if (orientation != 1 && orientation != -1)
      throw ValidationError("orientation must be +1 or -1");
    double tl = scalar_traits<S>::exact ? 0.0 : tol::form_eq;
    if (!(j_ * j_ + Mat<S>::identity(n)).is_zero_matrix(tl))
      throw ValidationError("J squared is not minus the identity");
    if (!(j_.transpose() * (ip_.matrix() * j_) - ip_.matrix()).is_zero_matrix(tl))
      throw ValidationError("metric is not J-compatible");
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        Vec<S> ea(n, S(0)), eb(n, S(0));
        ea[a] = S(1);
        eb[b] = S(1);
        if (!vec_is_zero(nijenhuis(g_, j_, ea, eb), tl))
          throw ValidationError("J is not integrable");
      }
  }

  const LieAlgebra<S>& algebra() const { return g_; }
  const InnerProduct<S>& metric() const { return ip_; }
  const Mat<S>& J() const { return j_; }
  int orientation() const { return orient_; }
  int dim() const { return g_.dim(); }

  /// ω(X,Y) = ⟨JX, Y⟩.
  AlternatingForm<S> fundamental_form() const {
    int n = g_.dim();
    Mat<S> om = j_.transpose() * ip_.matrix();
    AlternatingForm<S> w(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        w.set((1u << i) | (1u << j), om(i, j));
    return w;
  }

 private:
  LieAlgebra<S> g_;
  InnerProduct<S> ip_;
  Mat<S> j_;
  int orient_;
};

enum class VaismanVerdict { vaisman, not_vaisman, kahler };

inline const char* to_string(VaismanVerdict v) {
  switch (v) {
    case VaismanVerdict::vaisman: return "vaisman";
    case VaismanVerdict::not_vaisman: return "not_vaisman";
    case VaismanVerdict::kahler: return "kahler";
  }
  return "?";
}

/// Metric dual of a nonzero 1-form θ, normalized so that θ(A) = 1 and
/// θ(X) = ⟨X, A⟩ / ⟨A, A⟩.
template <class S>
struct CharacteristicVector {
  Vec<S> A;
  S norm_sq;  // ⟨A, A⟩
};

template <class S>
CharacteristicVector<S> extract_characteristic_vector(
    const InnerProduct<S>& ip, const AlternatingForm<S>& theta) {
  Vec<S> t = theta.one_form_coeffs();
  Vec<S> u = ip.inverse_matrix().apply(t);
  S usq = ip.norm_sq(u);
  if (is_zero(usq, scalar_traits<S>::exact ? 0.0 : tol::form_eq * tol::form_eq))
    throw PreconditionError("characteristic vector of a zero 1-form");
  Vec<S> a = vec_scale(S(S(1) / usq), u);
  return {a, S(1) / usq};
}

template <class S>
struct LckCertificate {
  AlternatingForm<S> omega;
  AlternatingForm<S> d_omega;
  AlternatingForm<S> theta;
  S residual_sq;          // ‖dω − θ∧ω‖² in the 3-form inner product
  bool is_lck = false;    // residual zero (exact) / below 1e-9 (float)
  bool theta_closed = false;
  bool is_kahler = false;
  std::optional<AlternatingForm<S>> theta_contraction;  // dim ≥ 4 route
  bool theta_routes_agree = true;
  double theta_routes_distance = 0;
  std::optional<Vec<S>> A;
  S A_norm_sq;
  VaismanVerdict vaisman = VaismanVerdict::not_vaisman;
  bool vaisman_routes_agree = true;

  double residual() const { return std::sqrt(to_double(residual_sq)); }
};

/// Second, formula-independent Lee form: solves dω = θ'∧ω in least squares
/// via the normal equations of the 3-form inner product. The wedge map is
/// injective on 1-forms in dimension ≥ 4, so the system is nonsingular.
template <class S>
AlternatingForm<S> lee_form_by_contraction(const LieAlgebra<S>& g,
                                           const InnerProduct<S>& ip,
                                           const AlternatingForm<S>& omega,
                                           const AlternatingForm<S>& d_omega) {
  int n = g.dim();
  if (n < 4) throw PreconditionError("contraction route needs dimension >= 4");
  std::vector<AlternatingForm<S>> wedged;
  for (int a = 0; a < n; ++a)
    wedged.push_back(wedge(AlternatingForm<S>::basis_covector(n, a), omega));
  Mat<S> normal(n, n);
  Vec<S> rhs(n, S(0));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      S v = form_inner(ip, wedged[a], wedged[b]);
      normal(a, b) = v;
      normal(b, a) = v;
    }
    rhs[a] = form_inner(ip, wedged[a], d_omega);
  }
  auto t = solve(normal, rhs);
  if (!t) throw std::logic_error("wedge normal system is singular");
  return AlternatingForm<S>::one_form(n, *t);
}

template <class S>
class Connection {
 public:
  explicit Connection(std::vector<Mat<S>> gammas) : gamma_(std::move(gammas)) {}

  int dim() const { return (int)gamma_.size(); }

  /// Matrix of ∇_{e_i} acting on coordinates.
  const Mat<S>& gamma(int i) const { return gamma_[i]; }

  Vec<S> nabla_basis(int i, int j) const { return gamma_[i].col(j); }

  Vec<S> nabla(const Vec<S>& x, const Vec<S>& y) const {
    int n = dim();
    Vec<S> out(n, S(0));
    for (int i = 0; i < n; ++i) {
      if (is_zero(x[i], 0.0)) continue;
      out = vec_add(out, vec_scale(x[i], gamma_[i].apply(y)));
    }
    return out;
  }

  Mat<S> direction_matrix(const Vec<S>& x) const {
    int n = dim();
    Mat<S> m(n, n);
    for (int i = 0; i < n; ++i) {
      if (is_zero(x[i], 0.0)) continue;
      m = m + x[i] * gamma_[i];
    }
    return m;
  }

 private:
  std::vector<Mat<S>> gamma_;
};

/// Levi-Civita connection of a left-invariant metric via the Koszul formula
/// 2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩.
template <class S>
Connection<S> levi_civita(const LieAlgebra<S>& g, const InnerProduct<S>& ip) {
  int n = g.dim();
  std::vector<Mat<S>> gammas(n, Mat<S>(n, n));
  S half = S(1) / S(2);
  for (int i = 0; i < n; ++i) {
    Vec<S> ei(n, S(0));
    ei[i] = S(1);
    for (int j = 0; j < n; ++j) {
      Vec<S> ej(n, S(0));
      ej[j] = S(1);
      Vec<S> k(n, S(0));
      for (int l = 0; l < n; ++l) {
        Vec<S> el(n, S(0));
        el[l] = S(1);
        k[l] = ip.inner(g.bracket_basis(i, j), el) -
               ip.inner(g.bracket(ej, el), ei) + ip.inner(g.bracket(el, ei), ej);
      }
      Vec<S> coeff = ip.inverse_matrix().apply(k);
      for (int l = 0; l < n; ++l) gammas[i](l, j) = half * coeff[l];
    }
  }
  return Connection<S>(std::move(gammas));
}

/// (∇θ)(X, Y) = −θ(∇_X Y) for a left-invariant 1-form; entry (i,j).
template <class S>
Mat<S> nabla_theta(const LieAlgebra<S>& g, const Connection<S>& conn,
                   const AlternatingForm<S>& theta) {
  int n = g.dim();
  Vec<S> t = theta.one_form_coeffs();
  Mat<S> out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = -dot(t, conn.nabla_basis(i, j));
  return out;
}

/// Curvature operator R(x,y) = ∇_x∇_y − ∇_y∇_x − ∇_{[x,y]} as a matrix.
template <class S>
Mat<S> curvature_operator(const LieAlgebra<S>& g, const Connection<S>& conn,
                          const Vec<S>& x, const Vec<S>& y) {
  Mat<S> gx = conn.direction_matrix(x);
  Mat<S> gy = conn.direction_matrix(y);
  Mat<S> gxy = conn.direction_matrix(g.bracket(x, y));
  return gx * gy - gy * gx - gxy;
}

/// Full curvature tensor as the family of operators R(e_i, e_j).
template <class S>
class CurvatureTensor {
 public:
  CurvatureTensor(const LieAlgebra<S>& g, const Connection<S>& conn) : n_(g.dim()) {
    ops_.reserve(std::size_t(n_) * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Vec<S> ei(n_, S(0)), ej(n_, S(0));
        ei[i] = S(1);
        ej[j] = S(1);
        ops_.push_back(curvature_operator(g, conn, ei, ej));
      }
  }

  int dim() const { return n_; }

  /// Operator R(e_i, e_j).
  const Mat<S>& op(int i, int j) const { return ops_[std::size_t(i) * n_ + j]; }

  /// Component ⟨R(e_i,e_j)e_k⟩ along e_l (coordinate l of the image).
  const S& coeff(int i, int j, int k, int l) const { return op(i, j)(l, k); }

 private:
  int n_;
  std::vector<Mat<S>> ops_;
};

/// Scalar curvature Σ_{a,b} ⟨R(f_a, f_b) f_b, f_a⟩ over an orthonormal frame
/// obtained from the Cholesky factor of the metric (float computation).
template <class S>
double scalar_curvature(const LieAlgebra<S>& g, const InnerProduct<S>& ip) {
  LieAlgebra<double> gd = to_float_algebra(g);
  Mat<double> gm = to_float_matrix(ip.matrix());
  auto l = cholesky(gm);
  if (!l) throw PreconditionError("metric Cholesky factorization failed");
  Mat<double> frame = lower_tri_inverse(*l).transpose();  // columns orthonormal
  InnerProduct<double> ipd(gm);
  Connection<double> conn = levi_civita(gd, ipd);
  int n = g.dim();
  double scal = 0;
  for (int a = 0; a < n; ++a) {
    Vec<double> fa = frame.col(a);
    Vec<double> gfa = gm.apply(fa);
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      Vec<double> fb = frame.col(b);
      Vec<double> r = curvature_operator(gd, conn, fa, fb).apply(fb);
      scal += dot(r, gfa);
    }
  }
  return scal;
}

struct VaismanCheck {
  VaismanVerdict verdict = VaismanVerdict::not_vaisman;
  bool adA_skew = false;          // route 1: ad_A skew-symmetric w.r.t. the metric
  bool nabla_theta_zero = false;  // route 2: θ parallel for Levi-Civita
  bool routes_agree = false;
  double worst_adA = 0;
  double worst_nabla = 0;
};

template <class S>
VaismanCheck vaisman_check(const LieAlgebra<S>& g, const InnerProduct<S>& ip,
                           const LckCertificate<S>& cert);

/// l.c.K. verification: ω, dω, the Lee form by both routes, the exact
/// residual ‖dω − θ∧ω‖², the characteristic vector, and the Kähler/Vaisman
/// verdicts. The Kähler verdict takes precedence over Vaisman.
template <class S>
LckCertificate<S> check_lck(const HermitianStructure<S>& h) {
  const LieAlgebra<S>& g = h.algebra();
  const InnerProduct<S>& ip = h.metric();
  int n = g.dim();
  if (n < 4) throw PreconditionError("l.c.K. verification needs dimension >= 4");

  LckCertificate<S> cert{h.fundamental_form(),
                         AlternatingForm<S>(n, 3),
                         AlternatingForm<S>(n, 1),
                         S(0),
                         false,
                         false,
                         false,
                         std::nullopt,
                         true,
                         0,
                         std::nullopt,
                         S(0),
                         VaismanVerdict::not_vaisman,
                         true};
  cert.d_omega = ce_differential(g, cert.omega);
  cert.theta = lee_form(g, ip, h.orientation(), h.J(), cert.omega);

  AlternatingForm<S> resid = cert.d_omega - wedge(cert.theta, cert.omega);
  cert.residual_sq = form_inner(ip, resid, resid);
  if constexpr (scalar_traits<S>::exact)
    cert.is_lck = is_zero(cert.residual_sq, 0.0);
  else
    cert.is_lck = cert.residual() <= tol::lck_residual;

  double tl = scalar_traits<S>::exact ? 0.0 : tol::form_eq;
  cert.theta_closed = ce_differential(g, cert.theta).is_zero_form(tl);
  cert.is_kahler = cert.d_omega.is_zero_form(tl);

  cert.theta_contraction = lee_form_by_contraction(g, ip, cert.omega, cert.d_omega);
  cert.theta_routes_distance = form_distance(cert.theta, *cert.theta_contraction);
  if (cert.is_lck)
    cert.theta_routes_agree =
        scalar_traits<S>::exact
            ? forms_equal(cert.theta, *cert.theta_contraction, 0.0)
            : cert.theta_routes_distance <= tol::theta_agree;

  bool theta_zero = cert.theta.is_zero_form(tl);
  if (!theta_zero) {
    auto cv = extract_characteristic_vector(ip, cert.theta);
    cert.A = cv.A;
    cert.A_norm_sq = cv.norm_sq;
  }

  if (cert.is_kahler) {
    cert.vaisman = VaismanVerdict::kahler;
  } else if (cert.is_lck) {
    auto vs = vaisman_check(g, ip, cert);
    cert.vaisman = vs.verdict;
    cert.vaisman_routes_agree = vs.routes_agree;
  }
  return cert;
}

/// Both Vaisman characterizations; they agree for every genuine l.c.K.
/// structure, and disagreement on the exact backend is a library defect.
template <class S>
VaismanCheck vaisman_check(const LieAlgebra<S>& g, const InnerProduct<S>& ip,
                           const LckCertificate<S>& cert) {
  if (!cert.is_lck)
    throw PreconditionError("Vaisman check on a non-l.c.K. certificate");
  VaismanCheck out;
  if (cert.is_kahler) {
    out.verdict = VaismanVerdict::kahler;
    out.adA_skew = out.nabla_theta_zero = out.routes_agree = true;
    return out;
  }
  if (!cert.A) throw PreconditionError("l.c.K. non-Kähler certificate lacks A");
  double tl = scalar_traits<S>::exact ? 0.0 : tol::form_eq;

  Mat<S> ada = g.ad(*cert.A);
  Mat<S> skew = ip.matrix() * ada + ada.transpose() * ip.matrix();
  out.worst_adA = skew.max_abs();
  out.adA_skew = skew.is_zero_matrix(tl);

  Connection<S> conn = levi_civita(g, ip);
  Mat<S> nt = nabla_theta(g, conn, cert.theta);
  out.worst_nabla = nt.max_abs();
  out.nabla_theta_zero = nt.is_zero_matrix(tl);

  out.routes_agree = (out.adA_skew == out.nabla_theta_zero);
  if (!out.routes_agree && scalar_traits<S>::exact)
    throw std::logic_error("Vaisman characterizations disagree on exact input");
  out.verdict = out.adA_skew ? VaismanVerdict::vaisman : VaismanVerdict::not_vaisman;
  return out;
}

struct SymmetryCheck {
  bool applicable = false;
  bool symmetric = true;
  double worst = 0;
};

/// J∘ad_{JA} must be symmetric w.r.t. the metric on every zero-residual
/// certificate with θ ≠ 0.
template <class S>
SymmetryCheck check_J_adJA_symmetric(const HermitianStructure<S>& h,
                                     const LckCertificate<S>& cert) {
  SymmetryCheck out;
  if (!cert.is_lck)
    throw PreconditionError("symmetry check on a non-l.c.K. certificate");
  if (!cert.A) return out;  // Kähler: no characteristic vector, vacuous
  out.applicable = true;
  Vec<S> ja = h.J().apply(*cert.A);
  Mat<S> m = h.J() * h.algebra().ad(ja);
  Mat<S> defect = h.metric().matrix() * m - m.transpose() * h.metric().matrix();
  out.worst = defect.max_abs();
  out.symmetric =
      defect.is_zero_matrix(scalar_traits<S>::exact ? 0.0 : tol::form_eq);
  return out;
}

struct BiInvariantKahlerAudit {
  bool applicable = false;  // Kähler with bi-invariant J
  bool consistent = true;   // derived algebra vanishes (must always hold)
};

/// A Kähler structure with bi-invariant J forces the algebra to be abelian;
/// a violation would falsify the library and must never occur.
template <class S>
BiInvariantKahlerAudit kahler_bi_invariant_audit(const HermitianStructure<S>& h) {
  BiInvariantKahlerAudit out;
  JClass jc = classify_J(h.algebra(), h.J());
  AlternatingForm<S> dw = ce_differential(h.algebra(), h.fundamental_form());
  bool kahler =
      dw.is_zero_form(scalar_traits<S>::exact ? 0.0 : tol::form_eq);
  out.applicable = kahler && jc.bi_invariant;
  if (out.applicable) out.consistent = h.algebra().derived_algebra().empty();
  return out;
}

}  // namespace lck
