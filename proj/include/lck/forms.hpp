#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lck/lie_algebra.hpp"
#include "lck/linalg.hpp"
#include "lck/scalar.hpp"

namespace lck {

/// Sign of merging two disjoint ascending index sets: e^a ∧ e^b =
/// sign · e^{a|b}. Counts the inversions (i in a, j in b, i > j).
inline int wedge_sign(std::uint32_t a, std::uint32_t b) {
  int inversions = 0;
  for (std::uint32_t rest = b; rest; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

/// Alternating k-form on an n-dimensional algebra, stored as coefficients on
/// the basis monomials e^{i1}∧…∧e^{ik} (i1<…<ik), keyed by bitmask.
template <class S>
class AlternatingForm {
 public:
  AlternatingForm(int dim, int degree) : n_(dim), k_(degree) {
    if (degree < 0 || degree > dim)
      throw ValidationError("form degree out of range");
  }

  static AlternatingForm basis_covector(int dim, int i) {
    AlternatingForm f(dim, 1);
    f.set(1u << i, S(1));
    return f;
  }

  static AlternatingForm one_form(int dim, const Vec<S>& coeffs) {
    AlternatingForm f(dim, 1);
    for (int i = 0; i < dim; ++i) f.set(1u << i, coeffs[i]);
    return f;
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  const std::map<std::uint32_t, S>& terms() const { return t_; }

  S coeff(std::uint32_t mask) const {
    auto it = t_.find(mask);
    return it == t_.end() ? S(0) : it->second;
  }

  void set(std::uint32_t mask, const S& v) {
    if (std::popcount(mask) != k_ || (n_ < 32 && mask >> n_))
      throw ValidationError("monomial mask does not match form degree");
    if (is_zero(v, 0.0))
      t_.erase(mask);
    else
      t_[mask] = v;
  }

  void add_term(std::uint32_t mask, const S& v) { set(mask, S(coeff(mask) + v)); }

  AlternatingForm& operator+=(const AlternatingForm& o) {
    for (const auto& [m, v] : o.t_) add_term(m, v);
    return *this;
  }
  AlternatingForm& operator-=(const AlternatingForm& o) {
    for (const auto& [m, v] : o.t_) add_term(m, S(-v));
    return *this;
  }
  AlternatingForm& operator*=(const S& s) {
    if (is_zero(s, 0.0)) {
      t_.clear();
      return *this;
    }
    for (auto& [m, v] : t_) v *= s;
    return *this;
  }

  friend AlternatingForm operator+(AlternatingForm a, const AlternatingForm& b) {
    a += b;
    return a;
  }
  friend AlternatingForm operator-(AlternatingForm a, const AlternatingForm& b) {
    a -= b;
    return a;
  }
  friend AlternatingForm operator*(const S& s, AlternatingForm a) {
    a *= s;
    return a;
  }
  friend AlternatingForm operator-(AlternatingForm a) {
    a *= S(-1);
    return a;
  }

  bool is_zero_form(double tl = tol::form_eq) const {
    for (const auto& [m, v] : t_)
      if (!is_zero(v, tl)) return false;
    return true;
  }

  double max_abs() const {
    double w = 0;
    for (const auto& [m, v] : t_) w = std::max(w, std::fabs(to_double(v)));
    return w;
  }

  /// Value on a tuple of vectors (determinant convention, no 1/k! factor).
  S eval(const std::vector<Vec<S>>& vs) const {
    if ((int)vs.size() != k_)
      throw ValidationError("evaluation arity does not match form degree");
    S total(0);
    for (const auto& [mask, cv] : t_) {
      Mat<S> m(k_, k_);
      int a = 0;
      for (std::uint32_t rest = mask; rest; rest &= rest - 1, ++a) {
        int idx = std::countr_zero(rest);
        for (int b = 0; b < k_; ++b) m(a, b) = vs[b][idx];
      }
      total += cv * determinant(m);
    }
    return total;
  }

  /// Coefficient vector of a 1-form.
  Vec<S> one_form_coeffs() const {
    if (k_ != 1) throw ValidationError("not a 1-form");
    Vec<S> c(n_, S(0));
    for (const auto& [mask, v] : t_) c[std::countr_zero(mask)] = v;
    return c;
  }

 private:
  int n_;
  int k_;
  std::map<std::uint32_t, S> t_;
};

template <class S>
bool forms_equal(const AlternatingForm<S>& a, const AlternatingForm<S>& b,
                 double tl = tol::form_eq) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) return false;
  return (a - b).is_zero_form(tl);
}

template <class S>
double form_distance(const AlternatingForm<S>& a, const AlternatingForm<S>& b) {
  return (a - b).max_abs();
}

template <class S>
AlternatingForm<S> wedge(const AlternatingForm<S>& a, const AlternatingForm<S>& b) {
  if (a.dim() != b.dim()) throw ValidationError("wedge of mismatched dimensions");
  int k = a.degree() + b.degree();
  if (k > a.dim()) return AlternatingForm<S>(a.dim(), 0);  // identically zero
  AlternatingForm<S> out(a.dim(), k);
  for (const auto& [ma, va] : a.terms())
    for (const auto& [mb, vb] : b.terms()) {
      if (ma & mb) continue;
      S v = va * vb;
      if (wedge_sign(ma, mb) < 0) v = -v;
      out.add_term(ma | mb, v);
    }
  return out;
}

/// Chevalley–Eilenberg differential of a left-invariant form: determined on
/// covectors by (d e^k)(e_i, e_j) = −c(i,j,k) and extended as a graded
/// derivation.
template <class S>
AlternatingForm<S> ce_differential(const LieAlgebra<S>& g,
                                   const AlternatingForm<S>& a) {
  int n = g.dim();
  if (a.dim() != n) throw ValidationError("form dimension mismatch");
  if (a.degree() >= n) return AlternatingForm<S>(n, 0);
  AlternatingForm<S> out(n, a.degree() + 1);
  for (const auto& [mask, v] : a.terms()) {
    int pos = 0;
    for (std::uint32_t rest = mask; rest; rest &= rest - 1, ++pos) {
      int t = std::countr_zero(rest);
      std::uint32_t others = mask & ~(1u << t);
      // e^{i1}∧…∧d(e^t)∧…∧e^{ik}, with d(e^t) = −Σ_{i<j} c(i,j,t) e^i∧e^j
      S outer = (pos & 1) ? S(-v) : v;  // (−1)^{pos} from moving d past e^{i1}..
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const S& cijt = g.c(i, j, t);
          if (is_zero(cijt, 0.0)) continue;
          std::uint32_t pair = (1u << i) | (1u << j);
          if (pair & others) continue;
          S term = outer * cijt;
          if (wedge_sign(pair, others) < 0) term = -term;
          out.add_term(pair | others, S(-term));
        }
    }
  }
  return out;
}

/// Inner product on the algebra: symmetric positive definite bilinear form,
/// with the inverse and determinant cached for form-level computations.
template <class S>
class InnerProduct {
 public:
  explicit InnerProduct(Mat<S> g) : g_(std::move(g)) {
    if (g_.rows() != g_.cols()) throw ValidationError("metric must be square");
    if (!is_positive_definite(g_))
      throw ValidationError("metric is not symmetric positive definite");
    auto inv = inverse(g_);
    if (!inv) throw ValidationError("metric is singular");
    ginv_ = std::move(*inv);
    det_ = determinant(g_);
  }

  static InnerProduct standard(int n) { return InnerProduct(Mat<S>::identity(n)); }

  int dim() const { return g_.rows(); }
  const Mat<S>& matrix() const { return g_; }
  const Mat<S>& inverse_matrix() const { return ginv_; }
  const S& det() const { return det_; }

  S inner(const Vec<S>& x, const Vec<S>& y) const { return dot(x, g_.apply(y)); }
  S norm_sq(const Vec<S>& x) const { return inner(x, x); }

 private:
  Mat<S> g_;
  Mat<S> ginv_;
  S det_;
};

/// Gram–Schmidt orthogonalization (no normalization, so it stays exact on
/// rationals); dependent inputs are dropped.
template <class S>
std::vector<Vec<S>> orthogonalize(const InnerProduct<S>& ip,
                                  const std::vector<Vec<S>>& vs) {
  std::vector<Vec<S>> out;
  for (const auto& v : vs) {
    Vec<S> u = v;
    for (const auto& w : out)
      u = vec_sub(u, vec_scale(S(ip.inner(u, w) / ip.norm_sq(w)), w));
    if (!vec_is_zero(u, scalar_traits<S>::exact ? 0.0 : tol::pivot))
      out.push_back(std::move(u));
  }
  return out;
}

/// Orthonormal basis of the span. On the rational backend every intermediate
/// squared norm must be a perfect square; otherwise this throws.
template <class S>
std::vector<Vec<S>> gram_schmidt(const InnerProduct<S>& ip,
                                 const std::vector<Vec<S>>& vs) {
  std::vector<Vec<S>> out = orthogonalize(ip, vs);
  for (auto& u : out) {
    S len = sqrt_scalar(ip.norm_sq(u));
    u = vec_scale(S(S(1) / len), u);
  }
  return out;
}

namespace detail {
template <class S>
S minor_det(const Mat<S>& m, std::uint32_t rows, std::uint32_t cols, int k) {
  Mat<S> sub(k, k);
  int a = 0;
  for (std::uint32_t r = rows; r; r &= r - 1, ++a) {
    int i = std::countr_zero(r);
    int b = 0;
    for (std::uint32_t c = cols; c; c &= c - 1, ++b)
      sub(a, b) = m(i, std::countr_zero(c));
  }
  return determinant(sub);
}
}  // namespace detail

/// Induced inner product on k-forms: ⟨e^I, e^J⟩ = det(G^{-1}[I,J]).
template <class S>
S form_inner(const InnerProduct<S>& ip, const AlternatingForm<S>& a,
             const AlternatingForm<S>& b) {
  if (a.degree() != b.degree() || a.dim() != b.dim())
    throw ValidationError("form inner product of mismatched forms");
  S total(0);
  for (const auto& [ma, va] : a.terms())
    for (const auto& [mb, vb] : b.terms())
      total += va * vb *
               detail::minor_det(ip.inverse_matrix(), ma, mb, a.degree());
  return total;
}

/// Rational-friendly Hodge star ∗̃ = ∗ / √(det G):
///   (∗̃α)_{comp(K)} = orient · sign(K, comp(K)) · Σ_I α_I det(G^{-1}[K, I]).
/// Exact over the rational backend for any rational metric.
template <class S>
AlternatingForm<S> hodge_star_raw(const InnerProduct<S>& ip, int orientation,
                                  const AlternatingForm<S>& a) {
  int n = a.dim();
  int k = a.degree();
  std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  AlternatingForm<S> out(n, n - k);
  std::vector<std::uint32_t> kmasks;
  for (std::uint32_t m = 0; m <= full; ++m)
    if (std::popcount(m) == k) kmasks.push_back(m);
  for (std::uint32_t km : kmasks) {
    S acc(0);
    for (const auto& [mi, v] : a.terms())
      acc += v * detail::minor_det(ip.inverse_matrix(), km, mi, k);
    if (is_zero(acc, 0.0)) continue;
    std::uint32_t comp = full & ~km;
    int sgn = wedge_sign(km, comp) * orientation;
    out.add_term(comp, sgn < 0 ? S(-acc) : acc);
  }
  return out;
}

/// Hodge star with the volume normalization √(det G). On the rational backend
/// this requires det G to be a perfect square (use the codifferential and the
/// two-star identities for exact work with general metrics).
template <class S>
AlternatingForm<S> hodge_star(const InnerProduct<S>& ip, int orientation,
                              const AlternatingForm<S>& a) {
  S root = sqrt_scalar(ip.det());
  AlternatingForm<S> out = hodge_star_raw(ip, orientation, a);
  out *= root;
  return out;
}

/// Codifferential on an even-dimensional oriented metric algebra: δ = −∗d∗,
/// computed as −det(G) · ∗̃ ∘ d ∘ ∗̃ so it stays exact over the rationals.
template <class S>
AlternatingForm<S> codifferential(const LieAlgebra<S>& g,
                                  const InnerProduct<S>& ip, int orientation,
                                  const AlternatingForm<S>& a) {
  AlternatingForm<S> s1 = hodge_star_raw(ip, orientation, a);
  AlternatingForm<S> ds = ce_differential(g, s1);
  AlternatingForm<S> s2 = hodge_star_raw(ip, orientation, ds);
  s2 *= S(-ip.det());
  return s2;
}

/// Lee form of an almost Hermitian pair on a 2m-dimensional algebra:
///   θ = −1/(m−1) (δω)∘J          (θ = 0 when m = 1: every 2-form is closed).
/// J is the endomorphism matrix acting on coordinates; composing a 1-form
/// with J maps its coefficient vector t to Jᵀt.
template <class S>
AlternatingForm<S> lee_form(const LieAlgebra<S>& g, const InnerProduct<S>& ip,
                            int orientation, const Mat<S>& J,
                            const AlternatingForm<S>& omega) {
  int n = g.dim();
  if (n % 2 != 0) throw PreconditionError("Lee form needs even dimension");
  if (n == 2) return AlternatingForm<S>(n, 1);
  int m = n / 2;
  AlternatingForm<S> delta_omega = codifferential(g, ip, orientation, omega);
  Vec<S> t = delta_omega.one_form_coeffs();
  Vec<S> tj = J.transpose().apply(t);
  S factor = S(-1) / S(scalar_from_int<S>(m - 1));
  return AlternatingForm<S>::one_form(n, vec_scale(factor, tj));
}

/// Renders a form like "x1^y1 - 1/2 z1^z2" using the dual basis labels.
template <class S>
std::string format_form(const AlternatingForm<S>& f,
                        const std::vector<std::string>& dual_labels) {
  if (f.terms().empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, v] : f.terms()) {
    if (is_zero(v, 0.0)) continue;
    bool neg = to_double(v) < 0;
    S mag = neg ? S(-v) : v;
    if (first) {
      if (neg) os << "-";
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    std::string coeff = scalar_str(mag);
    bool unit = is_one(mag);
    if (!unit || mask == 0) os << coeff;
    if (mask == 0) continue;
    if (!unit) os << " ";
    bool first_factor = true;
    for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
      if (!first_factor) os << "^";
      os << dual_labels[std::countr_zero(rest)];
      first_factor = false;
    }
  }
  if (first) return "0";
  return os.str();
}

}  // namespace lck
