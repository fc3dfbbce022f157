#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "lck/linalg.hpp"
#include "lck/scalar.hpp"

namespace lck {

struct JacobiReport {
  bool ok = true;
  double worst = 0;
  std::tuple<int, int, int> witness{0, 0, 0};
};

/// Finite-dimensional real Lie algebra with dense structure constants:
/// [e_i, e_j] = sum_k c(i,j,k) e_k.
template <class S>
class LieAlgebra {
 public:
  explicit LieAlgebra(int dim)
      : n_(dim), c_(std::size_t(dim) * dim * dim, S(0)) {
    labels_.reserve(dim);
    duals_.reserve(dim);
    for (int i = 0; i < dim; ++i) {
      labels_.push_back("e" + std::to_string(i + 1));
      duals_.push_back("e" + std::to_string(i + 1));
    }
  }

  /// Builds from the sparse list {(i, j, k, coeff)} of [e_i,e_j] components
  /// with i < j; the antisymmetric counterparts are filled in automatically.
  static LieAlgebra from_brackets(
      int dim, const std::vector<std::tuple<int, int, int, S>>& entries) {
    LieAlgebra g(dim);
    for (const auto& [i, j, k, v] : entries) {
      if (i < 0 || j < 0 || k < 0 || i >= dim || j >= dim || k >= dim)
        throw ValidationError("bracket index out of range");
      if (i >= j)
        throw ValidationError("bracket entries must have first index < second");
      g.at(i, j, k) += v;
      g.at(j, i, k) -= v;
    }
    return g;
  }

  int dim() const { return n_; }

  const S& c(int i, int j, int k) const {
    return c_[(std::size_t(i) * n_ + j) * n_ + k];
  }

  Vec<S> bracket(const Vec<S>& x, const Vec<S>& y) const {
    Vec<S> z(n_, S(0));
    for (int i = 0; i < n_; ++i) {
      if (is_zero(x[i], 0.0)) continue;
      for (int j = 0; j < n_; ++j) {
        if (is_zero(y[j], 0.0)) continue;
        S f = x[i] * y[j];
        for (int k = 0; k < n_; ++k) z[k] += f * c(i, j, k);
      }
    }
    return z;
  }

  Vec<S> bracket_basis(int i, int j) const {
    Vec<S> z(n_);
    for (int k = 0; k < n_; ++k) z[k] = c(i, j, k);
    return z;
  }

  /// Matrix of ad_x : y -> [x, y] acting on coordinates.
  Mat<S> ad(const Vec<S>& x) const {
    Mat<S> m(n_, n_);
    for (int j = 0; j < n_; ++j) {
      Vec<S> ej(n_, S(0));
      ej[j] = S(1);
      Vec<S> img = bracket(x, ej);
      for (int i = 0; i < n_; ++i) m(i, j) = img[i];
    }
    return m;
  }

  Mat<S> ad_basis(int i) const {
    Vec<S> ei(n_, S(0));
    ei[i] = S(1);
    return ad(ei);
  }

  JacobiReport check_jacobi() const {
    JacobiReport rep;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k) {
          Vec<S> ei(n_, S(0)), ej(n_, S(0)), ek(n_, S(0));
          ei[i] = S(1);
          ej[j] = S(1);
          ek[k] = S(1);
          Vec<S> sum = vec_add(
              vec_add(bracket(ei, bracket(ej, ek)), bracket(ej, bracket(ek, ei))),
              bracket(ek, bracket(ei, ej)));
          double w = vec_max_abs(sum);
          if (w > rep.worst) {
            rep.worst = w;
            rep.witness = {i, j, k};
          }
          if (!vec_is_zero(sum, scalar_traits<S>::exact ? 0.0 : tol::form_eq))
            rep.ok = false;
        }
    return rep;
  }

  /// tr(ad_{e_i}) for each basis vector; all zero iff unimodular.
  std::vector<S> ad_traces() const {
    std::vector<S> t(n_, S(0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t[i] += c(i, j, j);
    return t;
  }

  bool is_unimodular() const {
    for (const S& t : ad_traces())
      if (!is_zero(t, scalar_traits<S>::exact ? 0.0 : tol::form_eq)) return false;
    return true;
  }

  /// Canonical basis of [g, g].
  std::vector<Vec<S>> derived_algebra() const {
    std::vector<Vec<S>> gens;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) gens.push_back(bracket_basis(i, j));
    return row_space(gens, n_);
  }

  /// Canonical basis of {x : [x, g] = 0}.
  std::vector<Vec<S>> center() const {
    Mat<S> m(n_ * n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j) m(j * n_ + k, i) = c(i, j, k);
    return kernel(m);
  }

  /// Canonical bases of the lower central series g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ ...
  std::vector<std::vector<Vec<S>>> lower_central_series() const {
    std::vector<std::vector<Vec<S>>> series;
    std::vector<Vec<S>> cur;
    for (int i = 0; i < n_; ++i) {
      Vec<S> e(n_, S(0));
      e[i] = S(1);
      cur.push_back(std::move(e));
    }
    series.push_back(cur);
    while (!series.back().empty()) {
      std::vector<Vec<S>> gens;
      for (int i = 0; i < n_; ++i) {
        Vec<S> ei(n_, S(0));
        ei[i] = S(1);
        for (const auto& y : series.back()) gens.push_back(bracket(ei, y));
      }
      auto next = row_space(gens, n_);
      if (next.size() == series.back().size()) break;  // stabilized, not nilpotent
      series.push_back(std::move(next));
    }
    return series;
  }

  bool is_nilpotent() const {
    auto s = lower_central_series();
    return s.back().empty();
  }

  bool is_abelian_algebra() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (!vec_is_zero(bracket_basis(i, j))) return false;
    return true;
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& dual_labels() const { return duals_; }
  void set_labels(std::vector<std::string> l) {
    if ((int)l.size() != n_) throw ValidationError("label count mismatch");
    labels_ = std::move(l);
  }
  void set_dual_labels(std::vector<std::string> l) {
    if ((int)l.size() != n_) throw ValidationError("dual label count mismatch");
    duals_ = std::move(l);
  }

 private:
  S& at(int i, int j, int k) { return c_[(std::size_t(i) * n_ + j) * n_ + k]; }

  int n_;
  std::vector<S> c_;
  std::vector<std::string> labels_;
  std::vector<std::string> duals_;
};

/// Structure constants relative to the new basis given by the columns of P
/// (each expressed in the old coordinates). P must be invertible.
template <class S>
LieAlgebra<S> change_basis(const LieAlgebra<S>& g, const Mat<S>& p) {
  int n = g.dim();
  auto pinv = inverse(p);
  if (!pinv) throw ValidationError("basis change matrix is singular");
  std::vector<std::tuple<int, int, int, S>> entries;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Vec<S> w = pinv->apply(g.bracket(p.col(i), p.col(j)));
      for (int k = 0; k < n; ++k)
        if (!is_zero(w[k], 0.0)) entries.emplace_back(i, j, k, w[k]);
    }
  return LieAlgebra<S>::from_brackets(n, entries);
}

/// Metric matrix relative to the new basis: G' = PᵀGP.
template <class S>
Mat<S> pull_back_metric(const Mat<S>& g, const Mat<S>& p) {
  return p.transpose() * (g * p);
}

/// Endomorphism matrix relative to the new basis: J' = P⁻¹JP.
template <class S>
Mat<S> conjugate_endomorphism(const Mat<S>& j, const Mat<S>& p) {
  auto pinv = inverse(p);
  if (!pinv) throw ValidationError("basis change matrix is singular");
  return (*pinv) * (j * p);
}

/// Finite-dimensional associative algebra with product table
/// e_i * e_j = sum_k p(i,j,k) e_k.
template <class S>
class AssociativeAlgebra {
 public:
  explicit AssociativeAlgebra(int dim)
      : n_(dim), p_(std::size_t(dim) * dim * dim, S(0)) {}

  static AssociativeAlgebra from_products(
      int dim, const std::vector<std::tuple<int, int, int, S>>& entries) {
    AssociativeAlgebra a(dim);
    for (const auto& [i, j, k, v] : entries) {
      if (i < 0 || j < 0 || k < 0 || i >= dim || j >= dim || k >= dim)
        throw ValidationError("product index out of range");
      a.at(i, j, k) += v;
    }
    a.validate();
    return a;
  }

  int dim() const { return n_; }

  const S& p(int i, int j, int k) const {
    return p_[(std::size_t(i) * n_ + j) * n_ + k];
  }

  Vec<S> multiply(const Vec<S>& x, const Vec<S>& y) const {
    Vec<S> z(n_, S(0));
    for (int i = 0; i < n_; ++i) {
      if (is_zero(x[i], 0.0)) continue;
      for (int j = 0; j < n_; ++j) {
        if (is_zero(y[j], 0.0)) continue;
        S f = x[i] * y[j];
        for (int k = 0; k < n_; ++k) z[k] += f * p(i, j, k);
      }
    }
    return z;
  }

  bool is_commutative() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          if (!is_zero(S(p(i, j, k) - p(j, i, k)),
                       scalar_traits<S>::exact ? 0.0 : tol::form_eq))
            return false;
    return true;
  }

  /// Nilpotency of the associative product: A^m = 0 for some m.
  /// Returns {true, least such m} or {false, 0}.
  std::pair<bool, int> nilpotency_index() const {
    std::vector<Vec<S>> power;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) power.push_back(multiply_basis(i, j));
    power = row_space(power, n_);
    int m = 2;  // invariant: `power` spans A^m
    std::size_t prev = std::size_t(n_) + 1;
    while (!power.empty() && power.size() < prev) {
      prev = power.size();
      std::vector<Vec<S>> next;
      for (int i = 0; i < n_; ++i) {
        Vec<S> ei(n_, S(0));
        ei[i] = S(1);
        for (const auto& y : power) next.push_back(multiply(ei, y));
      }
      power = row_space(next, n_);
      ++m;
    }
    if (power.empty()) return {true, m};
    return {false, 0};
  }

 private:
  Vec<S> multiply_basis(int i, int j) const {
    Vec<S> z(n_);
    for (int k = 0; k < n_; ++k) z[k] = p(i, j, k);
    return z;
  }

  void validate() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          Vec<S> ei(n_, S(0)), ej(n_, S(0)), ek(n_, S(0));
          ei[i] = S(1);
          ej[j] = S(1);
          ek[k] = S(1);
          Vec<S> lhs = multiply(multiply(ei, ej), ek);
          Vec<S> rhs = multiply(ei, multiply(ej, ek));
          if (!vec_is_zero(vec_sub(lhs, rhs),
                           scalar_traits<S>::exact ? 0.0 : tol::form_eq))
            throw ValidationError("product table is not associative");
        }
  }

  S& at(int i, int j, int k) { return p_[(std::size_t(i) * n_ + j) * n_ + k]; }

  int n_;
  std::vector<S> p_;
};

/// Double of a commutative associative algebra A: on A ⊕ A the bracket
/// [(a,b),(a',b')] = (aa' − a'a, ab' − a'b) is a Lie bracket, and
/// J(a,b) = (b, −a) is a complex structure. Coordinates: first copy then
/// second, so (a, b) ↦ (a_0..a_{m−1}, b_0..b_{m−1}).
template <class S>
struct AffData {
  LieAlgebra<S> lie;
  Mat<S> J;
};

template <class S>
AffData<S> aff_construct(const AssociativeAlgebra<S>& alg) {
  int m = alg.dim();
  int n = 2 * m;
  std::vector<std::tuple<int, int, int, S>> entries;
  auto emit = [&](int i, int j, const Vec<S>& first, const Vec<S>& second) {
    for (int k = 0; k < m; ++k) {
      if (!is_zero(first[k], 0.0)) {
        if (i < j)
          entries.emplace_back(i, j, k, first[k]);
        else
          entries.emplace_back(j, i, k, S(-first[k]));
      }
      if (!is_zero(second[k], 0.0)) {
        if (i < j)
          entries.emplace_back(i, j, m + k, second[k]);
        else
          entries.emplace_back(j, i, m + k, S(-second[k]));
      }
    }
  };
  Vec<S> zero(m, S(0));
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      Vec<S> ep(m, S(0)), eq(m, S(0));
      ep[p] = S(1);
      eq[q] = S(1);
      // [(e_p, 0), (e_q, 0)] = (e_p e_q − e_q e_p, 0)
      if (p < q)
        emit(p, q, vec_sub(alg.multiply(ep, eq), alg.multiply(eq, ep)), zero);
      // [(e_p, 0), (0, e_q)] = (0, e_p e_q)
      emit(p, m + q, zero, alg.multiply(ep, eq));
      // [(0, e_p), (0, e_q)] = 0
    }
  AffData<S> out{LieAlgebra<S>::from_brackets(n, entries), Mat<S>(n, n)};
  for (int k = 0; k < m; ++k) {
    out.J(m + k, k) = S(-1);
    out.J(k, m + k) = S(1);
  }
  auto rep = out.lie.check_jacobi();
  if (!rep.ok)
    throw ValidationError("doubled product table fails the Jacobi identity");
  std::vector<std::string> labels, duals;
  for (int k = 0; k < m; ++k) labels.push_back("a" + std::to_string(k + 1));
  for (int k = 0; k < m; ++k) labels.push_back("b" + std::to_string(k + 1));
  for (const auto& l : labels) duals.push_back(l);
  out.lie.set_labels(labels);
  out.lie.set_dual_labels(duals);
  return out;
}

}  // namespace lck
