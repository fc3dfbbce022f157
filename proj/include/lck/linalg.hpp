#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "lck/scalar.hpp"

namespace lck {

template <class S>
using Vec = std::vector<S>;

/// Dense row-major matrix over the scalar backend S.
template <class S>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols), a_(std::size_t(rows) * cols, S(0)) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }

  S& operator()(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
  const S& operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

  Mat transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  S trace() const {
    S t(0);
    for (int i = 0; i < std::min(r_, c_); ++i) t += (*this)(i, i);
    return t;
  }

  Vec<S> apply(const Vec<S>& x) const {
    Vec<S> y(r_, S(0));
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  Vec<S> col(int j) const {
    Vec<S> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Vec<S> row(int i) const {
    Vec<S> v(c_);
    for (int j = 0; j < c_; ++j) v[j] = (*this)(i, j);
    return v;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const S& aik = a(i, k);
        if (is_zero(aik, 0.0) && scalar_traits<S>::exact) continue;
        for (int j = 0; j < b.c_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    Mat m(a.r_, a.c_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) m.a_[i] = a.a_[i] + b.a_[i];
    return m;
  }

  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat m(a.r_, a.c_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) m.a_[i] = a.a_[i] - b.a_[i];
    return m;
  }

  friend Mat operator*(const S& s, const Mat& a) {
    Mat m(a.r_, a.c_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) m.a_[i] = s * a.a_[i];
    return m;
  }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }

  double max_abs() const {
    double m = 0;
    for (const S& v : a_) m = std::max(m, std::fabs(to_double(v)));
    return m;
  }

  bool is_zero_matrix(double tl = tol::form_eq) const {
    for (const S& v : a_)
      if (!is_zero(v, tl)) return false;
    return true;
  }

 private:
  int r_ = 0, c_ = 0;
  std::vector<S> a_;
};

template <class S>
Vec<S> vec_add(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

template <class S>
Vec<S> vec_sub(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <class S>
Vec<S> vec_scale(const S& s, const Vec<S>& a) {
  Vec<S> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

template <class S>
bool vec_is_zero(const Vec<S>& a, double tl = tol::form_eq) {
  for (const S& v : a)
    if (!is_zero(v, tl)) return false;
  return true;
}

template <class S>
double vec_max_abs(const Vec<S>& a) {
  double m = 0;
  for (const S& v : a) m = std::max(m, std::fabs(to_double(v)));
  return m;
}

template <class S>
S dot(const Vec<S>& a, const Vec<S>& b) {
  S r(0);
  for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

namespace detail {
template <class S>
bool pivot_usable(const S& v) {
  if constexpr (scalar_traits<S>::exact)
    return !is_zero(v, 0.0);
  else
    return std::fabs(to_double(v)) > tol::pivot;
}
}  // namespace detail

/// In-place reduced row echelon form with first-usable-pivot selection.
/// Returns the pivot column of each pivot row; rank = pivots.size().
template <class S>
std::vector<int> rref(Mat<S>& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int pr = -1;
    for (int i = row; i < m.rows(); ++i) {
      if (detail::pivot_usable(m(i, col))) {
        pr = i;
        break;
      }
    }
    if (pr < 0) continue;
    if (pr != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(pr, j));
    S inv = S(1) / m(row, col);
    for (int j = col; j < m.cols(); ++j) m(row, j) = inv * m(row, j);
    m(row, col) = S(1);
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row) continue;
      S f = m(i, col);
      if (is_zero(f, 0.0)) continue;
      for (int j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
      m(i, col) = S(0);
    }
    pivots.push_back(col);
    ++row;
  }
  // flush float round-off left of pivots
  if constexpr (!scalar_traits<S>::exact) {
    for (int i = 0; i < (int)pivots.size(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (std::fabs(to_double(m(i, j))) <= tol::pivot) m(i, j) = S(0);
  }
  return pivots;
}

/// Canonical basis of the span of the given vectors (nonzero RREF rows).
template <class S>
std::vector<Vec<S>> row_space(const std::vector<Vec<S>>& vs, int n) {
  Mat<S> m((int)vs.size(), n);
  for (int i = 0; i < (int)vs.size(); ++i)
    for (int j = 0; j < n; ++j) m(i, j) = vs[i][j];
  auto pivots = rref(m);
  std::vector<Vec<S>> basis;
  for (int i = 0; i < (int)pivots.size(); ++i) basis.push_back(m.row(i));
  return basis;
}

/// Canonical basis of ker(m): one vector per free column, unit at that column.
template <class S>
std::vector<Vec<S>> kernel(Mat<S> m) {
  int n = m.cols();
  auto pivots = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<Vec<S>> basis;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    Vec<S> v(n, S(0));
    v[free] = S(1);
    for (int i = 0; i < (int)pivots.size(); ++i) v[pivots[i]] = -m(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves A x = b; free variables are set to zero; nullopt if inconsistent.
template <class S>
std::optional<Vec<S>> solve(const Mat<S>& a, const Vec<S>& b) {
  Mat<S> m(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    m(i, a.cols()) = b[i];
  }
  auto pivots = rref(m);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  Vec<S> x(a.cols(), S(0));
  for (int i = 0; i < (int)pivots.size(); ++i) x[pivots[i]] = m(i, a.cols());
  return x;
}

template <class S>
std::optional<Mat<S>> inverse(const Mat<S>& a) {
  int n = a.rows();
  Mat<S> m(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n + i) = S(1);
  }
  auto pivots = rref(m);
  if ((int)pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
  Mat<S> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = m(i, n + j);
  return inv;
}

template <class S>
S determinant(Mat<S> m) {
  int n = m.rows();
  S det(1);
  for (int col = 0; col < n; ++col) {
    int pr = -1;
    for (int i = col; i < n; ++i)
      if (detail::pivot_usable(m(i, col))) {
        pr = i;
        break;
      }
    if (pr < 0) return S(0);
    if (pr != col) {
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(pr, j));
      det = -det;
    }
    det *= m(col, col);
    S inv = S(1) / m(col, col);
    for (int i = col + 1; i < n; ++i) {
      S f = inv * m(i, col);
      if (is_zero(f, 0.0)) continue;
      for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

/// Sylvester test: symmetric and all leading principal minors positive.
template <class S>
bool is_positive_definite(const Mat<S>& g) {
  int n = g.rows();
  if (g.cols() != n) return false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!is_zero(S(g(i, j) - g(j, i)), tol::form_eq)) return false;
  for (int k = 1; k <= n; ++k) {
    Mat<S> lead(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lead(i, j) = g(i, j);
    S d = determinant(lead);
    if constexpr (scalar_traits<S>::exact) {
      if (d <= 0) return false;
    } else {
      if (to_double(d) <= 0) return false;
    }
  }
  return true;
}

/// Euclidean least-squares residual of v against span(basis).
/// Exact on the rational backend; basis rows must be independent.
template <class S>
Vec<S> projection_residual(const Vec<S>& v, const std::vector<Vec<S>>& basis) {
  if (basis.empty()) return v;
  int k = (int)basis.size();
  Mat<S> gram(k, k);
  Vec<S> rhs(k, S(0));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) gram(i, j) = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], v);
  }
  auto x = solve(gram, rhs);
  if (!x) throw std::logic_error("dependent basis in projection_residual");
  Vec<S> r = v;
  for (int i = 0; i < k; ++i) r = vec_sub(r, vec_scale((*x)[i], basis[i]));
  return r;
}

template <class S>
bool in_span(const Vec<S>& v, const std::vector<Vec<S>>& basis,
             double* worst = nullptr) {
  Vec<S> r = projection_residual(v, basis);
  double w = vec_max_abs(r);
  if (worst) *worst = std::max(*worst, w);
  if constexpr (scalar_traits<S>::exact)
    return vec_is_zero(r, 0.0);
  else
    return w <= tol::subspace;
}

template <class S>
bool subspace_contains(const std::vector<Vec<S>>& big,
                       const std::vector<Vec<S>>& small, double* worst = nullptr) {
  for (const auto& v : small)
    if (!in_span(v, big, worst)) return false;
  return true;
}

template <class S>
bool subspace_equal(const std::vector<Vec<S>>& a, const std::vector<Vec<S>>& b,
                    double* worst = nullptr) {
  return a.size() == b.size() && subspace_contains(a, b, worst) &&
         subspace_contains(b, a, worst);
}

template <class S>
std::vector<Vec<S>> subspace_sum(const std::vector<Vec<S>>& a,
                                 const std::vector<Vec<S>>& b, int n) {
  std::vector<Vec<S>> all = a;
  all.insert(all.end(), b.begin(), b.end());
  return row_space(all, n);
}

/// Canonical basis of span(a) ∩ span(b).
template <class S>
std::vector<Vec<S>> subspace_intersect(const std::vector<Vec<S>>& a,
                                       const std::vector<Vec<S>>& b, int n) {
  if (a.empty() || b.empty()) return {};
  int ka = (int)a.size(), kb = (int)b.size();
  Mat<S> m(n, ka + kb);
  for (int j = 0; j < ka; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = a[j][i];
  for (int j = 0; j < kb; ++j)
    for (int i = 0; i < n; ++i) m(i, ka + j) = -b[j][i];
  auto null = kernel(m);
  std::vector<Vec<S>> vecs;
  for (const auto& y : null) {
    Vec<S> v(n, S(0));
    for (int j = 0; j < ka; ++j) v = vec_add(v, vec_scale(y[j], a[j]));
    vecs.push_back(std::move(v));
  }
  return row_space(vecs, n);
}

/// {w in span(within) : w^T G s = 0 for all s in sub}.
template <class S>
std::vector<Vec<S>> orth_complement_in(const Mat<S>& gmat,
                                       const std::vector<Vec<S>>& sub,
                                       const std::vector<Vec<S>>& within, int n) {
  if (within.empty()) return {};
  if (sub.empty()) return row_space(within, n);
  int kw = (int)within.size(), ks = (int)sub.size();
  Mat<S> cons(ks, kw);
  for (int i = 0; i < ks; ++i) {
    Vec<S> gs = gmat.apply(sub[i]);
    for (int j = 0; j < kw; ++j) cons(i, j) = dot(gs, within[j]);
  }
  auto null = kernel(cons);
  std::vector<Vec<S>> vecs;
  for (const auto& y : null) {
    Vec<S> v(n, S(0));
    for (int j = 0; j < kw; ++j) v = vec_add(v, vec_scale(y[j], within[j]));
    vecs.push_back(std::move(v));
  }
  return row_space(vecs, n);
}

/// Lower-triangular Cholesky factor of an SPD matrix; nullopt when a pivot
/// falls below the tolerance.
inline std::optional<Mat<double>> cholesky(const Mat<double>& g) {
  int n = g.rows();
  Mat<double> l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= tol::pivot) return std::nullopt;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

inline Mat<double> lower_tri_inverse(const Mat<double>& l) {
  int n = l.rows();
  Mat<double> inv(n, n);
  for (int i = 0; i < n; ++i) {
    inv(i, i) = 1.0 / l(i, i);
    for (int j = 0; j < i; ++j) {
      double s = 0;
      for (int k = j; k < i; ++k) s += l(i, k) * inv(k, j);
      inv(i, j) = -s / l(i, i);
    }
  }
  return inv;
}

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Mat<double> vectors;         // orthonormal columns, matching order
};

/// Cyclic Jacobi rotations for a symmetric matrix; deterministic sweep order.
inline EigenDecomposition jacobi_eigensymmetric(Mat<double> a) {
  int n = a.rows();
  Mat<double> v = Mat<double>::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        double tau = (a(q, q) - a(p, p)) / (2 * apq);
        double t = (tau >= 0 ? 1.0 : -1.0) /
                   (std::fabs(tau) + std::sqrt(1 + tau * tau));
        double c = 1 / std::sqrt(1 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) < a(y, y); });
  EigenDecomposition e;
  e.values.resize(n);
  e.vectors = Mat<double>(n, n);
  for (int j = 0; j < n; ++j) {
    e.values[j] = a(order[j], order[j]);
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::fabs(v(i, order[j])) > std::fabs(v(arg, order[j]))) arg = i;
    double sign = v(arg, order[j]) >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) e.vectors(i, j) = sign * v(i, order[j]);
  }
  return e;
}

}  // namespace lck
