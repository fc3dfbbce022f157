#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "lck/hermitian.hpp"
#include "lck/lie_algebra.hpp"
#include "lck/scalar.hpp"

namespace lck {

/// Parse failure with a file/line location baked into the message.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Algebra plus a complex structure but no metric (search input).
template <class S>
struct PairedStructure {
  LieAlgebra<S> algebra;
  Mat<S> J;
};

namespace detail {

template <class S>
void require_catalog_invariants(const LieAlgebra<S>& g, const char* name) {
  auto rep = g.check_jacobi();
  if (!rep.ok)
    throw std::logic_error(std::string("catalog constructor ") + name +
                           " violates the Jacobi identity");
}

inline std::vector<std::string> indexed_labels(const char* stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

}  // namespace detail

/// The nilpotent family ℝ × h_{2n+1} with its standard abelian complex
/// structure and the one-parameter metric family: basis
/// (X_1..X_n, Y_1..Y_n, Z_1, Z_2), brackets [X_i, Y_i] = Z_1,
/// J X_i = Y_i, J Z_2 = Z_1, metric diag(1,…,1, 1/λ, 1/λ).
template <class S>
HermitianStructure<S> heisenberg_family(int n, const S& lambda) {
  if (n < 1) throw ValidationError("heisenberg family needs n >= 1");
  if (!(to_double(lambda) > 0))
    throw ValidationError("heisenberg family needs lambda > 0");
  int dim = 2 * n + 2;
  std::vector<std::tuple<int, int, int, S>> br;
  for (int i = 0; i < n; ++i) br.emplace_back(i, n + i, 2 * n, S(1));
  LieAlgebra<S> g = LieAlgebra<S>::from_brackets(dim, br);

  std::vector<std::string> labels, duals;
  for (const auto& l : detail::indexed_labels("X", n)) labels.push_back(l);
  for (const auto& l : detail::indexed_labels("Y", n)) labels.push_back(l);
  labels.push_back("Z1");
  labels.push_back("Z2");
  for (const auto& l : detail::indexed_labels("x", n)) duals.push_back(l);
  for (const auto& l : detail::indexed_labels("y", n)) duals.push_back(l);
  duals.push_back("z1");
  duals.push_back("z2");
  g.set_labels(labels);
  g.set_dual_labels(duals);
  detail::require_catalog_invariants(g, "heisenberg_family");

  Mat<S> gm = Mat<S>::identity(dim);
  gm(2 * n, 2 * n) = S(1) / lambda;
  gm(2 * n + 1, 2 * n + 1) = S(1) / lambda;

  Mat<S> j(dim, dim);
  for (int i = 0; i < n; ++i) {
    j(n + i, i) = S(1);   // J X_i = Y_i
    j(i, n + i) = S(-1);  // J Y_i = -X_i
  }
  j(2 * n + 1, 2 * n) = S(-1);  // J Z_1 = -Z_2
  j(2 * n, 2 * n + 1) = S(1);   // J Z_2 = Z_1
  return HermitianStructure<S>(std::move(g), InnerProduct<S>(std::move(gm)),
                               std::move(j));
}

/// The 4-dimensional solvable example: orthonormal basis (A, X, Y, Z) with
/// [A,X] = X, [A,Y] = −Y, [X,Y] = Z and J A = Y, J Z = X. An l.c.K.
/// structure with Lee form −α that is not Vaisman.
template <class S>
HermitianStructure<S> acfm_solvable() {
  LieAlgebra<S> g = LieAlgebra<S>::from_brackets(
      4, {{0, 1, 1, S(1)}, {0, 2, 2, S(-1)}, {1, 2, 3, S(1)}});
  g.set_labels({"A", "X", "Y", "Z"});
  g.set_dual_labels({"alpha", "x", "y", "z"});
  detail::require_catalog_invariants(g, "acfm_solvable");

  Mat<S> j(4, 4);
  j(2, 0) = S(1);   // J A = Y
  j(0, 2) = S(-1);  // J Y = -A
  j(1, 3) = S(1);   // J Z = X
  j(3, 1) = S(-1);  // J X = -Z
  return HermitianStructure<S>(std::move(g), InnerProduct<S>::standard(4),
                               std::move(j));
}

/// The bi-invariant model ℝ² ⋉ ℝ²ⁿ: orthonormal basis
/// (A, B, U_1..U_n, V_1..V_n) with [A,B] = 0, [A,U_i] = −½U_i,
/// [A,V_i] = −½V_i, [B,U_i] = −½V_i, [B,V_i] = ½U_i, J A = B, J U_i = V_i.
template <class S>
HermitianStructure<S> bi_model(int n) {
  if (n < 1) throw ValidationError("bi-invariant model needs n >= 1");
  int dim = 2 * n + 2;
  S half = S(1) / S(2);
  std::vector<std::tuple<int, int, int, S>> br;
  for (int i = 0; i < n; ++i) {
    int u = 2 + i, v = 2 + n + i;
    br.emplace_back(0, u, u, S(-half));
    br.emplace_back(0, v, v, S(-half));
    br.emplace_back(1, u, v, S(-half));
    br.emplace_back(1, v, u, half);
  }
  LieAlgebra<S> g = LieAlgebra<S>::from_brackets(dim, br);

  std::vector<std::string> labels = {"A", "B"}, duals = {"a", "b"};
  for (const auto& l : detail::indexed_labels("U", n)) labels.push_back(l);
  for (const auto& l : detail::indexed_labels("V", n)) labels.push_back(l);
  for (const auto& l : detail::indexed_labels("u", n)) duals.push_back(l);
  for (const auto& l : detail::indexed_labels("v", n)) duals.push_back(l);
  g.set_labels(labels);
  g.set_dual_labels(duals);
  detail::require_catalog_invariants(g, "bi_model");

  Mat<S> j(dim, dim);
  j(1, 0) = S(1);   // J A = B
  j(0, 1) = S(-1);  // J B = -A
  for (int i = 0; i < n; ++i) {
    j(2 + n + i, 2 + i) = S(1);   // J U_i = V_i
    j(2 + i, 2 + n + i) = S(-1);  // J V_i = -U_i
  }
  return HermitianStructure<S>(std::move(g), InnerProduct<S>::standard(dim),
                               std::move(j));
}

/// The complex Heisenberg algebra (dim 6) with its bi-invariant J:
/// [X_1,X_2] = X_3, [X_1,Y_2] = Y_3, [Y_1,X_2] = Y_3, [Y_1,Y_2] = −X_3,
/// J X_i = Y_i. Unimodular and 2-step nilpotent; carries no l.c.K. metric.
template <class S>
PairedStructure<S> complex_heisenberg() {
  LieAlgebra<S> g = LieAlgebra<S>::from_brackets(
      6, {{0, 1, 2, S(1)}, {0, 4, 5, S(1)}, {1, 3, 5, S(-1)}, {3, 4, 2, S(-1)}});
  g.set_labels({"X1", "X2", "X3", "Y1", "Y2", "Y3"});
  g.set_dual_labels({"x1", "x2", "x3", "y1", "y2", "y3"});
  detail::require_catalog_invariants(g, "complex_heisenberg");
  Mat<S> j(6, 6);
  for (int i = 0; i < 3; ++i) {
    j(3 + i, i) = S(1);
    j(i, 3 + i) = S(-1);
  }
  return {std::move(g), std::move(j)};
}

/// aff(A) for the nilpotent truncated polynomial algebra
/// A = span{t, t², …, t^m} ⊂ ℝ[t]/(t^{m+1}).
template <class S>
AffData<S> aff_nilpotent(int m) {
  if (m < 1) throw ValidationError("aff catalog entry needs m >= 1");
  std::vector<std::tuple<int, int, int, S>> products;
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b)
      if (a + b <= m) products.emplace_back(a - 1, b - 1, a + b - 1, S(1));
  auto alg = AssociativeAlgebra<S>::from_products(m, products);
  return aff_construct(alg);
}

// ---------------------------------------------------------------------------
// File format: a line-oriented structured-text document.
//
//   lck-algebra v1
//   dim 4
//   labels A X Y Z            (optional)
//   dual-labels alpha x y z   (optional)
//   orientation 1             (optional, ±1, default +1)
//   bracket 0 1 1 1           ([e_0,e_1] = 1·e_1; 0-based indices, i < j)
//   J 0  0 -1 0 0             (row 0 of J; all n rows required if any)
//   metric 0  1 0 0 0         (row 0 of the metric)
//
// '#' starts a comment. Coefficients are rational "p/q" or integer; a decimal
// anywhere switches the whole document to the float backend.
// ---------------------------------------------------------------------------

template <class S>
struct AlgebraFile {
  LieAlgebra<S> algebra;
  std::optional<Mat<S>> J;
  std::optional<Mat<S>> metric;
  int orientation = 1;
};

using AlgebraFileVariant = std::variant<AlgebraFile<Rat>, AlgebraFile<double>>;

namespace detail {

struct Statement {
  int line = 0;
  std::vector<std::string> tokens;
};

inline std::vector<Statement> tokenize_document(const std::string& text,
                                                const std::string& source) {
  std::vector<Statement> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Statement st;
    st.line = lineno;
    std::string tok;
    while (ls >> tok) st.tokens.push_back(tok);
    if (!st.tokens.empty()) out.push_back(std::move(st));
  }
  if (out.empty()) throw ParseError(source + ": empty document");
  return out;
}

inline bool token_is_decimal(const std::string& t) {
  return t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
         t.find('E') != std::string::npos;
}

[[noreturn]] inline void parse_fail(const std::string& source, int line,
                                    const std::string& msg) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
}

template <class S>
S parse_coeff(const std::string& source, int line, const std::string& tok) {
  try {
    if constexpr (scalar_traits<S>::exact)
      return parse_rational(tok);
    else
      return parse_float(tok);
  } catch (const ValidationError& e) {
    parse_fail(source, line, std::string("bad coefficient '") + tok + "': " +
                                 e.what());
  }
}

inline int parse_index(const std::string& source, int line,
                       const std::string& tok, int dim) {
  for (char c : tok)
    if (!std::isdigit((unsigned char)c))
      parse_fail(source, line, "bad index '" + tok + "'");
  int v = std::stoi(tok);
  if (v < 0 || v >= dim)
    parse_fail(source, line,
               "index " + tok + " out of range 0.." + std::to_string(dim - 1));
  return v;
}

template <class S>
AlgebraFile<S> build_algebra_file(const std::vector<Statement>& stmts,
                                  const std::string& source) {
  std::size_t pos = 0;
  if (stmts[pos].tokens != std::vector<std::string>{"lck-algebra", "v1"})
    parse_fail(source, stmts[pos].line, "expected header 'lck-algebra v1'");
  ++pos;
  if (pos >= stmts.size() || stmts[pos].tokens[0] != "dim" ||
      stmts[pos].tokens.size() != 2)
    parse_fail(source, pos < stmts.size() ? stmts[pos].line : stmts.back().line,
               "expected 'dim N' after the header");
  int dim = 0;
  try {
    dim = std::stoi(stmts[pos].tokens[1]);
  } catch (...) {
    parse_fail(source, stmts[pos].line, "bad dimension '" + stmts[pos].tokens[1] + "'");
  }
  if (dim < 1 || dim > 64)
    parse_fail(source, stmts[pos].line, "dimension must be in 1..64");
  ++pos;

  std::map<std::tuple<int, int, int>, std::pair<S, int>> brackets;
  std::optional<std::vector<std::string>> labels, duals;
  std::map<int, std::pair<Vec<S>, int>> j_rows, metric_rows;
  std::optional<int> orientation;

  auto read_matrix_row = [&](const Statement& st,
                             std::map<int, std::pair<Vec<S>, int>>& rows,
                             const char* what) {
    if ((int)st.tokens.size() != dim + 2)
      parse_fail(source, st.line,
                 std::string(what) + " row needs a row index and " +
                     std::to_string(dim) + " entries");
    int r = parse_index(source, st.line, st.tokens[1], dim);
    if (rows.count(r))
      parse_fail(source, st.line,
                 std::string("duplicate ") + what + " row " + st.tokens[1] +
                     " (first at line " + std::to_string(rows[r].second) + ")");
    Vec<S> row(dim, S(0));
    for (int c = 0; c < dim; ++c)
      row[c] = parse_coeff<S>(source, st.line, st.tokens[2 + c]);
    rows[r] = {std::move(row), st.line};
  };

  for (; pos < stmts.size(); ++pos) {
    const Statement& st = stmts[pos];
    const std::string& kw = st.tokens[0];
    if (kw == "bracket") {
      if (st.tokens.size() != 5)
        parse_fail(source, st.line, "bracket needs 'bracket i j k coeff'");
      int i = parse_index(source, st.line, st.tokens[1], dim);
      int j = parse_index(source, st.line, st.tokens[2], dim);
      int k = parse_index(source, st.line, st.tokens[3], dim);
      if (i >= j)
        parse_fail(source, st.line, "bracket needs i < j (antisymmetry is implicit)");
      auto key = std::make_tuple(i, j, k);
      if (brackets.count(key))
        parse_fail(source, st.line,
                   "duplicate bracket entry (first at line " +
                       std::to_string(brackets[key].second) + ")");
      brackets[key] = {parse_coeff<S>(source, st.line, st.tokens[4]), st.line};
    } else if (kw == "J") {
      read_matrix_row(st, j_rows, "J");
    } else if (kw == "metric") {
      read_matrix_row(st, metric_rows, "metric");
    } else if (kw == "labels" || kw == "dual-labels") {
      if ((int)st.tokens.size() != dim + 1)
        parse_fail(source, st.line,
                   kw + " needs exactly " + std::to_string(dim) + " names");
      std::vector<std::string> ls(st.tokens.begin() + 1, st.tokens.end());
      std::set<std::string> uniq(ls.begin(), ls.end());
      if ((int)uniq.size() != dim)
        parse_fail(source, st.line, kw + " must be distinct");
      (kw == "labels" ? labels : duals) = std::move(ls);
    } else if (kw == "orientation") {
      if (st.tokens.size() != 2 ||
          (st.tokens[1] != "1" && st.tokens[1] != "-1" && st.tokens[1] != "+1"))
        parse_fail(source, st.line, "orientation must be +1 or -1");
      if (orientation)
        parse_fail(source, st.line, "duplicate orientation");
      orientation = (st.tokens[1] == "-1") ? -1 : 1;
    } else if (kw == "dim") {
      parse_fail(source, st.line, "duplicate dim");
    } else {
      parse_fail(source, st.line, "unknown directive '" + kw + "'");
    }
  }

  auto complete_matrix = [&](std::map<int, std::pair<Vec<S>, int>>& rows,
                             const char* what) -> std::optional<Mat<S>> {
    if (rows.empty()) return std::nullopt;
    if ((int)rows.size() != dim)
      parse_fail(source, rows.begin()->second.second,
                 std::string(what) + " has " + std::to_string(rows.size()) +
                     " rows but dim is " + std::to_string(dim));
    Mat<S> m(dim, dim);
    for (auto& [r, row] : rows)
      for (int c = 0; c < dim; ++c) m(r, c) = row.first[c];
    return m;
  };

  std::vector<std::tuple<int, int, int, S>> entries;
  for (auto& [key, val] : brackets)
    entries.emplace_back(std::get<0>(key), std::get<1>(key), std::get<2>(key),
                         val.first);
  LieAlgebra<S> g = LieAlgebra<S>::from_brackets(dim, entries);
  if (labels) g.set_labels(*labels);
  if (duals) g.set_dual_labels(*duals);

  auto jac = g.check_jacobi();
  if (!jac.ok) {
    auto [wi, wj, wk] = jac.witness;
    throw ValidationError(source + ": jacobi identity fails on basis triple (" +
                          g.labels()[wi] + ", " + g.labels()[wj] + ", " +
                          g.labels()[wk] + ")");
  }

  AlgebraFile<S> out{std::move(g), complete_matrix(j_rows, "J"),
                     complete_matrix(metric_rows, "metric"),
                     orientation.value_or(1)};
  double tl = scalar_traits<S>::exact ? 0.0 : tol::form_eq;
  if (out.J &&
      !(*out.J * *out.J + Mat<S>::identity(dim)).is_zero_matrix(tl))
    throw ValidationError(source + ": J squared is not minus the identity");
  if (out.metric) {
    if (!is_positive_definite(*out.metric))
      throw ValidationError(source +
                            ": metric is not symmetric positive definite");
  }
  return out;
}

// Coefficient serialization for documents. Floats keep an explicit decimal
// marker even at integer values so the backend choice survives a round trip.
template <class S>
std::string file_coeff(const S& v) {
  return scalar_str(v);
}
inline std::string file_coeff(double v) {
  std::string s = scalar_str(v);
  if (!token_is_decimal(s)) s += ".0";
  return s;
}

}  // namespace detail

/// Parses a document; the backend (rational vs float) is chosen by inspecting
/// the coefficient tokens. Validates Jacobi, J² = −I, and metric SPD with
/// located error messages.
inline AlgebraFileVariant load_algebra_text(const std::string& text,
                                            const std::string& source) {
  auto stmts = detail::tokenize_document(text, source);
  bool any_decimal = false;
  for (const auto& st : stmts) {
    const std::string& kw = st.tokens[0];
    if (kw == "bracket" && st.tokens.size() >= 5)
      any_decimal |= detail::token_is_decimal(st.tokens.back());
    if ((kw == "J" || kw == "metric") && st.tokens.size() >= 3)
      for (std::size_t c = 2; c < st.tokens.size(); ++c)
        any_decimal |= detail::token_is_decimal(st.tokens[c]);
  }
  if (any_decimal)
    return detail::build_algebra_file<double>(stmts, source);
  return detail::build_algebra_file<Rat>(stmts, source);
}

inline AlgebraFileVariant load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_algebra_text(buf.str(), path);
}

template <class S>
std::string save_algebra_text(const AlgebraFile<S>& f) {
  const LieAlgebra<S>& g = f.algebra;
  int n = g.dim();
  std::ostringstream out;
  out << "lck-algebra v1\n";
  out << "dim " << n << "\n";
  auto is_default = [n](const std::vector<std::string>& ls) {
    for (int i = 0; i < n; ++i)
      if (ls[i] != "e" + std::to_string(i + 1)) return false;
    return true;
  };
  if (!is_default(g.labels())) {
    out << "labels";
    for (const auto& l : g.labels()) out << " " << l;
    out << "\n";
  }
  if (!is_default(g.dual_labels())) {
    out << "dual-labels";
    for (const auto& l : g.dual_labels()) out << " " << l;
    out << "\n";
  }
  out << "orientation " << f.orientation << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!is_zero(g.c(i, j, k), 0.0))
          out << "bracket " << i << " " << j << " " << k << " "
              << detail::file_coeff(g.c(i, j, k)) << "\n";
  auto write_matrix = [&](const char* what, const Mat<S>& m) {
    for (int r = 0; r < n; ++r) {
      out << what << " " << r;
      for (int c = 0; c < n; ++c) out << " " << detail::file_coeff(m(r, c));
      out << "\n";
    }
  };
  if (f.J) write_matrix("J", *f.J);
  if (f.metric) write_matrix("metric", *f.metric);
  return out.str();
}

template <class S>
void save_algebra(const std::string& path, const AlgebraFile<S>& f) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out << save_algebra_text(f);
  if (!out) throw ValidationError(path + ": write failed");
}

template <class S>
AlgebraFile<S> to_file(const HermitianStructure<S>& h) {
  return AlgebraFile<S>{h.algebra(), h.J(), h.metric().matrix(),
                        h.orientation()};
}

}  // namespace lck
