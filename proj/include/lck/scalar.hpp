#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lck {

/// Exact rational scalar, canonical (reduced, positive denominator).
using Rat = mpq_class;

/// Malformed or inconsistent input data (files, tensors, parameters).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its stated preconditions.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double pivot = 1e-12;         // elimination pivot threshold (float backend)
inline constexpr double form_eq = 1e-10;       // form coefficient comparison (float backend)
inline constexpr double lck_residual = 1e-9;   // residual below which a float structure counts as l.c.K.
inline constexpr double eig_cluster = 1e-8;    // eigenvalue clustering for spectra
inline constexpr double subspace = 1e-9;       // least-squares membership threshold
inline constexpr double theta_agree = 1e-7;    // Lee-form route agreement (float backend)
}  // namespace tol

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static const char* name() { return "rational"; }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static const char* name() { return "float"; }
};

inline double to_double(const Rat& v) { return v.get_d(); }
inline double to_double(double v) { return v; }

inline Rat abs_val(const Rat& v) { return v < 0 ? Rat(-v) : v; }

/// num/den in lowest terms (the raw two-argument mpq constructor does not
/// canonicalize).
inline Rat make_rat(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}
inline double abs_val(double v) { return std::fabs(v); }

inline bool is_zero(const Rat& v, double = 0.0) { return sgn(v) == 0; }
inline bool is_zero(double v, double tl = tol::form_eq) { return std::fabs(v) <= tl; }

inline bool is_one(const Rat& v) { return v == 1; }
inline bool is_one(double v) { return std::fabs(v - 1.0) <= tol::form_eq; }

template <class S>
S scalar_from_int(long v) {
  return S(v);
}

/// Parses "p", "p/q" into a canonical rational. Rejects decimal literals.
inline Rat parse_rational(const std::string& tok) {
  if (tok.empty()) throw ValidationError("empty scalar token");
  if (tok.find_first_of(".eE") != std::string::npos &&
      tok.find('/') == std::string::npos)
    throw ValidationError("decimal literal '" + tok + "' is not a rational; use p/q");
  try {
    Rat r(tok);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw ValidationError("malformed rational '" + tok + "'");
  }
}

inline double parse_float(const std::string& tok) {
  std::size_t pos = tok.find('/');
  try {
    if (pos != std::string::npos) {
      double num = std::stod(tok.substr(0, pos));
      double den = std::stod(tok.substr(pos + 1));
      if (den == 0) throw ValidationError("zero denominator in '" + tok + "'");
      return num / den;
    }
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw ValidationError("malformed number '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ValidationError("malformed number '" + tok + "'");
  } catch (const std::out_of_range&) {
    throw ValidationError("number out of range '" + tok + "'");
  }
}

template <class S>
S parse_scalar(const std::string& tok);

template <>
inline Rat parse_scalar<Rat>(const std::string& tok) {
  return parse_rational(tok);
}
template <>
inline double parse_scalar<double>(const std::string& tok) {
  return parse_float(tok);
}

inline std::string scalar_str(const Rat& v) { return v.get_str(); }
inline std::string scalar_str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Exact square root of a nonnegative rational, when it is rational.
inline std::optional<Rat> sqrt_exact(const Rat& v) {
  if (sgn(v) < 0) return std::nullopt;
  if (sgn(v) == 0) return Rat(0);
  const mpz_class& num = v.get_num();
  const mpz_class& den = v.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
  if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Rat(rn, rd);
}

/// Square root in the scalar's own backend; throws on the rational backend
/// when the root is irrational.
inline Rat sqrt_scalar(const Rat& v) {
  auto r = sqrt_exact(v);
  if (!r)
    throw PreconditionError("square root of " + v.get_str() +
                            " is irrational; use the float backend");
  return *r;
}
inline double sqrt_scalar(double v) {
  if (v < 0) throw PreconditionError("square root of negative value");
  return std::sqrt(v);
}

}  // namespace lck
