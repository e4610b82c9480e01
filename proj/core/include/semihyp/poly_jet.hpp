#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "semihyp/multi_index.hpp"

namespace semihyp {

using Complex = std::complex<double>;

struct Term {
  MultiIndex index;
  Complex coeff;
};

/// Truncated power series in n complex variables: a sparse set of monomial
/// coefficients of total degree <= trunc_degree.
///
/// Terms are kept sorted in graded-lex order (degree, then lex). Coefficients
/// with modulus below kPruneThreshold are never stored.
class PolyJet {
 public:
  static constexpr double kPruneThreshold = 1e-14;
  static constexpr int kDefaultDegree = 10;

  PolyJet(std::size_t n_vars, int trunc_degree);

  static PolyJet constant(std::size_t n_vars, int trunc_degree, Complex c);
  static PolyJet variable(std::size_t n_vars, int trunc_degree, std::size_t var, Complex c = 1.0);
  static PolyJet monomial(std::size_t n_vars, int trunc_degree, const MultiIndex& p, Complex c);

  std::size_t n_vars() const noexcept { return n_vars_; }
  int trunc_degree() const noexcept { return trunc_; }
  std::span<const Term> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  Complex coeff(const MultiIndex& p) const;
  /// Sets the coefficient of z^P; terms above the truncation degree are dropped.
  void set(const MultiIndex& p, Complex c);
  void add(const MultiIndex& p, Complex c);

  /// Lowest degree of a stored term (trunc_degree + 1 for the zero jet).
  int valuation() const noexcept;
  double max_abs() const noexcept;
  bool has_constant_term() const noexcept;

  PolyJet homogeneous_part(int degree) const;
  /// Same series truncated to a (lower or equal) degree.
  PolyJet truncated(int degree) const;
  PolyJet derivative(std::size_t var) const;

  Complex evaluate(std::span<const Complex> z) const;

  PolyJet& operator+=(const PolyJet& other);
  PolyJet& operator-=(const PolyJet& other);
  PolyJet& operator*=(Complex s);

  friend PolyJet operator+(PolyJet a, const PolyJet& b) { return a += b; }
  friend PolyJet operator-(PolyJet a, const PolyJet& b) { return a -= b; }
  friend PolyJet operator*(PolyJet a, Complex s) { return a *= s; }
  friend PolyJet operator*(Complex s, PolyJet a) { return a *= s; }
  PolyJet operator-() const;

  /// Builds a jet from an unsorted term list, merging duplicates.
  static PolyJet from_terms(std::size_t n_vars, int trunc_degree, std::vector<Term> terms);

 private:
  friend class DenseAccumulator;

  std::size_t n_vars_;
  int trunc_;
  std::vector<Term> terms_;
};

/// Truncated product; the result is truncated at the smaller of the two degrees.
PolyJet mul(const PolyJet& a, const PolyJet& b);
inline PolyJet operator*(const PolyJet& a, const PolyJet& b) { return mul(a, b); }

/// Largest coefficient modulus of a - b (both must share n_vars).
double max_abs_difference(const PolyJet& a, const PolyJet& b);

/// Shared graded-lex ranking for (n_vars, max_degree); cached process-wide.
std::shared_ptr<const MonomialRanking> ranking_for(std::size_t n_vars, int max_degree);

/// Composition outer(inner_1, ..., inner_m). The inner series must have no
/// constant term; the result is exact through the smallest truncation degree.
PolyJet compose(const PolyJet& outer, std::span<const PolyJet> inner);

/// Composes several outer series with the same inner tuple, sharing the
/// monomial products.
std::vector<PolyJet> compose_all(std::span<const PolyJet> outer, std::span<const PolyJet> inner);

}  // namespace semihyp
