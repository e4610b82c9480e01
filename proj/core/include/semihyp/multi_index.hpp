#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace semihyp {

/// Exponent vector P = (p_1, ..., p_n) of the monomial z^P.
///
/// Stored inline with a fixed capacity of `kMaxVars` variables so that jets
/// never allocate per monomial. Exponents are bounded by `kMaxExponent`.
class MultiIndex {
 public:
  static constexpr std::size_t kMaxVars = 8;
  static constexpr int kMaxExponent = 65535;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t n_vars);
  MultiIndex(std::initializer_list<int> exponents);
  explicit MultiIndex(std::span<const int> exponents);

  static MultiIndex unit(std::size_t n_vars, std::size_t var);
  static MultiIndex pure_power(std::size_t n_vars, std::size_t var, int exponent);

  std::size_t size() const noexcept { return size_; }
  int operator[](std::size_t i) const noexcept { return exps_[i]; }
  void set(std::size_t i, int value);

  /// |P|, the total degree.
  int degree() const noexcept;

  /// Position of the last nonzero exponent, or size() if P = 0.
  std::size_t last_nonzero() const noexcept;

  MultiIndex operator+(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const noexcept = default;

  std::vector<int> to_vector() const;
  std::string to_string() const;

 private:
  std::array<std::uint16_t, kMaxVars> exps_{};
  std::uint8_t size_ = 0;
};

/// Lexicographic comparison: P < Q iff p_j < q_j at the first position j where
/// they differ. Throws a dimension error on length mismatch.
std::strong_ordering lex_compare(const MultiIndex& p, const MultiIndex& q);

/// Degree first, then lexicographic. This is the storage order of PolyJet.
std::strong_ordering graded_lex_compare(const MultiIndex& p, const MultiIndex& q);

struct GradedLexLess {
  bool operator()(const MultiIndex& p, const MultiIndex& q) const {
    return graded_lex_compare(p, q) < 0;
  }
};

/// Enumerates all exponent vectors of n variables with |P| = degree, in
/// increasing lexicographic order.
std::vector<MultiIndex> monomials_of_degree(std::size_t n_vars, int degree);

/// Dense graded-lex ranking of the monomials of degree <= max_degree in
/// n variables. Used by the multiplication and composition kernels.
class MonomialRanking {
 public:
  MonomialRanking(std::size_t n_vars, int max_degree);

  std::size_t n_vars() const noexcept { return n_vars_; }
  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return count_up_to(max_degree_); }

  /// Number of monomials of degree <= d.
  std::size_t count_up_to(int d) const noexcept;
  std::size_t rank(const MultiIndex& p) const;
  const MultiIndex& unrank(std::size_t r) const { return table_[r]; }

 private:
  std::size_t compositions(int total, std::size_t parts) const noexcept;

  std::size_t n_vars_;
  int max_degree_;
  // binom_[a][b] = C(a, b) for a <= max_degree + n_vars.
  std::vector<std::vector<std::size_t>> binom_;
  std::vector<MultiIndex> table_;
};

}  // namespace semihyp
