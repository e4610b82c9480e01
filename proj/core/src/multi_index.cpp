#include "semihyp/multi_index.hpp"

#include <algorithm>
#include <numeric>

#include "semihyp/error.hpp"

namespace semihyp {

MultiIndex::MultiIndex(std::size_t n_vars) {
  if (n_vars > kMaxVars) {
    raise(ErrorCode::dimension, "at most " + std::to_string(kMaxVars) + " variables supported");
  }
  size_ = static_cast<std::uint8_t>(n_vars);
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::span<const int>(exponents.begin(), exponents.size())) {}

MultiIndex::MultiIndex(std::span<const int> exponents) : MultiIndex(exponents.size()) {
  for (std::size_t i = 0; i < exponents.size(); ++i) set(i, exponents[i]);
}

MultiIndex MultiIndex::unit(std::size_t n_vars, std::size_t var) {
  return pure_power(n_vars, var, 1);
}

MultiIndex MultiIndex::pure_power(std::size_t n_vars, std::size_t var, int exponent) {
  MultiIndex p(n_vars);
  p.set(var, exponent);
  return p;
}

void MultiIndex::set(std::size_t i, int value) {
  if (i >= size_) raise(ErrorCode::dimension, "exponent position out of range");
  if (value < 0 || value > kMaxExponent) {
    raise(ErrorCode::domain, "exponent " + std::to_string(value) + " out of range");
  }
  exps_[i] = static_cast<std::uint16_t>(value);
}

int MultiIndex::degree() const noexcept {
  int d = 0;
  for (std::size_t i = 0; i < size_; ++i) d += exps_[i];
  return d;
}

std::size_t MultiIndex::last_nonzero() const noexcept {
  for (std::size_t i = size_; i > 0; --i) {
    if (exps_[i - 1] != 0) return i - 1;
  }
  return size_;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (size_ != other.size_) raise(ErrorCode::dimension, "multi-index length mismatch");
  MultiIndex r(size_);
  for (std::size_t i = 0; i < size_; ++i) r.set(i, exps_[i] + other.exps_[i]);
  return r;
}

std::vector<int> MultiIndex::to_vector() const {
  return std::vector<int>(exps_.begin(), exps_.begin() + size_);
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < size_; ++i) {
    if (i) s += ",";
    s += std::to_string(exps_[i]);
  }
  return s + ")";
}

std::strong_ordering lex_compare(const MultiIndex& p, const MultiIndex& q) {
  if (p.size() != q.size()) raise(ErrorCode::dimension, "multi-index length mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != q[i]) return p[i] <=> q[i];
  }
  return std::strong_ordering::equal;
}

std::strong_ordering graded_lex_compare(const MultiIndex& p, const MultiIndex& q) {
  if (auto c = p.degree() <=> q.degree(); c != 0) return c;
  return lex_compare(p, q);
}

namespace {

void enumerate(std::size_t pos, int remaining, MultiIndex& current, std::vector<MultiIndex>& out) {
  const std::size_t n = current.size();
  if (pos + 1 == n) {
    current.set(pos, remaining);
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current.set(pos, v);
    enumerate(pos + 1, remaining - v, current, out);
  }
  current.set(pos, 0);
}

}  // namespace

std::vector<MultiIndex> monomials_of_degree(std::size_t n_vars, int degree) {
  std::vector<MultiIndex> out;
  if (n_vars == 0) {
    if (degree == 0) out.emplace_back(0);
    return out;
  }
  MultiIndex current(n_vars);
  enumerate(0, degree, current, out);
  return out;
}

MonomialRanking::MonomialRanking(std::size_t n_vars, int max_degree)
    : n_vars_(n_vars), max_degree_(max_degree) {
  if (n_vars == 0 || n_vars > MultiIndex::kMaxVars) {
    raise(ErrorCode::dimension, "unsupported number of variables");
  }
  if (max_degree < 0) raise(ErrorCode::domain, "negative degree bound");
  const std::size_t top = static_cast<std::size_t>(max_degree) + n_vars + 1;
  binom_.assign(top + 1, std::vector<std::size_t>(top + 1, 0));
  for (std::size_t a = 0; a <= top; ++a) {
    binom_[a][0] = 1;
    for (std::size_t b = 1; b <= a; ++b) binom_[a][b] = binom_[a - 1][b - 1] + binom_[a - 1][b];
  }
  table_.reserve(count_up_to(max_degree));
  for (int d = 0; d <= max_degree; ++d) {
    auto level = monomials_of_degree(n_vars, d);
    table_.insert(table_.end(), level.begin(), level.end());
  }
}

std::size_t MonomialRanking::compositions(int total, std::size_t parts) const noexcept {
  if (parts == 0) return total == 0 ? 1 : 0;
  return binom_[static_cast<std::size_t>(total) + parts - 1][parts - 1];
}

std::size_t MonomialRanking::count_up_to(int d) const noexcept {
  if (d < 0) return 0;
  // Monomials of degree <= d in n variables: C(d + n, n).
  return binom_[static_cast<std::size_t>(d) + n_vars_][n_vars_];
}

std::size_t MonomialRanking::rank(const MultiIndex& p) const {
  const int d = p.degree();
  if (d > max_degree_ || p.size() != n_vars_) raise(ErrorCode::domain, "monomial outside ranking");
  std::size_t r = count_up_to(d - 1);
  int remaining = d;
  for (std::size_t j = 0; j + 1 < n_vars_; ++j) {
    const std::size_t rest = n_vars_ - j - 1;
    for (int v = 0; v < p[j]; ++v) r += compositions(remaining - v, rest);
    remaining -= p[j];
  }
  return r;
}

}  // namespace semihyp
