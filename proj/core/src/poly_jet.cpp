#include "semihyp/poly_jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <utility>

#include "semihyp/error.hpp"

namespace semihyp {

std::shared_ptr<const MonomialRanking> ranking_for(std::size_t n_vars, int max_degree) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const MonomialRanking>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n_vars, max_degree}];
  if (!slot) slot = std::make_shared<const MonomialRanking>(n_vars, max_degree);
  return slot;
}

// Dense scratch space indexed by graded-lex rank; emits terms already sorted.
class DenseAccumulator {
 public:
  DenseAccumulator(std::size_t n_vars, int trunc)
      : ranking_(ranking_for(n_vars, trunc)), values_(ranking_->size()) {}

  const MonomialRanking& ranking() const { return *ranking_; }
  void add(std::size_t rank, Complex c) { values_[rank] += c; }

  PolyJet finish(std::size_t n_vars, int trunc) const {
    PolyJet out(n_vars, trunc);
    for (std::size_t r = 0; r < values_.size(); ++r) {
      if (std::abs(values_[r]) >= PolyJet::kPruneThreshold) {
        out.terms_.push_back({ranking_->unrank(r), values_[r]});
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const MonomialRanking> ranking_;
  std::vector<Complex> values_;
};

PolyJet::PolyJet(std::size_t n_vars, int trunc_degree) : n_vars_(n_vars), trunc_(trunc_degree) {
  if (n_vars == 0 || n_vars > MultiIndex::kMaxVars) {
    raise(ErrorCode::dimension, "jets need between 1 and " + std::to_string(MultiIndex::kMaxVars) +
                                    " variables");
  }
  if (trunc_degree < 0) raise(ErrorCode::domain, "negative truncation degree");
}

PolyJet PolyJet::constant(std::size_t n_vars, int trunc_degree, Complex c) {
  return monomial(n_vars, trunc_degree, MultiIndex(n_vars), c);
}

PolyJet PolyJet::variable(std::size_t n_vars, int trunc_degree, std::size_t var, Complex c) {
  return monomial(n_vars, trunc_degree, MultiIndex::unit(n_vars, var), c);
}

PolyJet PolyJet::monomial(std::size_t n_vars, int trunc_degree, const MultiIndex& p, Complex c) {
  PolyJet j(n_vars, trunc_degree);
  j.set(p, c);
  return j;
}

PolyJet PolyJet::from_terms(std::size_t n_vars, int trunc_degree, std::vector<Term> terms) {
  PolyJet j(n_vars, trunc_degree);
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return graded_lex_compare(a.index, b.index) < 0;
  });
  for (const auto& t : terms) {
    if (t.index.size() != n_vars) raise(ErrorCode::dimension, "term arity mismatch");
    if (t.index.degree() > trunc_degree) continue;
    if (!j.terms_.empty() && j.terms_.back().index == t.index) {
      j.terms_.back().coeff += t.coeff;
    } else {
      j.terms_.push_back(t);
    }
  }
  std::erase_if(j.terms_, [](const Term& t) { return std::abs(t.coeff) < kPruneThreshold; });
  return j;
}

namespace {

auto find_term(std::vector<Term>& terms, const MultiIndex& p) {
  return std::lower_bound(terms.begin(), terms.end(), p, [](const Term& t, const MultiIndex& q) {
    return graded_lex_compare(t.index, q) < 0;
  });
}

}  // namespace

Complex PolyJet::coeff(const MultiIndex& p) const {
  if (p.size() != n_vars_) raise(ErrorCode::dimension, "multi-index arity mismatch");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p, [](const Term& t, const MultiIndex& q) {
    return graded_lex_compare(t.index, q) < 0;
  });
  if (it != terms_.end() && it->index == p) return it->coeff;
  return 0.0;
}

void PolyJet::set(const MultiIndex& p, Complex c) {
  if (p.size() != n_vars_) raise(ErrorCode::dimension, "multi-index arity mismatch");
  if (p.degree() > trunc_) return;
  auto it = find_term(terms_, p);
  const bool present = it != terms_.end() && it->index == p;
  if (std::abs(c) < kPruneThreshold) {
    if (present) terms_.erase(it);
  } else if (present) {
    it->coeff = c;
  } else {
    terms_.insert(it, Term{p, c});
  }
}

void PolyJet::add(const MultiIndex& p, Complex c) { set(p, coeff(p) + c); }

int PolyJet::valuation() const noexcept {
  return terms_.empty() ? trunc_ + 1 : terms_.front().index.degree();
}

double PolyJet::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

bool PolyJet::has_constant_term() const noexcept {
  return !terms_.empty() && terms_.front().index.degree() == 0;
}

PolyJet PolyJet::homogeneous_part(int degree) const {
  PolyJet out(n_vars_, trunc_);
  for (const auto& t : terms_) {
    if (t.index.degree() == degree) out.terms_.push_back(t);
  }
  return out;
}

PolyJet PolyJet::truncated(int degree) const {
  PolyJet out(n_vars_, degree);
  for (const auto& t : terms_) {
    if (t.index.degree() > degree) break;
    out.terms_.push_back(t);
  }
  return out;
}

PolyJet PolyJet::derivative(std::size_t var) const {
  if (var >= n_vars_) raise(ErrorCode::dimension, "derivative variable out of range");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const int e = t.index[var];
    if (e == 0) continue;
    MultiIndex p = t.index;
    p.set(var, e - 1);
    out.push_back({p, t.coeff * static_cast<double>(e)});
  }
  return from_terms(n_vars_, std::max(trunc_ - 1, 0), std::move(out));
}

Complex PolyJet::evaluate(std::span<const Complex> z) const {
  if (z.size() != n_vars_) raise(ErrorCode::dimension, "evaluation point has wrong dimension");
  if (terms_.empty()) return 0.0;
  const int top = terms_.back().index.degree();
  // powers[i][k] = z_i^k
  std::vector<std::vector<Complex>> powers(n_vars_, std::vector<Complex>(top + 1, 1.0));
  for (std::size_t i = 0; i < n_vars_; ++i) {
    for (int k = 1; k <= top; ++k) powers[i][k] = powers[i][k - 1] * z[i];
  }
  Complex sum = 0.0;
  for (const auto& t : terms_) {
    Complex m = t.coeff;
    for (std::size_t i = 0; i < n_vars_; ++i) {
      if (t.index[i]) m *= powers[i][t.index[i]];
    }
    sum += m;
  }
  return sum;
}

namespace {

PolyJet merge(const PolyJet& a, const PolyJet& b, double sign) {
  if (a.n_vars() != b.n_vars()) raise(ErrorCode::dimension, "jet arity mismatch");
  const int trunc = std::min(a.trunc_degree(), b.trunc_degree());
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  while (ia != ea || ib != eb) {
    std::strong_ordering c = std::strong_ordering::less;
    if (ia == ea) {
      c = std::strong_ordering::greater;
    } else if (ib != eb) {
      c = graded_lex_compare(ia->index, ib->index);
    }
    if (c < 0) {
      out.push_back(*ia++);
    } else if (c > 0) {
      out.push_back({ib->index, sign * ib->coeff});
      ++ib;
    } else {
      out.push_back({ia->index, ia->coeff + sign * ib->coeff});
      ++ia;
      ++ib;
    }
  }
  std::erase_if(out, [trunc](const Term& t) {
    return t.index.degree() > trunc || std::abs(t.coeff) < PolyJet::kPruneThreshold;
  });
  // Already sorted and duplicate free.
  PolyJet r(a.n_vars(), trunc);
  for (const auto& t : out) r.set(t.index, t.coeff);
  return r;
}

}  // namespace

PolyJet& PolyJet::operator+=(const PolyJet& other) { return *this = merge(*this, other, 1.0); }
PolyJet& PolyJet::operator-=(const PolyJet& other) { return *this = merge(*this, other, -1.0); }

PolyJet& PolyJet::operator*=(Complex s) {
  for (auto& t : terms_) t.coeff *= s;
  std::erase_if(terms_, [](const Term& t) { return std::abs(t.coeff) < kPruneThreshold; });
  return *this;
}

PolyJet PolyJet::operator-() const {
  PolyJet r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

PolyJet mul(const PolyJet& a, const PolyJet& b) {
  if (a.n_vars() != b.n_vars()) raise(ErrorCode::dimension, "jet arity mismatch in product");
  const int trunc = std::min(a.trunc_degree(), b.trunc_degree());
  DenseAccumulator acc(a.n_vars(), trunc);
  const auto& ranking = acc.ranking();
  for (const auto& ta : a.terms()) {
    const int da = ta.index.degree();
    if (da > trunc) break;
    for (const auto& tb : b.terms()) {
      if (da + tb.index.degree() > trunc) break;
      acc.add(ranking.rank(ta.index + tb.index), ta.coeff * tb.coeff);
    }
  }
  return acc.finish(a.n_vars(), trunc);
}

double max_abs_difference(const PolyJet& a, const PolyJet& b) {
  if (a.n_vars() != b.n_vars()) raise(ErrorCode::dimension, "jet arity mismatch");
  const int trunc = std::min(a.trunc_degree(), b.trunc_degree());
  double m = 0.0;
  for (const auto& t : a.terms()) {
    if (t.index.degree() <= trunc) m = std::max(m, std::abs(t.coeff - b.coeff(t.index)));
  }
  for (const auto& t : b.terms()) {
    if (t.index.degree() <= trunc && a.coeff(t.index) == Complex(0.0)) {
      m = std::max(m, std::abs(t.coeff));
    }
  }
  return m;
}

std::vector<PolyJet> compose_all(std::span<const PolyJet> outer, std::span<const PolyJet> inner) {
  if (inner.empty()) raise(ErrorCode::dimension, "composition needs at least one inner series");
  const std::size_t n_outer = inner.size();
  const std::size_t m = inner.front().n_vars();
  int trunc = inner.front().trunc_degree();
  for (const auto& g : inner) {
    if (g.n_vars() != m) raise(ErrorCode::dimension, "inner series disagree on arity");
    if (g.has_constant_term()) {
      raise(ErrorCode::domain, "inner series must vanish at the origin");
    }
    trunc = std::min(trunc, g.trunc_degree());
  }
  for (const auto& f : outer) {
    if (f.n_vars() != n_outer) raise(ErrorCode::dimension, "outer arity differs from inner count");
    trunc = std::min(trunc, f.trunc_degree());
  }

  auto ranking = ranking_for(n_outer, trunc);
  std::vector<char> needed(ranking->size(), 0);
  for (const auto& f : outer) {
    for (const auto& t : f.terms()) {
      if (t.index.degree() <= trunc) needed[ranking->rank(t.index)] = 1;
    }
  }
  // Close under the predecessor map P -> P - e_last so products can be
  // built incrementally.
  for (std::size_t r = ranking->size(); r-- > 1;) {
    if (!needed[r]) continue;
    MultiIndex p = ranking->unrank(r);
    const std::size_t j = p.last_nonzero();
    p.set(j, p[j] - 1);
    needed[ranking->rank(p)] = 1;
  }

  std::vector<std::optional<PolyJet>> products(ranking->size());
  products[0] = PolyJet::constant(m, trunc, 1.0);
  for (std::size_t r = 1; r < ranking->size(); ++r) {
    if (!needed[r]) continue;
    MultiIndex p = ranking->unrank(r);
    const std::size_t j = p.last_nonzero();
    p.set(j, p[j] - 1);
    const auto& prev = products[ranking->rank(p)];
    products[r] = (r <= n_outer) ? inner[j].truncated(trunc) : mul(*prev, inner[j]);
  }

  auto inner_ranking = ranking_for(m, trunc);
  std::vector<PolyJet> result;
  result.reserve(outer.size());
  for (const auto& f : outer) {
    DenseAccumulator acc(m, trunc);
    for (const auto& t : f.terms()) {
      if (t.index.degree() > trunc) break;
      for (const auto& s : products[ranking->rank(t.index)]->terms()) {
        acc.add(inner_ranking->rank(s.index), t.coeff * s.coeff);
      }
    }
    result.push_back(acc.finish(m, trunc));
  }
  return result;
}

PolyJet compose(const PolyJet& outer, std::span<const PolyJet> inner) {
  return std::move(compose_all(std::span<const PolyJet>(&outer, 1), inner).front());
}

}  // namespace semihyp
