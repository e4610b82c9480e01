#include "semihyp/spectrum.hpp"

#include <cmath>
#include <sstream>

#include "semihyp/error.hpp"

namespace semihyp {

void validate_jordan_shape(const Eigen::MatrixXcd& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0) raise(ErrorCode::format, "linear part must be square");
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex v = a(i, j);
      if (j == i) continue;
      if (j == i + 1) {
        const bool zero = std::abs(v) <= tol;
        const bool one = std::abs(v - 1.0) <= tol;
        if (!zero && !one) raise(ErrorCode::format, "superdiagonal entries must be 0 or 1");
        if (one && i == 0) raise(ErrorCode::format, "lambda_1 must sit in its own Jordan block");
        if (one && std::abs(a(i, i) - a(j, j)) > tol) {
          raise(ErrorCode::format, "superdiagonal 1 between different eigenvalues");
        }
        continue;
      }
      if (std::abs(v) > tol) raise(ErrorCode::format, "linear part is not in Jordan form");
    }
  }
}

SpectralData analyze_linear_part(const Eigen::MatrixXcd& a, const SpectralOptions& opts) {
  validate_jordan_shape(a);
  if (opts.q_max < 1 || opts.tol <= 0.0 || opts.moduli_margin <= 0.0) {
    raise(ErrorCode::parameter, "q_max, tol and margin must be positive");
  }
  SpectralData s;
  s.tol = opts.tol;
  s.moduli_margin = opts.moduli_margin;
  s.linear_part = a;
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) s.eigenvalues.push_back(a(i, i));
  for (Eigen::Index i = 1; i + 1 < n; ++i) s.superdiagonal.push_back(std::abs(a(i, i + 1)) > 0.5 ? 1 : 0);

  const Complex l1 = s.eigenvalues[0];
  if (std::abs(std::abs(l1) - 1.0) >= opts.tol) {
    raise(ErrorCode::not_root_of_unity, "|lambda_1| differs from 1");
  }
  int q = 0;
  Complex p = 1.0;
  for (int j = 1; j <= opts.q_max; ++j) {
    p *= l1;
    if (std::abs(p - 1.0) < opts.tol) {
      q = j;
      break;
    }
  }
  if (q == 0) {
    raise(ErrorCode::not_root_of_unity,
          "lambda_1 is not a root of unity of order <= " + std::to_string(opts.q_max));
  }
  s.q = q;
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
    const double m = std::abs(s.eigenvalues[i]);
    if (m < opts.moduli_margin || std::abs(m - 1.0) < opts.moduli_margin) {
      std::ostringstream msg;
      msg << "eigenvalue " << i + 1 << " has modulus " << m << " too close to 0 or 1";
      raise(ErrorCode::not_semi_hyperbolic, msg.str());
    }
  }
  return s;
}

Complex eigen_power(const std::vector<Complex>& lambda, const MultiIndex& p) {
  Complex v = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int e = 0; e < p[i]; ++e) v *= lambda[i];
  }
  return v;
}

ResonanceReport check_quasi_absence(const SpectralData& s, int degree_bound, double tol) {
  ResonanceReport rep;
  rep.degree_bound = degree_bound;
  const std::size_t m = s.dim() - 1;
  if (m == 0 || degree_bound < 1) return rep;
  std::vector<Complex> lam(s.eigenvalues.begin() + 1, s.eigenvalues.end());
  std::vector<double> logmod(m);
  for (std::size_t i = 0; i < m; ++i) logmod[i] = std::log(std::abs(lam[i]));
  for (int d = 1; d <= degree_bound; ++d) {
    for (const auto& r : monomials_of_degree(m, d)) {
      double lm = 0.0;
      for (std::size_t i = 0; i < m; ++i) lm += r[i] * logmod[i];
      // |x| outside [1/e, e] puts x far from 1; also keeps pow from overflowing.
      if (std::abs(lm) > 1.0) continue;
      Complex v = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (r[i]) v *= std::pow(lam[i], r[i]);
      }
      if (std::abs(v - 1.0) < tol) rep.witnesses.push_back(r);
    }
  }
  rep.quasi_absent = rep.witnesses.empty();
  return rep;
}

SmallDenominator small_denominator(const SpectralData& s, const MultiIndex& p) {
  if (p.size() != s.dim()) raise(ErrorCode::dimension, "multi-index arity mismatch");
  const Complex v = s.lambda1() - eigen_power(s.eigenvalues, p);
  return {v, std::abs(v) < s.tol};
}

Diagonalization diagonalize(const Eigen::MatrixXcd& a, double cond_limit) {
  if (a.rows() != a.cols() || a.rows() == 0) raise(ErrorCode::format, "matrix must be square");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) raise(ErrorCode::numerical, "eigen decomposition failed");
  Eigen::VectorXcd vals = es.eigenvalues();
  Eigen::MatrixXcd vecs = es.eigenvectors();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i) {
    if (std::abs(std::abs(vals(i)) - 1.0) < std::abs(std::abs(vals(best)) - 1.0)) best = i;
  }
  if (best != 0) {
    std::swap(vals(0), vals(best));
    vecs.col(0).swap(vecs.col(best));
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > cond_limit) {
    raise(ErrorCode::format, "matrix is not numerically diagonalizable");
  }
  return {vals.asDiagonal(), vecs};
}

}  // namespace semihyp
