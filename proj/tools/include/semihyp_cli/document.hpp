#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "semihyp/germ_jet.hpp"

namespace semihyp::cli {

struct DocumentOptions {
  double tol = 1e-9;
  int q_max = 64;
  double moduli_margin = 1e-6;
  /// 0 selects the experiment default.
  double eta = 0.0;
  int grid = 200;
  std::uint64_t seed = 0;
};

struct DocumentTerm {
  /// 1-based output coordinate.
  std::size_t component = 1;
  MultiIndex index;
  Complex coeff;
};

/// Germ description: linear part plus nonlinear terms of degree 2..N.
struct GermDocument {
  std::size_t n = 0;
  int N = PolyJet::kDefaultDegree;
  Eigen::MatrixXcd linear_part;
  std::vector<DocumentTerm> terms;
  DocumentOptions options;

  GermJet germ() const;
};

/// Throws ErrorCode::format on any malformed field.
GermDocument parse_document(const nlohmann::json& j);
GermDocument load_document(const std::filesystem::path& path);

nlohmann::json complex_to_json(Complex c);
nlohmann::json document_to_json(const GermDocument& doc);

/// Document holding every coefficient of a jet (linear part included).
GermDocument document_from_germ(const GermJet& g, const DocumentOptions& options = {});

}  // namespace semihyp::cli
