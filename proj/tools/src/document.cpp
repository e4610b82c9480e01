#include "semihyp_cli/document.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "semihyp/error.hpp"

namespace semihyp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { raise(ErrorCode::format, what); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field \"") + key + "\"");
  return *it;
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(where + ": expected a [re, im] pair");
  Complex c(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) bad(where + ": non-finite value");
  return c;
}

long long parse_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where + ": expected an integer");
  return j.get<long long>();
}

double parse_positive(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) bad(where + ": expected a positive number");
  return v;
}

DocumentOptions parse_options(const json& j) {
  DocumentOptions o;
  if (!j.is_object()) bad("options: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "tol") {
      o.tol = parse_positive(*it, "options.tol");
    } else if (k == "q_max") {
      long long v = parse_int(*it, "options.q_max");
      if (v < 1 || v > 100000) bad("options.q_max: out of range");
      o.q_max = static_cast<int>(v);
    } else if (k == "moduli_margin") {
      o.moduli_margin = parse_positive(*it, "options.moduli_margin");
    } else if (k == "eta") {
      o.eta = parse_positive(*it, "options.eta");
    } else if (k == "grid") {
      long long v = parse_int(*it, "options.grid");
      if (v < 4 || v > 4000) bad("options.grid: out of range [4, 4000]");
      o.grid = static_cast<int>(v);
    } else if (k == "seed") {
      if (!it->is_number_unsigned()) bad("options.seed: expected a non-negative integer");
      o.seed = it->get<std::uint64_t>();
    } else {
      bad("options: unknown key \"" + k + "\"");
    }
  }
  return o;
}

}  // namespace

GermJet GermDocument::germ() const {
  GermJet g = GermJet::linear(linear_part, N);
  std::vector<std::vector<Term>> extra(n);
  for (const auto& t : terms) extra[t.component - 1].push_back({t.index, t.coeff});
  for (std::size_t i = 0; i < n; ++i) {
    if (extra[i].empty()) continue;
    g.set_component(i, g[i] + PolyJet::from_terms(n, N, extra[i]));
  }
  return g;
}

GermDocument parse_document(const json& j) {
  if (!j.is_object()) bad("document: expected a JSON object");
  GermDocument d;
  long long n = parse_int(field(j, "n"), "n");
  if (n < 1 || n > static_cast<long long>(MultiIndex::kMaxVars))
    bad("n: must lie in [1, " + std::to_string(MultiIndex::kMaxVars) + "]");
  d.n = static_cast<std::size_t>(n);
  long long N = parse_int(field(j, "N"), "N");
  if (N < 1 || N > 64) bad("N: must lie in [1, 64]");
  d.N = static_cast<int>(N);

  const json& lp = field(j, "linear_part");
  if (!lp.is_array() || lp.size() != d.n) bad("linear_part: expected n rows");
  d.linear_part.resize(n, n);
  for (std::size_t r = 0; r < d.n; ++r) {
    if (!lp[r].is_array() || lp[r].size() != d.n) bad("linear_part: row " + std::to_string(r) + " needs n entries");
    for (std::size_t c = 0; c < d.n; ++c)
      d.linear_part(r, c) = parse_complex(lp[r][c], "linear_part[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }

  std::set<std::pair<std::size_t, std::vector<int>>> seen;
  if (auto it = j.find("terms"); it != j.end()) {
    if (!it->is_array()) bad("terms: expected an array");
    for (std::size_t t = 0; t < it->size(); ++t) {
      const json& e = (*it)[t];
      std::string where = "terms[" + std::to_string(t) + "]";
      if (!e.is_object()) bad(where + ": expected an object");
      DocumentTerm term;
      long long comp = parse_int(field(e, "component"), where + ".component");
      if (comp < 1 || comp > n) bad(where + ".component: must lie in [1, n]");
      term.component = static_cast<std::size_t>(comp);
      const json& idx = field(e, "index");
      if (!idx.is_array() || idx.size() != d.n) bad(where + ".index: expected n exponents");
      std::vector<int> exps;
      for (const auto& x : idx) {
        long long v = parse_int(x, where + ".index");
        if (v < 0 || v > N) bad(where + ".index: exponent out of range");
        exps.push_back(static_cast<int>(v));
      }
      term.index = MultiIndex(std::span<const int>(exps));
      int deg = term.index.degree();
      if (deg < 2 || deg > d.N) bad(where + ".index: degree must lie in [2, N]");
      if (!seen.emplace(term.component, exps).second) bad(where + ": duplicate term");
      term.coeff = parse_complex(field(e, "coeff"), where + ".coeff");
      d.terms.push_back(term);
    }
  }
  if (auto it = j.find("options"); it != j.end()) d.options = parse_options(*it);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "n" && k != "N" && k != "linear_part" && k != "terms" && k != "options")
      bad("document: unknown key \"" + k + "\"");
  }
  return d;
}

GermDocument load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
  return parse_document(j);
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

json document_to_json(const GermDocument& doc) {
  json lp = json::array();
  for (Eigen::Index r = 0; r < doc.linear_part.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < doc.linear_part.cols(); ++c) row.push_back(complex_to_json(doc.linear_part(r, c)));
    lp.push_back(row);
  }
  json terms = json::array();
  for (const auto& t : doc.terms)
    terms.push_back({{"component", t.component}, {"index", t.index.to_vector()}, {"coeff", complex_to_json(t.coeff)}});
  const auto& o = doc.options;
  json opts = {{"tol", o.tol}, {"q_max", o.q_max}, {"moduli_margin", o.moduli_margin}, {"grid", o.grid},
               {"seed", o.seed}};
  if (o.eta > 0.0) opts["eta"] = o.eta;
  return {{"n", doc.n}, {"N", doc.N}, {"linear_part", lp}, {"terms", terms}, {"options", opts}};
}

GermDocument document_from_germ(const GermJet& g, const DocumentOptions& options) {
  GermDocument d;
  d.n = g.dim();
  d.N = g.trunc_degree();
  d.linear_part = g.linear_part();
  d.options = options;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (const auto& t : g[i].terms())
      if (t.index.degree() >= 2) d.terms.push_back({i + 1, t.index, t.coeff});
  return d;
}

}  // namespace semihyp::cli
