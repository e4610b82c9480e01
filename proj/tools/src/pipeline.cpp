#include "semihyp_cli/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "semihyp/bundle_conjugacy.hpp"
#include "semihyp/center_manifold.hpp"
#include "semihyp/csv.hpp"
#include "semihyp/sector_dynamics.hpp"

namespace semihyp::cli {

using nlohmann::json;

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::format:
    case ErrorCode::dimension:
    case ErrorCode::domain:
      return kExitFormat;
    case ErrorCode::not_root_of_unity:
    case ErrorCode::not_semi_hyperbolic:
      return kExitNotSemiHyperbolic;
    case ErrorCode::quasi_absence_violated:
    case ErrorCode::resonance_obstruction:
      return kExitResonance;
    default:
      return kExitNumerical;
  }
}

namespace {

bool pure_first_axis(const MultiIndex& p) {
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] != 0) return false;
  return true;
}

json digest(const GermJet& g) {
  std::size_t count = 0;
  double max_mod = 0.0;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (const auto& t : g[i].terms())
      if (t.index.degree() >= 2) {
        ++count;
        max_mod = std::max(max_mod, std::abs(t.coeff));
      }
  const auto n = static_cast<Eigen::Index>(g.dim());
  const double lin_dev = (g.linear_part() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  return {{"nonlinear_coefficients", count},
          {"max_modulus", max_mod},
          {"linear_deviation_from_identity", lin_dev},
          {"identity", count == 0 && lin_dev < 1e-12}};
}

/// Largest coefficient of the first component that the normal form forbids:
/// mixed monomials, pure powers z_1^m with m != 1 mod q and, in case i, any
/// pure power beyond the linear term.
double normal_form_residual(const GermJet& g, int q, bool linear_only) {
  double r = 0.0;
  for (const auto& t : g[0].terms()) {
    if (t.index.degree() < 2) continue;
    const bool allowed = pure_first_axis(t.index) && (t.index[0] - 1) % q == 0 && !linear_only;
    if (!allowed) r = std::max(r, std::abs(t.coeff));
  }
  return r;
}

std::string witness_list(const ResonanceReport& r) {
  std::string s;
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    if (i) s += ", ";
    s += r.witnesses[i].to_string();
  }
  return s;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(Complex c) { return fmt(c.real()) + (c.imag() < 0 ? " - " : " + ") + fmt(std::abs(c.imag())) + "i"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::format, "cannot open " + path.string() + " for writing");
  out << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

bool is_case_ii(const Pipeline& p) { return p.cls.case_tag == CaseTag::parabolic_ii; }

}  // namespace

Pipeline run_pipeline(GermDocument doc, const ClassifySettings& settings) {
  if (settings.q_max) doc.options.q_max = *settings.q_max;
  if (settings.tol) doc.options.tol = *settings.tol;
  if (settings.seed) doc.options.seed = *settings.seed;
  std::size_t dropped = 0;
  if (settings.degree) {
    if (*settings.degree < 1 || *settings.degree > 64) raise(ErrorCode::format, "degree must lie in [1, 64]");
    doc.N = *settings.degree;
    std::erase_if(doc.terms, [&](const DocumentTerm& t) {
      const bool drop = t.index.degree() > doc.N;
      dropped += drop;
      return drop;
    });
  }
  if (doc.options.q_max < 1) raise(ErrorCode::format, "q_max must be positive");
  if (!(doc.options.tol > 0.0)) raise(ErrorCode::format, "tol must be positive");

  const GermJet input = doc.germ();
  SpectralOptions so;
  so.q_max = doc.options.q_max;
  so.tol = doc.options.tol;
  so.moduli_margin = doc.options.moduli_margin;
  SpectralData s = analyze_linear_part(doc.linear_part, so);

  ResonanceReport res = check_quasi_absence(s, doc.N, doc.options.tol);
  if (!res.quasi_absent)
    raise(ErrorCode::quasi_absence_violated, "witnesses " + witness_list(res));

  ShearResult shear = quadratic_shear(input, s, doc.options.seed);
  NormalizationResult normal = normalize_first_coordinate(shear.germ, s);
  Classification cls = classify(normal.normalized, s, doc.options.tol, normal.conjugator);

  GermJet conj = compose(normal.conjugator, shear.shear);
  GermJet fin = normal.normalized;
  std::optional<GermJet> avg;
  std::optional<Complex> scale;
  if (cls.case_tag == CaseTag::linearizable_i && s.q > 1) {
    avg = averaging_linearizer(fin, s);
    fin = conjugate(*avg, fin);
    conj = compose(*avg, conj);
  } else if (cls.case_tag == CaseTag::parabolic_ii) {
    scale = camacho_scale(cls, s.lambda1());
    fin = camacho_rescale(cls, doc.options.tol);
    conj = compose(first_axis_scaling(input.dim(), doc.N, *scale), conj);
  }

  Pipeline p{std::move(doc), input, dropped, std::move(s), std::move(res), std::move(shear), std::move(normal),
             std::move(cls), std::move(avg), scale, conj, fin};
  p.witness_residual = max_abs_difference(conjugate(p.conjugator, p.input), p.final_germ);
  p.first_coordinate_residual = normal_form_residual(p.final_germ, p.spectrum.q, !is_case_ii(p));
  return p;
}

json classification_json(const Pipeline& p) {
  json eig = json::array(), moduli = json::array();
  for (Complex l : p.spectrum.eigenvalues) {
    eig.push_back(complex_to_json(l));
    moduli.push_back(std::abs(l));
  }
  json wit = json::array();
  for (const auto& w : p.resonance.witnesses) wit.push_back(w.to_vector());
  json eps = json::array();
  for (std::size_t j = 1; j < p.shear.eps.size(); ++j) eps.push_back(complex_to_json(p.shear.eps[j]));

  const int N = p.doc.N;
  json cls;
  if (is_case_ii(p)) {
    const int m = p.cls.k * p.cls.q + 1;
    cls = {{"case", "ii"},
           {"k", p.cls.k},
           {"a_k", complex_to_json(p.cls.a_k)},
           {"statement", "case ii: a_k != 0 with k = " + std::to_string(p.cls.k)},
           {"model", "g(z) = (lambda_1 z_1 + z_1^" + std::to_string(m) + ", lambda_2 z_2, ..., lambda_n z_n)"}};
  } else {
    cls = {{"case", "i"},
           {"k", nullptr},
           {"a_k", nullptr},
           {"statement", "case i up to degree " + std::to_string(N) + ": no a_k found up to degree " + std::to_string(N)},
           {"model", "g = df_0 (linear part)"}};
  }

  json avg = {{"applied", p.averaging.has_value()}};
  if (p.averaging) {
    json diag = json::array();
    const Eigen::MatrixXcd d = p.averaging->linear_part();
    for (Eigen::Index i = 0; i < d.rows(); ++i) diag.push_back(complex_to_json(d(i, i)));
    avg["linear_diagonal"] = diag;
  }
  json resc = {{"applied", p.scale.has_value()}};
  if (p.scale) resc["c"] = complex_to_json(*p.scale);

  return {{"input", {{"n", p.doc.n}, {"N", N}, {"dropped_terms", p.dropped_terms}}},
          {"settings",
           {{"tol", p.doc.options.tol}, {"q_max", p.doc.options.q_max}, {"seed", p.doc.options.seed}}},
          {"spectrum", {{"eigenvalues", eig}, {"moduli", moduli}, {"q", p.spectrum.q}}},
          {"resonance",
           {{"quasi_absent", p.resonance.quasi_absent},
            {"degree_bound", p.resonance.degree_bound},
            {"witnesses", wit}}},
          {"shear", {{"eps", eps}}},
          {"classification", cls},
          {"conjugator", {{"normal_form", digest(p.normal.conjugator)}, {"total", digest(p.conjugator)}}},
          {"averaging", avg},
          {"rescale", resc},
          {"residuals",
           {{"witness", p.witness_residual}, {"first_coordinate", p.first_coordinate_residual}}}};
}

std::string classification_text(const Pipeline& p) {
  std::ostringstream o;
  o << "germ: n = " << p.doc.n << ", N = " << p.doc.N;
  if (p.dropped_terms) o << " (" << p.dropped_terms << " terms above N dropped)";
  o << "\neigenvalues:\n";
  for (std::size_t i = 0; i < p.spectrum.dim(); ++i)
    o << "  lambda_" << i + 1 << " = " << fmt(p.spectrum.eigenvalues[i]) << "  |.| = "
      << fmt(std::abs(p.spectrum.eigenvalues[i])) << "\n";
  o << "lambda_1 is a primitive root of unity of order q = " << p.spectrum.q << "\n";
  o << "quasi-absence of resonances holds up to degree " << p.resonance.degree_bound << "\n";
  const json j = classification_json(p);
  o << j["classification"]["statement"].get<std::string>() << "\n";
  if (is_case_ii(p)) o << "a_k = " << fmt(p.cls.a_k) << "\n";
  o << "locally topologically conjugate to " << j["classification"]["model"].get<std::string>() << "\n";
  const json& nf = j["conjugator"]["normal_form"];
  o << "normal form conjugator: " << nf["nonlinear_coefficients"].get<std::size_t>()
    << " nonlinear coefficients, max modulus " << fmt(nf["max_modulus"].get<double>())
    << (nf["identity"].get<bool>() ? " (identity)" : "") << "\n";
  if (p.averaging) o << "averaging linearizer applied (q = " << p.spectrum.q << ")\n";
  if (p.scale) o << "first axis rescaled by c = " << fmt(*p.scale) << "\n";
  o << "witness residual |conjugate(conjugator, f) - normalized| = " << fmt(p.witness_residual) << "\n";
  o << "first coordinate residual = " << fmt(p.first_coordinate_residual) << "\n";
  return o.str();
}

void write_classification(const Pipeline& p, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  write_json(out / "report.json", classification_json(p));
  write_text(out / "report.txt", classification_text(p));
  write_json(out / "conjugator.json", document_to_json(document_from_germ(p.conjugator, p.doc.options)));
  write_json(out / "normalized.json", document_to_json(document_from_germ(p.final_germ, p.doc.options)));
}

Experiment parse_experiment(const std::string& name) {
  if (name == "center") return Experiment::center;
  if (name == "sector") return Experiment::sector;
  if (name == "splitting") return Experiment::splitting;
  if (name == "bundle") return Experiment::bundle;
  raise(ErrorCode::format, "unknown experiment \"" + name + "\"");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::center: return "center";
    case Experiment::sector: return "sector";
    case Experiment::splitting: return "splitting";
    case Experiment::bundle: return "bundle";
  }
  return "";
}

namespace {

struct AxisGerm {
  GermJet germ;
  SplittingSpec spec;
  double straighten_residual = 0.0;
};

/// Straightens the center curve, drops the (negligible) remaining axis terms
/// and orders the coordinates as (center, stable, unstable).
AxisGerm axis_germ(const Pipeline& p) {
  const CurveJet c = center_jet(p.input, p.spectrum, p.doc.N);
  const GermJet st = straighten(p.input, c);
  const std::size_t n = st.dim();
  double worst = 0.0;
  std::vector<PolyJet> comps;
  comps.push_back(st[0]);
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<Term> kept;
    for (const auto& t : st[i].terms()) {
      if (pure_first_axis(t.index)) {
        worst = std::max(worst, std::abs(t.coeff));
      } else {
        kept.push_back(t);
      }
    }
    comps.push_back(PolyJet::from_terms(n, st.trunc_degree(), std::move(kept)));
  }
  if (worst > 1e-9) raise(ErrorCode::numerical, "straightened axis is not invariant: " + fmt(worst));

  std::vector<std::size_t> perm{0};
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(p.spectrum.eigenvalues[i]) < 1.0) perm.push_back(i);
  const std::size_t k = perm.size() - 1;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(p.spectrum.eigenvalues[i]) > 1.0) perm.push_back(i);
  GermJet g = permute_coordinates(GermJet(std::move(comps)), perm);
  SplittingSpec spec = spec_from_linear(g.linear_part(), 1, k, n - 1 - k);
  return {std::move(g), spec, worst};
}

Complex axis_point(double eta, int j, int count) {
  const double r = eta * (0.05 + 0.9 * j / std::max(count - 1, 1));
  const double theta = 2.0 * std::numbers::pi * std::fmod(0.6180339887498949 * j, 1.0);
  return std::polar(r, theta);
}

VerifyOutcome verify_center(const Pipeline& p, const std::filesystem::path& out) {
  const CurveJet c = center_jet(p.input, p.spectrum, p.doc.N);
  const double res = max_invariance_residual(p.input, c);
  CsvWriter csv(out / "center.csv", {"component", "power", "re", "im"});
  for (std::size_t i = 0; i < c.u.size(); ++i)
    for (const auto& t : c.u[i].terms()) {
      csv << static_cast<int>(i + 2) << t.index[0] << t.coeff.real() << t.coeff.imag();
      csv.end_row();
    }
  VerifyOutcome v;
  v.pass = res < 1e-9;
  v.report = {{"metrics", {{"invariance_residual", res}}},
              {"thresholds", {{"invariance_residual", 1e-9}}},
              {"files", {"center.csv"}}};
  v.text = "center curve invariance residual = " + fmt(res) + " (threshold 1e-9)\n";
  return v;
}

VerifyOutcome verify_sector(const Pipeline& p, const VerifySettings& settings, const std::filesystem::path& out) {
  if (!is_case_ii(p))
    throw InapplicableExperiment("the sector experiment needs case ii; this germ is case i up to degree " +
                                 std::to_string(p.doc.N));
  const int k = p.cls.k, q = p.spectrum.q;
  const double arg = std::arg(p.spectrum.lambda1());
  int h = static_cast<int>(std::lround(arg * q / (2.0 * std::numbers::pi)));
  h = ((h % q) + q) % q;
  if (h == 0) h = q;
  const double eta = settings.eta.value_or(p.doc.options.eta);
  const BlendParams params = make_blend_params(k, q, h, eta);

  std::vector<std::pair<int, Complex>> coeffs;
  for (const auto& t : p.final_germ[0].terms())
    if (pure_first_axis(t.index)) coeffs.emplace_back(t.index[0], t.coeff);
  Map1D f = [coeffs](Complex z) {
    Complex s = 0.0;
    for (const auto& [m, c] : coeffs) s += c * std::pow(z, m);
    return s;
  };
  Map1D phi = [params](Complex z) { return model_phi(z, params); };
  Map1D ft = blend(f, params);

  const int g = settings.grid.value_or(p.doc.options.grid);
  GridSpec grid;
  grid.n_r = grid.n_theta = g;
  const double chart = sup_chart_distance(ft, params, grid);
  const DiscreteConjugacy gamma = build_fundamental_conjugacy(ft, params, grid);
  const ResidualReport res = conjugacy_residual(gamma, phi, ft);
  const std::size_t folds = count_fold_overs(gamma);
  const std::size_t nodes = static_cast<std::size_t>(g) * g;
  write_gamma_csv(out / "gamma.csv", gamma, res);

  const int kq = params.kq();
  std::vector<Complex> starts;
  for (int j = 0; j < 2 * kq; ++j) starts.push_back(std::polar(0.75 * params.eta, std::numbers::pi * (j + 0.5) / kq));
  write_orbit_csv(out / "orbits.csv", ft, starts, 200);

  VerifyOutcome v;
  v.pass = res.sup < 1e-3 && folds == 0 && gamma.covered_count() == nodes;
  v.report = {{"parameters", {{"k", k}, {"q", q}, {"h", h}, {"R0", params.r0}, {"eta", params.eta}, {"grid", g}}},
              {"metrics",
               {{"residual", res.sup},
                {"evaluated", res.evaluated},
                {"skipped", res.skipped},
                {"covered", gamma.covered_count()},
                {"nodes", nodes},
                {"fold_overs", folds},
                {"chart_distance", chart}}},
              {"thresholds", {{"residual", 1e-3}, {"fold_overs", 0}}},
              {"files", {"gamma.csv", "orbits.csv"}}};
  std::ostringstream o;
  o << "sector conjugacy for (k, q, h) = (" << k << ", " << q << ", " << h << "), eta = " << fmt(params.eta) << "\n"
    << "grid " << g << " x " << g << ": covered " << gamma.covered_count() << " / " << nodes
    << ", fold-overs " << folds << "\n"
    << "sup |Gamma(phi(z)) - f~(Gamma(z))| = " << fmt(res.sup) << " (threshold 1e-3)\n"
    << "chart distance sup |F~ - Phi| = " << fmt(chart) << "\n";
  v.text = o.str();
  return v;
}

double start_eta(const Pipeline& p, const VerifySettings& settings) {
  return settings.eta.value_or(p.doc.options.eta > 0.0 ? p.doc.options.eta : 0.1);
}

json spec_json(const SplittingSpec& s) {
  return {{"h", s.h}, {"k", s.k}, {"l", s.l}, {"lambda", s.lambda}, {"lambda_p", s.lambda_p}, {"mu_p", s.mu_p},
          {"mu", s.mu}, {"gamma0", s.gamma0}, {"c_contract", s.c_contract}, {"c_expand", s.c_expand},
          {"epsilon", s.epsilon()}};
}

VerifyOutcome verify_splitting(const Pipeline& p, const VerifySettings& settings, const std::filesystem::path& out) {
  const AxisGerm ag = axis_germ(p);
  const std::size_t n = ag.germ.dim();
  const ExtensionResult ext = extend_with_bump(ag.germ, ag.germ.linear_part(), start_eta(p, settings), ag.spec.epsilon());
  const SmoothMap& F = *ext.map;

  CsvWriter rows(out / "splitting.csv",
                 {"re_x", "im_x", "iterations_s", "iterations_u", "cone_s", "cone_u", "invariance_s", "invariance_u",
                  "contraction", "expansion", "rates_ok", "cones_ok", "invariant_ok"});
  CsvWriter frames(out / "frames.csv", {"re_x", "im_x", "bundle", "column", "row", "value"});
  const int count = 20;
  bool all_ok = true;
  double worst_inv = 0.0, worst_contr = 0.0, worst_exp = std::numeric_limits<double>::infinity(), worst_cone = 0.0;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    x(0) = axis_point(ext.eta, j, count);
    const ConeSplitting at_x = cone_splitting(F, ag.spec, x);
    const ConeSplitting at_fx = cone_splitting(F, ag.spec, F.apply(x));
    const SplittingCertificate c = certify_splitting(F, ag.spec, at_x, at_fx);
    all_ok = all_ok && c.rates_ok && c.cones_ok && c.invariant_ok;
    worst_inv = std::max({worst_inv, c.invariance_s, c.invariance_u});
    if (ag.spec.k) worst_contr = std::max(worst_contr, c.contraction);
    if (ag.spec.l) worst_exp = std::min(worst_exp, c.expansion);
    worst_cone = std::max({worst_cone, c.cone_s, c.cone_u});
    rows << x(0).real() << x(0).imag() << at_x.iterations_s << at_x.iterations_u << c.cone_s << c.cone_u
         << c.invariance_s << c.invariance_u << c.contraction << c.expansion << static_cast<int>(c.rates_ok)
         << static_cast<int>(c.cones_ok) << static_cast<int>(c.invariant_ok);
    rows.end_row();
    auto dump = [&](const Eigen::MatrixXd& e, std::string_view name) {
      for (Eigen::Index col = 0; col < e.cols(); ++col)
        for (Eigen::Index r = 0; r < e.rows(); ++r) {
          frames << x(0).real() << x(0).imag() << name << static_cast<long long>(col) << static_cast<long long>(r)
                 << e(r, col);
          frames.end_row();
        }
    };
    dump(at_x.e_s, "stable");
    dump(at_x.e_u, "unstable");
  }
  VerifyOutcome v;
  v.pass = all_ok;
  json metrics = {{"points", count},
                  {"eta", ext.eta},
                  {"c1_deviation", ext.deviation},
                  {"eta_shrinks", ext.shrinks},
                  {"axis_residual", ag.straighten_residual},
                  {"max_invariance_residual", worst_inv},
                  {"max_cone_ratio", worst_cone}};
  metrics["max_contraction"] = ag.spec.k ? json(worst_contr) : json(nullptr);
  metrics["min_expansion"] = ag.spec.l ? json(worst_exp) : json(nullptr);
  v.report = {{"spec", spec_json(ag.spec)},
              {"metrics", metrics},
              {"thresholds", {{"invariance", 1e-6}, {"gamma0", ag.spec.gamma0}}},
              {"files", {"splitting.csv", "frames.csv"}}};
  std::ostringstream o;
  o << "bump extension: eta = " << fmt(ext.eta) << ", C1 deviation = " << fmt(ext.deviation)
    << " (epsilon = " << fmt(ag.spec.epsilon()) << ")\n"
    << "blocks (h, k, l) = (" << ag.spec.h << ", " << ag.spec.k << ", " << ag.spec.l << ")\n"
    << count << " axis points: max invariance residual " << fmt(worst_inv) << ", max cone ratio " << fmt(worst_cone)
    << " (gamma0 = " << fmt(ag.spec.gamma0) << ")\n";
  if (ag.spec.k) o << "max |dF v|/|v| on E_s = " << fmt(worst_contr) << " (c' = " << fmt(ag.spec.c_contract) << ")\n";
  if (ag.spec.l) o << "min |dF v|/|v| on E_u = " << fmt(worst_exp) << " (c = " << fmt(ag.spec.c_expand) << ")\n";
  o << "certificates " << (all_ok ? "pass" : "fail") << "\n";
  v.text = o.str();
  return v;
}

VerifyOutcome verify_bundle(const Pipeline& p, const VerifySettings& settings, const std::filesystem::path& out) {
  const AxisGerm ag = axis_germ(p);
  const TangentConjugacyReport r =
      verify_tangent_conjugacy(ag.germ, ag.spec, start_eta(p, settings), 1000, p.doc.options.seed);
  CsvWriter csv(out / "bundle.csv", {"re_x", "im_x", "residual"});
  for (const auto& row : r.rows) {
    csv << row.x.real() << row.x.imag() << row.residual;
    csv.end_row();
  }
  VerifyOutcome v;
  v.pass = r.residual < 1e-6;
  v.report = {{"spec", spec_json(ag.spec)},
              {"metrics",
               {{"eta", r.eta},
                {"c1_deviation", r.deviation},
                {"samples", r.samples},
                {"residual", r.residual},
                {"residual_stable", r.residual_stable},
                {"residual_unstable", r.residual_unstable},
                {"delta_s", r.delta_s},
                {"gamma_s", r.gamma_s},
                {"delta_u", r.delta_u},
                {"gamma_u", r.gamma_u}}},
              {"thresholds", {{"residual", 1e-6}}},
              {"files", {"bundle.csv"}}};
  std::ostringstream o;
  o << "tangent bundle conjugacy over the axis, eta = " << fmt(r.eta) << ", " << r.samples << " samples\n"
    << "residual = " << fmt(r.residual) << " (stable " << fmt(r.residual_stable) << ", unstable "
    << fmt(r.residual_unstable) << "; threshold 1e-6)\n";
  v.text = o.str();
  return v;
}

}  // namespace

VerifyOutcome run_verify(const GermDocument& doc, const VerifySettings& settings, const std::filesystem::path& out) {
  if (settings.grid && (*settings.grid < 4 || *settings.grid > 4000)) raise(ErrorCode::format, "grid must lie in [4, 4000]");
  if (settings.eta && !(*settings.eta > 0.0)) raise(ErrorCode::format, "eta must be positive");
  const Pipeline p = run_pipeline(doc);
  std::filesystem::create_directories(out);
  VerifyOutcome v;
  switch (settings.experiment) {
    case Experiment::center: v = verify_center(p, out); break;
    case Experiment::sector: v = verify_sector(p, settings, out); break;
    case Experiment::splitting: v = verify_splitting(p, settings, out); break;
    case Experiment::bundle: v = verify_bundle(p, settings, out); break;
  }
  v.report["experiment"] = to_string(settings.experiment);
  v.report["case"] = is_case_ii(p) ? "ii" : "i";
  v.report["pass"] = v.pass;
  v.report["seed"] = p.doc.options.seed;
  v.text = "experiment " + to_string(settings.experiment) + " (case " + (is_case_ii(p) ? "ii" : "i") + ")\n" + v.text +
           (v.pass ? "PASS\n" : "FAIL\n");
  write_json(out / "report.json", v.report);
  write_text(out / "report.txt", v.text);
  return v;
}

int run_classify_command(const std::filesystem::path& input, const ClassifySettings& settings,
                         const std::filesystem::path& out, std::ostream& log, std::ostream& err) {
  try {
    const Pipeline p = run_pipeline(load_document(input), settings);
    write_classification(p, out);
    log << classification_text(p);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_status(e.code());
  }
}

int run_verify_command(const std::filesystem::path& input, const VerifySettings& settings,
                       const std::filesystem::path& out, std::ostream& log, std::ostream& err) {
  try {
    const VerifyOutcome v = run_verify(load_document(input), settings, out);
    log << v.text;
    return v.pass ? kExitOk : kExitCheckFailed;
  } catch (const InapplicableExperiment& e) {
    err << "error: experiment inapplicable: " << e.what() << "\n";
    return kExitInapplicable;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_status(e.code());
  }
}

}  // namespace semihyp::cli
