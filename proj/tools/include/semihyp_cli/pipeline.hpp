#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semihyp/error.hpp"
#include "semihyp/normal_form.hpp"
#include "semihyp/spectrum.hpp"
#include "semihyp_cli/document.hpp"

namespace semihyp::cli {

/// Process exit statuses.
enum ExitStatus : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitFormat = 2,
  kExitNotSemiHyperbolic = 3,
  kExitResonance = 4,
  kExitNumerical = 5,
  kExitInapplicable = 6,
};

int exit_status(ErrorCode code);

/// Raised when an experiment does not apply to the classified case.
class InapplicableExperiment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClassifySettings {
  std::optional<int> degree;
  std::optional<int> q_max;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

/// Every stage of the classification of one document.
struct Pipeline {
  GermDocument doc;
  GermJet input;
  std::size_t dropped_terms = 0;
  SpectralData spectrum;
  ResonanceReport resonance;
  ShearResult shear;
  NormalizationResult normal;
  Classification cls;
  std::optional<GermJet> averaging;
  std::optional<Complex> scale;
  /// conjugate(conjugator, input) == final_germ.
  GermJet conjugator;
  GermJet final_germ;
  double witness_residual = 0.0;
  double first_coordinate_residual = 0.0;
};

Pipeline run_pipeline(GermDocument doc, const ClassifySettings& settings = {});

nlohmann::json classification_json(const Pipeline& p);
std::string classification_text(const Pipeline& p);

/// Writes report.json, report.txt, conjugator.json and normalized.json.
void write_classification(const Pipeline& p, const std::filesystem::path& out);

enum class Experiment { center, sector, splitting, bundle };
Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct VerifySettings {
  Experiment experiment = Experiment::center;
  std::optional<int> grid;
  std::optional<double> eta;
};

struct VerifyOutcome {
  nlohmann::json report;
  std::string text;
  bool pass = false;
};

/// Runs the experiment and writes report.json, report.txt and its CSV files.
VerifyOutcome run_verify(const GermDocument& doc, const VerifySettings& settings, const std::filesystem::path& out);

/// Front end of the executable: text report to `log`, diagnostics to `err`;
/// returns the exit status.
int run_classify_command(const std::filesystem::path& input, const ClassifySettings& settings,
                         const std::filesystem::path& out, std::ostream& log, std::ostream& err);
int run_verify_command(const std::filesystem::path& input, const VerifySettings& settings,
                       const std::filesystem::path& out, std::ostream& log, std::ostream& err);

}  // namespace semihyp::cli
