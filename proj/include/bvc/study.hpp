#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvc/analysis.hpp"
#include "bvc/assembly.hpp"
#include "bvc/mesh.hpp"

namespace bvc {

enum class DomainKind { ring, ellipse };
enum class ElementKind { p1, p2, p3, q1 };

std::string to_string(DomainKind kind);
std::string to_string(ElementKind kind);
DomainKind parse_domain(const std::string& name);
ElementKind parse_element(const std::string& name);

int element_degree(ElementKind element);

struct StudyConfig {
  DomainKind domain = DomainKind::ring;
  ElementKind element = ElementKind::p2;
  Method method = Method::bvc;
  int multiplier_degree = -1;  // -1: k-1
  bool enrich = true;
  int levels = 5;
  double gamma0 = -1.0;  // -1: 10 k²
  ExecPolicy policy = ExecPolicy::parallel;
  // Compute the inf-sup diagnostic on levels small enough for dense algebra.
  bool infsup = false;
  std::string csv_path;
  std::string plot_prefix;

  int degree() const { return element_degree(element); }
  int resolved_multiplier_degree() const { return multiplier_degree >= 0 ? multiplier_degree : degree() - 1; }
  double resolved_gamma0() const { return gamma0 > 0.0 ? gamma0 : default_gamma0(degree()); }
  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

ImplicitDomain make_domain(DomainKind kind);
MeshFamily mesh_family(DomainKind kind);

struct LevelOutcome {
  ErrorReport report;
  bool solved = false;
  std::string failure;  // what() of the error when !solved
  double relative_residual = 0.0;
  std::optional<double> infsup;
  std::vector<Vec2> vertices;  // moved into the branch by run_branch
  std::vector<double> vertex_values;
};

struct StudyBranch {
  std::string label;
  StudyConfig config;
  bool expect_failure = false;  // failures on this branch are the expected outcome
  std::vector<LevelOutcome> levels;
  std::optional<RateTable> rates;  // from the solved levels
  std::string rate_error;
  // Finest solved level: vertex positions and u_h at them.
  std::vector<Vec2> vertices;
  std::vector<double> vertex_values;

  std::vector<ErrorReport> solved_reports() const;
  bool all_solved() const;
};

struct RateCheck {
  std::string name;
  double value = 0.0;
  bool passed = false;
};

struct StudyResult {
  std::string name;
  std::vector<StudyBranch> branches;
  std::vector<RateCheck> checks;

  /// Every level of every branch not marked expect_failure solved.
  bool all_solved() const;
  bool checks_passed() const;
  /// 0, or 2 on a failed check, or 1 on an unexpected failed level.
  int exit_code() const;
};

/// One level of the pipeline: mesh, spaces, assembly, solve, errors.
LevelOutcome run_level(const StudyConfig& config, int level);

/// Runs all levels; level failures are recorded and the study continues.
StudyBranch run_branch(const StudyConfig& config, const std::string& label, bool expect_failure = false);
StudyResult run_study(const StudyConfig& config);

/// P2 without bubbles against discontinuous P2 multipliers, unmodified and
/// bvc, with the rate checks of the pairing experiment.
StudyResult run_unstable_pairing(int levels = 5, ExecPolicy policy = ExecPolicy::parallel);

std::vector<std::string> preset_names();
/// Runs a registered experiment by name, including its rate checks.
StudyResult run_preset(const std::string& name, int levels = 5, ExecPolicy policy = ExecPolicy::parallel);

/// Parses "key = value" lines ('#' starts a comment). Throws ConfigError on
/// malformed lines and duplicate keys.
std::map<std::string, std::string> parse_config(std::istream& in);
/// Applies parsed keys onto `config`; unknown keys are errors.
void apply_config(const std::map<std::string, std::string>& entries, StudyConfig& config);

/// CSV: "level,h,nno,dofs_u,dofs_lambda,err_l2,err_h1,err_lambda,rate_l2,
/// rate_h1,rate_lambda,delta_h,normal_dev", 17 significant digits, rates
/// empty on the first row.
void emit_csv(const std::vector<ErrorReport>& reports, std::ostream& out);
void emit_csv(const StudyBranch& branch, const std::string& path);
std::vector<ErrorReport> read_csv(std::istream& in);

enum class Norm { l2, h1, lambda };
std::string to_string(Norm norm);
/// Expected convergence order of a norm for a configuration.
double expected_rate(const StudyConfig& config, Norm norm);

/// Log-log SVG of one norm over all branches.
void emit_plot_svg(const StudyResult& result, Norm norm, std::ostream& out);
/// "x y u_h" per vertex of the finest solved level.
void emit_elevation(const StudyBranch& branch, std::ostream& out);
/// Writes <prefix>_<norm>.svg and <prefix>_<branch>_elevation.txt.
std::vector<std::string> emit_plots(const StudyResult& result, const std::string& prefix);

void print_summary(const StudyResult& result, std::ostream& out);

}  // namespace bvc
