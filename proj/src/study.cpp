#include "bvc/study.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "bvc/error.hpp"
#include "bvc/solver.hpp"

namespace bvc {

std::string to_string(DomainKind kind) { return kind == DomainKind::ring ? "ring" : "ellipse"; }

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::p1: return "p1";
    case ElementKind::p2: return "p2";
    case ElementKind::p3: return "p3";
    case ElementKind::q1: return "q1";
  }
  return "?";
}

DomainKind parse_domain(const std::string& name) {
  if (name == "ring") return DomainKind::ring;
  if (name == "ellipse") return DomainKind::ellipse;
  throw ConfigError("unknown domain '" + name + "' (expected ring or ellipse)");
}

ElementKind parse_element(const std::string& name) {
  if (name == "p1") return ElementKind::p1;
  if (name == "p2") return ElementKind::p2;
  if (name == "p3") return ElementKind::p3;
  if (name == "q1") return ElementKind::q1;
  throw ConfigError("unknown element '" + name + "' (expected p1, p2, p3 or q1)");
}

int element_degree(ElementKind element) {
  switch (element) {
    case ElementKind::p2: return 2;
    case ElementKind::p3: return 3;
    default: return 1;
  }
}

void StudyConfig::validate() const {
  if (element == ElementKind::q1 && domain != DomainKind::ellipse)
    throw ConfigError("q1 elements run on the ellipse staircase only");
  if ((element == ElementKind::p2 || element == ElementKind::p3) && domain != DomainKind::ring)
    throw ConfigError("p2/p3 elements run on the ring only");
  if (domain == DomainKind::ellipse && element != ElementKind::q1)
    throw ConfigError("the ellipse staircase carries q1 elements only");
  if (levels < 1) throw ConfigError("levels must be positive");
  if (multiplier_degree < -1 || multiplier_degree > 10) throw ConfigError("multiplier degree must be auto or 0..10");
}

ImplicitDomain make_domain(DomainKind kind) { return kind == DomainKind::ring ? ring_domain() : ellipse_domain(); }

MeshFamily mesh_family(DomainKind kind) {
  return kind == DomainKind::ring ? MeshFamily::annulus : MeshFamily::staircase;
}

LevelOutcome run_level(const StudyConfig& config, int level) {
  const ImplicitDomain domain = make_domain(config.domain);
  const int k = config.degree();
  LevelOutcome outcome;
  ErrorReport& report = outcome.report;
  report.level = level;
  const Mesh mesh = precompute_boundary_geometry(ladder_mesh(mesh_family(config.domain), level, domain), domain, default_facet_points(k));
  const PrimalSpace primal(mesh, k, config.enrich);
  const MultiplierSpace multipliers(mesh, config.resolved_multiplier_degree());
  report.h = mesh.h();
  report.nno = mesh.nno();
  report.dofs_u = primal.dof_count();
  report.dofs_lambda = config.method == Method::nitsche ? 0 : multipliers.dof_count();
  const GeometryReport geometry = geometry_report(mesh, domain);
  report.delta_h = geometry.delta_h;
  report.normal_dev = geometry.normal_dev;
  if (config.infsup && config.method != Method::nitsche && level < 2) {
    try {
      outcome.infsup = infsup_diagnostic(primal, multipliers);
    } catch (const TooLarge&) {
    }
  }

  AssemblyOptions options;
  options.policy = config.policy;
  try {
    if (config.method == Method::nitsche) {
      NitscheOptions nitsche;
      nitsche.assembly = options;
      const NitscheSystem system = assemble_nitsche(primal, domain, config.resolved_gamma0(), nitsche);
      const NitscheSolution solution = solve(system, primal);
      outcome.relative_residual = solution.relative_residual;
      const L2H1Errors e = l2_h1_errors(solution.u, domain, -1, config.policy);
      report.err_l2 = e.l2;
      report.err_h1 = e.h1;
      // No multiplier: the triple norm keeps its primal terms only.
      report.triple = e.h1;
      double trace_sq = 0.0;
      LocalBasis basis;
      for (const auto& facet : mesh.facets())
        for (const auto& qp : facet.quad_points) {
          primal.evaluate(facet.cell, primal.to_reference(facet.cell, qp.point), basis);
          const double d = domain.u_exact(qp.point) - solution.u.value(facet.cell, basis);
          trace_sq += qp.weight * d * d;
        }
      report.triple += std::sqrt(trace_sq / report.h);
      outcome.vertex_values.assign(solution.u.coefficients().data(),
                                   solution.u.coefficients().data() + mesh.num_vertices());
      outcome.vertices = mesh.vertices();
      outcome.solved = true;
      return outcome;
    }
    const SaddleSystem system = assemble_saddle(config.method, primal, multipliers, domain, options);
    const SaddleSolution solution = solve(system, primal, multipliers);
    outcome.relative_residual = solution.relative_residual;
    const L2H1Errors e = l2_h1_errors(solution.u, domain, -1, config.policy);
    report.err_l2 = e.l2;
    report.err_h1 = e.h1;
    report.err_lambda = multiplier_error(solution.lambda, domain);
    report.triple = triple_norm_error(solution.u, solution.lambda, domain, report.h);
    // Vertex dofs come first and bubbles vanish at vertices.
    outcome.vertex_values.assign(solution.u.coefficients().data(),
                                 solution.u.coefficients().data() + mesh.num_vertices());
    outcome.vertices = mesh.vertices();
    outcome.solved = true;
  } catch (const SingularSystem& error) {
    outcome.failure = error.what();
  }
  return outcome;
}

std::vector<ErrorReport> StudyBranch::solved_reports() const {
  std::vector<ErrorReport> out;
  for (const auto& level : levels)
    if (level.solved) out.push_back(level.report);
  return out;
}

bool StudyBranch::all_solved() const {
  return std::all_of(levels.begin(), levels.end(), [](const LevelOutcome& l) { return l.solved; });
}

StudyBranch run_branch(const StudyConfig& config, const std::string& label, bool expect_failure) {
  config.validate();
  StudyBranch branch;
  branch.label = label;
  branch.config = config;
  branch.expect_failure = expect_failure;
  for (int level = 0; level < config.levels; ++level) {
    LevelOutcome outcome = run_level(config, level);
    if (outcome.solved) {
      branch.vertices = std::move(outcome.vertices);
      branch.vertex_values = std::move(outcome.vertex_values);
    }
    outcome.vertices.clear();
    outcome.vertex_values.clear();
    branch.levels.push_back(std::move(outcome));
  }
  const auto reports = branch.solved_reports();
  if (reports.size() >= 3) {
    try {
      branch.rates = fit_rates(reports);
    } catch (const DegenerateFit& error) {
      branch.rate_error = error.what();
    }
  } else {
    branch.rate_error = "fewer than 3 solved levels";
  }
  return branch;
}

bool StudyResult::all_solved() const {
  return std::all_of(branches.begin(), branches.end(),
                     [](const StudyBranch& b) { return b.expect_failure || b.all_solved(); });
}

bool StudyResult::checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const RateCheck& c) { return c.passed; });
}

int StudyResult::exit_code() const {
  if (!all_solved()) return 1;
  return checks_passed() ? 0 : 2;
}

StudyResult run_study(const StudyConfig& config) {
  StudyResult result;
  result.name = to_string(config.domain) + "-" + to_string(config.element) + "-" + to_string(config.method);
  result.branches.push_back(run_branch(config, to_string(config.method)));
  return result;
}

namespace {

double windowed(const StudyBranch& branch, Norm norm) {
  if (!branch.rates) return std::nan("");
  switch (norm) {
    case Norm::l2: return branch.rates->l2.windowed;
    case Norm::h1: return branch.rates->h1.windowed;
    default: return branch.rates->lambda.windowed;
  }
}

void check_range(StudyResult& result, const StudyBranch& branch, Norm norm, double lo, double hi) {
  const double rate = windowed(branch, norm);
  result.checks.push_back({branch.label + " " + to_string(norm) + " rate in [" + std::to_string(lo).substr(0, 4) + ", " +
                               std::to_string(hi).substr(0, 4) + "]",
                           rate, rate >= lo && rate <= hi});
}

void check_at_most(StudyResult& result, const StudyBranch& branch, Norm norm, double hi) {
  const double rate = windowed(branch, norm);
  result.checks.push_back(
      {branch.label + " " + to_string(norm) + " rate <= " + std::to_string(hi).substr(0, 4), rate, rate <= hi});
}

StudyConfig ring_config(ElementKind element, Method method, int levels, ExecPolicy policy) {
  StudyConfig config;
  config.domain = DomainKind::ring;
  config.element = element;
  config.method = method;
  config.levels = levels;
  config.policy = policy;
  return config;
}

double finest_error(const StudyBranch& branch) {
  const auto reports = branch.solved_reports();
  return reports.empty() ? std::nan("") : reports.back().err_l2;
}

}  // namespace

StudyResult run_unstable_pairing(int levels, ExecPolicy policy) {
  StudyConfig config = ring_config(ElementKind::p2, Method::unmodified, levels, policy);
  config.enrich = false;
  config.multiplier_degree = 2;
  config.infsup = true;
  StudyResult result;
  result.name = "unstable-pairing";
  result.branches.push_back(run_branch(config, "unmodified", true));
  config.method = Method::bvc;
  result.branches.push_back(run_branch(config, "bvc"));

  const StudyBranch& unmodified = result.branches[0];
  const StudyBranch& bvc = result.branches[1];
  bool singular = !unmodified.all_solved();
  const double l2 = windowed(unmodified, Norm::l2);
  bool stalled = !std::isnan(l2) && l2 < 0.5;
  bool collapsed = false;
  if (unmodified.levels.size() >= 2 && unmodified.levels[0].infsup && unmodified.levels[1].infsup)
    collapsed = *unmodified.levels[0].infsup >= 10.0 * *unmodified.levels[1].infsup;
  result.checks.push_back({"unmodified fails (singular, stalled, or inf-sup collapse)", l2, singular || stalled || collapsed});
  check_range(result, bvc, Norm::l2, 2.7, 3.3);
  const auto reports = bvc.solved_reports();
  bool monotone = reports.size() >= 3;
  for (std::size_t i = reports.size() >= 3 ? reports.size() - 2 : 1; monotone && i < reports.size(); ++i)
    monotone = reports[i].err_lambda < reports[i - 1].err_lambda;
  result.checks.push_back({"bvc multiplier error decreasing over the last 3 levels",
                           reports.empty() ? std::nan("") : reports.back().err_lambda, monotone});
  return result;
}

std::vector<std::string> preset_names() { return {"p2-ring", "p3-ring", "unstable-pairing", "q1-ellipse", "nitsche-ring"}; }

StudyResult run_preset(const std::string& name, int levels, ExecPolicy policy) {
  StudyResult result;
  result.name = name;
  if (name == "p2-ring") {
    result.branches.push_back(run_branch(ring_config(ElementKind::p2, Method::bvc, levels, policy), "bvc"));
    result.branches.push_back(
        run_branch(ring_config(ElementKind::p2, Method::unmodified, levels, policy), "unmodified"));
    const StudyBranch& bvc = result.branches[0];
    check_range(result, bvc, Norm::l2, 2.8, 3.3);
    check_range(result, bvc, Norm::h1, 1.8, 2.3);
    check_range(result, bvc, Norm::lambda, 1.7, 2.3);
  } else if (name == "p3-ring") {
    result.branches.push_back(run_branch(ring_config(ElementKind::p3, Method::bvc, levels, policy), "bvc"));
    result.branches.push_back(
        run_branch(ring_config(ElementKind::p3, Method::unmodified, levels, policy), "unmodified"));
    result.branches.push_back(
        run_branch(ring_config(ElementKind::p2, Method::unmodified, levels, policy), "p2-unmodified"));
    const StudyBranch& bvc = result.branches[0];
    check_range(result, bvc, Norm::l2, 3.7, 4.3);
    check_range(result, bvc, Norm::h1, 2.8, 3.3);
    check_range(result, bvc, Norm::lambda, 2.6, 3.4);
    check_at_most(result, result.branches[1], Norm::l2, 2.5);
    const double ratio = finest_error(result.branches[2]) / finest_error(result.branches[1]);
    result.checks.push_back({"p2-unmodified / p3-unmodified finest L2 error within [1/4, 4]", ratio,
                             ratio >= 0.25 && ratio <= 4.0});
  } else if (name == "unstable-pairing") {
    return run_unstable_pairing(levels, policy);
  } else if (name == "q1-ellipse") {
    StudyConfig config;
    config.domain = DomainKind::ellipse;
    config.element = ElementKind::q1;
    config.method = Method::bvc;
    config.multiplier_degree = 0;
    config.levels = levels;
    config.policy = policy;
    result.branches.push_back(run_branch(config, "bvc"));
    config.method = Method::unmodified;
    result.branches.push_back(run_branch(config, "unmodified"));
    check_range(result, result.branches[0], Norm::l2, 1.7, 2.3);
    check_range(result, result.branches[0], Norm::h1, 0.8, 1.3);
    check_at_most(result, result.branches[1], Norm::l2, 1.2);
  } else if (name == "nitsche-ring") {
    result.branches.push_back(run_branch(ring_config(ElementKind::p2, Method::nitsche, levels, policy), "nitsche"));
    result.branches.push_back(run_branch(ring_config(ElementKind::p2, Method::bvc, levels, policy), "bvc"));
    check_range(result, result.branches[0], Norm::l2, 2.8, 3.3);
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return result;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "off" || value == "no" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (!entries.emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
  }
  return entries;
}

void apply_config(const std::map<std::string, std::string>& entries, StudyConfig& config) {
  for (const auto& [key, value] : entries) {
    if (key == "domain") {
      config.domain = parse_domain(value);
    } else if (key == "element") {
      config.element = parse_element(value);
    } else if (key == "method") {
      config.method = parse_method(value);
    } else if (key == "multiplier_degree") {
      config.multiplier_degree = value == "auto" ? -1 : parse_int(key, value);
    } else if (key == "enrich") {
      config.enrich = parse_bool(key, value);
    } else if (key == "levels") {
      config.levels = parse_int(key, value);
    } else if (key == "gamma0") {
      config.gamma0 = parse_double(key, value);
    } else if (key == "out") {
      config.csv_path = value;
    } else if (key == "plots") {
      config.plot_prefix = value;
    } else if (key == "infsup") {
      config.infsup = parse_bool(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

std::string to_string(Norm norm) {
  switch (norm) {
    case Norm::l2: return "l2";
    case Norm::h1: return "h1";
    default: return "lambda";
  }
}

double expected_rate(const StudyConfig& config, Norm norm) {
  const int k = config.degree();
  return norm == Norm::l2 ? k + 1 : k;
}

void print_summary(const StudyResult& result, std::ostream& out) {
  out << "study " << result.name << "\n";
  for (const auto& branch : result.branches) {
    out << "  branch " << branch.label << " (" << to_string(branch.config.element) << ", "
        << to_string(branch.config.method) << ", m=" << branch.config.resolved_multiplier_degree()
        << (branch.config.enrich ? ", enriched" : ", no bubbles") << ")\n";
    for (const auto& level : branch.levels) {
      const auto& r = level.report;
      out << "    level " << r.level << "  h=" << r.h << "  dofs=" << r.dofs_u << "+" << r.dofs_lambda;
      if (level.solved)
        out << "  l2=" << r.err_l2 << "  h1=" << r.err_h1 << "  lambda=" << r.err_lambda;
      else
        out << "  FAILED: " << level.failure;
      if (level.infsup) out << "  infsup=" << *level.infsup;
      out << "\n";
    }
    if (branch.rates) {
      out << "    rates (last 3 levels)  l2=" << branch.rates->l2.windowed << "  h1=" << branch.rates->h1.windowed
          << "  lambda=" << branch.rates->lambda.windowed << "  triple=" << branch.rates->triple.windowed << "\n";
    } else {
      out << "    rates unavailable: " << branch.rate_error << "\n";
    }
  }
  for (const auto& check : result.checks)
    out << "  check " << (check.passed ? "PASS" : "FAIL") << "  " << check.name << "  (" << check.value << ")\n";
}

}  // namespace bvc
