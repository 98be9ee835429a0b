// bvcfem: convergence studies for Lagrange-multiplier Dirichlet conditions
// on curved domains.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bvc/error.hpp"
#include "bvc/parallel.hpp"
#include "bvc/solver.hpp"
#include "bvc/study.hpp"

namespace {

std::string branch_path(const std::string& path, const std::string& label, bool single) {
  if (single) return path;
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + label + p.extension().string())).string();
}

void dump_matrix(const bvc::StudyConfig& config, const std::string& path) {
  const bvc::ImplicitDomain domain = bvc::make_domain(config.domain);
  const bvc::Mesh mesh = bvc::precompute_boundary_geometry(
      bvc::ladder_mesh(bvc::mesh_family(config.domain), 0, domain), domain, bvc::default_facet_points(config.degree()));
  const bvc::PrimalSpace primal(mesh, config.degree(), config.enrich);
  std::ofstream out(path);
  if (!out) throw bvc::IoError("cannot open '" + path + "' for writing");
  if (config.method == bvc::Method::nitsche) {
    bvc::write_coordinate(bvc::assemble_nitsche(primal, domain, config.resolved_gamma0()).matrix, out);
  } else {
    const bvc::MultiplierSpace multipliers(mesh, config.resolved_multiplier_degree());
    bvc::write_coordinate(bvc::assemble_saddle(config.method, primal, multipliers, domain).matrix(), out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrange multiplier FEM with boundary value correction: convergence studies"};
  app.require_subcommand(1);

  auto* study = app.add_subcommand("study", "Run a convergence study");
  std::string preset, domain, element, method, multiplier_degree, out_path, plot_prefix, config_path, dump_path;
  int levels = 5, threads = 0;
  double gamma0 = -1.0;
  bool no_enrich = false, serial = false, infsup = false;
  auto* preset_opt = study->add_option("--preset", preset, "Registered experiment")
                         ->check(CLI::IsMember(bvc::preset_names()));
  auto* domain_opt = study->add_option("--domain", domain, "ring | ellipse");
  auto* element_opt = study->add_option("--element", element, "p1 | p2 | p3 | q1");
  auto* method_opt = study->add_option("--method", method, "unmodified | bvc | taylor | nitsche");
  auto* levels_opt = study->add_option("--levels", levels, "Number of refinement levels")->check(CLI::PositiveNumber);
  auto* gamma_opt = study->add_option("--gamma0", gamma0, "Nitsche penalty scale (default 10 k^2)");
  auto* mdeg_opt = study->add_option("--multiplier-degree", multiplier_degree, "auto | 0..10");
  auto* enrich_opt = study->add_flag("--no-enrich", no_enrich, "Drop the boundary edge bubbles");
  auto* infsup_opt = study->add_flag("--infsup", infsup, "Report the inf-sup diagnostic on the two coarsest levels");
  auto* out_opt = study->add_option("--out", out_path, "CSV output path");
  auto* plots_opt = study->add_option("--plots", plot_prefix, "Prefix for SVG plots and elevation files");
  study->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  study->add_option("--threads", threads, "OpenMP thread count");
  study->add_flag("--serial", serial, "Use the serial reference kernels");
  study->add_option("--dump-matrix", dump_path, "Write the coarsest system matrix as 'i j value' lines");
  for (auto* opt : {domain_opt, element_opt, method_opt, gamma_opt, mdeg_opt, enrich_opt}) opt->excludes(preset_opt);

  auto* mesh_cmd = app.add_subcommand("mesh", "Export a ladder mesh with its boundary facets");
  std::string mesh_domain = "ring", mesh_out;
  int mesh_level = 0;
  mesh_cmd->add_option("--domain", mesh_domain, "ring | ellipse");
  mesh_cmd->add_option("--level", mesh_level, "Ladder level")->check(CLI::NonNegativeNumber);
  mesh_cmd->add_option("--out", mesh_out, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) {
      const auto kind = bvc::parse_domain(mesh_domain);
      const bvc::ImplicitDomain d = bvc::make_domain(kind);
      const bvc::Mesh mesh = bvc::ladder_mesh(bvc::mesh_family(kind), mesh_level, d);
      std::ofstream out(mesh_out);
      if (!out) throw bvc::IoError("cannot open '" + mesh_out + "' for writing");
      bvc::write_mesh(mesh, out);
      return 0;
    }

    if (threads > 0) bvc::set_threads(threads);
    const auto policy = serial ? bvc::ExecPolicy::serial : bvc::ExecPolicy::parallel;

    bvc::StudyConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      auto entries = bvc::parse_config(in);
      if (auto it = entries.find("preset"); it != entries.end()) {
        if (preset_opt->count() == 0) preset = it->second;
        entries.erase(it);
      }
      bvc::apply_config(entries, config);
    }
    if (domain_opt->count()) config.domain = bvc::parse_domain(domain);
    if (element_opt->count()) config.element = bvc::parse_element(element);
    if (method_opt->count()) config.method = bvc::parse_method(method);
    if (levels_opt->count()) config.levels = levels;
    if (gamma_opt->count()) config.gamma0 = gamma0;
    if (mdeg_opt->count())
      config.multiplier_degree = multiplier_degree == "auto" ? -1 : std::stoi(multiplier_degree);
    if (enrich_opt->count()) config.enrich = false;
    if (infsup_opt->count()) config.infsup = true;
    if (out_opt->count()) config.csv_path = out_path;
    if (plots_opt->count()) config.plot_prefix = plot_prefix;
    config.policy = policy;

    if (!dump_path.empty()) dump_matrix(config, dump_path);

    const bvc::StudyResult result =
        preset.empty() ? bvc::run_study(config) : bvc::run_preset(preset, config.levels, policy);
    bvc::print_summary(result, std::cout);

    if (!config.csv_path.empty())
      for (const auto& branch : result.branches)
        bvc::emit_csv(branch, branch_path(config.csv_path, branch.label, result.branches.size() == 1));
    if (!config.plot_prefix.empty())
      for (const auto& path : bvc::emit_plots(result, config.plot_prefix)) std::cout << "wrote " << path << "\n";
    return result.exit_code();
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}
