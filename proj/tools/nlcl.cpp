// nlcl: command-line driver.
//
//   nlcl run --config run.json [--output DIR]
//   nlcl sweep convergence|quadrature-comparison|tv-study|entropy-table --config F
//   nlcl weights --kernel linear --family exact --epsilon 1e-3 --h 1e-3
//   nlcl diagnose --input snapshots.csv [--velocity greenshields] [--c 0.5]
//
// Exit codes: 0 success, 2 validation error or bad usage, 1 runtime failure.
// Failures print exactly one line on stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlcl/io.hpp"
#include "nlcl/nlcl.hpp"

namespace fs = std::filesystem;
using namespace nlcl;

namespace {

struct Common {
  std::string config;
  std::string output;
  std::size_t threads = 0;
  bool no_wall_time = false;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("io-error", "cannot write " + p.string());
  out << content;
  if (!out) throw Error("io-error", "write failed for " + p.string());
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("io-error", "cannot create " + dir + ": " + ec.message());
  return p;
}

fs::path config_dir(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

int cmd_run(const Common& o) {
  const RunConfig rc = parse_run_config(read_json_file(o.config), config_dir(o.config));
  const SchemeConfig sc = rc.scheme_config();
  const Scheme scheme(sc);
  RunOptions opts;
  opts.record_diagnostics = rc.diagnostics.enabled;
  opts.entropy.c = rc.diagnostics.c;
  const RunResult res =
      scheme.run(discretize_initial(rc.initial_data, rc.grid), rc.T, rc.snapshots, opts);

  const fs::path dir = prepare_dir(o.output.empty() ? rc.output_dir : o.output);
  std::ostringstream snaps, diag;
  write_snapshots_csv(snaps, rc.grid, res.snapshots);
  write_file(dir / "snapshots.csv", snaps.str());
  if (rc.diagnostics.enabled) {
    write_diagnostics_csv(diag, res.diagnostics);
    write_file(dir / "diagnostics.csv", diag.str());
  }
  write_file(dir / "manifest.json", run_manifest(rc, sc, res, !o.no_wall_time).dump(2) + "\n");
  std::printf("steps=%zu final_time=%s output=%s\n", res.num_steps,
              fmt17(res.final_time).c_str(), dir.string().c_str());
  return 0;
}

int cmd_convergence(const Common& o) {
  const StudySpec spec = parse_study_spec(read_json_file(o.config), config_dir(o.config));
  const StudyResult r = run_convergence_study(spec, o.threads);
  const fs::path dir = prepare_dir(o.output.empty() ? "out" : o.output);
  std::ostringstream csv;
  write_study_csv(csv, r, !o.no_wall_time);
  write_file(dir / "study.csv", csv.str());
  write_file(dir / "study.json", study_result_json(r, !o.no_wall_time).dump(2) + "\n");
  std::printf("slope=%s rows=%zu\n", fmt17(r.slope).c_str(), r.rows.size());
  return 0;
}

int cmd_quadrature(const Common& o) {
  std::vector<WeightFamily> families;
  const StudySpec spec =
      parse_study_spec(read_json_file(o.config), config_dir(o.config), &families);
  const auto results = run_quadrature_comparison(spec, families, o.threads);
  const fs::path dir = prepare_dir(o.output.empty() ? "out" : o.output);
  json summary = json::array();
  for (const auto& r : results) {
    const std::string tag(to_string(r.spec.weight_family));
    std::ostringstream csv;
    write_study_csv(csv, r, !o.no_wall_time);
    write_file(dir / ("study_" + tag + ".csv"), csv.str());
    write_file(dir / ("study_" + tag + ".json"),
               study_result_json(r, !o.no_wall_time).dump(2) + "\n");
    summary.push_back({{"family", tag}, {"slope", r.slope}});
    std::printf("%s slope=%s\n", tag.c_str(), fmt17(r.slope).c_str());
  }
  write_file(dir / "comparison.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_tv(const Common& o) {
  const TvStudyConfig cfg = parse_tv_study(read_json_file(o.config), config_dir(o.config));
  const auto series = run_tv_study(cfg, o.threads);
  const fs::path dir = prepare_dir(o.output.empty() ? "out" : o.output);
  json cells = json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string name = "tv_" + std::to_string(i) + ".csv";
    std::ostringstream csv;
    write_tv_csv(csv, s);
    write_file(dir / name, csv.str());
    json c{{"epsilon", s.epsilon},
           {"file", name},
           {"tv_rho_initial", s.tv_rho.front()},
           {"tv_rho_max", *std::max_element(s.tv_rho.begin(), s.tv_rho.end())},
           {"tv_rho_final", s.tv_rho.back()},
           {"max_tv_W_increase", s.max_tv_W_increase},
           {"wall_time_s", o.no_wall_time ? 0.0 : s.wall_time_s}};
    c["first_exceed_time"] = s.first_exceed_time ? json(*s.first_exceed_time) : json(nullptr);
    c["return_time"] = s.return_time ? json(*s.return_time) : json(nullptr);
    cells.push_back(c);
    std::printf("eps=%s tv_rho_max=%s max_tv_W_increase=%s\n", fmt17(s.epsilon).c_str(),
                fmt17(c["tv_rho_max"].get<double>()).c_str(),
                fmt17(s.max_tv_W_increase).c_str());
  }
  json m{{"h", cfg.h},
         {"kernel", std::string(to_string(cfg.kernel.family()))},
         {"weights", std::string(to_string(cfg.weight_family))},
         {"velocity", std::string(to_string(cfg.velocity.family))},
         {"lambda", cfg.lambda},
         {"T", cfg.T},
         {"domain", {cfg.x_min, cfg.x_max}},
         {"return_tol", cfg.return_tol},
         {"series", cells},
         {"versions", versions_json()}};
  write_file(dir / "tv_study.json", m.dump(2) + "\n");
  return 0;
}

int cmd_entropy(const Common& o) {
  const EntropyTableConfig cfg =
      parse_entropy_table(read_json_file(o.config), config_dir(o.config));
  const EntropyTable t = run_entropy_table(cfg, o.threads);
  const fs::path dir = prepare_dir(o.output.empty() ? "out" : o.output);
  std::ostringstream csv;
  write_entropy_table_csv(csv, t);
  write_file(dir / "entropy_table.csv", csv.str());
  json kernels = json::array(), data = json::array();
  for (const auto& k : cfg.kernels) kernels.push_back(std::string(to_string(k.family())));
  for (const auto& d : cfg.data) data.push_back(d.name());
  json m{{"epsilons", cfg.epsilons},
         {"h", cfg.h},
         {"kernels", kernels},
         {"data", data},
         {"c", cfg.c},
         {"T", cfg.T},
         {"lambda", cfg.lambda},
         {"domain", {cfg.x_min, cfg.x_max}},
         {"weights", std::string(to_string(cfg.weight_family))},
         {"velocity", std::string(to_string(cfg.velocity.family))},
         {"window", "full grid"},
         {"aggregate", "tau h sum max(E, 0)"},
         {"versions", versions_json()}};
  write_file(dir / "entropy_table.json", m.dump(2) + "\n");
  std::fputs(csv.str().c_str(), stdout);
  return 0;
}

struct WeightsArgs {
  std::string kernel = "linear";
  std::string kernel_table;
  std::string family = "exact";
  double epsilon = 0.0;
  double h = 0.0;
  double tail_tol = kDefaultTailTol;
  double gamma0 = 0.0;
  double c_gamma = 0.0;
};

int cmd_weights(const WeightsArgs& a) {
  Kernel k = Kernel::linear();
  if (!a.kernel_table.empty()) {
    std::ifstream in(a.kernel_table);
    if (!in) throw ValidationError("unreadable-file", a.kernel_table);
    k = read_kernel_table(in);
  } else {
    k = kernel_from_name(a.kernel);
  }
  const WeightFamily fam = weight_family_from_name(a.family);
  std::optional<double> g0;
  if (a.gamma0 != 0.0) g0 = a.gamma0;
  const QuadratureWeights q = make_weights(fam, k, a.epsilon, a.h, a.tail_tol, g0);
  // Geometric weights stand in for the exponential kernel, whose moment is 1.
  double c_gamma = a.c_gamma;
  if (c_gamma <= 0.0) c_gamma = fam == WeightFamily::Geometric ? 1.0 : k.first_moment();
  const auto rep = verify_weight_conditions(q, c_gamma);
  std::ostringstream csv;
  write_weights_csv(csv, q);
  std::fputs(csv.str().c_str(), stdout);
  std::printf("%s\n", report_json(rep, c_gamma, q).dump().c_str());
  return 0;
}

struct DiagnoseArgs {
  std::string input;
  std::string velocity = "greenshields";
  double c = 0.5;
  std::string output;
};

int cmd_diagnose(const DiagnoseArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw ValidationError("unreadable-file", a.input);
  const VelocityModel v = velocity_from_name(a.velocity);
  if (!(a.c >= 0.0 && a.c <= 1.0)) throw ValidationError("invalid-parameter", "c in [0, 1]");
  const auto recs = diagnose_frames(read_snapshots_csv(in), v, a.c);
  std::ostringstream csv;
  write_diagnostics_csv(csv, recs);
  if (a.output.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    const fs::path dir = prepare_dir(a.output);
    write_file(dir / "diagnostics.csv", csv.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Godunov-type solver for nonlocal conservation laws"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  auto add_common = [&](CLI::App* sub, bool sweep) {
    sub->add_option("--config", common.config, "JSON config file")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--output", common.output, "output directory");
    sub->add_flag("--no-wall-time", common.no_wall_time,
                  "write 0 for wall times so outputs are byte-stable");
    if (sweep)
      sub->add_option("--threads", common.threads, "parallelism cap (0 = all cores)");
  };

  auto* run = app.add_subcommand("run", "single simulation");
  add_common(run, false);

  auto* sweep = app.add_subcommand("sweep", "parameter study");
  sweep->require_subcommand(1);
  auto* conv = sweep->add_subcommand("convergence", "L1 error vs h along a limit path");
  auto* quad = sweep->add_subcommand("quadrature-comparison", "one study per weight family");
  auto* tvs = sweep->add_subcommand("tv-study", "TV of rho and W over time");
  auto* ent = sweep->add_subcommand("entropy-table", "local entropy violation table");
  for (auto* s : {conv, quad, tvs, ent}) add_common(s, true);

  WeightsArgs wa;
  auto* weights = app.add_subcommand("weights", "print a weight sequence and its report");
  weights->set_help_flag("--help", "print this help and exit");
  weights->add_option("--kernel", wa.kernel, "exponential|linear|constant");
  weights->add_option("--kernel-table", wa.kernel_table, "CSV kernel table");
  weights->add_option("--family", wa.family, "exact|riemann|normalized_riemann|geometric");
  weights->add_option("--epsilon", wa.epsilon)->required();
  weights->add_option("--h", wa.h)->required();
  weights->add_option("--tail-tol", wa.tail_tol);
  weights->add_option("--gamma0", wa.gamma0, "geometric ratio parameter");
  weights->add_option("--c-gamma", wa.c_gamma, "moment bound (default: kernel first moment)");

  DiagnoseArgs da;
  auto* diagnose = app.add_subcommand("diagnose", "diagnostics from a snapshots CSV");
  diagnose->add_option("--input", da.input)->required();
  diagnose->add_option("--velocity", da.velocity);
  diagnose->add_option("--c", da.c);
  diagnose->add_option("--output", da.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage-error: %s\n", one_line(e.what()).c_str());
    return 2;
  }

  try {
    if (*run) return cmd_run(common);
    if (*conv) return cmd_convergence(common);
    if (*quad) return cmd_quadrature(common);
    if (*tvs) return cmd_tv(common);
    if (*ent) return cmd_entropy(common);
    if (*weights) return cmd_weights(wa);
    if (*diagnose) return cmd_diagnose(da);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "%s\n", one_line(e.what()).c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime-error: %s\n", one_line(e.what()).c_str());
    return 1;
  }
  return 2;
}
