// Command line front end: screening, simulation, experiments and structured
// precision estimation over CSV files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "parsec/core.hpp"
#include "parsec/data.hpp"
#include "parsec/estimation.hpp"
#include "parsec/experiments.hpp"
#include "parsec/inference.hpp"
#include "parsec/pcs_hub.hpp"
#include "parsec/simgen.hpp"
#include "parsec/uscore.hpp"

using json = nlohmann::json;
using namespace parsec;

namespace {

int default_threads() {
  if (const char* env = std::getenv("PARSEC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

SymmetrizeMode parse_symmetrize(const std::string& name) {
  if (name == "upper") return SymmetrizeMode::UpperTriangle;
  if (name == "min-abs") return SymmetrizeMode::MinAbs;
  if (name == "max-abs") return SymmetrizeMode::MaxAbs;
  if (name == "average") return SymmetrizeMode::Average;
  throw CLI::ValidationError("--symmetrize",
                             "must be upper|min-abs|max-abs|average");
}

StructureKind parse_structure_kind(const std::string& name) {
  if (name == "diag") return StructureKind::Diagonal;
  if (name == "ar-block") return StructureKind::ArBlock;
  if (name == "block") return StructureKind::Block;
  if (name == "star-connected") return StructureKind::StarConnected;
  if (name == "star-disconnected") return StructureKind::StarDisconnected;
  throw CLI::ValidationError("--structure", "unknown structure: " + name);
}

Method parse_method(const std::string& name) {
  if (name == "parsec-base") return Method::ParsecBase;
  if (name == "parsec-scalable") return Method::ParsecScalable;
  if (name == "pcs-hub") return Method::PcsHub;
  throw CLI::ValidationError("--method", "unknown method: " + name);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

struct ScreenOptions {
  std::string input, output, method = "parsec-scalable", control = "fwer";
  std::string symmetrize_mode = "upper", delimiter = ",";
  double alpha = 0.05, rho = 0.0;
  std::int64_t k = 0;
  int threads = default_threads();
  bool low_memory = false, no_header = false;
};

int run_screen(const ScreenOptions& opt) {
  const LoadResult loaded =
      load_matrix(opt.input, opt.delimiter.at(0), !opt.no_header);
  if (loaded.rows_dropped > 0)
    std::cerr << "dropped " << loaded.rows_dropped
              << " incomplete row(s) from " << opt.input << "\n";
  const int n = loaded.data.n();
  const int p = loaded.data.p();
  const Matrix u = uscores(loaded.data.values);

  const bool fdr_family = opt.control == "fdr-bh" || opt.control == "fdr-by" ||
                          opt.control == "pfdr";
  if (opt.method == "pcs-hub" && fdr_family)
    throw std::runtime_error(
        "pcs-hub has no exact null p-value law; FDR/pFDR controls are not "
        "supported for it (use fwer, kfwer or rho)");

  // Resolve the screening level for the threshold-style controls up front.
  double level = 0.0;
  bool vacuous = false;
  if (opt.control == "rho") {
    level = opt.rho;
  } else if (opt.control == "fwer" || opt.control == "kfwer") {
    ErrorControlSpec spec;
    spec.kind = opt.control == "fwer" ? ControlKind::FWER : ControlKind::KFWER;
    spec.alpha = opt.alpha;
    spec.k = opt.k;
    const LevelResult lr = fwer_kfwer_level(spec, n, p);
    level = lr.rho;
    vacuous = lr.vacuous;
  } else if (fdr_family) {
    level = fdr_prescreen_level(opt.alpha, n);  // pre-screen only
  } else {
    throw std::runtime_error("unknown control: " + opt.control);
  }

  ScreenResult result;
  if (opt.low_memory) {
    if (opt.method != "parsec-scalable")
      throw std::runtime_error("--low-memory requires --method parsec-scalable");
    if (opt.symmetrize_mode != "upper")
      throw std::runtime_error(
          "--low-memory supports only --symmetrize upper");
    EdgeSet candidates;
    std::mutex mu;
    parsec_scalable_rows(u, opt.threads, [&](int row, const Vector& h_row) {
      EdgeSet local;
      for (int k2 = row + 1; k2 < p; ++k2)
        if (std::abs(h_row(k2)) >= level)
          local.push_back({row, k2, h_row(k2), pvalue(h_row(k2), n)});
      if (!local.empty()) {
        std::lock_guard<std::mutex> lock(mu);
        candidates.insert(candidates.end(), local.begin(), local.end());
      }
    });
    if (opt.control == "fdr-bh")
      result = fdr_screen_candidates(candidates, p, ControlKind::FDR_BH,
                                     opt.alpha, n);
    else if (opt.control == "fdr-by")
      result = fdr_screen_candidates(candidates, p, ControlKind::FDR_BY,
                                     opt.alpha, n);
    else if (opt.control == "pfdr")
      result = pfdr_screen_candidates(candidates, p, opt.alpha, n);
    else {
      result.level = level;
      result.edges = std::move(candidates);
      sort_edges(result.edges);
    }
  } else {
    Matrix h;
    if (opt.method == "parsec-base")
      h = symmetrize(parsec_base(u), parse_symmetrize(opt.symmetrize_mode));
    else if (opt.method == "parsec-scalable")
      h = symmetrize(parsec_scalable(u, opt.threads),
                     parse_symmetrize(opt.symmetrize_mode));
    else
      h = pcs_hub_matrix(u);

    if (opt.control == "fdr-bh")
      result = fdr_screen(h, ControlKind::FDR_BH, opt.alpha, n);
    else if (opt.control == "fdr-by")
      result = fdr_screen(h, ControlKind::FDR_BY, opt.alpha, n);
    else if (opt.control == "pfdr")
      result = pfdr_screen(h, opt.alpha, n);
    else
      result = threshold_screen(h, level, n);
  }

  write_edges(result.edges, opt.output);
  std::cout << "n=" << n << " p=" << p << " control=" << opt.control
            << " level=" << format_double(result.level) << " discoveries="
            << result.edges.size() << "\n";
  if (opt.control == "fwer" || opt.control == "kfwer") {
    std::cout << "achieved_error="
              << format_double(achieved_error(result.level, n, p,
                                              opt.control == "kfwer" ? opt.k
                                                                     : 0))
              << (vacuous ? " (control is vacuous at this n, p)" : "")
              << "\n";
  }
  return 0;
}

struct SimulateOptions {
  std::string structure = "diag", dist = "gaussian", output, edges_output;
  int n = 0, p = 0, a = 0, d = 1, k_stars = 0, e = 0;
  double phi1 = 0.0, rho = 0.0, c = 0.0, nu = 3.0;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateOptions& opt) {
  StructureSpec spec;
  spec.kind = parse_structure_kind(opt.structure);
  spec.p = opt.p;
  spec.a = opt.a;
  spec.d = opt.d;
  spec.phi1 = opt.phi1;
  spec.rho = opt.rho;
  spec.k_stars = opt.k_stars;
  spec.e = opt.e;
  spec.c = opt.c;
  const CovarianceModel model = build_structure(spec);
  Matrix x;
  if (opt.dist == "gaussian")
    x = sample_gaussian(model, opt.n, opt.seed);
  else if (opt.dist == "t")
    x = sample_mvt(model, opt.nu, opt.n, opt.seed);
  else
    throw std::runtime_error("--dist must be gaussian or t");

  std::vector<std::string> names(opt.p);
  for (int j = 0; j < opt.p; ++j) names[j] = "f" + std::to_string(j + 1);
  write_matrix_csv(x, opt.output, names);
  if (!opt.edges_output.empty()) {
    std::ofstream out(opt.edges_output);
    if (!out) throw std::runtime_error("cannot write " + opt.edges_output);
    out << "i,j\n";
    for (const auto& [i, j] : model.true_edges)
      out << (i + 1) << ',' << (j + 1) << '\n';
  }
  std::cout << "wrote " << opt.n << "x" << opt.p << " sample to " << opt.output
            << " (" << model.true_edges.size() << " true edges)\n";
  return 0;
}

struct EstimateOptions {
  std::string input, edges, method = "concord", output_prefix = "estimate";
  std::string delimiter = ",";
  bool mvp = false, no_header = false;
  double eps = 1e-8;
  int max_iter = 10000;
};

int run_estimate(const EstimateOptions& opt) {
  const LoadResult loaded =
      load_matrix(opt.input, opt.delimiter.at(0), !opt.no_header);
  const Matrix& x = loaded.data.values;
  const int n = loaded.data.n();
  const int p = loaded.data.p();
  Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix s = centered.transpose() * centered / static_cast<double>(n - 1);

  const EdgeStructure structure = EdgeStructure::from_edges(p, read_edges(opt.edges));
  PrecisionEstimate est;
  if (opt.method == "concord")
    est = concord_estimate(s, structure, opt.eps, opt.max_iter);
  else if (opt.method == "gaussian")
    est = gaussian_estimate(s, structure, opt.eps, opt.max_iter);
  else
    throw std::runtime_error("--method must be concord or gaussian");

  write_matrix_csv(est.omega_hat, opt.output_prefix + "_omega.csv");
  write_matrix_csv(est.sigma_hat, opt.output_prefix + "_sigma.csv");
  std::cout << "method=" << opt.method << " converged=" << est.converged
            << " iterations=" << est.iterations << "\n";
  if (opt.mvp) {
    const Vector w = mvp_weights(est.omega_hat);
    Matrix wm = w;
    write_matrix_csv(wm, opt.output_prefix + "_weights.csv");
    std::cout << "wrote portfolio weights (sum="
              << format_double(w.sum()) << ")\n";
  }
  return 0;
}

json sweep_row_json(const AucSweepRow& row) {
  return json{{"structure", row.structure},
              {"method", method_name(row.method)},
              {"median_auc", row.median_auc},
              {"median_auc_fpr10", row.median_auc_capped},
              {"median_wall_seconds", row.median_wall_seconds},
              {"degenerate", row.degenerate}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-correlation screening toolkit"};
  app.require_subcommand(1);

  ScreenOptions sc;
  auto* screen = app.add_subcommand("screen", "Screen partial correlations");
  screen->add_option("--input", sc.input, "Input CSV (rows = samples)")
      ->required();
  screen->add_option("--output", sc.output, "Output edge CSV")->required();
  screen->add_option("--method", sc.method,
                     "parsec-base|parsec-scalable|pcs-hub");
  screen->add_option("--control", sc.control,
                     "fwer|kfwer|fdr-bh|fdr-by|pfdr|rho");
  screen->add_option("--alpha", sc.alpha, "Error budget");
  screen->add_option("--k", sc.k, "Exceedance tolerance (kfwer)");
  screen->add_option("--rho", sc.rho, "Fixed screening level (control=rho)");
  screen->add_option("--threads", sc.threads,
                     "Worker threads (default: PARSEC_THREADS or 1)");
  screen->add_option("--symmetrize", sc.symmetrize_mode,
                     "upper|min-abs|max-abs|average");
  screen->add_option("--delimiter", sc.delimiter, "Input field delimiter");
  screen->add_flag("--low-memory", sc.low_memory,
                   "Stream rows; never materialize the p x p matrix");
  screen->add_flag("--no-header", sc.no_header, "Input has no header row");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic data");
  simulate
      ->add_option("--structure", sim.structure,
                   "diag|ar-block|block|star-connected|star-disconnected")
      ->required();
  simulate->add_option("--n", sim.n, "Samples")->required();
  simulate->add_option("--p", sim.p, "Features")->required();
  simulate->add_option("--a", sim.a, "Block size");
  simulate->add_option("--d", sim.d, "Autoregressive order");
  simulate->add_option("--phi1", sim.phi1, "First-lag coefficient");
  simulate->add_option("--rho", sim.rho, "Within-block correlation");
  simulate->add_option("--k-stars", sim.k_stars, "Number of stars");
  simulate->add_option("--e", sim.e, "Leaves per star");
  simulate->add_option("--c", sim.c, "Hub-leaf inverse-covariance entry");
  simulate->add_option("--dist", sim.dist, "gaussian|t");
  simulate->add_option("--nu", sim.nu, "Degrees of freedom (t)");
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--output", sim.output, "Output data CSV")->required();
  simulate->add_option("--edges-output", sim.edges_output,
                       "Optional true-edge CSV");

  auto* experiment = app.add_subcommand("experiment", "Run a study");
  experiment->require_subcommand(1);
  int ex_n = 30, ex_p = 100, ex_reps = 200, ex_threads = default_threads();
  std::uint64_t ex_seed = 1;
  double ex_alpha = 0.05;
  std::int64_t ex_k = -1;
  std::string ex_output = "report.csv", ex_json, ex_methods = "parsec-scalable";
  std::string ex_rho_grid = "0.5,0.6,0.7,0.8,0.9,0.95,0.99";
  SimulateOptions ex_struct;  // reuse the structure/dist fields

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--n", ex_n, "Samples");
    cmd->add_option("--p", ex_p, "Features");
    cmd->add_option("--reps", ex_reps, "Replications");
    cmd->add_option("--seed", ex_seed, "RNG seed");
    cmd->add_option("--threads", ex_threads, "Worker threads");
    cmd->add_option("--output", ex_output, "Report CSV path");
    cmd->add_option("--json", ex_json, "Optional JSON summary path");
  };
  auto add_structure = [&](CLI::App* cmd) {
    cmd->add_option("--structure", ex_struct.structure, "Structure kind");
    cmd->add_option("--a", ex_struct.a, "Block size");
    cmd->add_option("--d", ex_struct.d, "Autoregressive order");
    cmd->add_option("--phi1", ex_struct.phi1, "First-lag coefficient");
    cmd->add_option("--rho", ex_struct.rho, "Within-block correlation");
    cmd->add_option("--k-stars", ex_struct.k_stars, "Number of stars");
    cmd->add_option("--e", ex_struct.e, "Leaves per star");
    cmd->add_option("--c", ex_struct.c, "Hub-leaf entry");
    cmd->add_option("--dist", ex_struct.dist, "gaussian|t");
    cmd->add_option("--nu", ex_struct.nu, "Degrees of freedom (t)");
    cmd->add_option("--methods", ex_methods, "Comma-separated method list");
  };

  auto* ex_null = experiment->add_subcommand(
      "null-calibration", "Error control under the diagonal model");
  add_common(ex_null);
  ex_null->add_option("--alpha", ex_alpha, "Error budget");
  ex_null->add_option("--k", ex_k,
                      "Exceedance tolerance; default 5% of p(p-1)/2");

  auto* ex_auc = experiment->add_subcommand("auc-sweep",
                                            "Median AUC for one structure");
  add_common(ex_auc);
  add_structure(ex_auc);

  auto* ex_phase = experiment->add_subcommand(
      "phase-transition", "Per-feature false-discovery curve");
  add_common(ex_phase);
  ex_phase->add_option("--rho-grid", ex_rho_grid,
                       "Comma-separated screening levels");

  auto* ex_coef = experiment->add_subcommand(
      "coef-dist", "Coefficient values by true-edge status");
  add_common(ex_coef);
  add_structure(ex_coef);

  EstimateOptions est;
  auto* estimate =
      app.add_subcommand("estimate", "Structured precision estimation");
  estimate->add_option("--input", est.input, "Input data CSV")->required();
  estimate->add_option("--edges", est.edges, "Edge CSV from `screen`")
      ->required();
  estimate->add_option("--method", est.method, "concord|gaussian");
  estimate->add_option("--output-prefix", est.output_prefix,
                       "Prefix for *_omega.csv / *_sigma.csv");
  estimate->add_option("--eps", est.eps, "Convergence tolerance");
  estimate->add_option("--max-iter", est.max_iter, "Sweep limit");
  estimate->add_option("--delimiter", est.delimiter, "Input field delimiter");
  estimate->add_flag("--mvp", est.mvp, "Also emit portfolio weights");
  estimate->add_flag("--no-header", est.no_header, "Input has no header row");

  CLI11_PARSE(app, argc, argv);

  try {
    if (screen->parsed()) return run_screen(sc);
    if (simulate->parsed()) return run_simulate(sim);
    if (estimate->parsed()) return run_estimate(est);

    std::vector<Method> methods;
    for (const auto& name : split_list(ex_methods))
      methods.push_back(parse_method(name));

    if (ex_null->parsed()) {
      std::vector<ErrorControlSpec> specs;
      specs.push_back({ControlKind::FWER, ex_alpha, 0, 0.0});
      const std::int64_t pairs =
          static_cast<std::int64_t>(ex_p) * (ex_p - 1) / 2;
      const std::int64_t k = ex_k >= 0
                                 ? ex_k
                                 : static_cast<std::int64_t>(0.05 * pairs);
      specs.push_back({ControlKind::KFWER, ex_alpha, k, 0.0});
      specs.push_back({ControlKind::FDR_BH, ex_alpha, 0, 0.0});
      specs.push_back({ControlKind::FDR_BY, ex_alpha, 0, 0.0});
      specs.push_back({ControlKind::PFDR, ex_alpha, 0, 0.0});
      const auto report =
          null_calibration(ex_n, ex_p, ex_reps, specs, ex_seed, ex_threads);
      write_null_calibration_csv(report, ex_output);
      if (!ex_json.empty()) write_null_calibration_json(report, ex_json);
      std::cout << "wrote " << ex_output << "\n";
      return 0;
    }
    if (ex_phase->parsed()) {
      std::vector<double> grid;
      for (const auto& tok : split_list(ex_rho_grid))
        grid.push_back(std::stod(tok));
      const auto report = phase_transition_curve(ex_n, ex_p, ex_reps, grid,
                                                 ex_seed, ex_threads);
      write_phase_transition_csv(report, ex_output);
      if (!ex_json.empty()) {
        json j{{"n", report.n}, {"p", report.p}, {"reps", report.reps},
               {"rho", report.rho_grid},
               {"empirical_median", report.empirical_median},
               {"approximation", report.approximation}};
        std::ofstream(ex_json) << j.dump(2) << "\n";
      }
      std::cout << "wrote " << ex_output << "\n";
      return 0;
    }
    if (ex_auc->parsed() || ex_coef->parsed()) {
      StructureSpec spec;
      spec.kind = parse_structure_kind(ex_struct.structure);
      spec.p = ex_p;
      spec.a = ex_struct.a;
      spec.d = ex_struct.d;
      spec.phi1 = ex_struct.phi1;
      spec.rho = ex_struct.rho;
      spec.k_stars = ex_struct.k_stars;
      spec.e = ex_struct.e;
      spec.c = ex_struct.c;
      if (ex_auc->parsed()) {
        SweepSetting setting;
        setting.label = ex_struct.structure;
        setting.structure = spec;
        setting.n = ex_n;
        setting.student_t = ex_struct.dist == "t";
        setting.nu = ex_struct.nu;
        const auto report =
            auc_sweep({setting}, ex_reps, methods, ex_seed, ex_threads);
        write_auc_sweep_csv(report, ex_output);
        if (!ex_json.empty()) {
          json rows = json::array();
          for (const auto& row : report.rows) rows.push_back(sweep_row_json(row));
          json j{{"reps", report.reps}, {"seed", report.seed}, {"rows", rows}};
          std::ofstream(ex_json) << j.dump(2) << "\n";
        }
      } else {
        const auto report =
            coef_distribution(spec, ex_n, ex_reps, methods, ex_seed, ex_threads);
        write_coef_distribution_csv(report, ex_output);
      }
      std::cout << "wrote " << ex_output << "\n";
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
