#include "parsec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "parsec/core.hpp"
#include "parsec/data.hpp"
#include "parsec/metrics.hpp"
#include "parsec/pcs_hub.hpp"
#include "parsec/uscore.hpp"

namespace parsec {

std::string method_name(Method m) {
  switch (m) {
    case Method::ParsecBase:
      return "parsec-base";
    case Method::ParsecScalable:
      return "parsec-scalable";
    case Method::PcsHub:
      return "pcs-hub";
  }
  return "?";
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

namespace {

std::string control_label(const ErrorControlSpec& spec) {
  switch (spec.kind) {
    case ControlKind::FWER:
      return "fwer";
    case ControlKind::KFWER:
      return "kfwer(k=" + std::to_string(spec.k) + ")";
    case ControlKind::FDR_BH:
      return "fdr-bh";
    case ControlKind::FDR_BY:
      return "fdr-by";
    case ControlKind::PFDR:
      return "pfdr";
    case ControlKind::RawLevel:
      return "rho=" + format_double(spec.rho);
  }
  return "?";
}

Matrix estimate_matrix(Method method, const Matrix& u) {
  switch (method) {
    case Method::ParsecBase:
      return symmetrize(parsec_base(u), SymmetrizeMode::UpperTriangle);
    case Method::ParsecScalable:
      return symmetrize(parsec_scalable(u), SymmetrizeMode::UpperTriangle);
    case Method::PcsHub:
      return pcs_hub_matrix(u);
  }
  throw std::invalid_argument("unknown method");
}

std::int64_t count_at_level(const Matrix& h, double rho) {
  const int p = static_cast<int>(h.rows());
  std::int64_t count = 0;
  for (int j = 0; j < p; ++j)
    for (int k = j + 1; k < p; ++k)
      if (std::abs(h(j, k)) >= rho) ++count;
  return count;
}

}  // namespace

NullCalibrationReport null_calibration(
    int n, int p, int reps, const std::vector<ErrorControlSpec>& specs,
    std::uint64_t seed, int threads) {
  NullCalibrationReport report;
  report.n = n;
  report.p = p;
  report.reps = reps;
  report.seed = seed;

  StructureSpec null_spec;
  null_spec.kind = StructureKind::Diagonal;
  null_spec.p = p;
  const CovarianceModel model = build_structure(null_spec);

  for (const auto& spec : specs) {
    CalibrationOutcome outcome;
    outcome.spec = spec;
    outcome.label = control_label(spec);
    if (spec.kind == ControlKind::FWER || spec.kind == ControlKind::KFWER) {
      outcome.level = fwer_kfwer_level(spec, n, p).rho;
    } else if (spec.kind == ControlKind::RawLevel) {
      outcome.level = spec.rho;
    }
    outcome.discoveries.assign(reps, 0);
    outcome.pcs_discoveries.assign(reps, 0);
    report.outcomes.push_back(std::move(outcome));
  }

  const bool need_pcs =
      std::any_of(specs.begin(), specs.end(), [](const ErrorControlSpec& s) {
        return s.kind == ControlKind::FWER || s.kind == ControlKind::KFWER ||
               s.kind == ControlKind::RawLevel;
      });

  parallel_for(reps, threads, [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      const Matrix x = sample_gaussian(model, n, derive_seed(seed, r));
      const Matrix u = uscores(x);
      const Matrix h =
          symmetrize(parsec_scalable(u), SymmetrizeMode::UpperTriangle);
      Matrix pcs;
      if (need_pcs) pcs = pcs_hub_matrix(u);
      for (size_t s = 0; s < report.outcomes.size(); ++s) {
        auto& outcome = report.outcomes[s];
        switch (outcome.spec.kind) {
          case ControlKind::FWER:
          case ControlKind::KFWER:
          case ControlKind::RawLevel:
            outcome.discoveries[r] = count_at_level(h, outcome.level);
            outcome.pcs_discoveries[r] = count_at_level(pcs, outcome.level);
            break;
          case ControlKind::FDR_BH:
          case ControlKind::FDR_BY:
            outcome.discoveries[r] = static_cast<std::int64_t>(
                fdr_screen(h, outcome.spec.kind, outcome.spec.alpha, n)
                    .edges.size());
            break;
          case ControlKind::PFDR:
            outcome.discoveries[r] = static_cast<std::int64_t>(
                pfdr_screen(h, outcome.spec.alpha, n).edges.size());
            break;
        }
      }
    }
  });

  for (auto& outcome : report.outcomes) {
    const std::int64_t k =
        outcome.spec.kind == ControlKind::KFWER ? outcome.spec.k : 0;
    std::int64_t exceed = 0, pcs_exceed = 0, nonzero = 0;
    for (int r = 0; r < reps; ++r) {
      if (outcome.discoveries[r] > k) ++exceed;
      if (outcome.pcs_discoveries[r] > k) ++pcs_exceed;
      if (outcome.discoveries[r] > 0) ++nonzero;
    }
    outcome.exceed_fraction = static_cast<double>(exceed) / reps;
    outcome.pcs_exceed_fraction = static_cast<double>(pcs_exceed) / reps;
    // Every discovery is false under the diagonal model, so the per-rep FDP
    // is the indicator of any discovery at all.
    outcome.mean_fdp = static_cast<double>(nonzero) / reps;
  }
  return report;
}

PhaseTransitionReport phase_transition_curve(int n, int p, int reps,
                                             const std::vector<double>& rho_grid,
                                             std::uint64_t seed, int threads) {
  PhaseTransitionReport report;
  report.n = n;
  report.p = p;
  report.reps = reps;
  report.rho_grid = rho_grid;
  report.approximation.resize(rho_grid.size());
  for (size_t g = 0; g < rho_grid.size(); ++g)
    report.approximation[g] =
        -std::expm1((p - 1) * std::log1p(-spherical_cap_p0(rho_grid[g], n)));

  StructureSpec null_spec;
  null_spec.kind = StructureKind::Diagonal;
  null_spec.p = p;
  const CovarianceModel model = build_structure(null_spec);

  // fractions[r][g] = share of features with at least one discovery at level
  // rho_grid[g] in replication r.
  std::vector<std::vector<double>> fractions(
      reps, std::vector<double>(rho_grid.size(), 0.0));
  parallel_for(reps, threads, [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      const Matrix x = sample_gaussian(model, n, derive_seed(seed, r));
      const Matrix h = symmetrize(parsec_scalable(uscores(x)),
                                  SymmetrizeMode::UpperTriangle);
      Vector row_max = Vector::Zero(p);
      for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k)
          if (k != j) row_max(j) = std::max(row_max(j), std::abs(h(j, k)));
      for (size_t g = 0; g < rho_grid.size(); ++g) {
        int hit = 0;
        for (int j = 0; j < p; ++j)
          if (row_max(j) >= rho_grid[g]) ++hit;
        fractions[r][g] = static_cast<double>(hit) / p;
      }
    }
  });

  report.empirical_median.resize(rho_grid.size());
  for (size_t g = 0; g < rho_grid.size(); ++g) {
    std::vector<double> col(reps);
    for (int r = 0; r < reps; ++r) col[r] = fractions[r][g];
    report.empirical_median[g] = median(col);
  }
  return report;
}

AucSweepReport auc_sweep(const std::vector<SweepSetting>& settings, int reps,
                         const std::vector<Method>& methods,
                         std::uint64_t seed, int threads) {
  AucSweepReport report;
  report.reps = reps;
  report.seed = seed;

  for (size_t s = 0; s < settings.size(); ++s) {
    const auto& setting = settings[s];
    const CovarianceModel model = build_structure(setting.structure);
    const bool degenerate = model.true_edges.empty();
    for (Method method : methods) {
      AucSweepRow row;
      row.structure = setting.label;
      row.method = method;
      row.degenerate = degenerate;
      if (!degenerate) {
        std::vector<double> aucs(reps), aucs_capped(reps), walls(reps);
        parallel_for(reps, threads, [&](int begin, int end) {
          for (int r = begin; r < end; ++r) {
            const std::uint64_t rep_seed =
                derive_seed(seed, s * static_cast<std::uint64_t>(reps) + r);
            const Matrix x =
                setting.student_t
                    ? sample_mvt(model, setting.nu, setting.n, rep_seed)
                    : sample_gaussian(model, setting.n, rep_seed);
            const Matrix u = uscores(x);
            const auto t0 = std::chrono::steady_clock::now();
            const Matrix h = estimate_matrix(method, u);
            const auto t1 = std::chrono::steady_clock::now();
            walls[r] = std::chrono::duration<double>(t1 - t0).count();
            aucs[r] = auc(h, model.true_edges);
            aucs_capped[r] = auc(h, model.true_edges, 0.1);
          }
        });
        row.median_auc = median(aucs);
        row.median_auc_capped = median(aucs_capped);
        row.median_wall_seconds = median(walls);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

CoefDistributionReport coef_distribution(const StructureSpec& structure, int n,
                                         int reps,
                                         const std::vector<Method>& methods,
                                         std::uint64_t seed, int threads) {
  CoefDistributionReport report;
  report.methods = methods;
  const CovarianceModel model = build_structure(structure);
  std::set<std::pair<int, int>> truth(model.true_edges.begin(),
                                      model.true_edges.end());
  const int p = structure.p;

  // values[m][r] collected per replication, then pooled in order.
  std::vector<std::vector<std::vector<std::vector<double>>>> per_rep(
      methods.size(),
      std::vector<std::vector<std::vector<double>>>(
          reps, std::vector<std::vector<double>>(2)));
  parallel_for(reps, threads, [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      const Matrix x = sample_gaussian(model, n, derive_seed(seed, r));
      const Matrix u = uscores(x);
      for (size_t m = 0; m < methods.size(); ++m) {
        const Matrix h = estimate_matrix(methods[m], u);
        for (int j = 0; j < p; ++j)
          for (int k = j + 1; k < p; ++k)
            per_rep[m][r][truth.count({j, k}) ? 1 : 0].push_back(h(j, k));
      }
    }
  });

  report.values.assign(methods.size(),
                       std::vector<std::vector<double>>(2));
  for (size_t m = 0; m < methods.size(); ++m)
    for (int r = 0; r < reps; ++r)
      for (int b = 0; b < 2; ++b)
        report.values[m][b].insert(report.values[m][b].end(),
                                   per_rep[m][r][b].begin(),
                                   per_rep[m][r][b].end());
  return report;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

void write_null_calibration_csv(const NullCalibrationReport& r,
                                const std::string& path) {
  auto out = open_out(path);
  out << "control,alpha,k,level,exceed_fraction,pcs_exceed_fraction,"
         "mean_fdp,mean_discoveries\n";
  for (const auto& o : r.outcomes) {
    double mean_disc = 0.0;
    for (auto d : o.discoveries) mean_disc += static_cast<double>(d);
    mean_disc /= std::max<size_t>(1, o.discoveries.size());
    out << o.label << ',' << format_double(o.spec.alpha) << ',' << o.spec.k
        << ',' << format_double(o.level) << ','
        << format_double(o.exceed_fraction) << ','
        << format_double(o.pcs_exceed_fraction) << ','
        << format_double(o.mean_fdp) << ',' << format_double(mean_disc)
        << '\n';
  }
}

void write_null_calibration_json(const NullCalibrationReport& r,
                                 const std::string& path) {
  auto out = open_out(path);
  out << "{\n  \"n\": " << r.n << ",\n  \"p\": " << r.p
      << ",\n  \"reps\": " << r.reps << ",\n  \"seed\": " << r.seed
      << ",\n  \"outcomes\": [\n";
  for (size_t i = 0; i < r.outcomes.size(); ++i) {
    const auto& o = r.outcomes[i];
    out << "    {\"control\": \"" << o.label
        << "\", \"alpha\": " << format_double(o.spec.alpha)
        << ", \"k\": " << o.spec.k
        << ", \"level\": " << format_double(o.level)
        << ", \"exceed_fraction\": " << format_double(o.exceed_fraction)
        << ", \"pcs_exceed_fraction\": "
        << format_double(o.pcs_exceed_fraction)
        << ", \"mean_fdp\": " << format_double(o.mean_fdp) << "}"
        << (i + 1 < r.outcomes.size() ? "," : "") << '\n';
  }
  out << "  ]\n}\n";
}

void write_phase_transition_csv(const PhaseTransitionReport& r,
                                const std::string& path) {
  auto out = open_out(path);
  out << "rho,empirical_median,approximation\n";
  for (size_t g = 0; g < r.rho_grid.size(); ++g)
    out << format_double(r.rho_grid[g]) << ','
        << format_double(r.empirical_median[g]) << ','
        << format_double(r.approximation[g]) << '\n';
}

void write_auc_sweep_csv(const AucSweepReport& r, const std::string& path) {
  auto out = open_out(path);
  out << "structure,method,median_auc,median_auc_fpr10,median_wall_seconds,"
         "degenerate\n";
  for (const auto& row : r.rows)
    out << row.structure << ',' << method_name(row.method) << ','
        << format_double(row.median_auc) << ','
        << format_double(row.median_auc_capped) << ','
        << format_double(row.median_wall_seconds) << ','
        << (row.degenerate ? 1 : 0) << '\n';
}

void write_coef_distribution_csv(const CoefDistributionReport& r,
                                 const std::string& path) {
  auto out = open_out(path);
  out << "method,group,value\n";
  for (size_t m = 0; m < r.methods.size(); ++m)
    for (int b = 0; b < 2; ++b)
      for (double v : r.values[m][b])
        out << method_name(r.methods[m]) << ','
            << (b ? "edge" : "null") << ',' << format_double(v) << '\n';
}

}  // namespace parsec
