#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parsec/inference.hpp"
#include "parsec/simgen.hpp"
#include "parsec/types.hpp"

namespace parsec {

enum class Method { ParsecBase, ParsecScalable, PcsHub };

std::string method_name(Method m);

/// Calibration of one error-control rule in the diagonal-covariance null
/// model, aggregated over replications.
struct CalibrationOutcome {
  ErrorControlSpec spec;
  std::string label;
  double level = 0.0;  // screening level (k-FWER family; 0 for FDR family)
  std::vector<std::int64_t> discoveries;       // per replication
  std::vector<std::int64_t> pcs_discoveries;   // companion run (k-FWER only)
  double exceed_fraction = 0.0;      // fraction of reps with N > k
  double pcs_exceed_fraction = 0.0;  // same for the PCS-Hub companion
  double mean_fdp = 0.0;             // all discoveries are false in the null
};

struct NullCalibrationReport {
  int n = 0;
  int p = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<CalibrationOutcome> outcomes;
};

NullCalibrationReport null_calibration(int n, int p, int reps,
                                       const std::vector<ErrorControlSpec>& specs,
                                       std::uint64_t seed, int threads = 1);

/// Per-feature false-discovery proportion versus the screening level, with
/// the independence-approximation curve 1 - (1 - P0)^{p-1}.
struct PhaseTransitionReport {
  int n = 0;
  int p = 0;
  int reps = 0;
  std::vector<double> rho_grid;
  std::vector<double> empirical_median;
  std::vector<double> approximation;
};

PhaseTransitionReport phase_transition_curve(int n, int p, int reps,
                                             const std::vector<double>& rho_grid,
                                             std::uint64_t seed,
                                             int threads = 1);

struct AucSweepRow {
  std::string structure;
  Method method = Method::ParsecScalable;
  double median_auc = 0.0;
  double median_auc_capped = 0.0;  // FPR < 0.1
  double median_wall_seconds = 0.0;
  bool degenerate = false;  // structure has no edges; AUC undefined
};

struct AucSweepReport {
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<AucSweepRow> rows;
};

struct SweepSetting {
  std::string label;
  StructureSpec structure;
  int n = 0;
  bool student_t = false;
  double nu = 3.0;
};

AucSweepReport auc_sweep(const std::vector<SweepSetting>& settings, int reps,
                         const std::vector<Method>& methods,
                         std::uint64_t seed, int threads = 1);

/// Pooled off-diagonal coefficient values split by true-edge/null status.
struct CoefDistributionReport {
  std::vector<Method> methods;
  // values[m][0] = null entries, values[m][1] = true-edge entries
  std::vector<std::vector<std::vector<double>>> values;
};

CoefDistributionReport coef_distribution(const StructureSpec& structure, int n,
                                         int reps,
                                         const std::vector<Method>& methods,
                                         std::uint64_t seed, int threads = 1);

void write_null_calibration_csv(const NullCalibrationReport& r,
                                const std::string& path);
void write_null_calibration_json(const NullCalibrationReport& r,
                                 const std::string& path);
void write_phase_transition_csv(const PhaseTransitionReport& r,
                                const std::string& path);
void write_auc_sweep_csv(const AucSweepReport& r, const std::string& path);
void write_coef_distribution_csv(const CoefDistributionReport& r,
                                 const std::string& path);

double median(std::vector<double> v);

}  // namespace parsec
