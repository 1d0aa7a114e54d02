#pragma once

#include <cstdint>

#include "parsec/types.hpp"

namespace parsec {

enum class ControlKind { FWER, KFWER, FDR_BH, FDR_BY, PFDR, RawLevel };

/// Tagged choice of screening rule.
struct ErrorControlSpec {
  ControlKind kind = ControlKind::FWER;
  double alpha = 0.05;   // unused for RawLevel
  std::int64_t k = 0;    // kFWER only
  double rho = 0.0;      // RawLevel only
};

/// Normalizing constant a_n = 2 Gamma((n-1)/2) / (sqrt(pi) Gamma((n-2)/2));
/// a_4 = 1 exactly.
double spherical_cap_a(int n);

/// Spherical cap probability P0(rho, n) = a_n * integral_rho^1
/// (1-u^2)^{(n-4)/2} du, evaluated by adaptive quadrature to < 1e-12
/// absolute error. Strictly decreasing in rho; P0(0,n)=1, P0(1,n)=0.
/// Requires n >= 3 and rho in [0, 1].
double spherical_cap_p0(double rho, int n);

/// Exact marginal p-value of a scaled partial-correlation statistic under the
/// diagonal-covariance null: P(|H_jk| > |h|) = P0(|h|, n).
double pvalue(double h, int n);

/// Inverts P0 by bisection: returns rho with |P0(rho,n) - target| < 1e-10.
/// Requires target in (0, 1].
double solve_rho_for_p0(double target, int n);

/// Poisson discovery rate eta_p(rho) = p(p-1) P0(rho, n) / 2.
double discovery_rate(double rho, int n, std::int64_t p);

/// Tail probability P(Poisson(eta) > k). Direct log-space summation for
/// rates up to 1e5, normal approximation with continuity correction above.
double poisson_tail_gt(double eta, std::int64_t k);

struct LevelResult {
  double rho = 0.0;
  double eta = 0.0;      // Poisson rate at the chosen level
  bool vacuous = false;  // control could not bind; rho clamped to 0
};

/// Smallest screening level rho such that P(Poisson(eta_p(rho)) > k) <= alpha
/// (k = 0 gives FWER). Solved by monotone bisection over the rate followed by
/// inversion of P0. When the implied cap probability exceeds 1 the control is
/// vacuous and rho = 0 is returned with the flag set.
LevelResult fwer_kfwer_level(const ErrorControlSpec& spec, int n,
                             std::int64_t p);

/// The implied k-FWER for a user-chosen level: P(Poisson(eta_p(rho)) > k).
double achieved_error(double rho, int n, std::int64_t p, std::int64_t k);

/// Smallest k with P(Poisson(eta_p(rho)) > k) <= alpha.
std::int64_t implied_k(double rho, double alpha, int n, std::int64_t p);

struct ScreenResult {
  double level = 1.0;  // final screening level rho
  EdgeSet edges;
};

/// Collects upper-triangle entries of a symmetric estimate with
/// |value| >= rho, with exact p-values. Used for raw-level and (k-)FWER
/// screening.
ScreenResult threshold_screen(const Matrix& h_sym, double rho, int n);

/// Iterative FDR procedure: pre-screens at the level solving alpha = P0,
/// then repeatedly tightens the BH/BY rejection level until the exceedance
/// count stabilizes. Equivalent to classical step-up BH/BY over all
/// p(p-1)/2 p-values. `kind` must be FDR_BH or FDR_BY.
ScreenResult fdr_screen(const Matrix& h_sym, ControlKind kind, double alpha,
                        int n);

/// FDR iteration run at the level alpha * (1 - exp(-eta)) with the Poisson
/// non-zero probability recomputed alongside the iteration; approximates
/// pFDR control via pFDR = FDR / P(N > 0).
ScreenResult pfdr_screen(const Matrix& h_sym, double alpha, int n);

/// The pre-screen level for the FDR family: no pair with p-value above alpha
/// can ever be rejected, so only candidates at or above this rho matter.
double fdr_prescreen_level(double alpha, int n);

/// FDR/pFDR iteration over pre-screened candidates (every pair with p-value
/// <= alpha, out of the p(p-1)/2 total). Lets callers that stream H row by
/// row run the same procedure without the dense matrix.
ScreenResult fdr_screen_candidates(const EdgeSet& candidates, std::int64_t p,
                                   ControlKind kind, double alpha, int n);
ScreenResult pfdr_screen_candidates(const EdgeSet& candidates, std::int64_t p,
                                    double alpha, int n);

}  // namespace parsec
