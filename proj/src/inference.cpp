#include "parsec/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace parsec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// After the substitution u = sin(theta) the cap integral becomes
// a_n * integral of cos^{n-3}(theta) over [asin(rho), pi/2], which is smooth
// for every n >= 3 (the raw integrand has an endpoint singularity at n = 3).
double cap_integrand(double theta, int n) {
  return std::pow(std::cos(theta), n - 3);
}

double simpson(double a, double b, double fa, double fm, double fb, int n) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, int n) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = cap_integrand(lm, n);
  const double frm = cap_integrand(rm, n);
  const double left = simpson(a, m, fa, flm, fm, n);
  const double right = simpson(m, b, fm, frm, fb, n);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, n) +
         adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, n);
}

// Regularized lower incomplete gamma P(a, x): series expansion for x < a + 1,
// Lentz continued fraction for the upper tail otherwise.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_pre = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int i = 1; i < 100000; ++i) {
      term *= x / (a + i);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::min(1.0, sum * std::exp(log_pre));
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_pre) * h);
}

}  // namespace

double spherical_cap_a(int n) {
  if (n < 3) throw std::invalid_argument("cap constant requires n >= 3");
  return 2.0 * std::exp(std::lgamma(0.5 * (n - 1)) -
                        std::lgamma(0.5 * (n - 2))) /
         std::sqrt(kPi);
}

double spherical_cap_p0(double rho, int n) {
  if (n < 3) throw std::invalid_argument("cap probability requires n >= 3");
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("cap probability requires rho in [0, 1]");
  if (rho >= 1.0) return 0.0;
  const double a = std::asin(rho);
  const double b = 0.5 * kPi;
  const double fa = cap_integrand(a, n);
  const double fm = cap_integrand(0.5 * (a + b), n);
  const double fb = cap_integrand(b, n);
  const double whole = simpson(a, b, fa, fm, fb, n);
  // Relative tolerance: small caps (large rho, large n) still need full
  // significand accuracy because downstream level solvers divide by them.
  const double tol = 1e-13 * std::max(std::abs(whole), 1e-300);
  const double integral = adaptive_simpson(a, b, fa, fm, fb, whole, tol, 60, n);
  return std::min(1.0, std::max(0.0, spherical_cap_a(n) * integral));
}

double pvalue(double h, int n) {
  return spherical_cap_p0(std::min(std::abs(h), 1.0), n);
}

double solve_rho_for_p0(double target, int n) {
  if (!(target > 0.0) || target > 1.0)
    throw std::invalid_argument("cap inversion requires target in (0, 1]");
  double lo = 0.0, hi = 1.0;  // P0 is strictly decreasing: P0(0)=1, P0(1)=0
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spherical_cap_p0(mid, n) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
  }
  // The upper endpoint satisfies P0(hi) <= target, so any error budget built
  // on the returned level is met rather than overshot.
  return hi;
}

double discovery_rate(double rho, int n, std::int64_t p) {
  return 0.5 * static_cast<double>(p) * static_cast<double>(p - 1) *
         spherical_cap_p0(rho, n);
}

double poisson_tail_gt(double eta, std::int64_t k) {
  if (k < 0) return 1.0;
  if (eta <= 0.0) return 0.0;
  if (eta <= 1e5) {
    // Direct CDF summation; every term exp(-eta + i log eta - lgamma(i+1))
    // lies in [0, 1], so a plain long double accumulation is stable.
    const double log_eta = std::log(eta);
    long double cdf = 0.0L;
    for (std::int64_t i = 0; i <= k; ++i) {
      cdf += std::exp(-eta + i * log_eta - std::lgamma(i + 1.0));
    }
    return static_cast<double>(std::max(0.0L, 1.0L - cdf));
  }
  // Very large rates: P(X > k) = P(k + 1, eta), the regularized lower
  // incomplete gamma function, evaluated without any term-by-term summation.
  return gamma_p(static_cast<double>(k) + 1.0, eta);
}

LevelResult fwer_kfwer_level(const ErrorControlSpec& spec, int n,
                             std::int64_t p) {
  if (spec.kind != ControlKind::FWER && spec.kind != ControlKind::KFWER)
    throw std::invalid_argument("level solver expects a (k-)FWER spec");
  if (!(spec.alpha > 0.0) || spec.alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::int64_t k = spec.kind == ControlKind::FWER ? 0 : spec.k;
  if (k < 0) throw std::invalid_argument("k must be nonnegative");

  double eta_star;
  if (k == 0) {
    // P(N > 0) = 1 - exp(-eta) <= alpha.
    eta_star = -std::log1p(-spec.alpha);
  } else {
    // P(Poisson(eta) > k) is increasing in eta; bisect for the supremum.
    double lo = 0.0, hi = static_cast<double>(k) + 1.0;
    while (poisson_tail_gt(hi, k) <= spec.alpha) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (poisson_tail_gt(mid, k) <= spec.alpha)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-10 * std::max(1.0, lo)) break;
    }
    eta_star = lo;
  }

  LevelResult result;
  const double pairs = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
  const double target = eta_star / pairs;
  if (target >= 1.0) {
    // Even rho = 0 satisfies the budget: the control does not bind.
    result.rho = 0.0;
    result.eta = pairs;
    result.vacuous = true;
    return result;
  }
  result.rho = solve_rho_for_p0(target, n);
  result.eta = discovery_rate(result.rho, n, p);
  return result;
}

double achieved_error(double rho, int n, std::int64_t p, std::int64_t k) {
  return poisson_tail_gt(discovery_rate(rho, n, p), k);
}

std::int64_t implied_k(double rho, double alpha, int n, std::int64_t p) {
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1)");
  const double eta = discovery_rate(rho, n, p);
  std::int64_t lo = 0;
  if (poisson_tail_gt(eta, lo) <= alpha) return 0;
  std::int64_t hi = 1;
  while (poisson_tail_gt(eta, hi) > alpha) hi *= 2;
  // Tail is decreasing in k; find the smallest admissible k.
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (poisson_tail_gt(eta, mid) <= alpha)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

ScreenResult threshold_screen(const Matrix& h_sym, double rho, int n) {
  const int p = static_cast<int>(h_sym.rows());
  ScreenResult result;
  result.level = rho;
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const double v = h_sym(j, k);
      if (std::abs(v) >= rho)
        result.edges.push_back({j, k, v, pvalue(v, n)});
    }
  }
  sort_edges(result.edges);
  return result;
}

namespace {

// Iterative step-up rejection over the candidate p-values: starting from the
// total pair count, repeatedly shrink the rejection count to the number of
// p-values at or below count * alpha / m0 until it stabilizes. Equivalent to
// the classical step-up procedure over all pairs, but only the candidates
// surviving the alpha-level pre-screen ever need their p-value evaluated.
// `pfdr` additionally multiplies alpha by the probability that the Poisson
// discovery count is non-zero at the current level.
ScreenResult fdr_iterate(const EdgeSet& cand, std::int64_t p, double alpha,
                         double m0_factor, int n, bool pfdr) {
  const double m = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
  const double m0 = m * m0_factor;

  std::vector<double> pv(cand.size());
  for (size_t i = 0; i < cand.size(); ++i) pv[i] = cand[i].p_value;
  std::sort(pv.begin(), pv.end());

  double count = m;
  double factor = 1.0;
  double thr = 0.0;
  for (int it = 0; it < 200; ++it) {
    thr = std::min(alpha, count * alpha * factor / m0);
    const double next = static_cast<double>(
        std::upper_bound(pv.begin(), pv.end(), thr) - pv.begin());
    double next_factor = factor;
    if (pfdr) next_factor = -std::expm1(-m * thr);
    if (next == count && next_factor == factor) break;
    count = next;
    factor = next_factor;
    if (count == 0.0 && !pfdr) break;
  }

  ScreenResult result;
  if (count <= 0.0) {
    result.level = 1.0;
    return result;
  }
  result.level = solve_rho_for_p0(std::max(thr, 1e-300), n);
  for (const auto& c : cand)
    if (c.p_value <= thr) result.edges.push_back(c);
  sort_edges(result.edges);
  return result;
}

double by_factor(std::int64_t p) {
  const std::int64_t m = p * (p - 1) / 2;
  double harmonic = 0.0;
  for (std::int64_t i = m; i >= 1; --i)
    harmonic += 1.0 / static_cast<double>(i);
  return harmonic;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

double fdr_prescreen_level(double alpha, int n) {
  check_alpha(alpha);
  return solve_rho_for_p0(alpha, n);
}

ScreenResult fdr_screen_candidates(const EdgeSet& candidates, std::int64_t p,
                                   ControlKind kind, double alpha, int n) {
  if (kind != ControlKind::FDR_BH && kind != ControlKind::FDR_BY)
    throw std::invalid_argument("fdr screening expects FDR_BH or FDR_BY");
  check_alpha(alpha);
  const double m0_factor =
      kind == ControlKind::FDR_BY ? by_factor(p) : 1.0;
  return fdr_iterate(candidates, p, alpha, m0_factor, n, /*pfdr=*/false);
}

ScreenResult pfdr_screen_candidates(const EdgeSet& candidates, std::int64_t p,
                                    double alpha, int n) {
  check_alpha(alpha);
  return fdr_iterate(candidates, p, alpha, 1.0, n, /*pfdr=*/true);
}

ScreenResult fdr_screen(const Matrix& h_sym, ControlKind kind, double alpha,
                        int n) {
  const EdgeSet candidates =
      threshold_screen(h_sym, fdr_prescreen_level(alpha, n), n).edges;
  return fdr_screen_candidates(candidates, h_sym.rows(), kind, alpha, n);
}

ScreenResult pfdr_screen(const Matrix& h_sym, double alpha, int n) {
  const EdgeSet candidates =
      threshold_screen(h_sym, fdr_prescreen_level(alpha, n), n).edges;
  return pfdr_screen_candidates(candidates, h_sym.rows(), alpha, n);
}

}  // namespace parsec
