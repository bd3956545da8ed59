#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flockcert/delay_distribution.hpp"

namespace flockcert {

/// Threshold value used when the initial fluctuation is not constrained at all
/// (alpha = 0 with a positive margin, or no delay). Printed as `inf`.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct ConditionInput {
  double lambda;
  DelayDistribution dist;
  double alpha;
  /// Initial velocity fluctuation V(0).
  double v0;
  /// Initial dissipation D(0); when absent the bound D(0) <= V(0) is used.
  std::optional<double> d0;
  bool use_weak_form = false;
};

/// Margins of the three flocking conditions at one kappa.
///
/// m2_margin   = 1 - 2 lambda sqrt(M2)            (must be >= 0)
/// k_margin    = 1 - 2 lambda sqrt(K[kappa])      (must be > 0)
/// mexp_margin = kappa - 4 lambda sqrt(Mexp[kappa]) - alpha sqrt(2 L(0))  (> 0)
struct ConditionReport {
  double m2_margin = 0.0;
  std::optional<double> kappa_star;
  double k_margin_at_star = std::numeric_limits<double>::quiet_NaN();
  double mexp_margin_at_star = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
  /// 2 lambda (1 - 2 lambda sqrt(K)) at the reported kappa; the guaranteed
  /// decay rate when feasible. NaN when no kappa was evaluated.
  double omega = std::numeric_limits<double>::quiet_NaN();
  double l_zero = 0.0;
};

/// Validates the input (lambda > 0, alpha >= 0, 0 <= d0 <= v0, finiteness).
/// Throws DomainViolation.
void validate(const ConditionInput& input);

/// L(0) = V(0) + 2 lambda^2 M3/sqrt(M2) D(0), with D(0) replaced by V(0) in
/// the weak form or when D(0) is unknown. Equals V(0) when M2 = 0.
double l_zero(const ConditionInput& input);

/// 2 lambda^2 M3 / sqrt(M2), or 0 for the undelayed case.
double delay_correction(const DelayDistribution& dist, double lambda);

ConditionReport check_conditions(const ConditionInput& input, double kappa);

/// Admissible kappa range for the (2.6)-type constraint and the maximizer of
/// kappa - 4 lambda sqrt(Mexp[kappa]) on it.
struct KappaSearch {
  /// False when no kappa > 0 satisfies 2 lambda sqrt(K[kappa]) < 1.
  bool has_domain = false;
  /// True when the admissible range is unbounded (M2 = 0, no delay).
  bool unbounded = false;
  /// Largest kappa found with 2 lambda sqrt(K) < 1.
  double kappa_ceiling = 0.0;
  double kappa_best = 0.0;
  /// max of kappa - 4 lambda sqrt(Mexp[kappa]) over the admissible range.
  double best_margin = -std::numeric_limits<double>::infinity();
};

KappaSearch search_kappa(const DelayDistribution& dist, double lambda);

/// A kappa at which all conditions hold, maximizing the Mexp margin;
/// nullopt if none exists.
std::optional<double> find_kappa(const ConditionInput& input);

/// check_conditions at the best available kappa. `kappa_star` is set only when
/// feasible; margins are reported at the best kappa even when infeasible.
ConditionReport evaluate(const ConditionInput& input);

/// Closed-form critical V(0)/lambda^2 for exponential delays as a function of
/// lambda*mu, evaluated exactly as printed in the source derivation.
/// Throws DomainViolation unless 0 < lambda_mu <= (2 sqrt 2)^{-1} and alpha > 0.
double critical_v0_exponential_paper(double lambda_mu, double alpha);

/// Supremum of V(0)/lambda^2 for which a feasible kappa exists under the weak
/// form. Returns 0 if the moment condition fails, kUnbounded when no finite
/// threshold exists.
double critical_v0_numeric(const DelayDistribution& dist, double lambda, double alpha);

/// f_a(kappa_bar) = 4 lambda^2 K[kappa] for the linear distribution with
/// a = lambda A, expressed in the rescaled variable kappa_bar = kappa / lambda.
double linear_constraint(double a, double kappa_bar);

enum class CurveFamily { ExpFig1, UniformFig2, UniformFig3, LinearFig4 };

struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Figure data. Computed per grid point in parallel over `jobs` workers; the
/// result does not depend on `jobs`.
CurveTable critical_curve(CurveFamily family, const std::vector<double>& grid, double alpha,
                          unsigned jobs = 1);

/// Largest b - a with a feasible kappa for the uniform distribution, with
/// lambda = 1, V(0) = v0_over_lambda2. Returns 0 when even a vanishing
/// interval is infeasible.
double uniform_max_length(double a, double alpha, double v0_over_lambda2 = 1.0);

std::vector<double> default_grid(CurveFamily family);

CurveFamily parse_curve_family(const std::string& fig_id);
std::string curve_file_stem(CurveFamily family);

}  // namespace flockcert
