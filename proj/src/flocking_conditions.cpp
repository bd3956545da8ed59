#include "flockcert/flocking_conditions.hpp"

#include <algorithm>
#include <cmath>

#include "flockcert/errors.hpp"
#include "flockcert/scalar_search.hpp"

namespace flockcert {

namespace {

constexpr double kKappaTol = 1e-10;

bool k_constraint_holds(const DelayDistribution& dist, double lambda, double kappa) {
  try {
    return 2.0 * lambda * std::sqrt(k_moment(dist, kappa)) < 1.0;
  } catch (const DivergentMoment&) {
    return false;
  }
}

double mexp_gain(const DelayDistribution& dist, double lambda, double kappa) {
  try {
    return kappa - 4.0 * lambda * std::sqrt(exp_moment(dist, kappa));
  } catch (const DivergentMoment&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

void validate(const ConditionInput& input) {
  if (!(input.lambda > 0.0) || !std::isfinite(input.lambda))
    throw DomainViolation("lambda must be finite and > 0");
  if (!(input.alpha >= 0.0) || !std::isfinite(input.alpha))
    throw DomainViolation("alpha must be finite and >= 0");
  if (!(input.v0 >= 0.0) || !std::isfinite(input.v0))
    throw DomainViolation("V(0) must be finite and >= 0");
  if (input.d0) {
    const double d0 = *input.d0;
    if (!(d0 >= 0.0) || !std::isfinite(d0)) throw DomainViolation("D(0) must be finite and >= 0");
    // Constant initial datum and psi <= 1 force D(0) <= V(0).
    if (d0 > input.v0 * (1.0 + 1e-12)) throw DomainViolation("D(0) must not exceed V(0)");
  }
}

double delay_correction(const DelayDistribution& dist, double lambda) {
  const double m2 = moment(dist, 2);
  if (m2 == 0.0) return 0.0;
  return 2.0 * lambda * lambda * moment(dist, 3) / std::sqrt(m2);
}

double l_zero(const ConditionInput& input) {
  const double c = delay_correction(input.dist, input.lambda);
  if (input.use_weak_form || !input.d0) return (1.0 + c) * input.v0;
  return input.v0 + c * *input.d0;
}

ConditionReport check_conditions(const ConditionInput& input, double kappa) {
  validate(input);
  if (!(kappa > 0.0)) throw DomainViolation("kappa must be > 0");
  ConditionReport r;
  r.l_zero = l_zero(input);
  r.m2_margin = 1.0 - 2.0 * input.lambda * std::sqrt(moment(input.dist, 2));
  r.kappa_star = kappa;
  r.k_margin_at_star = 1.0 - 2.0 * input.lambda * std::sqrt(k_moment(input.dist, kappa));
  r.mexp_margin_at_star = kappa - 4.0 * input.lambda * std::sqrt(exp_moment(input.dist, kappa)) -
                          input.alpha * std::sqrt(2.0 * r.l_zero);
  r.feasible = r.m2_margin >= 0.0 && r.k_margin_at_star > 0.0 && r.mexp_margin_at_star > 0.0;
  r.omega = 2.0 * input.lambda * r.k_margin_at_star;
  return r;
}

KappaSearch search_kappa(const DelayDistribution& dist, double lambda) {
  KappaSearch s;
  const double m2 = moment(dist, 2);
  const double m3 = moment(dist, 3);
  const double lam2 = lambda * lambda;
  if (2.0 * lambda * std::sqrt(m2) > 1.0) return s;

  if (m2 == 0.0 && m3 == 0.0) {
    // No delay: K == 0 and Mexp == 1 for every kappa.
    s.has_domain = true;
    s.unbounded = true;
    s.kappa_ceiling = std::numeric_limits<double>::infinity();
    s.best_margin = std::numeric_limits<double>::infinity();
    return s;
  }

  // K[kappa] >= M2 + kappa M3 / 2 (all series terms are positive), so the
  // constraint 4 lambda^2 K < 1 can only hold below this value.
  double hi = (1.0 - 4.0 * lam2 * m2) / (2.0 * lam2 * m3);
  hi = std::min(hi, dist.convergence_limit());
  if (!(hi > 0.0)) return s;
  for (int guard = 0; guard < 64 && k_constraint_holds(dist, lambda, hi); ++guard) hi *= 2.0;

  const auto [lo, _] = search::bisect_boundary(
      [&](double k) { return k_constraint_holds(dist, lambda, k); }, 0.0, hi, 0.0);
  if (!(lo > 0.0)) return s;

  s.has_domain = true;
  s.kappa_ceiling = lo;
  s.kappa_best = search::golden_maximize([&](double k) { return mexp_gain(dist, lambda, k); },
                                         0.0, lo, kKappaTol);
  s.best_margin = mexp_gain(dist, lambda, s.kappa_best);
  return s;
}

namespace {

// Kappa used when the admissible range is unbounded: any kappa beyond
// 4 lambda + alpha sqrt(2 L0) works, take twice that value.
double unbounded_kappa(const ConditionInput& input) {
  return 2.0 * (4.0 * input.lambda + input.alpha * std::sqrt(2.0 * l_zero(input)));
}

}  // namespace

std::optional<double> find_kappa(const ConditionInput& input) {
  validate(input);
  const auto s = search_kappa(input.dist, input.lambda);
  if (!s.has_domain) return std::nullopt;
  const double kappa = s.unbounded ? unbounded_kappa(input) : s.kappa_best;
  const auto report = check_conditions(input, kappa);
  if (!report.feasible) return std::nullopt;
  return kappa;
}

ConditionReport evaluate(const ConditionInput& input) {
  validate(input);
  const auto s = search_kappa(input.dist, input.lambda);
  if (!s.has_domain) {
    ConditionReport r;
    r.l_zero = l_zero(input);
    r.m2_margin = 1.0 - 2.0 * input.lambda * std::sqrt(moment(input.dist, 2));
    return r;
  }
  const double kappa = s.unbounded ? unbounded_kappa(input) : s.kappa_best;
  auto r = check_conditions(input, kappa);
  if (!r.feasible) r.kappa_star.reset();
  return r;
}

double critical_v0_exponential_paper(double lambda_mu, double alpha) {
  const double bound = 1.0 / (2.0 * std::sqrt(2.0));
  if (!(lambda_mu > 0.0) || lambda_mu > bound * (1.0 + 1e-12))
    throw DomainViolation("lambda*mu must lie in (0, (2 sqrt 2)^{-1}]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainViolation("alpha must be > 0");
  const double x = std::min(lambda_mu, bound);
  const double prefactor = 1.0 / (2.0 * (1.0 + 12.0 * x * x / std::sqrt(2.0)));
  const double bracket = 1.0 - 2.0 * x * x - 2.0 * x * std::sqrt(x * x + 1.0);
  const double ratio = bracket / (alpha * x);
  return prefactor * ratio * ratio;
}

double critical_v0_numeric(const DelayDistribution& dist, double lambda, double alpha) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainViolation("lambda must be > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainViolation("alpha must be >= 0");
  const auto s = search_kappa(dist, lambda);
  if (!s.has_domain) return 0.0;
  if (s.unbounded) return kUnbounded;
  if (!(s.best_margin > 0.0)) return 0.0;
  if (alpha == 0.0) return kUnbounded;
  const double c = delay_correction(dist, lambda);
  return s.best_margin * s.best_margin / (2.0 * alpha * alpha * lambda * lambda * (1.0 + c));
}

double linear_constraint(double a, double kappa_bar) {
  return 4.0 * k_moment(DelayDistribution::linear(a), kappa_bar);
}

}  // namespace flockcert
