#include <doctest.h>

#include <cmath>

#include "flockcert/errors.hpp"
#include "flockcert/flocking_conditions.hpp"

using namespace flockcert;

namespace {

ConditionInput exp_input(double mu, double lambda, double alpha, double v0) {
  return ConditionInput{lambda, DelayDistribution::exponential(mu), alpha, v0, std::nullopt, false};
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("l_zero") {
  auto in = exp_input(1.0, 0.1, 1.0, 1.0);
  in.d0 = 1.0;
  CHECK(rel_err(l_zero(in), 1.0848528137423857) < 1e-15);
  in.d0 = 0.0;
  CHECK(l_zero(in) == 1.0);
  in.use_weak_form = true;
  CHECK(rel_err(l_zero(in), 1.0848528137423857) < 1e-15);
  in.d0.reset();
  in.use_weak_form = false;
  CHECK(rel_err(l_zero(in), 1.0848528137423857) < 1e-15);

  const ConditionInput none{1.0, DelayDistribution::dirac(0.0), 1.0, 2.5, 1.0, false};
  CHECK(l_zero(none) == 2.5);
  CHECK(delay_correction(DelayDistribution::dirac(0.0), 1.0) == 0.0);
}

TEST_CASE("check_conditions examples") {
  const ConditionInput none{1.0, DelayDistribution::dirac(0.0), 1.0, 1.0, std::nullopt, false};
  const auto r = check_conditions(none, 10.0);
  CHECK(r.feasible);
  CHECK(r.m2_margin == 1.0);
  CHECK(r.k_margin_at_star == 1.0);
  CHECK(r.mexp_margin_at_star == doctest::Approx(10.0 - 4.0 - std::sqrt(2.0)));
  CHECK(r.omega == 2.0);

  const auto bad = check_conditions(exp_input(1.0, 0.5, 1.0, 1.0), 0.1);
  CHECK(bad.m2_margin == doctest::Approx(1.0 - std::sqrt(2.0)));
  CHECK_FALSE(bad.feasible);

  auto in = exp_input(1.0, 0.1, 1.0, 0.01);
  in.use_weak_form = true;
  const auto r2 = check_conditions(in, 0.658);
  CHECK(rel_err(r2.mexp_margin_at_star, -0.17328477469023268) < 1e-13);
  CHECK_FALSE(r2.feasible);

  CHECK_THROWS_AS(check_conditions(in, 1.5), DivergentMoment);
  CHECK_THROWS_AS(check_conditions(in, 0.0), DomainViolation);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(validate(exp_input(1.0, 0.0, 1.0, 1.0)), DomainViolation);
  CHECK_THROWS_AS(validate(exp_input(1.0, 0.1, -1.0, 1.0)), DomainViolation);
  CHECK_THROWS_AS(validate(exp_input(1.0, 0.1, 1.0, -1.0)), DomainViolation);
  auto in = exp_input(1.0, 0.1, 1.0, 1.0);
  in.d0 = 2.0;
  CHECK_THROWS_AS(validate(in), DomainViolation);
}

TEST_CASE("find_kappa") {
  const ConditionInput none{1.0, DelayDistribution::dirac(0.0), 1.0, 1.0, std::nullopt, false};
  const auto k0 = find_kappa(none);
  REQUIRE(k0.has_value());
  CHECK(check_conditions(none, *k0).feasible);

  CHECK_FALSE(find_kappa(exp_input(1.0, 0.1, 1.0, 0.0)).has_value());
  CHECK_FALSE(find_kappa(exp_input(1.0, 0.5, 1.0, 0.0)).has_value());

  const auto in = exp_input(1.0, 0.05, 1.0, 0.0);
  const auto k = find_kappa(in);
  REQUIRE(k.has_value());
  CHECK(std::abs(*k - 0.78455653099681163) < 1e-7);
  const auto r = check_conditions(in, *k);
  CHECK(rel_err(r.mexp_margin_at_star, 0.35366959299043488) < 1e-12);
  CHECK(r.feasible);
  CHECK(r.omega > 0.0);
}

TEST_CASE("search_kappa maximum matches a dense scan") {
  const auto dist = DelayDistribution::exponential(1.0);
  const auto s = search_kappa(dist, 0.1);
  REQUIRE(s.has_domain);
  CHECK(rel_err(s.best_margin, -0.025985568006018194) < 1e-12);
  double scan = -1e300;
  for (int i = 1; i < 20000; ++i) {
    const double kappa = s.kappa_ceiling * i / 20000.0;
    scan = std::max(scan, kappa - 0.4 * std::sqrt(exp_moment(dist, kappa)));
  }
  CHECK(s.best_margin >= scan - 1e-12);
  CHECK(2.0 * 0.1 * std::sqrt(k_moment(dist, s.kappa_ceiling)) < 1.0);
  CHECK(2.0 * 0.1 * std::sqrt(k_moment(dist, s.kappa_ceiling * (1.0 + 1e-9))) >= 1.0);
}

TEST_CASE("search_kappa ceiling for compact distributions") {
  for (const auto& d : {DelayDistribution::uniform(0.01, 0.2), DelayDistribution::linear(0.3),
                        DelayDistribution::dirac(0.4)}) {
    CAPTURE(d.literal());
    const auto s = search_kappa(d, 1.0);
    REQUIRE(s.has_domain);
    CHECK(4.0 * k_moment(d, s.kappa_ceiling) < 1.0);
    CHECK(4.0 * k_moment(d, s.kappa_ceiling * (1.0 + 1e-9)) >= 1.0);
    CHECK(s.kappa_best > 0.0);
    CHECK(s.kappa_best <= s.kappa_ceiling);
  }
  CHECK_FALSE(search_kappa(DelayDistribution::dirac(1.0), 1.0).has_domain);
}

TEST_CASE("printed exponential threshold") {
  const double bound = 1.0 / (2.0 * std::sqrt(2.0));
  CHECK(rel_err(critical_v0_exponential_paper(0.1, 1.0), 27.968995792094860) < 1e-13);
  CHECK(rel_err(critical_v0_exponential_paper(0.05, 1.0), 156.83334343516845) < 1e-13);
  CHECK(std::abs(critical_v0_exponential_paper(bound, 1.0)) <= 1e-9);
  CHECK(critical_v0_exponential_paper(0.1, 2.0) ==
        doctest::Approx(critical_v0_exponential_paper(0.1, 1.0) / 4.0));
  CHECK_THROWS_AS(critical_v0_exponential_paper(0.0, 1.0), DomainViolation);
  CHECK_THROWS_AS(critical_v0_exponential_paper(0.36, 1.0), DomainViolation);
  CHECK_THROWS_AS(critical_v0_exponential_paper(0.1, 0.0), DomainViolation);
  double prev = critical_v0_exponential_paper(1e-3, 1.0);
  for (int i = 1; i <= 200; ++i) {
    const double x = 1e-3 + (bound - 1e-3) * i / 200.0;
    const double v = critical_v0_exponential_paper(x, 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("numeric threshold") {
  const auto e = DelayDistribution::exponential(1.0);
  CHECK(rel_err(critical_v0_numeric(e, 0.05, 1.0), 24.496781002285243) < 1e-10);
  CHECK(critical_v0_numeric(e, 1.0 / (2.0 * std::sqrt(2.0)), 1.0) == 0.0);
  CHECK(critical_v0_numeric(e, 0.5, 1.0) == 0.0);
  CHECK(critical_v0_numeric(e, 0.1, 1.0) == 0.0);
  CHECK(std::isinf(critical_v0_numeric(e, 0.05, 0.0)));
  CHECK(std::isinf(critical_v0_numeric(DelayDistribution::dirac(0.0), 1.0, 1.0)));

  // The weak-form threshold is exactly the feasibility frontier.
  const double crit = critical_v0_numeric(e, 0.05, 1.0);
  auto weak = exp_input(1.0, 0.05, 1.0, 0.999 * crit * 0.05 * 0.05);
  weak.use_weak_form = true;
  CHECK(find_kappa(weak).has_value());
  weak.v0 = 1.001 * crit * 0.05 * 0.05;
  CHECK_FALSE(find_kappa(weak).has_value());
}

TEST_CASE("V0 = 0 feasibility boundary for exponential delays") {
  const double boundary = 0.5 * std::pow(3.0, -1.5);
  CHECK(rel_err(boundary, 0.096225044864937627) < 1e-15);
  const auto e = DelayDistribution::exponential(1.0);
  CHECK(critical_v0_numeric(e, boundary - 1e-5, 1.0) > 0.0);
  CHECK(critical_v0_numeric(e, boundary + 1e-5, 1.0) == 0.0);
}

TEST_CASE("linear constraint function") {
  for (double a : {0.05, 0.2, 0.4, 1.0}) {
    CAPTURE(a);
    CHECK(std::abs(linear_constraint(a, 1e-9) - 2.0 * a * a / 3.0) < 1e-6 * a * a);
    for (double kb : {1.0 / a, 5.0 / a, 20.0 / a}) {
      const double e = std::exp(a * kb);
      const double printed = 4.0 / kb *
                             (2.0 * (e + 1.0) / (a * kb * kb) + 4.0 * (1.0 - e) / (a * a * kb * kb * kb) -
                              a / 3.0);
      CHECK(rel_err(linear_constraint(a, kb), printed) < 1e-9);
    }
  }
}

TEST_CASE("evaluate reports margins when infeasible") {
  const auto r = evaluate(exp_input(1.0, 0.1, 1.0, 0.0));
  CHECK_FALSE(r.feasible);
  CHECK_FALSE(r.kappa_star.has_value());
  CHECK(rel_err(r.mexp_margin_at_star, -0.025985568006018194) < 1e-10);

  const auto far = evaluate(exp_input(1.0, 0.5, 1.0, 0.0));
  CHECK_FALSE(far.feasible);
  CHECK(far.m2_margin < 0.0);
  CHECK(std::isnan(far.omega));

  const auto ok = evaluate(exp_input(1.0, 0.05, 1.0, 1e-3));
  CHECK(ok.feasible);
  CHECK(ok.kappa_star.has_value());
  CHECK(ok.omega > 0.0);
}
