#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "flockcert/delay_distribution.hpp"
#include "flockcert/errors.hpp"

using namespace flockcert;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

std::vector<DelayDistribution> samples() {
  return {DelayDistribution::dirac(0.0),        DelayDistribution::dirac(0.7),
          DelayDistribution::exponential(0.3),  DelayDistribution::exponential(2.0),
          DelayDistribution::uniform(0.0, 0.25), DelayDistribution::uniform(0.1, 0.4),
          DelayDistribution::uniform(1.0, 3.0), DelayDistribution::linear(0.2),
          DelayDistribution::linear(1.0)};
}

// Integral of f against P by adaptive quadrature of the density.
template <typename F>
double adaptive(const DelayDistribution& dist, F f) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  const auto& v = dist.variant();
  if (const auto* d = std::get_if<Dirac>(&v)) return f(d->tau);
  if (const auto* e = std::get_if<Exponential>(&v)) {
    exp_sinh<double> integrator;
    const double mu = e->mu;
    return integrator.integrate(
        [&](double s) {
          const double w = std::exp(-s / mu);
          const double y = w == 0.0 ? 0.0 : f(s) * w / mu;
          return std::isfinite(y) ? y : 0.0;
        },
        0.0,
                                std::numeric_limits<double>::infinity());
  }
  if (const auto* u = std::get_if<Uniform>(&v)) {
    const double len = u->b_hi - u->a_lo;
    return gauss_kronrod<double, 61>::integrate([&](double s) { return f(s) / len; }, u->a_lo,
                                                u->b_hi, 15, 1e-15);
  }
  const double a = std::get<Linear>(v).a_max;
  return gauss_kronrod<double, 61>::integrate(
      [&](double s) { return f(s) * 2.0 / (a * a) * (a - s); }, 0.0, a, 15, 1e-15);
}

}  // namespace

TEST_CASE("closed-form moments") {
  CHECK(moment(DelayDistribution::exponential(0.5), 3) == doctest::Approx(6.0 * 0.125).epsilon(1e-15));
  CHECK(moment(DelayDistribution::uniform(1.0, 3.0), 2) == doctest::Approx(13.0 / 3.0).epsilon(1e-15));
  CHECK(moment(DelayDistribution::linear(1.0), 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(moment(DelayDistribution::dirac(0.7), 3) == doctest::Approx(0.343).epsilon(1e-15));
  CHECK(moment(DelayDistribution::dirac(0.0), 0) == 1.0);
  CHECK(moment(DelayDistribution::dirac(0.0), 2) == 0.0);
  for (const auto& d : samples()) CHECK(moment(d, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(moment(DelayDistribution::linear(1.0), -1), DomainViolation);
}

TEST_CASE("K for the linear distribution at kappa = 1") {
  // Frozen high-precision value.
  CHECK(rel_err(k_moment(DelayDistribution::linear(1.0), 1.0), 0.2301030097485761959) < 1e-14);
}

TEST_CASE("exponential moment diverges at kappa mu >= 1") {
  const auto e = DelayDistribution::exponential(0.5);
  CHECK(exp_moment(e, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(exp_moment(e, 2.0), DivergentMoment);
  CHECK_THROWS_AS(k_moment(e, 2.5), DivergentMoment);
  CHECK(e.convergence_limit() == 2.0);
  CHECK(std::isinf(DelayDistribution::uniform(0.0, 1.0).convergence_limit()));
  CHECK_THROWS_AS(exp_moment(e, -0.1), DomainViolation);
}

TEST_CASE("K at kappa = 0 equals M2") {
  for (const auto& d : samples()) {
    CAPTURE(d.literal());
    CHECK(k_moment(d, 0.0) == doctest::Approx(moment(d, 2)).epsilon(1e-15));
    CHECK(std::abs(k_moment(d, 1e-12) - moment(d, 2)) <= 1e-10 * std::max(moment(d, 2), 1e-300));
    CHECK(exp_moment(d, 0.0) == 1.0);
  }
}

TEST_CASE("moments agree with adaptive quadrature") {
  for (const auto& d : samples()) {
    CAPTURE(d.literal());
    for (int k = 0; k <= 3; ++k) {
      const double want = adaptive(d, [k](double s) { return std::pow(s, k); });
      if (want == 0.0)
        CHECK(moment(d, k) == 0.0);
      else
        CHECK(rel_err(moment(d, k), want) < 1e-12);
    }
    const double limit = d.convergence_limit();
    const double top = std::isinf(limit) ? 8.0 / std::max(d.support_end(), 0.05) : 0.95 * limit;
    for (int i = 0; i <= 20; ++i) {
      const double kappa = top * i / 20.0;
      CAPTURE(kappa);
      const double mexp = adaptive(d, [kappa](double s) { return std::exp(kappa * s); });
      CHECK(rel_err(exp_moment(d, kappa), mexp) < 1e-11);
      if (kappa == 0.0) continue;
      const double k_want =
          adaptive(d, [kappa](double s) { return s * std::expm1(kappa * s) / kappa; });
      if (k_want == 0.0)
        CHECK(k_moment(d, kappa) == 0.0);
      else
        CHECK(rel_err(k_moment(d, kappa), k_want) < 1e-11);
    }
  }
}

TEST_CASE("K is continuous across the small-kappa branch") {
  for (const auto& d : {DelayDistribution::uniform(0.1, 0.4), DelayDistribution::linear(0.5),
                        DelayDistribution::uniform(0.0, 2.0)}) {
    const double edge = 1.0 / d.support_end();
    const double below = k_moment(d, std::nextafter(edge, 0.0));
    const double above = k_moment(d, std::nextafter(edge, 10.0 * edge));
    CHECK(rel_err(below, above) < 1e-12);
    const double mb = exp_moment(d, std::nextafter(edge, 0.0));
    const double ma = exp_moment(d, std::nextafter(edge, 10.0 * edge));
    CHECK(rel_err(mb, ma) < 1e-12);
  }
}

TEST_CASE("K and Mexp are increasing in kappa") {
  for (const auto& d : samples()) {
    if (d.literal() == "dirac:tau=0") continue;
    CAPTURE(d.literal());
    const double limit = d.convergence_limit();
    const double top = std::isinf(limit) ? 10.0 / d.support_end() : 0.99 * limit;
    double prev_k = k_moment(d, 0.0);
    double prev_m = exp_moment(d, 0.0);
    for (int i = 1; i <= 500; ++i) {
      const double kappa = top * i / 500.0;
      const double k = k_moment(d, kappa);
      const double m = exp_moment(d, kappa);
      CHECK(k >= prev_k);
      CHECK(m >= prev_m);
      prev_k = k;
      prev_m = m;
    }
  }
}

TEST_CASE("literal round trip and parse errors") {
  for (const auto& d : samples()) CHECK(DelayDistribution::parse(d.literal()).literal() == d.literal());
  CHECK(DelayDistribution::parse("uniform:a=0.1,b=0.2").literal() == "uniform:a=0.1,b=0.2");
  CHECK(DelayDistribution::parse("linear:A=0.4").family() == "linear");
  CHECK_THROWS_AS(DelayDistribution::parse("exponential"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("gamma:k=2"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("exponential:mu=abc"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("exponential:tau=1"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("uniform:a=0.1"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("uniform:a=0.1,a=0.2"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("dirac:tau=1,"), ParseError);
  CHECK_THROWS_AS(DelayDistribution::parse("exponential:mu=-1"), DomainViolation);
  CHECK_THROWS_AS(DelayDistribution::parse("uniform:a=0.3,b=0.2"), DomainViolation);
  CHECK_THROWS_AS(DelayDistribution::parse("dirac:tau=-1"), DomainViolation);
  CHECK_THROWS_AS(DelayDistribution::parse("linear:A=0"), DomainViolation);
  CHECK_THROWS_AS(DelayDistribution::parse("exponential:mu=inf"), DomainViolation);
}

TEST_CASE("quadrature rules") {
  for (const auto& d : samples()) {
    CAPTURE(d.literal());
    const auto q = quadrature(d);
    double mass = 0.0;
    for (double w : q.weights) {
      CHECK(w > 0.0);
      mass += w;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    for (double s : q.nodes) {
      CHECK(s >= 0.0);
      CHECK(s <= truncation_horizon(d) * (1.0 + 1e-12));
    }
    if (d.has_compact_support()) {
      CHECK(q.truncation_tail_mass == 0.0);
      for (int k = 0; k <= 3; ++k)
        CHECK(q.integrate([k](double s) { return std::pow(s, k); }) ==
              doctest::Approx(moment(d, k)).epsilon(1e-13));
    }
  }
  CHECK(quadrature(DelayDistribution::dirac(0.3)).nodes.size() == 1);
  CHECK(quadrature(DelayDistribution::uniform(0.0, 1.0), 5).nodes.size() == 5);
  CHECK_THROWS_AS(quadrature(DelayDistribution::linear(1.0), 0), InvalidOrder);
}

TEST_CASE("exponential truncation") {
  const auto e = DelayDistribution::exponential(2.0);
  CHECK(rel_err(truncation_horizon(e, 1e-10), 46.051701859880914) < 1e-14);
  const auto q = quadrature(e, 32, 1e-12);
  CHECK(q.truncation_tail_mass > 0.0);
  CHECK(q.truncation_tail_mass < 1e-6);
  CHECK(q.nodes.size() < 32);
  for (int k = 0; k <= 3; ++k)
    CHECK(rel_err(q.integrate([k](double s) { return std::pow(s, k); }), moment(e, k)) < 1e-8);
  CHECK(truncation_horizon(DelayDistribution::uniform(0.1, 0.4)) == 0.4);
  CHECK(truncation_horizon(DelayDistribution::dirac(0.0)) == 0.0);
  CHECK_THROWS_AS(truncation_horizon(e, 0.0), DomainViolation);
}

TEST_CASE("MomentValues caches lower moments") {
  const MomentValues m(DelayDistribution::exponential(1.0));
  CHECK(m.m1 == 1.0);
  CHECK(m.m2 == 2.0);
  CHECK(m.m3 == 6.0);
  CHECK(m.mexp_at(0.5) == doctest::Approx(2.0));
  CHECK(m.k_at(0.0) == 2.0);
}
