#include <doctest.h>

#include <cmath>

#include "flockcert/communication_rate.hpp"
#include "flockcert/errors.hpp"

using namespace flockcert;

TEST_CASE("rate values and derivative") {
  const CommunicationRate rate(0.25);
  CHECK(rate(0.0) == 1.0);
  CHECK(rate(1.0) == doctest::Approx(std::pow(2.0, -0.25)));
  CHECK(rate.alpha() == 0.5);
  const double h = 1e-6;
  for (double r : {0.1, 1.0, 7.0}) {
    const double fd = (rate(r + h) - rate(r - h)) / (2.0 * h);
    CHECK(rate.derivative(r) == doctest::Approx(fd).epsilon(1e-7));
    CHECK(rate.from_squared(r * r) == rate(r));
  }
  CHECK(psi(rate, 2.0) == rate(2.0));
  CHECK(psi_prime(rate, 2.0) == rate.derivative(2.0));
}

TEST_CASE("beta = 0 gives constant rate") {
  const CommunicationRate rate(0.0);
  CHECK(rate(123.0) == 1.0);
  CHECK(rate.derivative(5.0) == 0.0);
  CHECK(rate.alpha() == 0.0);
}

TEST_CASE("negative distance and bad beta are rejected") {
  const CommunicationRate rate(0.1);
  CHECK_THROWS_AS(rate(-1.0), NegativeDistance);
  CHECK_THROWS_AS(rate(std::nan("")), NegativeDistance);
  CHECK_THROWS_AS(CommunicationRate(-0.5), DomainViolation);
  CHECK_THROWS_AS(CommunicationRate(std::nan("")), DomainViolation);
}

TEST_CASE("assumption checks") {
  const auto ok = check_assumptions(CommunicationRate(0.1));
  CHECK(ok.bounded);
  CHECK(ok.tail_ok);
  CHECK(ok.log_derivative_ok);
  const auto tail = CommunicationRate(0.1).tail();
  REQUIRE(tail.has_value());
  CHECK(tail->gamma == doctest::Approx(0.8));

  const auto heavy = check_assumptions(CommunicationRate(0.75));
  CHECK(heavy.bounded);
  CHECK_FALSE(heavy.tail_ok);
  CHECK(heavy.log_derivative_ok);
  CHECK_FALSE(CommunicationRate(0.5).tail().has_value());
}
