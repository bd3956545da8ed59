#include "flockcert/communication_rate.hpp"

#include <cmath>

#include "flockcert/errors.hpp"

namespace flockcert {

namespace {

void check_distance(double r) {
  if (!(r >= 0.0)) throw NegativeDistance("communication rate evaluated at negative distance");
}

constexpr int kGridPoints = 2001;

}  // namespace

CommunicationRate::CommunicationRate(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw DomainViolation("beta must be finite and >= 0");
  // (1+r^2)^{-beta} >= (2 r^2)^{-beta} = 2^{-beta} r^{-2 beta} for r >= 1.
  if (beta < 0.5) tail_ = TailBound{1.0 - 2.0 * beta, std::pow(2.0, -beta), 1.0};
}

double CommunicationRate::operator()(double r) const {
  check_distance(r);
  return from_squared(r * r);
}

double CommunicationRate::derivative(double r) const {
  check_distance(r);
  if (beta_ == 0.0) return 0.0;
  return -2.0 * beta_ * r * std::pow(1.0 + r * r, -beta_ - 1.0);
}

double CommunicationRate::from_squared(double r2) const {
  return std::pow(1.0 + r2, -beta_);
}

AssumptionReport check_assumptions(const CommunicationRate& rate) {
  AssumptionReport report{true, rate.tail().has_value(), true};

  // Analytic: -psi'/psi = 2 beta r / (1 + r^2) <= beta <= 2 beta.
  const double log_der_max = rate.beta();
  report.log_derivative_ok = log_der_max <= rate.alpha();

  const double lo = std::log(1e-6);
  const double hi = std::log(1e6);
  double prev = rate(0.0);
  report.bounded = prev > 0.0 && prev <= 1.0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / (kGridPoints - 1));
    const double value = rate(r);
    if (!(value > 0.0 && value <= 1.0) || value > prev) report.bounded = false;
    prev = value;
    const double slack = 1e-14 * rate.alpha() * value;
    if (rate.derivative(r) < -rate.alpha() * value - slack) report.log_derivative_ok = false;
    if (report.tail_ok) {
      const auto& t = *rate.tail();
      if (r >= t.r && value < t.c * std::pow(r, -1.0 + t.gamma) * (1.0 - 1e-14))
        report.tail_ok = false;
    }
  }
  return report;
}

}  // namespace flockcert
