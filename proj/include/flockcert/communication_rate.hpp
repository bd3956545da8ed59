#pragma once

#include <optional>

namespace flockcert {

/// Constants of the algebraic lower bound psi(r) >= c r^{-1+gamma} for r >= R.
struct TailBound {
  double gamma;
  double c;
  double r;
};

/// Communication rate psi(r) = (1 + r^2)^{-beta}.
///
/// `alpha() = 2 beta` bounds the logarithmic derivative, psi' >= -alpha psi.
/// The tail bound exists only for beta < 1/2 and is informational.
class CommunicationRate {
 public:
  explicit CommunicationRate(double beta);

  double beta() const { return beta_; }
  double alpha() const { return 2.0 * beta_; }
  const std::optional<TailBound>& tail() const { return tail_; }

  /// psi(r); throws NegativeDistance for r < 0 or NaN.
  double operator()(double r) const;

  /// psi'(r) = -2 beta r (1 + r^2)^{-beta-1}.
  double derivative(double r) const;

  /// psi evaluated from the squared distance, unchecked. Used in inner loops.
  double from_squared(double r2) const;

 private:
  double beta_;
  std::optional<TailBound> tail_;
};

inline double psi(const CommunicationRate& rate, double r) { return rate(r); }
inline double psi_prime(const CommunicationRate& rate, double r) { return rate.derivative(r); }

struct AssumptionReport {
  bool bounded;
  bool tail_ok;
  bool log_derivative_ok;
};

/// Checks 0 < psi <= 1, the algebraic tail and psi' >= -alpha psi, each both
/// analytically and on a log-spaced grid r in [1e-6, 1e6].
AssumptionReport check_assumptions(const CommunicationRate& rate);

}  // namespace flockcert
