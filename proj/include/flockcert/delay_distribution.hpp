#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flockcert {

/// Point mass at `tau`. `tau == 0` is the undelayed model.
struct Dirac {
  double tau;
};

/// dP(s) = mu^{-1} exp(-s/mu) ds.
struct Exponential {
  double mu;
};

/// Uniform on [a_lo, b_hi].
struct Uniform {
  double a_lo;
  double b_hi;
};

/// dP(s) = 2/A^2 (A - s)^+ ds on [0, A].
struct Linear {
  double a_max;
};

/// Probability measure of reaction delays on [0, inf).
///
/// Instances are validated on construction and immutable afterwards.
class DelayDistribution {
 public:
  using Variant = std::variant<Dirac, Exponential, Uniform, Linear>;

  static DelayDistribution dirac(double tau);
  static DelayDistribution exponential(double mu);
  static DelayDistribution uniform(double a_lo, double b_hi);
  static DelayDistribution linear(double a_max);

  /// Parses `dirac:tau=<t>`, `exponential:mu=<t>`, `uniform:a=<t>,b=<t>` or
  /// `linear:A=<t>`. Throws ParseError on malformed input and
  /// DomainViolation on invalid parameters.
  static DelayDistribution parse(std::string_view literal);

  /// Literal form accepted by parse(); numbers use the shortest round-trip
  /// representation.
  std::string literal() const;

  const Variant& variant() const { return variant_; }

  bool has_compact_support() const;

  /// Right end of the support; +inf for the exponential distribution.
  double support_end() const;

  /// Supremum of kappa for which the exponential moment is finite.
  double convergence_limit() const;

  /// Short family name: "dirac", "exponential", "uniform" or "linear".
  std::string_view family() const;

 private:
  explicit DelayDistribution(Variant v) : variant_(v) {}
  Variant variant_;
};

/// k-th moment M_k = \int s^k dP(s).
double moment(const DelayDistribution& dist, int k);

/// Moment generating function Mexp[kappa] = \int e^{kappa s} dP(s), kappa >= 0.
/// Throws DivergentMoment outside the convergence domain.
double exp_moment(const DelayDistribution& dist, double kappa);

/// K[kappa] = \int s (e^{kappa s} - 1) / kappa dP(s); K[0] = M_2.
double k_moment(const DelayDistribution& dist, double kappa);

/// Moments of a delay distribution with the lower moments cached.
class MomentValues {
 public:
  explicit MomentValues(const DelayDistribution& dist);

  double m1;
  double m2;
  double m3;

  double mexp_at(double kappa) const { return exp_moment(dist_, kappa); }
  double k_at(double kappa) const { return k_moment(dist_, kappa); }

 private:
  DelayDistribution dist_;
};

/// Discrete approximation of \int f(s) dP(s) by sum_i weights[i] f(nodes[i]).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Mass of P discarded by truncating the support (0 for compact support).
  double truncation_tail_mass = 0.0;

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

inline constexpr int kDefaultQuadratureOrder = 32;
inline constexpr double kDefaultTailMassTol = 1e-12;

/// Gauss-type rule for P. Compact variants get the Gauss rule of their density
/// (Legendre for uniform, Jacobi(1,0) for linear). The exponential variant uses
/// the Gauss-Laguerre rule truncated to [0, mu ln(1/tail_mass_tol)] and
/// renormalized to unit mass. Dirac yields its single atom.
Quadrature quadrature(const DelayDistribution& dist,
                      int order = kDefaultQuadratureOrder,
                      double tail_mass_tol = kDefaultTailMassTol);

/// Smallest s_max with P((s_max, inf)) <= tail_mass_tol.
double truncation_horizon(const DelayDistribution& dist,
                          double tail_mass_tol = kDefaultTailMassTol);

}  // namespace flockcert
