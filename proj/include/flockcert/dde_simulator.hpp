#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flockcert/communication_rate.hpp"
#include "flockcert/delay_distribution.hpp"
#include "flockcert/errors.hpp"

namespace flockcert {

/// N x d array, one agent per row.
using AgentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SwarmState {
  double t = 0.0;
  AgentMatrix x;
  AgentMatrix v;

  int agents() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// Throws ConfigInvalid unless N >= 2, d >= 1, shapes agree and entries are finite.
void validate(const SwarmState& state);

/// Trajectory on the uniform grid t_k = k dt, k >= 0, with the constant
/// initial datum on (-inf, 0]. Stores positions, velocities, accelerations and
/// the delayed dissipation D at every grid node.
class History {
 public:
  History(const AgentMatrix& x0, const AgentMatrix& v0, double dt);

  int agents() const { return agents_; }
  int dim() const { return dim_; }
  double dt() const { return dt_; }
  std::size_t size() const { return count_; }
  double time(std::size_t k) const { return static_cast<double>(k) * dt_; }
  double t_last() const { return time(count_ - 1); }

  const AgentMatrix& initial_x() const { return x0_; }
  const AgentMatrix& initial_v() const { return v0_; }

  Eigen::Map<const AgentMatrix> x(std::size_t k) const;
  Eigen::Map<const AgentMatrix> v(std::size_t k) const;
  Eigen::Map<const AgentMatrix> acceleration(std::size_t k) const;

  /// Appends the node t_{size()} with a provisional acceleration.
  void append(const AgentMatrix& x, const AgentMatrix& v, const AgentMatrix& accel);
  void set_acceleration(std::size_t k, const AgentMatrix& accel);

  /// D at node k; only nodes [0, dissipation_count()) are available.
  double dissipation(std::size_t k) const;
  std::size_t dissipation_count() const { return dissipation_.size(); }
  void push_dissipation(double d) { dissipation_.push_back(d); }

  /// State at time tau: the initial datum for tau <= 0, cubic Hermite
  /// interpolation inside the grid. Throws HistoryUnderflow beyond t_last().
  void evaluate(double tau, AgentMatrix& x, AgentMatrix& v) const;

 private:
  int agents_;
  int dim_;
  double dt_;
  std::size_t count_ = 0;
  AgentMatrix x0_;
  AgentMatrix v0_;
  std::vector<double> xs_;
  std::vector<double> vs_;
  std::vector<double> as_;
  std::vector<double> dissipation_;
};

struct SimConfig {
  double lambda;
  CommunicationRate rate;
  DelayDistribution dist;
  /// Step size; 0 selects default_dt().
  double dt = 0.0;
  double t_end = 10.0;
  int quad_order = kDefaultQuadratureOrder;
  double tail_mass_tol = kDefaultTailMassTol;
  std::uint64_t seed = 0;
  int diag_stride = 1;
};

/// min(1e-2, s_max / 40), or 1e-2 without delay.
double default_dt(const DelayDistribution& dist, double tail_mass_tol = kDefaultTailMassTol);

/// Copy of `config` with dt resolved. Throws ConfigInvalid.
SimConfig resolve(const SimConfig& config);

struct DiagnosticsRow {
  double t = 0.0;
  double V = 0.0;
  double D = 0.0;
  double dX = 0.0;
  double L = 0.0;
  std::vector<double> momentum;
  double phi_lower = 0.0;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;
  /// V(0), D(0) and d_X(0) of the initial datum.
  double v0 = 0.0;
  double d0 = 0.0;
  double dx0 = 0.0;
  /// V(0) + 2 lambda^2 M3 / sqrt(M2) D(0), the bound entering phi_lower and
  /// the diameter estimate.
  double l0 = 0.0;
};

struct RunResult {
  History trajectory;
  DiagnosticsSeries diagnostics;
};

/// Raised when the state stops being finite or exceeds the blow-up guard.
/// Carries the diagnostics gathered up to the failure.
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, DiagnosticsSeries partial);
  const DiagnosticsSeries& partial() const { return *partial_; }

 private:
  std::shared_ptr<const DiagnosticsSeries> partial_;
};

/// Right-hand side of the velocity equation at time t <= history.t_last().
AgentMatrix accelerations(const History& history, double t, const SimConfig& config);

/// Classical RK4 with a dense Hermite history. Throws ConfigInvalid,
/// NonFiniteState.
RunResult run(const SimConfig& config, const SwarmState& initial);

/// Diagnostics at grid time t; needs D stored back to t - s_max.
DiagnosticsRow diagnostics_at(const History& history, double t, const SimConfig& config);

/// Negated least-squares slope of log V over samples with t in [t_a, t_b].
/// Throws DegenerateWindow with fewer than 8 samples or V <= 0.
double fit_decay_rate(const DiagnosticsSeries& series, double t_a, double t_b);

enum class EstimateKind { ForwardBackward, Lyapunov, Diameter, Decay };

std::string to_string(EstimateKind kind);

struct Violation {
  EstimateKind kind;
  double t;
  /// Delay for ForwardBackward entries, 0 otherwise.
  double s;
  double value;
  double bound;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  std::size_t count(EstimateKind kind) const;
};

/// Checks the sampled series against the a priori estimates:
///   e^{-kappa s} D(t) <= D(t - s) <= e^{kappa s} D(t) on quadrature nodes s,
///   L(t) <= L(t_0),
///   d_X(t) <= d_X(0) + sqrt(2 run_l_zero) t,
///   V(t) <= V(0) exp(-omega \int_0^t phi_lower).
ViolationReport verify_estimates(const DiagnosticsSeries& series, double kappa,
                                 const SimConfig& config, double run_l_zero);

/// Uncorrelated initial datum: positions uniform in [-box, box]^d, velocities
/// Gaussian with standard deviation `dispersion` per component, shifted to
/// zero mean. Deterministic in `seed`.
SwarmState random_swarm(int agents, int dim, std::uint64_t seed, double box, double dispersion);

/// Rescales velocity deviations from the mean so that V equals `v0`.
void scale_fluctuation(SwarmState& state, double v0);

/// Quadratic velocity fluctuation (1/2) sum_ij |v_i - v_j|^2.
double velocity_fluctuation(const AgentMatrix& v);

/// D of a constant initial datum, sum_{i<j} psi(|x_i - x_j|) |v_i - v_j|^2.
double constant_datum_dissipation(const CommunicationRate& rate, const SwarmState& state);

/// Largest pairwise distance.
double diameter(const AgentMatrix& x);

}  // namespace flockcert
