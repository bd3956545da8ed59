#include <cmath>
#include <random>

#include "flockcert/dde_simulator.hpp"
#include "simulator_internal.hpp"

namespace flockcert {

SwarmState random_swarm(int agents, int dim, std::uint64_t seed, double box, double dispersion) {
  if (agents < 2) throw ConfigInvalid("need at least 2 agents");
  if (dim < 1) throw ConfigInvalid("need dimension >= 1");
  if (!(box >= 0.0) || !std::isfinite(box)) throw ConfigInvalid("position box must be finite and >= 0");
  if (!(dispersion >= 0.0) || !std::isfinite(dispersion))
    throw ConfigInvalid("velocity dispersion must be finite and >= 0");

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> pos(-box, box);
  std::normal_distribution<double> vel(0.0, 1.0);
  SwarmState state;
  state.x.resize(agents, dim);
  state.v.resize(agents, dim);
  for (int i = 0; i < agents; ++i)
    for (int k = 0; k < dim; ++k) state.x(i, k) = box > 0.0 ? pos(gen) : 0.0;
  for (int i = 0; i < agents; ++i)
    for (int k = 0; k < dim; ++k) state.v(i, k) = dispersion * vel(gen);
  state.v.rowwise() -= state.v.colwise().mean();
  return state;
}

void scale_fluctuation(SwarmState& state, double v0) {
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw ConfigInvalid("target V(0) must be finite and >= 0");
  const double current = velocity_fluctuation(state.v);
  if (current == 0.0) {
    if (v0 == 0.0) return;
    throw ConfigInvalid("cannot rescale equal velocities to a positive fluctuation");
  }
  const Eigen::RowVectorXd mean = state.v.colwise().mean();
  state.v.rowwise() -= mean;
  state.v *= std::sqrt(v0 / current);
  state.v.rowwise() += mean;
}

double velocity_fluctuation(const AgentMatrix& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = i + 1; j < v.rows(); ++j) acc += (v.row(i) - v.row(j)).squaredNorm();
  return acc;
}

double constant_datum_dissipation(const CommunicationRate& rate, const SwarmState& state) {
  return detail::pair_energy(rate, state.x, state.v);
}

double diameter(const AgentMatrix& x) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) best = std::max(best, (x.row(i) - x.row(j)).squaredNorm());
  return std::sqrt(best);
}

}  // namespace flockcert
