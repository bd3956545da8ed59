#include <algorithm>
#include <cmath>

#include "flockcert/dde_simulator.hpp"

namespace flockcert {

void validate(const SwarmState& state) {
  if (state.x.rows() < 2) throw ConfigInvalid("need at least 2 agents");
  if (state.x.cols() < 1) throw ConfigInvalid("need dimension >= 1");
  if (state.v.rows() != state.x.rows() || state.v.cols() != state.x.cols())
    throw ConfigInvalid("positions and velocities differ in shape");
  if (!state.x.allFinite() || !state.v.allFinite()) throw ConfigInvalid("initial state is not finite");
}

History::History(const AgentMatrix& x0, const AgentMatrix& v0, double dt)
    : agents_(static_cast<int>(x0.rows())), dim_(static_cast<int>(x0.cols())), dt_(dt), x0_(x0),
      v0_(v0) {
  if (!(dt > 0.0)) throw ConfigInvalid("history step must be > 0");
  append(x0, v0, AgentMatrix::Zero(agents_, dim_));
}

Eigen::Map<const AgentMatrix> History::x(std::size_t k) const {
  const std::size_t stride = static_cast<std::size_t>(agents_) * dim_;
  return Eigen::Map<const AgentMatrix>(xs_.data() + k * stride, agents_, dim_);
}

Eigen::Map<const AgentMatrix> History::v(std::size_t k) const {
  const std::size_t stride = static_cast<std::size_t>(agents_) * dim_;
  return Eigen::Map<const AgentMatrix>(vs_.data() + k * stride, agents_, dim_);
}

Eigen::Map<const AgentMatrix> History::acceleration(std::size_t k) const {
  const std::size_t stride = static_cast<std::size_t>(agents_) * dim_;
  return Eigen::Map<const AgentMatrix>(as_.data() + k * stride, agents_, dim_);
}

void History::append(const AgentMatrix& x, const AgentMatrix& v, const AgentMatrix& accel) {
  xs_.insert(xs_.end(), x.data(), x.data() + x.size());
  vs_.insert(vs_.end(), v.data(), v.data() + v.size());
  as_.insert(as_.end(), accel.data(), accel.data() + accel.size());
  ++count_;
}

void History::set_acceleration(std::size_t k, const AgentMatrix& accel) {
  const std::size_t stride = static_cast<std::size_t>(agents_) * dim_;
  std::copy(accel.data(), accel.data() + accel.size(), as_.begin() + k * stride);
}

double History::dissipation(std::size_t k) const {
  if (k >= dissipation_.size()) throw HistoryUnderflow("dissipation not yet stored");
  return dissipation_[k];
}

void History::evaluate(double tau, AgentMatrix& x_out, AgentMatrix& v_out) const {
  if (std::isnan(tau)) throw HistoryUnderflow("history query at NaN");
  if (tau <= 0.0) {
    x_out = x0_;
    v_out = v0_;
    return;
  }
  const double last = t_last();
  if (tau > last * (1.0 + 1e-14)) throw HistoryUnderflow("history query beyond stored data");
  if (count_ == 1) {
    x_out = x0_;
    v_out = v0_;
    return;
  }
  const double pos = tau / dt_;
  std::size_t k = static_cast<std::size_t>(std::floor(pos));
  k = std::min(k, count_ - 2);
  const double th = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = (th3 - 2.0 * th2 + th) * dt_;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = (th3 - th2) * dt_;

  const auto xa = x(k);
  const auto xb = x(k + 1);
  const auto va = v(k);
  const auto vb = v(k + 1);
  const auto aa = acceleration(k);
  const auto ab = acceleration(k + 1);
  x_out = h00 * xa + h10 * va + h01 * xb + h11 * vb;
  v_out = h00 * va + h10 * aa + h01 * vb + h11 * ab;
}

}  // namespace flockcert
