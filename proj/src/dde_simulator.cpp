#include "flockcert/dde_simulator.hpp"

#include <algorithm>
#include <cmath>

#include "flockcert/flocking_conditions.hpp"
#include "simulator_internal.hpp"

namespace flockcert {

NonFiniteState::NonFiniteState(const std::string& what, DiagnosticsSeries partial)
    : Error(what), partial_(std::make_shared<const DiagnosticsSeries>(std::move(partial))) {}

double default_dt(const DelayDistribution& dist, double tail_mass_tol) {
  const double horizon = truncation_horizon(dist, tail_mass_tol);
  return horizon > 0.0 ? std::min(1e-2, horizon / 40.0) : 1e-2;
}

SimConfig resolve(const SimConfig& config) {
  SimConfig c = config;
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) throw ConfigInvalid("lambda must be finite and > 0");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw ConfigInvalid("t_end must be finite and > 0");
  if (c.quad_order < 1) throw ConfigInvalid("quadrature order must be >= 1");
  if (!(c.tail_mass_tol > 0.0 && c.tail_mass_tol < 1.0))
    throw ConfigInvalid("tail mass tolerance must lie in (0, 1)");
  if (c.diag_stride < 1) throw ConfigInvalid("diagnostic stride must be >= 1");
  if (c.dt == 0.0) c.dt = std::min(default_dt(c.dist, c.tail_mass_tol), c.t_end);
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigInvalid("dt must be finite and > 0");
  if (c.dt > c.t_end) throw ConfigInvalid("dt must not exceed t_end");
  const double horizon = truncation_horizon(c.dist, c.tail_mass_tol);
  if (horizon > 0.0 && c.dt > horizon / 4.0 * (1.0 + 1e-12))
    throw ConfigInvalid("dt must not exceed a quarter of the delay horizon");
  return c;
}

namespace detail {

void accumulate_pairs(const CommunicationRate& rate, const AgentMatrix& x, const AgentMatrix& v,
                      double weight, AgentMatrix& acc) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double* px = x.data();
  const double* pv = v.data();
  double* pa = acc.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double dx = px[j * d + k] - px[i * d + k];
        r2 += dx * dx;
      }
      const double coef = weight * rate.from_squared(r2);
      for (Eigen::Index k = 0; k < d; ++k) {
        const double dv = coef * (pv[j * d + k] - pv[i * d + k]);
        pa[i * d + k] += dv;
        pa[j * d + k] -= dv;
      }
    }
  }
}

double pair_energy(const CommunicationRate& rate, const AgentMatrix& x, const AgentMatrix& v) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double* px = x.data();
  const double* pv = v.data();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      double w2 = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double dx = px[j * d + k] - px[i * d + k];
        const double dv = pv[j * d + k] - pv[i * d + k];
        r2 += dx * dx;
        w2 += dv * dv;
      }
      acc += rate.from_squared(r2) * w2;
    }
  }
  return acc;
}

double dissipation_at(const History& h, const Quadrature& quad, const CommunicationRate& rate,
                      double t, Scratch& s) {
  double acc = 0.0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    h.evaluate(t - quad.nodes[q], s.x, s.v);
    acc += quad.weights[q] * pair_energy(rate, s.x, s.v);
  }
  return acc;
}

void rhs(const History& h, const Quadrature& quad, const SimConfig& cfg, double t,
         const AgentMatrix& xs, const AgentMatrix& vs, const StepContext& ctx, Scratch& s,
         AgentMatrix& acc) {
  acc.setZero(xs.rows(), xs.cols());
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double node = quad.nodes[q];
    const double w = quad.weights[q];
    if (node == 0.0) {
      accumulate_pairs(cfg.rate, xs, vs, w, acc);
      continue;
    }
    const double tau = t - node;
    if (ctx.k1v != nullptr && tau > ctx.t_n) {
      const double lag = tau - ctx.t_n;
      s.x = *ctx.x_n + lag * *ctx.v_n;
      s.v = *ctx.v_n + lag * *ctx.k1v;
    } else {
      h.evaluate(tau, s.x, s.v);
    }
    accumulate_pairs(cfg.rate, s.x, s.v, w, acc);
  }
  acc *= cfg.lambda / static_cast<double>(xs.rows());
}

}  // namespace detail

AgentMatrix accelerations(const History& history, double t, const SimConfig& config) {
  const auto quad = quadrature(config.dist, config.quad_order, config.tail_mass_tol);
  detail::Scratch s;
  AgentMatrix xs;
  AgentMatrix vs;
  history.evaluate(t, xs, vs);
  AgentMatrix acc;
  detail::rhs(history, quad, config, t, xs, vs, detail::StepContext{}, s, acc);
  return acc;
}

RunResult run(const SimConfig& config, const SwarmState& initial) {
  const SimConfig cfg = resolve(config);
  validate(initial);
  if (initial.t != 0.0) throw ConfigInvalid("initial state must be given at t = 0");

  const auto quad = quadrature(cfg.dist, cfg.quad_order, cfg.tail_mass_tol);
  const double dt = cfg.dt;
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  const double guard = 1e6 * (1.0 + initial.v.rowwise().norm().maxCoeff());

  History h(initial.x, initial.v, dt);
  detail::Scratch s;
  const auto ctx = detail::make_diag_context(cfg, quad, h, s);
  DiagnosticsSeries series;
  series.v0 = ctx.v0;
  series.d0 = ctx.d0;
  series.dx0 = ctx.dx0;
  series.l0 = ctx.l0;

  AgentMatrix x = initial.x;
  AgentMatrix v = initial.v;
  AgentMatrix k1v, k2v, k3v, k4v, x2, v2, x3, v3, x4, v4;
  for (std::size_t n = 0;; ++n) {
    const double t_n = h.time(n);
    detail::rhs(h, quad, cfg, t_n, x, v, detail::StepContext{}, s, k1v);
    h.set_acceleration(n, k1v);
    h.push_dissipation(detail::dissipation_at(h, quad, cfg.rate, t_n, s));
    if (n % static_cast<std::size_t>(cfg.diag_stride) == 0 || n == steps)
      series.rows.push_back(detail::make_row(h, n, h.dissipation(n), ctx));
    if (n == steps) break;

    const detail::StepContext step{t_n, &x, &v, &k1v};
    x2 = x + 0.5 * dt * v;
    v2 = v + 0.5 * dt * k1v;
    detail::rhs(h, quad, cfg, t_n + 0.5 * dt, x2, v2, step, s, k2v);
    x3 = x + 0.5 * dt * v2;
    v3 = v + 0.5 * dt * k2v;
    detail::rhs(h, quad, cfg, t_n + 0.5 * dt, x3, v3, step, s, k3v);
    x4 = x + dt * v3;
    v4 = v + dt * k3v;
    detail::rhs(h, quad, cfg, t_n + dt, x4, v4, step, s, k4v);

    x += (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!x.allFinite() || !v.allFinite() || v.rowwise().norm().maxCoeff() > guard)
      throw NonFiniteState("state blew up at t = " + std::to_string(h.time(n + 1)), series);
    h.append(x, v, k4v);
  }
  return RunResult{std::move(h), std::move(series)};
}

}  // namespace flockcert
