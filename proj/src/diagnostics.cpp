#include <algorithm>
#include <cmath>
#include <numeric>

#include "flockcert/dde_simulator.hpp"
#include "flockcert/flocking_conditions.hpp"
#include "simulator_internal.hpp"

namespace flockcert {

namespace detail {

DiagContext make_diag_context(const SimConfig& cfg, const Quadrature& quad, const History& h,
                              Scratch& s) {
  DiagContext ctx{};
  ctx.cfg = &cfg;
  ctx.quad = &quad;
  const double m2 = moment(cfg.dist, 2);
  ctx.l_coef = m2 > 0.0 ? 2.0 * cfg.lambda * cfg.lambda / std::sqrt(m2) : 0.0;
  ctx.v0 = velocity_fluctuation(h.initial_v());
  ctx.d0 = dissipation_at(h, quad, cfg.rate, 0.0, s);
  ctx.dx0 = diameter(h.initial_x());
  ctx.l0 = ctx.v0 + delay_correction(cfg.dist, cfg.lambda) * ctx.d0;
  return ctx;
}

DiagnosticsRow make_row(const History& h, std::size_t k, double d_k, const DiagContext& ctx) {
  const double dt = h.dt();
  const auto kk = static_cast<long long>(k);
  auto d_at = [&](long long j) {
    if (j < 0) return ctx.d0;
    if (j == kk) return d_k;
    return h.dissipation(static_cast<std::size_t>(j));
  };

  DiagnosticsRow row;
  row.t = h.time(k);
  const AgentMatrix v = h.v(k);
  row.V = velocity_fluctuation(v);
  row.D = d_k;
  row.dX = diameter(h.x(k));
  const Eigen::RowVectorXd mom = v.colwise().sum();
  row.momentum.assign(mom.data(), mom.data() + mom.size());

  // L = V + c \int s \int_0^s (s - u) D(t - u) du dP(s), with D piecewise
  // linear between grid nodes. A = \int_0^s D, B = \int_0^s u D.
  double delayed = 0.0;
  if (ctx.l_coef > 0.0) {
    const auto& nodes = ctx.quad->nodes;
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return nodes[a] < nodes[b]; });
    double a_sum = 0.0;
    double b_sum = 0.0;
    long long cell = 0;
    for (std::size_t q : order) {
      const double s = nodes[q];
      if (s <= 0.0) continue;
      while (static_cast<double>(cell + 1) * dt <= s) {
        const double u0 = static_cast<double>(cell) * dt;
        const double da = d_at(kk - cell);
        const double db = d_at(kk - cell - 1);
        a_sum += 0.5 * dt * (da + db);
        b_sum += dt / 6.0 * (u0 * da + 2.0 * (u0 + 0.5 * dt) * (da + db) + (u0 + dt) * db);
        ++cell;
      }
      const double u0 = static_cast<double>(cell) * dt;
      const double part = s - u0;
      double a_part = 0.0;
      double b_part = 0.0;
      if (part > 0.0) {
        const double da = d_at(kk - cell);
        const double db = d_at(kk - cell - 1);
        const double ds = da + part / dt * (db - da);
        a_part = 0.5 * part * (da + ds);
        b_part = part / 6.0 * (u0 * da + 2.0 * (u0 + 0.5 * part) * (da + ds) + s * ds);
      }
      delayed += ctx.quad->weights[q] * s * (s * (a_sum + a_part) - (b_sum + b_part));
    }
  }
  row.L = row.V + ctx.l_coef * delayed;

  const double reach = ctx.dx0 + std::sqrt(2.0 * ctx.l0) * row.t;
  row.phi_lower = ctx.cfg->rate.from_squared(reach * reach);
  return row;
}

}  // namespace detail

DiagnosticsRow diagnostics_at(const History& history, double t, const SimConfig& config) {
  const double dt = history.dt();
  const double pos = t / dt;
  const double k_real = std::round(pos);
  if (!(t >= 0.0) || std::abs(pos - k_real) > 1e-9 * std::max(1.0, pos))
    throw DomainViolation("diagnostics are available at grid times only");
  const auto k = static_cast<std::size_t>(k_real);
  if (k >= history.size()) throw HistoryUnderflow("diagnostics requested beyond stored data");
  const auto quad = quadrature(config.dist, config.quad_order, config.tail_mass_tol);
  detail::Scratch s;
  const auto ctx = detail::make_diag_context(config, quad, history, s);
  const double d_k = detail::dissipation_at(history, quad, config.rate, history.time(k), s);
  return detail::make_row(history, k, d_k, ctx);
}

double fit_decay_rate(const DiagnosticsSeries& series, double t_a, double t_b) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const auto& row : series.rows) {
    if (row.t < t_a || row.t > t_b) continue;
    if (!(row.V > 0.0)) throw DegenerateWindow("V vanishes inside the fit window");
    const double y = std::log(row.V);
    sx += row.t;
    sy += y;
    sxx += row.t * row.t;
    sxy += row.t * y;
    ++n;
  }
  if (n < 8) throw DegenerateWindow("fewer than 8 samples in the fit window");
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  if (!(denom > 0.0)) throw DegenerateWindow("fit window has no time spread");
  return -(nn * sxy - sx * sy) / denom;
}

std::string to_string(EstimateKind kind) {
  switch (kind) {
    case EstimateKind::ForwardBackward:
      return "forward_backward";
    case EstimateKind::Lyapunov:
      return "lyapunov";
    case EstimateKind::Diameter:
      return "diameter";
    case EstimateKind::Decay:
      return "decay";
  }
  return "unknown";
}

std::size_t ViolationReport::count(EstimateKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

ViolationReport verify_estimates(const DiagnosticsSeries& series, double kappa,
                                 const SimConfig& config, double run_l_zero) {
  ViolationReport report;
  const auto& rows = series.rows;
  if (rows.empty()) return report;

  std::vector<double> times(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) times[i] = rows[i].t;
  auto d_interp = [&](double tau) {
    if (tau <= 0.0) return series.d0;
    const auto it = std::upper_bound(times.begin(), times.end(), tau);
    if (it == times.end()) return rows.back().D;
    const auto j = static_cast<std::size_t>(it - times.begin());
    const double ta = times[j - 1];
    const double tb = times[j];
    const double w = (tau - ta) / (tb - ta);
    return (1.0 - w) * rows[j - 1].D + w * rows[j].D;
  };

  const auto quad = quadrature(config.dist, config.quad_order, config.tail_mass_tol);
  const double l_first = rows.front().L;
  const double speed = std::sqrt(2.0 * run_l_zero);
  const double omega = 2.0 * config.lambda *
                       (1.0 - 2.0 * config.lambda * std::sqrt(k_moment(config.dist, kappa)));
  auto phi = [&](double t) {
    const double r = series.dx0 + speed * t;
    return config.rate.from_squared(r * r);
  };

  double phi_integral = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i > 0) phi_integral += 0.5 * (row.t - rows[i - 1].t) * (phi(row.t) + phi(rows[i - 1].t));

    if (row.t > 0.0) {
      for (double s : quad.nodes) {
        if (s <= 0.0) continue;
        const double past = d_interp(row.t - s);
        const double slack = 1e-9 * row.D;
        const double lower = std::exp(-kappa * s) * row.D;
        const double upper = std::exp(kappa * s) * row.D;
        if (past < lower - slack)
          report.violations.push_back({EstimateKind::ForwardBackward, row.t, s, past, lower});
        else if (past > upper + slack)
          report.violations.push_back({EstimateKind::ForwardBackward, row.t, s, past, upper});
      }
    }
    if (row.L > l_first * (1.0 + 1e-9))
      report.violations.push_back({EstimateKind::Lyapunov, row.t, 0.0, row.L, l_first});
    const double dx_bound = series.dx0 + speed * row.t + 1e-9;
    if (row.dX > dx_bound)
      report.violations.push_back({EstimateKind::Diameter, row.t, 0.0, row.dX, dx_bound});
    const double v_bound = series.v0 * std::exp(-omega * phi_integral);
    if (row.V > v_bound * (1.0 + 1e-9))
      report.violations.push_back({EstimateKind::Decay, row.t, 0.0, row.V, v_bound});
  }
  return report;
}

}  // namespace flockcert
