#pragma once

#include "flockcert/dde_simulator.hpp"

namespace flockcert::detail {

struct Scratch {
  AgentMatrix x;
  AgentMatrix v;
};

/// Current RK step: committed node t_n and its first-stage slope, used to
/// extrapolate delayed queries that land inside the step.
struct StepContext {
  double t_n = 0.0;
  const AgentMatrix* x_n = nullptr;
  const AgentMatrix* v_n = nullptr;
  const AgentMatrix* k1v = nullptr;
};

void accumulate_pairs(const CommunicationRate& rate, const AgentMatrix& x, const AgentMatrix& v,
                      double weight, AgentMatrix& acc);

/// sum_{i<j} psi(|x_i - x_j|) |v_i - v_j|^2.
double pair_energy(const CommunicationRate& rate, const AgentMatrix& x, const AgentMatrix& v);

double dissipation_at(const History& h, const Quadrature& quad, const CommunicationRate& rate,
                      double t, Scratch& s);

void rhs(const History& h, const Quadrature& quad, const SimConfig& cfg, double t,
         const AgentMatrix& xs, const AgentMatrix& vs, const StepContext& ctx, Scratch& s,
         AgentMatrix& acc);

struct DiagContext {
  const SimConfig* cfg;
  const Quadrature* quad;
  /// 2 lambda^2 / sqrt(M2), 0 without delay.
  double l_coef;
  double v0;
  double d0;
  double dx0;
  double l0;
};

DiagContext make_diag_context(const SimConfig& cfg, const Quadrature& quad, const History& h,
                              Scratch& s);

/// Row at node k, with D(t_k) = d_k and earlier D values read from the history.
DiagnosticsRow make_row(const History& h, std::size_t k, double d_k, const DiagContext& ctx);

}  // namespace flockcert::detail
