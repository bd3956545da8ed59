#include <cmath>

#include "flockcert/errors.hpp"
#include "flockcert/flocking_conditions.hpp"
#include "flockcert/parallel.hpp"
#include "flockcert/scalar_search.hpp"

namespace flockcert {

namespace {

constexpr double kLengthTol = 1e-6;

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

double exp_bound() { return 1.0 / (2.0 * std::sqrt(2.0)); }

void check_grid(CurveFamily family, const std::vector<double>& grid) {
  for (double x : grid) {
    if (!std::isfinite(x)) throw DomainViolation("grid values must be finite");
    switch (family) {
      case CurveFamily::ExpFig1:
        if (!(x > 0.0) || x > exp_bound() * (1.0 + 1e-12))
          throw DomainViolation("fig1 grid must lie in (0, (2 sqrt 2)^{-1}]");
        break;
      case CurveFamily::UniformFig2:
        if (!(x >= 0.0) || !(x < 0.5)) throw DomainViolation("fig2 grid must lie in [0, 0.5)");
        break;
      case CurveFamily::UniformFig3:
        if (!(x > 0.0)) throw DomainViolation("fig3 grid must be > 0");
        break;
      case CurveFamily::LinearFig4:
        if (!(x > 0.0) || x > std::sqrt(1.5)) throw DomainViolation("fig4 grid must lie in (0, sqrt(3/2)]");
        break;
    }
  }
}

}  // namespace

double uniform_max_length(double a, double alpha, double v0_over_lambda2) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainViolation("a must be >= 0");
  auto feasible = [&](double len) {
    ConditionInput in{1.0, DelayDistribution::uniform(a, a + len), alpha, v0_over_lambda2,
                      std::nullopt, true};
    return find_kappa(in).has_value();
  };
  const double tiny = 1e-9;
  if (!feasible(tiny)) return 0.0;
  double hi = 0.01;
  double lo = tiny;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) return kUnbounded;
  }
  return search::bisect_boundary(feasible, lo, hi, kLengthTol).first;
}

CurveTable critical_curve(CurveFamily family, const std::vector<double>& grid, double alpha,
                          unsigned jobs) {
  check_grid(family, grid);
  CurveTable table;
  switch (family) {
    case CurveFamily::ExpFig1:
      table.columns = {"lambda_mu", "critical_paper", "critical_numeric"};
      break;
    case CurveFamily::UniformFig2:
      table.columns = {"a", "max_length"};
      break;
    case CurveFamily::UniformFig3:
      table.columns = {"b", "critical_v0_over_lambda2"};
      break;
    case CurveFamily::LinearFig4:
      table.columns = {"a", "critical_v0_over_lambda2"};
      break;
  }
  table.rows.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const double x = grid[i];
    switch (family) {
      case CurveFamily::ExpFig1: {
        const double mu = std::min(x, exp_bound());
        table.rows[i] = {x, critical_v0_exponential_paper(x, alpha),
                         critical_v0_numeric(DelayDistribution::exponential(mu), 1.0, alpha)};
        break;
      }
      case CurveFamily::UniformFig2:
        table.rows[i] = {x, uniform_max_length(x, alpha)};
        break;
      case CurveFamily::UniformFig3:
        table.rows[i] = {x, critical_v0_numeric(DelayDistribution::uniform(0.0, x), 1.0, alpha)};
        break;
      case CurveFamily::LinearFig4:
        table.rows[i] = {x, critical_v0_numeric(DelayDistribution::linear(x), 1.0, alpha)};
        break;
    }
  });
  return table;
}

std::vector<double> default_grid(CurveFamily family) {
  switch (family) {
    case CurveFamily::ExpFig1:
      return linspace(0.01, exp_bound(), 200);
    case CurveFamily::UniformFig2:
      return linspace(0.0, 0.17, 100);
    case CurveFamily::UniformFig3:
      return linspace(0.2, 0.3, 100);
    case CurveFamily::LinearFig4:
      return linspace(0.05, 0.4, 100);
  }
  return {};
}

CurveFamily parse_curve_family(const std::string& fig_id) {
  if (fig_id == "fig1" || fig_id == "exp_fig1") return CurveFamily::ExpFig1;
  if (fig_id == "fig2" || fig_id == "uniform_fig2") return CurveFamily::UniformFig2;
  if (fig_id == "fig3" || fig_id == "uniform_fig3") return CurveFamily::UniformFig3;
  if (fig_id == "fig4" || fig_id == "linear_fig4") return CurveFamily::LinearFig4;
  throw ParseError("unknown figure id '" + fig_id + "'");
}

std::string curve_file_stem(CurveFamily family) {
  switch (family) {
    case CurveFamily::ExpFig1:
      return "fig1";
    case CurveFamily::UniformFig2:
      return "fig2";
    case CurveFamily::UniformFig3:
      return "fig3";
    case CurveFamily::LinearFig4:
      return "fig4";
  }
  return "fig";
}

}  // namespace flockcert
