#include "flockcert/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "flockcert/communication_rate.hpp"
#include "flockcert/csv.hpp"
#include "flockcert/dde_simulator.hpp"
#include "flockcert/delay_distribution.hpp"
#include "flockcert/errors.hpp"
#include "flockcert/flocking_conditions.hpp"
#include "flockcert/numfmt.hpp"
#include "flockcert/parallel.hpp"

namespace flockcert::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string dist;
  double lambda = 1.0;
  double beta = 0.0;
  double alpha = 0.0;
  double v0 = 0.0;
  double d0 = 0.0;
  bool weak = false;
  int agents = 8;
  int dim = 2;
  std::uint64_t seed = 0;
  double pos_box = 1.0;
  double vel_dispersion = 1.0;
  double dt = 0.0;
  double tmax = 10.0;
  int quad_order = kDefaultQuadratureOrder;
  double tail_tol = kDefaultTailMassTol;
  std::string fig;
  std::string grid;
  std::string axis;
  std::string out;
  unsigned jobs = 1;
  bool simulate = false;

  CLI::Option* alpha_opt = nullptr;
  CLI::Option* v0_opt = nullptr;
  CLI::Option* d0_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  std::vector<CLI::Option*> ic_opts;
};

unsigned default_jobs() {
  if (const char* env = std::getenv("FLOCKCERT_JOBS")) {
    const std::string_view text(env);
    unsigned value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value == 0)
      throw ParseError("FLOCKCERT_JOBS must be a positive integer");
    return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ordered_json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json number(const std::optional<double>& v) { return v ? number(*v) : ordered_json(); }

csv::Cell cell(double v) { return std::isnan(v) ? csv::Cell("") : csv::Cell(v); }
csv::Cell cell(const std::optional<double>& v) { return v ? cell(*v) : csv::Cell(""); }

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigInvalid("cannot open '" + path + "' for writing");
  return f;
}

std::vector<double> parse_values(const std::string& spec) {
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ParseError("range must be start:stop:count, got '" + spec + "'");
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    int count = 0;
    const auto res = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
    if (res.ec != std::errc() || res.ptr != parts[2].data() + parts[2].size() || count < 0)
      throw ParseError("range count must be a non-negative integer, got '" + parts[2] + "'");
    for (int i = 0; i < count; ++i)
      values.push_back(count == 1 ? lo : (i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1)));
  } else if (!spec.empty()) {
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) values.push_back(parse_double(token));
  }
  for (double v : values)
    if (!std::isfinite(v)) throw ParseError("grid values must be finite");
  return values;
}

CLI::Option* add_model_options(CLI::App* sub, Options& o) {
  sub->add_option("--dist", o.dist, "delay distribution, e.g. exponential:mu=0.1")->required();
  sub->add_option("--lambda", o.lambda, "coupling strength")->capture_default_str();
  sub->add_option("--beta", o.beta, "communication rate exponent")->capture_default_str();
  auto* alpha = sub->add_option("--alpha", o.alpha, "log-derivative constant (default 2 beta)");
  sub->add_option("--quad-order", o.quad_order, "quadrature order")->capture_default_str();
  sub->add_option("--tail-tol", o.tail_tol, "tail mass tolerance")->capture_default_str();
  return alpha;
}

std::vector<CLI::Option*> add_ic_options(CLI::App* sub, Options& o) {
  return {
      sub->add_option("--N", o.agents, "number of agents")->capture_default_str(),
      sub->add_option("--dim", o.dim, "space dimension")->capture_default_str(),
      sub->add_option("--seed", o.seed, "random seed")->capture_default_str(),
      sub->add_option("--pos-box", o.pos_box, "half-width of the position box")->capture_default_str(),
      sub->add_option("--vel-dispersion", o.vel_dispersion, "velocity standard deviation")
          ->capture_default_str(),
  };
}

void add_sim_options(CLI::App* sub, Options& o) {
  sub->add_option("--dt", o.dt, "step size (default min(1e-2, horizon/40))");
  sub->add_option("--tmax", o.tmax, "final time")->capture_default_str();
}

void add_jobs_option(CLI::App* sub, Options& o) {
  sub->add_option("--jobs", o.jobs, "worker threads (default FLOCKCERT_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
}

bool ic_given(const Options& o) {
  return std::any_of(o.ic_opts.begin(), o.ic_opts.end(), [](CLI::Option* opt) { return opt->count() > 0; });
}

double resolved_alpha(const Options& o, const CommunicationRate& rate) {
  return o.alpha_opt->count() > 0 ? o.alpha : rate.alpha();
}

SwarmState make_swarm(const Options& o) {
  auto state = random_swarm(o.agents, o.dim, o.seed, o.pos_box, o.vel_dispersion);
  if (o.v0_opt->count() > 0) scale_fluctuation(state, o.v0);
  return state;
}

SimConfig make_sim_config(const Options& o, double lambda, const CommunicationRate& rate,
                          const DelayDistribution& dist) {
  return SimConfig{lambda, rate, dist, o.dt, o.tmax, o.quad_order, o.tail_tol, o.seed, 1};
}

std::optional<double> critical_paper(const DelayDistribution& dist, double lambda, double alpha) {
  const auto* e = std::get_if<Exponential>(&dist.variant());
  if (e == nullptr || !(alpha > 0.0)) return std::nullopt;
  const double x = lambda * e->mu;
  if (x > 1.0 / (2.0 * std::sqrt(2.0)) * (1.0 + 1e-12)) return std::nullopt;
  return critical_v0_exponential_paper(x, alpha);
}

std::optional<double> try_fit(const DiagnosticsSeries& series, double t_end) {
  try {
    return fit_decay_rate(series, 0.5 * t_end, t_end);
  } catch (const DegenerateWindow&) {
    return std::nullopt;
  }
}

int cmd_check(const Options& o, std::ostream& out) {
  const CommunicationRate rate(o.beta);
  const double alpha = resolved_alpha(o, rate);
  const auto dist = DelayDistribution::parse(o.dist);
  const bool ic = ic_given(o);
  if (ic && o.v0_opt->count() > 0)
    throw ParseError("--v0 and an initial-condition spec are mutually exclusive");
  if (!ic && o.v0_opt->count() == 0) throw ParseError("need --v0 or an initial-condition spec");

  double v0 = o.v0;
  std::optional<double> d0;
  if (o.d0_opt->count() > 0) d0 = o.d0;
  if (ic) {
    const auto state = random_swarm(o.agents, o.dim, o.seed, o.pos_box, o.vel_dispersion);
    v0 = velocity_fluctuation(state.v);
    if (!d0) d0 = constant_datum_dissipation(rate, state);
  }
  const ConditionInput input{o.lambda, dist, alpha, v0, d0, o.weak};
  const auto report = evaluate(input);

  ordered_json j;
  j["input"] = {{"lambda", number(o.lambda)}, {"dist", dist.literal()}, {"beta", number(o.beta)},
                {"alpha", number(alpha)},     {"v0", number(v0)},         {"d0", number(d0)},
                {"weak", o.weak}};
  j["m2_margin"] = number(report.m2_margin);
  j["kappa_star"] = number(report.kappa_star);
  j["k_margin"] = number(report.k_margin_at_star);
  j["mexp_margin"] = number(report.mexp_margin_at_star);
  j["feasible"] = report.feasible;
  j["omega"] = number(report.omega);
  j["l_zero"] = number(report.l_zero);
  j["critical_v0_numeric"] = number(critical_v0_numeric(dist, o.lambda, alpha));
  if (std::holds_alternative<Exponential>(dist.variant()))
    j["critical_v0_paper"] = number(critical_paper(dist, o.lambda, alpha));

  const std::string text = j.dump(2) + "\n";
  out << text;
  if (o.out_opt->count() > 0) open_output(o.out) << text;
  return report.feasible ? kOk : kInfeasible;
}

void write_curve(const CurveTable& table, std::ostream& os) {
  csv::Writer w(os);
  w.header(table.columns);
  for (const auto& row : table.rows) w.row(std::vector<csv::Cell>(row.begin(), row.end()));
}

double figure_alpha(const Options& o) { return o.alpha_opt->count() > 0 ? o.alpha : 1.0; }

int cmd_critical(const Options& o, std::ostream& out) {
  const auto family = parse_curve_family(o.fig);
  const auto grid = o.grid.empty() ? default_grid(family) : parse_values(o.grid);
  const auto table = critical_curve(family, grid, figure_alpha(o), o.jobs);
  if (o.out_opt->count() > 0) {
    auto f = open_output(o.out);
    write_curve(table, f);
  } else {
    write_curve(table, out);
  }
  return kOk;
}

int cmd_figures(const Options& o, std::ostream& out) {
  const std::string dir = o.out_opt->count() > 0 ? o.out : ".";
  for (auto family : {CurveFamily::ExpFig1, CurveFamily::UniformFig2, CurveFamily::UniformFig3,
                      CurveFamily::LinearFig4}) {
    const auto table = critical_curve(family, default_grid(family), figure_alpha(o), o.jobs);
    const std::string path = dir + "/" + curve_file_stem(family) + ".csv";
    auto f = open_output(path);
    write_curve(table, f);
    out << path << "\n";
  }
  return kOk;
}

void write_series(const DiagnosticsSeries& series, int dim, std::ostream& os) {
  csv::Writer w(os);
  std::vector<std::string> header = {"t", "V", "D", "dX", "L"};
  for (int k = 1; k <= dim; ++k) header.push_back("mom_" + std::to_string(k));
  header.push_back("phi_lower");
  w.header(header);
  for (const auto& r : series.rows) {
    std::vector<csv::Cell> cells = {r.t, r.V, r.D, r.dX, r.L};
    for (double m : r.momentum) cells.emplace_back(m);
    cells.emplace_back(r.phi_lower);
    w.row(cells);
  }
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const CommunicationRate rate(o.beta);
  const double alpha = resolved_alpha(o, rate);
  const auto dist = DelayDistribution::parse(o.dist);
  const auto cfg = resolve(make_sim_config(o, o.lambda, rate, dist));
  const auto state = make_swarm(o);

  DiagnosticsSeries series;
  std::string status = "ok";
  try {
    series = run(cfg, state).diagnostics;
  } catch (const NonFiniteState& e) {
    series = e.partial();
    status = "aborted";
    err << "error: " << e.what() << "\n";
  }

  const std::string path = o.out_opt->count() > 0 ? o.out : "trajectory.csv";
  {
    auto f = open_output(path);
    write_series(series, o.dim, f);
  }

  const auto report = evaluate(ConditionInput{o.lambda, dist, alpha, series.v0, series.d0, false});
  ordered_json j;
  j["V0"] = number(series.v0);
  j["D0"] = number(series.d0);
  j["L0"] = number(series.l0);
  j["fitted_decay_rate"] = status == "ok" ? number(try_fit(series, cfg.t_end)) : ordered_json();
  j["feasible"] = report.feasible;
  j["kappa_star"] = number(report.kappa_star);
  j["omega"] = number(report.omega);
  if (report.feasible && status == "ok")
    j["violations_count"] = verify_estimates(series, *report.kappa_star, cfg, series.l0).violations.size();
  else
    j["violations_count"] = nullptr;
  j["status"] = status;

  const std::string text = j.dump(2) + "\n";
  out << text;
  open_output(path + ".summary.json") << text;
  return status == "ok" ? kOk : kNumericalAbort;
}

struct Axis {
  std::string name;
  std::vector<double> values;
};

Axis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ParseError("axis must be name=values, got '" + spec + "'");
  Axis axis{spec.substr(0, eq), parse_values(spec.substr(eq + 1))};
  static const std::vector<std::string> names = {"lambda", "mu", "tau", "a", "b", "A", "v0", "beta"};
  if (std::find(names.begin(), names.end(), axis.name) == names.end())
    throw ParseError("unknown axis '" + axis.name + "'");
  std::stable_sort(axis.values.begin(), axis.values.end());
  return axis;
}

DelayDistribution with_axis(const DelayDistribution& base, const std::string& name, double value) {
  const auto& var = base.variant();
  auto mismatch = [&] {
    return ParseError("axis '" + name + "' does not apply to " + std::string(base.family()));
  };
  if (name == "mu") {
    if (!std::holds_alternative<Exponential>(var)) throw mismatch();
    return DelayDistribution::exponential(value);
  }
  if (name == "tau") {
    if (!std::holds_alternative<Dirac>(var)) throw mismatch();
    return DelayDistribution::dirac(value);
  }
  if (name == "a" || name == "b") {
    const auto* u = std::get_if<Uniform>(&var);
    if (u == nullptr) throw mismatch();
    return name == "a" ? DelayDistribution::uniform(value, u->b_hi)
                       : DelayDistribution::uniform(u->a_lo, value);
  }
  if (name == "A") {
    if (!std::holds_alternative<Linear>(var)) throw mismatch();
    return DelayDistribution::linear(value);
  }
  return base;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto axis = parse_axis(o.axis);
  const auto base = DelayDistribution::parse(o.dist);
  const bool have_v0 = o.v0_opt->count() > 0 || axis.name == "v0";
  if (!have_v0 && !o.simulate) throw ParseError("sweep needs --v0 (or --simulate with an initial-condition spec)");

  std::vector<std::vector<csv::Cell>> rows(axis.values.size());
  parallel_for(axis.values.size(), o.jobs, [&](std::size_t i) {
    const double value = axis.values[i];
    const double lambda = axis.name == "lambda" ? value : o.lambda;
    const double beta = axis.name == "beta" ? value : o.beta;
    const auto dist = with_axis(base, axis.name, value);
    const CommunicationRate rate(beta);
    const double alpha = resolved_alpha(o, rate);

    std::optional<SwarmState> state;
    double v0 = axis.name == "v0" ? value : o.v0;
    std::optional<double> d0;
    if (o.d0_opt->count() > 0) d0 = o.d0;
    if (o.simulate) {
      state = random_swarm(o.agents, o.dim, o.seed, o.pos_box, o.vel_dispersion);
      if (have_v0) scale_fluctuation(*state, v0);
      v0 = velocity_fluctuation(state->v);
      if (!d0) d0 = constant_datum_dissipation(rate, *state);
    }
    const auto report = evaluate(ConditionInput{lambda, dist, alpha, v0, d0, o.weak});
    const double critical = critical_v0_numeric(dist, lambda, alpha);

    std::optional<double> fitted;
    if (state) {
      try {
        const auto cfg = resolve(make_sim_config(o, lambda, rate, dist));
        fitted = try_fit(run(cfg, *state).diagnostics, cfg.t_end);
      } catch (const NonFiniteState&) {
        fitted.reset();
      }
    }
    rows[i] = {axis.name,           value,     std::string(dist.literal()), lambda,
               beta,                alpha,     v0,                          report.m2_margin,
               report.feasible,     cell(report.kappa_star),                cell(report.omega),
               critical,            cell(fitted)};
  });

  auto emit = [&](std::ostream& os) {
    csv::Writer w(os);
    w.header({"axis", "value", "dist", "lambda", "beta", "alpha", "v0", "m2_margin", "feasible",
              "kappa_star", "omega", "critical_v0_numeric", "fitted_decay_rate"});
    for (const auto& r : rows) w.row(r);
  };
  if (o.out_opt->count() > 0) {
    auto f = open_output(o.out);
    emit(f);
  } else {
    emit(out);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Flocking certificates for Cucker-Smale dynamics with distributed delays", "flockcert"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "evaluate the flocking conditions");
  auto* check_alpha = add_model_options(check, o);
  auto* check_v0 = check->add_option("--v0", o.v0, "initial velocity fluctuation V(0)");
  auto* check_d0 = check->add_option("--d0", o.d0, "initial dissipation D(0)");
  check->add_flag("--weak", o.weak, "use D(0) <= V(0) in L(0)");
  const auto check_ic = add_ic_options(check, o);
  auto* check_out = check->add_option("--out", o.out, "also write the JSON report here");

  auto* critical = app.add_subcommand("critical", "critical-curve data for one figure");
  critical->add_option("--fig", o.fig, "fig1, fig2, fig3 or fig4")->required();
  critical->add_option("--grid", o.grid, "abscissae: start:stop:count or a comma list");
  auto* critical_alpha = critical->add_option("--alpha", o.alpha, "log-derivative constant (default 1)");
  auto* critical_out = critical->add_option("--out", o.out, "CSV path (default stdout)");
  add_jobs_option(critical, o);

  auto* figures = app.add_subcommand("figures", "write fig1.csv .. fig4.csv");
  auto* figures_alpha = figures->add_option("--alpha", o.alpha, "log-derivative constant (default 1)");
  auto* figures_out = figures->add_option("--out", o.out, "output directory (default .)");
  add_jobs_option(figures, o);

  auto* simulate = app.add_subcommand("simulate", "integrate the delay system");
  auto* sim_alpha = add_model_options(simulate, o);
  auto* sim_v0 = simulate->add_option("--v0", o.v0, "rescale the initial fluctuation to this V(0)");
  add_ic_options(simulate, o);
  add_sim_options(simulate, o);
  auto* sim_out = simulate->add_option("--out", o.out, "diagnostics CSV path (default trajectory.csv)");

  auto* sweep = app.add_subcommand("sweep", "evaluate conditions along a parameter axis");
  auto* sweep_alpha = add_model_options(sweep, o);
  auto* sweep_v0 = sweep->add_option("--v0", o.v0, "initial velocity fluctuation V(0)");
  auto* sweep_d0 = sweep->add_option("--d0", o.d0, "initial dissipation D(0)");
  sweep->add_flag("--weak", o.weak, "use D(0) <= V(0) in L(0)");
  sweep->add_option("--axis", o.axis, "name=start:stop:count or name=v1,v2,...")->required();
  sweep->add_flag("--simulate", o.simulate, "also run a simulation per point and fit the decay rate");
  add_ic_options(sweep, o);
  add_sim_options(sweep, o);
  auto* sweep_out = sweep->add_option("--out", o.out, "CSV path (default stdout)");
  add_jobs_option(sweep, o);

  try {
    o.jobs = default_jobs();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) {
      o.alpha_opt = check_alpha;
      o.v0_opt = check_v0;
      o.d0_opt = check_d0;
      o.out_opt = check_out;
      o.ic_opts = check_ic;
      return cmd_check(o, out);
    }
    if (critical->parsed()) {
      o.alpha_opt = critical_alpha;
      o.out_opt = critical_out;
      return cmd_critical(o, out);
    }
    if (figures->parsed()) {
      o.alpha_opt = figures_alpha;
      o.out_opt = figures_out;
      return cmd_figures(o, out);
    }
    if (simulate->parsed()) {
      o.alpha_opt = sim_alpha;
      o.v0_opt = sim_v0;
      o.out_opt = sim_out;
      return cmd_simulate(o, out, err);
    }
    if (sweep->parsed()) {
      o.alpha_opt = sweep_alpha;
      o.v0_opt = sweep_v0;
      o.d0_opt = sweep_d0;
      o.out_opt = sweep_out;
      return cmd_sweep(o, out);
    }
  } catch (const NonFiniteState& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainViolation& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigInvalid& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalAbort;
  }
  return kUsage;
}

}  // namespace flockcert::cli
