#include "flockcert/delay_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "flockcert/errors.hpp"
#include "flockcert/gauss_rules.hpp"
#include "flockcert/numfmt.hpp"

namespace flockcert {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this value of kappa * support_end the closed forms for compact
// variants lose digits to cancellation; the positive-term moment series is
// used instead.
constexpr double kSeriesSwitch = 1.0;
constexpr int kMaxSeriesTerms = 200;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainViolation(std::string(what) + " must be finite");
}

void check_kappa(double kappa) {
  if (!(kappa >= 0.0)) throw DomainViolation("kappa must be >= 0");
}

// sum_{n>=0} kappa^n M_n / n!
double exp_moment_series(const DelayDistribution& dist, double kappa) {
  double coef = 1.0;
  double sum = 0.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double term = coef * moment(dist, n);
    sum += term;
    if (n > 2 && term <= 1e-17 * sum) break;
    coef *= kappa / (n + 1);
  }
  return sum;
}

// sum_{n>=1} kappa^{n-1} M_{n+1} / n!
double k_moment_series(const DelayDistribution& dist, double kappa) {
  double coef = 1.0;
  double sum = 0.0;
  for (int n = 1; n < kMaxSeriesTerms; ++n) {
    const double term = coef * moment(dist, n + 1);
    sum += term;
    if (n > 2 && term <= 1e-17 * sum) break;
    coef *= kappa / (n + 1);
  }
  return sum;
}

// \int_0^1 e^{yu} du
double phi1(double y) { return y == 0.0 ? 1.0 : std::expm1(y) / y; }

// \int_0^1 u e^{yu} du
double phi2(double y) {
  if (std::abs(y) < 1.0) {
    double coef = 1.0;
    double sum = 0.0;
    for (int n = 0; n < 60; ++n) {
      const double term = coef / (n + 2);
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
      coef *= y / (n + 1);
    }
    return sum;
  }
  return (std::exp(y) * (y - 1.0) + 1.0) / (y * y);
}

bool use_series(const DelayDistribution& dist, double kappa) {
  return dist.has_compact_support() && kappa * dist.support_end() < kSeriesSwitch &&
         !std::holds_alternative<Dirac>(dist.variant());
}

}  // namespace

DelayDistribution DelayDistribution::dirac(double tau) {
  require_finite(tau, "tau");
  if (tau < 0.0) throw DomainViolation("dirac: tau must be >= 0");
  return DelayDistribution(Dirac{tau});
}

DelayDistribution DelayDistribution::exponential(double mu) {
  require_finite(mu, "mu");
  if (!(mu > 0.0)) throw DomainViolation("exponential: mu must be > 0");
  return DelayDistribution(Exponential{mu});
}

DelayDistribution DelayDistribution::uniform(double a_lo, double b_hi) {
  require_finite(a_lo, "a");
  require_finite(b_hi, "b");
  if (a_lo < 0.0) throw DomainViolation("uniform: a must be >= 0");
  if (!(a_lo < b_hi)) throw DomainViolation("uniform: a < b required");
  return DelayDistribution(Uniform{a_lo, b_hi});
}

DelayDistribution DelayDistribution::linear(double a_max) {
  require_finite(a_max, "A");
  if (!(a_max > 0.0)) throw DomainViolation("linear: A must be > 0");
  return DelayDistribution(Linear{a_max});
}

DelayDistribution DelayDistribution::parse(std::string_view literal) {
  const auto colon = literal.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("distribution literal '" + std::string(literal) +
                     "' lacks ':' (expected e.g. exponential:mu=1)");
  const std::string family(literal.substr(0, colon));
  std::string_view rest = literal.substr(colon + 1);

  std::map<std::string, double, std::less<>> params;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError("malformed parameter '" + std::string(item) + "' in '" +
                       std::string(literal) + "'");
    const std::string key(item.substr(0, eq));
    if (params.count(key)) throw ParseError("duplicate parameter '" + key + "'");
    params[key] = parse_double(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
    if (rest.empty()) throw ParseError("trailing ',' in '" + std::string(literal) + "'");
  }

  auto expect = [&](std::initializer_list<const char*> keys) {
    if (params.size() != keys.size())
      throw ParseError("wrong parameter set for '" + family + "' in '" + std::string(literal) + "'");
    for (const char* k : keys)
      if (!params.count(k))
        throw ParseError("missing parameter '" + std::string(k) + "' for '" + family + "'");
  };

  if (family == "dirac") {
    expect({"tau"});
    return dirac(params["tau"]);
  }
  if (family == "exponential") {
    expect({"mu"});
    return exponential(params["mu"]);
  }
  if (family == "uniform") {
    expect({"a", "b"});
    return uniform(params["a"], params["b"]);
  }
  if (family == "linear") {
    expect({"A"});
    return linear(params["A"]);
  }
  throw ParseError("unknown distribution family '" + family + "'");
}

std::string DelayDistribution::literal() const {
  return std::visit(
      overloaded{
          [](const Dirac& d) { return "dirac:tau=" + format_shortest(d.tau); },
          [](const Exponential& e) { return "exponential:mu=" + format_shortest(e.mu); },
          [](const Uniform& u) {
            return "uniform:a=" + format_shortest(u.a_lo) + ",b=" + format_shortest(u.b_hi);
          },
          [](const Linear& l) { return "linear:A=" + format_shortest(l.a_max); },
      },
      variant_);
}

bool DelayDistribution::has_compact_support() const {
  return !std::holds_alternative<Exponential>(variant_);
}

double DelayDistribution::support_end() const {
  return std::visit(overloaded{
                        [](const Dirac& d) { return d.tau; },
                        [](const Exponential&) { return kInf; },
                        [](const Uniform& u) { return u.b_hi; },
                        [](const Linear& l) { return l.a_max; },
                    },
                    variant_);
}

double DelayDistribution::convergence_limit() const {
  if (const auto* e = std::get_if<Exponential>(&variant_)) return 1.0 / e->mu;
  return kInf;
}

std::string_view DelayDistribution::family() const {
  return std::visit(overloaded{
                        [](const Dirac&) { return std::string_view("dirac"); },
                        [](const Exponential&) { return std::string_view("exponential"); },
                        [](const Uniform&) { return std::string_view("uniform"); },
                        [](const Linear&) { return std::string_view("linear"); },
                    },
                    variant_);
}

double moment(const DelayDistribution& dist, int k) {
  if (k < 0) throw DomainViolation("moment order must be >= 0");
  if (k == 0) return 1.0;
  return std::visit(
      overloaded{
          [k](const Dirac& d) { return std::pow(d.tau, k); },
          [k](const Exponential& e) { return std::tgamma(k + 1.0) * std::pow(e.mu, k); },
          [k](const Uniform& u) {
            // (b^{k+1} - a^{k+1}) / ((k+1)(b-a)) expanded into positive terms.
            double sum = 0.0;
            double apow = 1.0;
            for (int j = 0; j <= k; ++j) {
              sum += apow * std::pow(u.b_hi, k - j);
              apow *= u.a_lo;
            }
            return sum / (k + 1);
          },
          [k](const Linear& l) { return 2.0 * std::pow(l.a_max, k) / ((k + 1.0) * (k + 2.0)); },
      },
      dist.variant());
}

double exp_moment(const DelayDistribution& dist, double kappa) {
  check_kappa(kappa);
  if (kappa == 0.0) return 1.0;
  if (use_series(dist, kappa)) return exp_moment_series(dist, kappa);
  return std::visit(
      overloaded{
          [kappa](const Dirac& d) { return std::exp(kappa * d.tau); },
          [kappa](const Exponential& e) {
            const double x = kappa * e.mu;
            if (x >= 1.0)
              throw DivergentMoment("exponential moment diverges for kappa*mu >= 1");
            return 1.0 / (1.0 - x);
          },
          [kappa](const Uniform& u) {
            const double w = u.b_hi - u.a_lo;
            return std::exp(kappa * u.a_lo) * phi1(kappa * w);
          },
          [kappa](const Linear& l) {
            const double x = kappa * l.a_max;
            return 2.0 * (std::expm1(x) - x) / (x * x);
          },
      },
      dist.variant());
}

double k_moment(const DelayDistribution& dist, double kappa) {
  check_kappa(kappa);
  if (kappa == 0.0) return moment(dist, 2);
  if (use_series(dist, kappa)) return k_moment_series(dist, kappa);
  return std::visit(
      overloaded{
          [kappa](const Dirac& d) { return d.tau * std::expm1(kappa * d.tau) / kappa; },
          [kappa](const Exponential& e) {
            const double x = kappa * e.mu;
            if (x >= 1.0) throw DivergentMoment("K diverges for kappa*mu >= 1");
            return (2.0 - x) / ((1.0 - x) * (1.0 - x)) * e.mu * e.mu;
          },
          [kappa](const Uniform& u) {
            // K = (d/dkappa Mexp - M_1) / kappa with
            // d/dkappa Mexp = e^{kappa a} (a phi1(kappa w) + w phi2(kappa w)).
            const double w = u.b_hi - u.a_lo;
            const double y = kappa * w;
            const double dmexp = std::exp(kappa * u.a_lo) * (u.a_lo * phi1(y) + w * phi2(y));
            const double m1 = 0.5 * (u.a_lo + u.b_hi);
            return (dmexp - m1) / kappa;
          },
          [kappa](const Linear& l) {
            const double a = l.a_max;
            const double x = kappa * a;
            const double ex = std::exp(x);
            return a * a / x *
                   (2.0 * (ex + 1.0) / (x * x) + 4.0 * (1.0 - ex) / (x * x * x) - 1.0 / 3.0);
          },
      },
      dist.variant());
}

MomentValues::MomentValues(const DelayDistribution& dist)
    : m1(moment(dist, 1)), m2(moment(dist, 2)), m3(moment(dist, 3)), dist_(dist) {}

double truncation_horizon(const DelayDistribution& dist, double tail_mass_tol) {
  if (!(tail_mass_tol > 0.0 && tail_mass_tol < 1.0))
    throw DomainViolation("tail_mass_tol must lie in (0, 1)");
  if (const auto* e = std::get_if<Exponential>(&dist.variant()))
    return e->mu * std::log(1.0 / tail_mass_tol);
  return dist.support_end();
}

Quadrature quadrature(const DelayDistribution& dist, int order, double tail_mass_tol) {
  if (order < 1) throw InvalidOrder("quadrature order must be >= 1");
  Quadrature q;
  std::visit(
      overloaded{
          [&](const Dirac& d) {
            q.nodes = {d.tau};
            q.weights = {1.0};
          },
          [&](const Uniform& u) {
            const auto rule = gauss::legendre(order);
            const double half = 0.5 * (u.b_hi - u.a_lo);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
              q.nodes.push_back(u.a_lo + half * (rule.nodes[i] + 1.0));
              q.weights.push_back(rule.weights[i]);
            }
          },
          [&](const Linear& l) {
            // Density proportional to (1 - x) after s = A (x + 1) / 2.
            const auto rule = gauss::jacobi(order, 1.0, 0.0);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
              q.nodes.push_back(0.5 * l.a_max * (rule.nodes[i] + 1.0));
              q.weights.push_back(rule.weights[i]);
            }
          },
          [&](const Exponential& e) {
            const double s_max = truncation_horizon(dist, tail_mass_tol);
            const auto rule = gauss::laguerre(order);
            double dropped = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
              const double s = e.mu * rule.nodes[i];
              if (s > s_max && !q.nodes.empty()) {
                dropped += rule.weights[i];
                continue;
              }
              q.nodes.push_back(s);
              q.weights.push_back(rule.weights[i]);
            }
            double kept = 0.0;
            for (double w : q.weights) kept += w;
            for (double& w : q.weights) w /= kept;
            q.truncation_tail_mass = dropped;
          },
      },
      dist.variant());
  return q;
}

}  // namespace flockcert
