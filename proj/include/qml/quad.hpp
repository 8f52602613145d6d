#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "qml/errors.hpp"

namespace qml {

using std::numbers::pi;

inline double beta_density(double theta, double t) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw Error(ErrorCode::ThetaOutOfRange, "beta_density: theta must lie in [0,1)");
  const double ch = std::cosh(pi * t);
  if (theta == 0.0) return (pi / 2.0) / (ch + 1.0);
  return std::sin(pi * theta) / (2.0 * theta * (ch + std::cos(pi * theta)));
}

inline double beta0(double t) { return beta_density(0.0, t); }

// 12/(pi k^3 t^4) (3 + cos kt - 4 cos(kt/2)); the bracket cancels to O(u^4) so small u uses its series
inline double mu_density(double kappa, double t) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::KappaNonpositive, "mu_density: kappa must be positive");
  const double u = kappa * t;
  if (std::abs(u) < 0.5) {
    const double u2 = u * u;
    double term_pow = 1.0;  // u^(2k-4)
    double fact = 24.0;     // (2k)!
    double four = 0.25;     // 4^(1-k)
    double acc = 0.0;
    for (int k = 2; k < 14; ++k) {
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * (1.0 - four) * term_pow / fact;
      term_pow *= u2;
      fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
      four *= 0.25;
    }
    return 12.0 * kappa / pi * acc;
  }
  const double br = 3.0 + std::cos(u) - 4.0 * std::cos(0.5 * u);
  return 12.0 * kappa / (pi * u * u * u * u) * br;
}

// closed-form Fourier transform of mu_kappa, \hat mu(w) = int mu(t) e^{iwt} dt
inline double mu_hat(double kappa, double omega) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::KappaNonpositive, "mu_hat: kappa must be positive");
  const double s = 2.0 * std::abs(omega) / kappa;
  double g = 0.0;
  if (s <= 1.0)
    g = 2.0 / 3.0 - s * s + 0.5 * s * s * s;
  else if (s < 2.0)
    g = (2.0 - s) * (2.0 - s) * (2.0 - s) / 6.0;
  return 1.5 * g;
}

enum class Density { Beta, Mu };

inline std::string density_name(Density d) { return d == Density::Beta ? "beta" : "mu"; }

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // density-weighted, sum to one
  double T = 0.0;
  Density density = Density::Beta;
  double param = 0.0;  // theta or kappa
  double raw_mass = 0.0;
  int panels = 0;
  int nodes_per_panel = 0;
  size_t size() const { return nodes.size(); }
};

struct QuadOptions {
  double T = 10.0;
  int panels = 20;
  int nodes = 40;
};

// Golub-Welsch on [-1,1]
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw Error(ErrorCode::ParamError, "gauss_legendre: need at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    w[k] = 2.0 * v * v;
  }
  // enforce exact mirror symmetry
  for (int k = 0; k < n / 2; ++k) {
    const double xs = 0.5 * (x[n - 1 - k] - x[k]);
    const double ws = 0.5 * (w[k] + w[n - 1 - k]);
    x[k] = -xs;
    x[n - 1 - k] = xs;
    w[k] = w[n - 1 - k] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

inline double density_value(Density d, double param, double t) {
  return d == Density::Beta ? beta_density(param, t) : mu_density(param, t);
}

inline QuadratureRule make_rule(Density density, double param, double T, int panels, int nodes_per_panel,
                                double mass_tol = 1e-6) {
  if (!(T > 0.0) || panels < 1 || nodes_per_panel < 1)
    throw Error(ErrorCode::ParamError, "make_rule: need T > 0 and at least one panel and node");
  if (density == Density::Beta && !(param >= 0.0 && param < 1.0))
    throw Error(ErrorCode::ThetaOutOfRange, "make_rule: theta must lie in [0,1)");
  if (density == Density::Mu && !(param > 0.0))
    throw Error(ErrorCode::KappaNonpositive, "make_rule: kappa must be positive");
  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_panel, gx, gw);
  QuadratureRule r;
  r.T = T;
  r.density = density;
  r.param = param;
  r.panels = panels;
  r.nodes_per_panel = nodes_per_panel;
  const double h = 2.0 * T / panels;
  r.nodes.reserve(static_cast<size_t>(panels) * nodes_per_panel);
  for (int p = 0; p < panels; ++p) {
    const double a = -T + p * h;
    for (int k = 0; k < nodes_per_panel; ++k) {
      r.nodes.push_back(a + 0.5 * h * (gx[k] + 1.0));
      r.weights.push_back(0.5 * h * gw[k]);
    }
  }
  // nodes are ascending, so the mirror of i is n-1-i
  const size_t n = r.nodes.size();
  for (size_t i = 0; i < n / 2; ++i) {
    const double t = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    r.nodes[i] = -t;
    r.nodes[n - 1 - i] = t;
    r.weights[i] = r.weights[n - 1 - i] = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  double mass = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    r.weights[i] *= density_value(density, param, r.nodes[i]);
    mass += r.weights[i];
  }
  r.raw_mass = mass;
  if (!(std::abs(mass - 1.0) <= mass_tol))
    throw Error(ErrorCode::TailMassTooLarge,
                "make_rule: raw mass " + std::to_string(mass) + " deviates from 1 by more than tolerance");
  for (auto& w : r.weights) w /= mass;
  return r;
}

inline QuadratureRule make_rule(Density density, double param, const QuadOptions& o = {}) {
  return make_rule(density, param, o.T, o.panels, o.nodes);
}

inline QuadratureRule beta0_rule(const QuadOptions& o = {}) { return make_rule(Density::Beta, 0.0, o); }

// mu_kappa has a t^-4 tail and oscillates; T scales like 1/kappa and panels follow the largest frequency
inline QuadratureRule mu_rule(double kappa, double omega_max, double kT = 600.0, int nodes_per_panel = 40) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::KappaNonpositive, "mu_rule: kappa must be positive");
  const double T = kT / kappa;
  const double w = std::max(std::abs(omega_max), kappa);
  int panels = static_cast<int>(std::ceil(2.0 * T * w / 20.0));
  panels = std::max(panels, static_cast<int>(std::ceil(kT / 5.0)));
  if (panels % 2) ++panels;
  return make_rule(Density::Mu, kappa, T, panels, nodes_per_panel);
}

namespace detail {
inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
template <class M>
inline auto finite_value(const M& m) -> decltype(m.allFinite()) {
  return m.allFinite();
}
}  // namespace detail

template <class F>
inline auto integrate(F&& f, const QuadratureRule& rule) {
  using V = std::decay_t<decltype(f(0.0))>;
  if (rule.size() == 0) throw Error(ErrorCode::ParamError, "integrate: empty rule");
  V acc = f(rule.nodes[0]);
  if (!detail::finite_value(acc)) throw Error(ErrorCode::NonFiniteValue, "integrate: non-finite integrand");
  acc = acc * rule.weights[0];
  for (size_t i = 1; i < rule.size(); ++i) {
    V v = f(rule.nodes[i]);
    if (!detail::finite_value(v)) throw Error(ErrorCode::NonFiniteValue, "integrate: non-finite integrand");
    acc = acc + v * rule.weights[i];
  }
  return acc;
}

}  // namespace qml
