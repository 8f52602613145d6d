#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qml/entropy.hpp"
#include "qml/generators.hpp"
#include "qml/pinching.hpp"
#include "qml/quad.hpp"
#include "qml/recovery.hpp"
#include "qml/traceineq.hpp"

// Seeded randomized campaigns. Trial i draws from streams (seed, 16 i + k), so any
// single trial can be replayed alone and the order of evaluation does not matter.

namespace qml {

struct FuzzOptions {
  std::uint64_t seed = 7;
  int trials = -1;    // -1: suite default
  Shape dims;         // empty: suite default
  double tol = -1.0;  // -1: per-check default
  QuadOptions quad;
};

struct FuzzResult {
  std::string suite;
  std::vector<CheckReport> reports;
  Params values;

  int failures() const {
    return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](const CheckReport& r) { return !r.pass; }));
  }
  double value(const std::string& k) const {
    for (const auto& [n, v] : values)
      if (n == k) return v;
    return std::nan("");
  }
};

namespace fuzz_detail {

inline std::uint64_t sid(int trial, int k) { return 16ull * static_cast<std::uint64_t>(trial) + static_cast<std::uint64_t>(k); }

inline double tol_or(const FuzzOptions& o, double def) { return o.tol > 0 ? o.tol : def; }

inline int trials_or(const FuzzOptions& o, int def) { return o.trials > 0 ? o.trials : def; }

inline void tag(CheckReport& r, int trial) { r.params.insert(r.params.begin(), {"trial", static_cast<double>(trial)}); }

inline void push(FuzzResult& out, CheckReport r, int trial) {
  tag(r, trial);
  out.reports.push_back(std::move(r));
}

inline void push(FuzzResult& out, std::vector<CheckReport> rs, int trial) {
  for (auto& r : rs) push(out, std::move(r), trial);
}

// U diag(v) U^dag with a shared random basis
inline Mat in_basis(const Mat& U, const RVec& v) { return herm(U * v.cast<cplx>().asDiagonal() * U.adjoint()); }

inline RVec positive_vector(Stream& s, int d, double lo = 0.05) {
  RVec v(d);
  for (int k = 0; k < d; ++k) v(k) = lo + s.uniform();
  return v;
}

inline CheckReport bound_report(const std::string& name, double lhs, double rhs, double tol, const char* dir = "le") {
  CheckReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tol = tol;
  r.direction = dir;
  return finish(r);
}

}  // namespace fuzz_detail

// tr e^{H1+H2} <= tr e^{H1} e^{H2}, plus commuting pairs at equality and Peierls-Bogoliubov
inline FuzzResult fuzz_gt(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"gt", {}, {}};
  const int n = trials_or(o, 1000);
  const double tol = tol_or(o, 1e-9);
  double min_nc = kInf, max_c = 0.0;
  for (int i = 0; i < n; ++i) {
    const int d = 2 + i % 7;
    const Mat H1 = random_hermitian(d, o.seed, sid(i, 0)), H2 = random_hermitian(d, o.seed, sid(i, 1));
    CheckReport g = check_gt2(H1, H2, tol);
    min_nc = std::min(min_nc, g.margin);
    push(out, g, i);
    push(out, check_peierls(H1, H2, tol), i);

    const Mat U = random_unitary(d, o.seed, sid(i, 2));
    Stream s(o.seed, sid(i, 3));
    RVec a(d), b(d);
    for (int k = 0; k < d; ++k) {
      a(k) = s.normal();
      b(k) = s.normal();
    }
    const CheckReport c = check_gt2(in_basis(U, a), in_basis(U, b), tol);
    max_c = std::max(max_c, std::abs(c.margin));
    CheckReport eq = bound_report("gt2_commuting_equality", std::abs(c.margin), 0.0, 1e-10);
    eq.extra = {{"commutator_norm", c.get("commutator_norm")}};
    push(out, eq, i);
  }
  out.values = {{"min_noncommuting_margin", min_nc}, {"max_commuting_abs_margin", max_c}};
  return out;
}

// Lieb triple (closed form vs beta_0 average) and the three-operator GT at p = 2
inline FuzzResult fuzz_lieb(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"lieb", {}, {}};
  const int n = trials_or(o, 100);
  const double tol = tol_or(o, 1e-7);
  const QuadratureRule rule = beta0_rule(o.quad);
  double worst_agree = 0.0;
  for (int i = 0; i < n; ++i) {
    const int d = o.dims.empty() ? 2 + i % 4 : o.dims[0];
    const Mat H1 = random_hermitian(d, o.seed, sid(i, 0)), H2 = random_hermitian(d, o.seed, sid(i, 1)),
              H3 = random_hermitian(d, o.seed, sid(i, 2));
    CheckReport l = check_lieb_triple(H1, H2, H3, rule, tol, 1e-6);
    worst_agree = std::max(worst_agree, l.get("agreement") / std::max(1.0, std::abs(l.get("rhs_closed"))));
    push(out, l, i);
    // H_k <- H_k / 2 turns the p = 2 norm of the product into the Lieb sandwich
    push(out, check_gt_multi({0.5 * H1, 0.5 * H2, 0.5 * H3}, 2.0, rule, tol), i);
    if (i % 4 == 0) {
      Stream s1(o.seed, sid(i, 3)), s2(o.seed, sid(i, 4));
      const Mat L1 = gaussian_matrix(s1, d, d), L2 = gaussian_matrix(s2, d, d);
      push(out, check_gt_general({0.5 * L1, 0.5 * L2}, 2.0, rule, tol), i);
    }
  }
  out.values = {{"worst_relative_agreement", worst_agree}};
  return out;
}

// ALT with r in {1/4, 1/2} (<=) and r in {2, 4} (>=); every fourth trial also the three-operator form
inline FuzzResult fuzz_alt(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"alt", {}, {}};
  const int n = trials_or(o, 200);
  const double tol = tol_or(o, 1e-9);
  for (int i = 0; i < n; ++i) {
    const int d = o.dims.empty() ? 2 + i % 4 : o.dims[0];
    const Mat B1 = random_pd(d, o.seed, sid(i, 0)), B2 = random_pd(d, o.seed, sid(i, 1));
    const double q = (i % 2) ? 2.0 : 1.0;
    for (double r : {0.25, 0.5, 2.0, 4.0}) push(out, check_alt2(B1, B2, q, r, tol), i);
    if (i % 4 == 0) {
      const Mat B3 = random_pd(d, o.seed, sid(i, 2));
      const QuadratureRule rr = make_rule(Density::Beta, 0.5, o.quad);
      push(out, check_alt_multi({B1, B2, B3}, 2.0, 0.5, rr, tol_or(o, 1e-7)), i);
    }
  }
  return out;
}

// multivariate log-trace at q in {1, 1/2}, the two-sided bivariate form, and the q -> 0 trend
inline FuzzResult fuzz_log_trace(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"log-trace", {}, {}};
  const int n = trials_or(o, 100);
  const QuadratureRule rule = beta0_rule(o.quad);
  int shrinking = 0;
  for (int i = 0; i < n; ++i) {
    const int d = o.dims.empty() ? 2 + i % 3 : o.dims[0];
    const Mat B1 = random_pd(d, o.seed, sid(i, 0)), B2 = random_pd(d, o.seed, sid(i, 1)),
              B3 = random_pd(d, o.seed, sid(i, 2));
    for (double q : {1.0, 0.5}) push(out, check_log_trace_multi({B1, B2, B3}, q, rule, tol_or(o, 1e-7)), i);
    push(out, check_log_trace2(B1, B2, 1.0, tol_or(o, 1e-9)), i);
    const double g1 = check_log_trace_multi({B1, B2, B3}, 0.1, rule).margin;
    const double g2 = check_log_trace_multi({B1, B2, B3}, 0.01, rule).margin;
    shrinking += g2 <= g1 ? 1 : 0;
  }
  const double frac = n > 0 ? static_cast<double>(shrinking) / n : 1.0;
  CheckReport t = bound_report("log_trace_trend", frac, 0.95, 0.0, "ge");
  t.note = "fraction of instances whose gap at q=0.01 is at most the gap at q=0.1";
  out.reports.push_back(t);
  out.values = {{"trend_fraction", frac}};
  return out;
}

// I(A:C|B) against the measured and fidelity bounds of the averaged rotated Petz map
inline FuzzResult fuzz_fr(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"fr", {}, {}};
  const int n = trials_or(o, 500);
  const double tol = tol_or(o, 1e-8);
  const QuadratureRule rule = beta0_rule(o.quad);
  if (!o.dims.empty() && o.dims.size() != 3) throw Error(ErrorCode::ShapeError, "fuzz fr: --dims needs three entries");
  double worst_markov = 0.0;
  for (int i = 0; i < n; ++i) {
    const Shape dims = o.dims.empty() ? ((i % 2) ? Shape{2, 3, 2} : Shape{2, 2, 2}) : o.dims;
    const int D = static_cast<int>(shape_product(dims));
    push(out, fr_check(random_density(dims, D, o.seed, sid(i, 0)), rule, tol), i);
    if (i % 10 == 0) {
      const QuantumState m = embed_diagonal(random_markov_joint(dims, o.seed, sid(i, 1)));
      const auto reps = fr_check(m, rule, tol);
      double worst = std::abs(reps[0].lhs);
      for (const auto& r : reps) worst = std::max(worst, std::abs(r.rhs));
      worst_markov = std::max(worst_markov, worst);
      CheckReport z = bound_report("fr_markov_zero", worst, 0.0, 1e-8);
      z.note = "largest of CMI and both recovery bounds on an exact Markov chain";
      push(out, z, i);
    }
  }
  out.values = {{"worst_markov", worst_markov}};
  return out;
}

// D(rho||sigma) - D(E rho||E sigma) against the recovery residual
inline FuzzResult fuzz_dpi(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"dpi", {}, {}};
  const int n = trials_or(o, 200);
  const double tol = tol_or(o, 1e-8);
  const QuadratureRule rule = beta0_rule(o.quad);
  for (int i = 0; i < n; ++i) {
    const int din = o.dims.size() >= 1 ? o.dims[0] : 2 + i % 3;
    const int dout = o.dims.size() >= 2 ? o.dims[1] : 2 + (i / 3) % 3;
    const int rank = std::max(1 + (i / 9) % 3, (din + dout - 1) / dout);
    const Mat rho = random_density(din, din, o.seed, sid(i, 0)).rho;
    const Mat sigma = random_density(din, din, o.seed, sid(i, 1)).rho;
    const KrausChannel E = random_channel(din, dout, std::min(rank, din * dout), o.seed, sid(i, 2));
    push(out, strengthened_dpi_check(rho, sigma, E, rule, tol), i);
  }
  return out;
}

// ascent on commuting pairs equals D; qubit pairs against the sphere grid; D_1/2 <= D_M <= D throughout
inline FuzzResult fuzz_measured(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"measured", {}, {}};
  const int n = trials_or(o, 100);
  const double tol = tol_or(o, 1e-9);
  double worst_c = 0.0, worst_q = 0.0;
  auto sandwich = [&](const Mat& rho, const Mat& sigma, double v, int i) {
    push(out, bound_report("measured_sandwich_lower", d_min(rho, sigma).value, v, tol), i);
    push(out, bound_report("measured_sandwich_upper", v, relative_entropy(rho, sigma).value, tol), i);
  };
  for (int i = 0; i < n; ++i) {
    const int d = o.dims.empty() ? 2 + i % 4 : o.dims[0];
    const Mat U = random_unitary(d, o.seed, sid(i, 0));
    Stream s(o.seed, sid(i, 1));
    RVec a = positive_vector(s, d), b = positive_vector(s, d);
    a /= a.sum();
    b /= b.sum();
    const Mat rho = in_basis(U, a), sigma = in_basis(U, b);
    const double v = measured_relative_entropy(rho, sigma).value;
    const double D = relative_entropy(rho, sigma).value;
    worst_c = std::max(worst_c, std::abs(v - D));
    push(out, bound_report("measured_commuting", std::abs(v - D), 0.0, 1e-6), i);
    sandwich(rho, sigma, v, i);

    const Mat r2 = random_density(2, 2, o.seed, sid(i, 2)).rho, s2 = random_density(2, 2, o.seed, sid(i, 3)).rho;
    const double v2 = measured_relative_entropy(r2, s2).value;
    const double grid = measured_qubit_oracle(r2, s2);
    worst_q = std::max(worst_q, std::abs(v2 - grid));
    push(out, bound_report("measured_qubit_grid", std::abs(v2 - grid), 0.0, 1e-4), i);
    sandwich(r2, s2, v2, i);
  }
  out.values = {{"worst_commuting_gap", worst_c}, {"worst_qubit_gap", worst_q}};
  return out;
}

// pinching and smooth pinching properties and the exponential Lipschitz bound
inline FuzzResult fuzz_pinching(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"pinching", {}, {}};
  const int n = trials_or(o, 200);
  const double tol = tol_or(o, 1e-9);
  for (int i = 0; i < n; ++i) {
    const int d = o.dims.empty() ? 2 + i % 7 : o.dims[0];
    Mat H = random_hermitian(d, o.seed, sid(i, 0));
    if (i % 3 == 0) {
      // integer-rounded spectrum, usually degenerate
      const Spectrum sp = eigh(H);
      RVec v = sp.values;
      for (int k = 0; k < d; ++k) v(k) = std::round(v(k));
      H = from_spectrum(sp.vectors, v);
    }
    const Mat X = random_hermitian(d, o.seed, sid(i, 1));
    const Mat Xpd = random_density(d, d, o.seed, sid(i, 2)).rho;
    push(out, pinching_properties(H, X, Xpd, tol), i);
    const Spectrum sp = eigh(H);
    const double spread = sp.values.maxCoeff() - sp.values.minCoeff();
    for (double kappa : {0.3, 1.0, 3.0}) {
      auto reps = smooth_pinching_properties(H, X, kappa, mu_rule(kappa, spread), tol);
      for (auto& r : reps) r.params.push_back({"kappa", kappa});
      push(out, reps, i);
    }
    Stream ls(o.seed, sid(i, 3));
    const Mat L = gaussian_matrix(ls, d, d);
    for (double t : {-2.0, 0.5, 3.0}) push(out, lipschitz_check(L, H, t, tol), i);
  }
  return out;
}

// I(X:Z|Y) <= D(P || R(P_XY)) + Lambda_max with the exact LP value
inline FuzzResult fuzz_lambda(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"lambda", {}, {}};
  const int n = trials_or(o, 100);
  const double tol = tol_or(o, 1e-9);
  for (int i = 0; i < n; ++i) {
    const Shape dims = o.dims.size() == 3 ? o.dims : Shape{2 + i % 2, 2 + (i / 2) % 2, 2 + (i / 4) % 2};
    const ClassicalJoint P = random_classical(dims, o.seed, sid(i, 0));
    const Eigen::MatrixXd W = random_stochastic(dims[1] * dims[2], dims[1], o.seed, sid(i, 1));
    push(out, cmi_upper_check_classical(P, W, tol), i);
  }
  return out;
}

// concavity of conditional entropy and joint convexity on random three-member ensembles
inline FuzzResult fuzz_ensemble(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"ensemble", {}, {}};
  const int n = trials_or(o, 50);
  const double tol = tol_or(o, 1e-8);
  const QuadratureRule rule = beta0_rule(o.quad);
  const Shape dims = o.dims.size() == 2 ? o.dims : Shape{2, 2};
  const int D = static_cast<int>(shape_product(dims));
  for (int i = 0; i < n; ++i) {
    Stream s(o.seed, sid(i, 0));
    const auto w = random_simplex(s, 3);
    std::vector<QuantumState> rhos;
    std::vector<Mat> sigmas;
    for (int k = 0; k < 3; ++k) {
      rhos.push_back(random_density(dims, D, o.seed, sid(i, 1 + k)));
      sigmas.push_back(random_density(dims, D, o.seed, sid(i, 4 + k)).rho);
    }
    push(out, ensemble_checks(w, rhos, sigmas, rule, tol), i);
  }
  return out;
}

// D_alpha(rho||sigma) <= D_alpha(rho||omega) + D_max(omega||sigma), alpha in {1/2, 1, 2, inf}
inline FuzzResult fuzz_renyi(const FuzzOptions& o) {
  using namespace fuzz_detail;
  FuzzResult out{"renyi", {}, {}};
  const int n = trials_or(o, 100);
  const double tol = tol_or(o, 1e-9);
  for (int i = 0; i < n; ++i) {
    const int d = o.dims.empty() ? 2 + i % 4 : o.dims[0];
    const Mat rho = random_density(d, d, o.seed, sid(i, 0)).rho, sigma = random_density(d, d, o.seed, sid(i, 1)).rho,
              omega = random_density(d, d, o.seed, sid(i, 2)).rho;
    for (double a : {0.5, 1.0, 2.0, kInf}) push(out, check_renyi_triangle(rho, sigma, omega, a, tol), i);
    push(out, check_klein(rho, sigma, KleinFunction::TLogT, tol), i);
  }
  return out;
}

inline const std::map<std::string, std::function<FuzzResult(const FuzzOptions&)>>& fuzz_suites() {
  static const std::map<std::string, std::function<FuzzResult(const FuzzOptions&)>> m = {
      {"gt", fuzz_gt},           {"lieb", fuzz_lieb},         {"gt-multi", fuzz_lieb},
      {"alt", fuzz_alt},         {"log-trace", fuzz_log_trace}, {"fr", fuzz_fr},
      {"dpi", fuzz_dpi},         {"measured", fuzz_measured}, {"pinching", fuzz_pinching},
      {"lambda", fuzz_lambda},   {"ensemble", fuzz_ensemble}, {"renyi", fuzz_renyi},
  };
  return m;
}

inline FuzzResult run_fuzz(const std::string& suite, const FuzzOptions& o) {
  const auto& m = fuzz_suites();
  const auto it = m.find(suite);
  if (it == m.end()) throw Error(ErrorCode::ParamError, "unknown fuzz suite '" + suite + "'");
  return it->second(o);
}

}  // namespace qml
