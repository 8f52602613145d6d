#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qml/entropy.hpp"
#include "qml/linalg.hpp"
#include "qml/quad.hpp"

namespace qml {

struct QuadMeta {
  std::string density;
  double param = 0.0;
  double T = 0.0;
  int panels = 0;
  int nodes = 0;
  double raw_mass = 0.0;
};

inline QuadMeta quad_meta(const QuadratureRule& r) {
  return QuadMeta{density_name(r.density), r.param, r.T, r.panels, r.nodes_per_panel, r.raw_mass};
}

using Params = std::vector<std::pair<std::string, double>>;

struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  double tol = 0.0;
  std::string direction = "le";  // le: lhs <= rhs, ge: lhs >= rhs
  bool logarithmic = false;      // lhs/rhs are entropic (base conversion applies)
  Params params;
  Params extra;
  std::optional<QuadMeta> quad;
  std::string note;

  double get(const std::string& key) const {
    for (const auto& [k, v] : extra)
      if (k == key) return v;
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::nan("");
  }
};

// margin = rhs - lhs (le) or lhs - rhs (ge); infinite sides are resolved by sign
inline CheckReport finish(CheckReport r) {
  const double hi = r.direction == "le" ? r.rhs : r.lhs;
  const double lo = r.direction == "le" ? r.lhs : r.rhs;
  if (std::isinf(hi) && hi > 0 && !(std::isinf(lo) && lo > 0))
    r.margin = kInf;
  else if (std::isinf(lo) && lo > 0)
    r.margin = -kInf;
  else
    r.margin = hi - lo;
  r.pass = !std::isnan(r.margin) && r.margin >= -r.tol;
  return r;
}

namespace detail {
// e^{z H} in the eigenbasis of H
inline Mat exp_pow(const Spectrum& s, cplx z) {
  Eigen::VectorXcd f(s.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = std::exp(z * s.values(k));
  return from_spectrum(s.vectors, f);
}

inline double log_schatten_of_exp(const RVec& eigen_of_sum, double p) {
  // log || e^{S} ||_p from the eigenvalues of S, stable for large entries
  const double m = eigen_of_sum.maxCoeff();
  if (std::isinf(p)) return m;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < eigen_of_sum.size(); ++k) acc += std::exp(p * (eigen_of_sum(k) - m));
  return m + std::log(acc) / p;
}
}  // namespace detail

inline CheckReport check_gt2(const Mat& H1, const Mat& H2, double tol = 1e-9) {
  require_same_dim(H1, H2, "check_gt2");
  CheckReport r;
  r.name = "gt2";
  r.tol = tol;
  r.lhs = trace_re(expm(herm(H1 + H2)));
  r.rhs = (expm(H1) * expm(H2)).trace().real();
  r = finish(r);
  const double comm = opnorm(commutator(H1, H2));
  r.extra = {{"commutator_norm", comm}, {"equality", (std::abs(r.margin) <= tol && comm <= tol) ? 1.0 : 0.0}};
  return r;
}

// tr e^{H1+H2+H3} <= tr e^{H1} Dlog[e^{-H2}](e^{H3}); rhs also by the beta_0 average of rotated sandwiches
inline CheckReport check_lieb_triple(const Mat& H1, const Mat& H2, const Mat& H3, const QuadratureRule& rule,
                                     double tol = 1e-7, double agree_tol = 1e-6) {
  require_same_dim(H1, H2, "check_lieb_triple");
  require_same_dim(H1, H3, "check_lieb_triple");
  CheckReport r;
  r.name = "lieb_triple";
  r.tol = tol;
  r.quad = quad_meta(rule);
  const Mat E1 = expm(H1), E3 = expm(H3);
  r.lhs = trace_re(expm(herm(H1 + H2 + H3)));
  const double closed = (E1 * frechet_log(expm(-H2), E3)).trace().real();
  const Spectrum s2 = eigh(H2);
  const Mat A = s2.vectors.adjoint() * E1 * s2.vectors;
  const Mat C = s2.vectors.adjoint() * E3 * s2.vectors;
  const long d = A.rows();
  const double quad = integrate(
      [&](double t) {
        cplx acc = 0.0;
        for (long k = 0; k < d; ++k)
          for (long l = 0; l < d; ++l)
            acc += A(l, k) * C(k, l) *
                   std::exp(cplx(0.5 * (s2.values(k) + s2.values(l)), 0.5 * t * (s2.values(k) - s2.values(l))));
        return acc.real();
      },
      rule);
  r.rhs = closed;
  r = finish(r);
  const double agree = std::abs(closed - quad);
  const bool ok = agree <= agree_tol * std::max(1.0, std::abs(closed));
  r.extra = {{"rhs_closed", closed}, {"rhs_quadrature", quad}, {"agreement", agree}, {"agree", ok ? 1.0 : 0.0}};
  r.pass = r.pass && ok;
  return r;
}

// log ||exp sum H_k||_p <= int beta_0 log || prod exp((1+it) H_k) ||_p
inline CheckReport check_gt_multi(const std::vector<Mat>& Hs, double p, const QuadratureRule& rule,
                                  double tol = 1e-7) {
  if (Hs.size() < 2) throw Error(ErrorCode::ParamError, "check_gt_multi: need at least two operators");
  if (!(p > 0)) throw Error(ErrorCode::ParamError, "check_gt_multi: p must be positive");
  CheckReport r;
  r.name = "gt_multi";
  r.tol = tol;
  r.quad = quad_meta(rule);
  r.params = {{"n", static_cast<double>(Hs.size())}, {"p", p}};
  Mat S = Mat::Zero(Hs[0].rows(), Hs[0].cols());
  std::vector<Spectrum> sp;
  for (const auto& H : Hs) {
    require_same_dim(Hs[0], H, "check_gt_multi");
    S += H;
    sp.push_back(eigh(H));
  }
  r.lhs = detail::log_schatten_of_exp(eigh(herm(S)).values, p);
  r.rhs = integrate(
      [&](double t) {
        Mat M = detail::exp_pow(sp[0], cplx(1.0, t));
        for (size_t k = 1; k < sp.size(); ++k) M = M * detail::exp_pow(sp[k], cplx(1.0, t));
        return std::log(schatten_norm(M, p));
      },
      rule);
  return finish(r);
}

inline CheckReport check_gt_general(const std::vector<Mat>& Ls, double p, const QuadratureRule& rule,
                                    double tol = 1e-7) {
  if (Ls.empty()) throw Error(ErrorCode::ParamError, "check_gt_general: need at least one operator");
  if (!(p > 0)) throw Error(ErrorCode::ParamError, "check_gt_general: p must be positive");
  CheckReport r;
  r.name = "gt_general";
  r.tol = tol;
  r.quad = quad_meta(rule);
  r.params = {{"n", static_cast<double>(Ls.size())}, {"p", p}};
  Mat S = Mat::Zero(Ls[0].rows(), Ls[0].cols());
  std::vector<Spectrum> sp;
  for (const auto& L : Ls) {
    require_same_dim(Ls[0], L, "check_gt_general");
    S += L;
    sp.push_back(eigh(herm(L)));
  }
  r.lhs = std::log(schatten_norm(expm_general(S), p));
  r.rhs = integrate(
      [&](double t) {
        Mat M = detail::exp_pow(sp[0], cplx(1.0, t));
        for (size_t k = 1; k < sp.size(); ++k) M = M * detail::exp_pow(sp[k], cplx(1.0, t));
        return std::log(schatten_norm(M, p));
      },
      rule);
  return finish(r);
}

// tr (B1^{r/2} B2^r B1^{r/2})^{q/r} vs tr (B1^{1/2} B2 B1^{1/2})^q; <= for r <= 1, >= for r >= 1
inline CheckReport check_alt2(const Mat& B1, const Mat& B2, double q, double r_, double tol = 1e-9) {
  require_same_dim(B1, B2, "check_alt2");
  if (!(q > 0) || !(r_ > 0)) throw Error(ErrorCode::ParamError, "check_alt2: q and r must be positive");
  CheckReport r;
  r.name = "alt2";
  r.tol = tol;
  r.params = {{"q", q}, {"r", r_}};
  r.direction = r_ <= 1.0 ? "le" : "ge";
  const PsdSpectrum p1 = psd_spectrum(B1), p2 = psd_spectrum(B2);
  auto tr_pow = [](const Mat& M, double e) {
    const PsdSpectrum pm = psd_spectrum(herm(M));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < pm.values.size(); ++k)
      if (pm.support[k]) acc += std::pow(pm.values(k), e);
    return acc;
  };
  const Mat a = powm(p1, r_ / 2.0);
  r.lhs = tr_pow(a * powm(p2, r_) * a, q / r_);
  const Mat b = powm(p1, 0.5);
  r.rhs = tr_pow(b * B2 * b, q);
  return finish(r);
}

// log || |prod B_k^r|^{1/r} ||_p <= int beta_r log || prod B_k^{1+it} ||_p
inline CheckReport check_alt_multi(const std::vector<Mat>& Bs, double p, double r_, const QuadratureRule& rule,
                                   double tol = 1e-7) {
  if (Bs.empty()) throw Error(ErrorCode::ParamError, "check_alt_multi: need operators");
  if (!(r_ > 0 && r_ < 1)) throw Error(ErrorCode::ParamError, "check_alt_multi: r must lie in (0,1)");
  if (rule.density != Density::Beta || std::abs(rule.param - r_) > 1e-15)
    throw Error(ErrorCode::ParamError, "check_alt_multi: rule must be the beta_r rule");
  CheckReport r;
  r.name = "alt_multi";
  r.tol = tol;
  r.quad = quad_meta(rule);
  r.params = {{"n", static_cast<double>(Bs.size())}, {"p", p}, {"r", r_}};
  std::vector<PsdSpectrum> sp;
  for (const auto& B : Bs) sp.push_back(psd_spectrum(B));
  Mat M = powm(sp[0], r_);
  for (size_t k = 1; k < sp.size(); ++k) M = M * powm(sp[k], r_);
  // || |M|^{1/r} ||_p = || M ||_{p/r}^{1/r}
  r.lhs = std::log(schatten_norm(M, p / r_)) / r_;
  r.rhs = integrate(
      [&](double t) {
        Mat N = powm(sp[0], cplx(1.0, t));
        for (size_t k = 1; k < sp.size(); ++k) N = N * powm(sp[k], cplx(1.0, t));
        return std::log(schatten_norm(N, p));
      },
      rule);
  return finish(r);
}

// (1/p) tr B1 log B2^{p/2} B1^p B2^{p/2} <= tr B1 (log B1 + log B2) <= (1/p) tr B1 log B1^{p/2} B2^p B1^{p/2}
inline std::vector<CheckReport> check_log_trace2(const Mat& B1, const Mat& B2, double p, double tol = 1e-9) {
  require_same_dim(B1, B2, "check_log_trace2");
  if (!(p > 0)) throw Error(ErrorCode::ParamError, "check_log_trace2: p must be positive");
  const PsdSpectrum p1 = psd_spectrum(B1, ErrorCode::NotPD), p2 = psd_spectrum(B2, ErrorCode::NotPD);
  if (p1.rank != B1.rows() || p2.rank != B2.rows())
    throw Error(ErrorCode::NotPD, "check_log_trace2: inputs must be positive definite");
  const double mid = trace_re(B1 * (logm(p1) + logm(p2)));
  const Mat b2h = powm(p2, p / 2.0), b1h = powm(p1, p / 2.0);
  const double low = trace_re(B1 * logm(herm(b2h * powm(p1, p) * b2h))) / p;
  const double up = trace_re(B1 * logm(herm(b1h * powm(p2, p) * b1h))) / p;
  CheckReport a;
  a.name = "log_trace_lower";
  a.tol = tol;
  a.params = {{"p", p}};
  a.lhs = low;
  a.rhs = mid;
  CheckReport b = a;
  b.name = "log_trace_upper";
  b.lhs = mid;
  b.rhs = up;
  return {finish(a), finish(b)};
}

// gap of the lower bound, tr B1(log B1 + log B2) - (1/p) tr B1 log(...), at each p
inline std::vector<double> log_trace_probe(const Mat& B1, const Mat& B2, const std::vector<double>& ps) {
  std::vector<double> gaps;
  for (double p : ps) {
    const auto reps = check_log_trace2(B1, B2, p);
    gaps.push_back(reps[0].margin);
  }
  return gaps;
}

// sum_k tr B1 log B_k >= int beta_0 (1/q) tr B1 log(Bn^{q(1+it)/2} ... B2^{q/2} B1^q B2^{q/2} ... Bn^{q(1-it)/2})
inline CheckReport check_log_trace_multi(const std::vector<Mat>& Bs, double q, const QuadratureRule& rule,
                                         double tol = 1e-7) {
  if (Bs.size() < 2) throw Error(ErrorCode::ParamError, "check_log_trace_multi: need at least two operators");
  if (!(q > 0)) throw Error(ErrorCode::ParamError, "check_log_trace_multi: q must be positive");
  CheckReport r;
  r.name = "log_trace_multi";
  r.tol = tol;
  r.quad = quad_meta(rule);
  r.params = {{"n", static_cast<double>(Bs.size())}, {"q", q}};
  std::vector<PsdSpectrum> sp;
  for (const auto& B : Bs) {
    require_same_dim(Bs[0], B, "check_log_trace_multi");
    sp.push_back(psd_spectrum(B, ErrorCode::NotPD));
    if (sp.back().rank != B.rows()) throw Error(ErrorCode::NotPD, "check_log_trace_multi: inputs must be PD");
  }
  const Mat& B1 = Bs[0];
  double rhs = 0.0;
  for (const auto& s : sp) rhs += trace_re(B1 * logm(s));
  const Mat B1q = powm(sp[0], q);
  const Mat B2h = powm(sp[1], q / 2.0);
  r.rhs = rhs;
  r.lhs = integrate(
      [&](double t) {
        // A = Bn^{q(1+it)/2} ... B3^{q(1+it)/2} B2^{q/2}
        Mat A = B2h;
        for (size_t k = 2; k < sp.size(); ++k) A = powm(sp[k], cplx(q / 2.0, q * t / 2.0)) * A;
        const Mat M = herm(A * B1q * A.adjoint());
        return trace_re(B1 * logm(M)) / q;
      },
      rule);
  r.direction = "le";
  return finish(r);
}

// tr H2 e^{H1} / tr e^{H1} <= log (tr e^{H1+H2} / tr e^{H1})
inline CheckReport check_peierls(const Mat& H1, const Mat& H2, double tol = 1e-9) {
  require_same_dim(H1, H2, "check_peierls");
  CheckReport r;
  r.name = "peierls";
  r.tol = tol;
  r.logarithmic = true;
  const Mat E1 = expm(H1);
  const double z = trace_re(E1);
  r.lhs = trace_re(H2 * E1) / z;
  r.rhs = std::log(trace_re(expm(herm(H1 + H2))) / z);
  return finish(r);
}

enum class KleinFunction { TLogT, Square, NegLog };

// tr f(B1) - tr f(B2) >= tr (B1 - B2) f'(B2)
inline CheckReport check_klein(const Mat& B1, const Mat& B2, KleinFunction f, double tol = 1e-9) {
  require_same_dim(B1, B2, "check_klein");
  const PsdSpectrum p1 = psd_spectrum(B1, ErrorCode::NotPD), p2 = psd_spectrum(B2, ErrorCode::NotPD);
  if (p1.rank != B1.rows() || p2.rank != B2.rows()) throw Error(ErrorCode::NotPD, "check_klein: inputs must be PD");
  auto fval = [f](double x) {
    switch (f) {
      case KleinFunction::TLogT: return x * std::log(x);
      case KleinFunction::Square: return x * x;
      case KleinFunction::NegLog: return -std::log(x);
    }
    return 0.0;
  };
  auto fder = [f](double x) {
    switch (f) {
      case KleinFunction::TLogT: return std::log(x) + 1.0;
      case KleinFunction::Square: return 2.0 * x;
      case KleinFunction::NegLog: return -1.0 / x;
    }
    return 0.0;
  };
  auto trf = [&](const PsdSpectrum& s) {
    double a = 0.0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) a += fval(s.values(k));
    return a;
  };
  RVec dv(p2.values.size());
  for (Eigen::Index k = 0; k < dv.size(); ++k) dv(k) = fder(p2.values(k));
  CheckReport r;
  r.name = "klein";
  r.tol = tol;
  r.direction = "ge";
  r.lhs = trf(p1) - trf(p2);
  r.rhs = trace_re((B1 - B2) * from_spectrum(p2.vectors, dv));
  r = finish(r);
  r.extra = {{"equality", std::abs(r.margin) <= tol ? 1.0 : 0.0}};
  return r;
}

// t tr e^{H + log B1} + (1-t) tr e^{H + log B2} <= tr e^{H + log(t B1 + (1-t) B2)}, worst grid point reported
inline CheckReport probe_lieb_concavity(const Mat& H, const Mat& B1, const Mat& B2, const std::vector<double>& ts,
                                        double tol = 1e-9) {
  require_same_dim(H, B1, "probe_lieb_concavity");
  require_same_dim(H, B2, "probe_lieb_concavity");
  auto g = [&](const Mat& B) { return trace_re(expm(herm(H + logm(B)))); };
  const double g1 = g(B1), g2 = g(B2);
  CheckReport worst;
  worst.name = "lieb_concavity";
  worst.tol = tol;
  worst.margin = kInf;
  for (double t : ts) {
    CheckReport c = worst;
    c.lhs = t * g1 + (1.0 - t) * g2;
    c.rhs = g(herm(t * B1 + (1.0 - t) * B2));
    c = finish(c);
    c.params = {{"t", t}};
    if (c.margin < worst.margin) worst = c;
  }
  worst.pass = worst.margin >= -tol;
  worst.extra = {{"grid_points", static_cast<double>(ts.size())}};
  return worst;
}

struct LieProbe {
  std::vector<int> m;
  std::vector<double> error;
  double fitted_c = 0.0;  // error(m_last) * m_last
  bool decreasing = true;
};

inline LieProbe lie_product_probe(const std::vector<Mat>& Ls, const std::vector<int>& ms) {
  if (Ls.empty()) throw Error(ErrorCode::ParamError, "lie_product_probe: need operators");
  Mat S = Mat::Zero(Ls[0].rows(), Ls[0].cols());
  for (const auto& L : Ls) S += L;
  const Mat target = expm_general(S);
  LieProbe p;
  for (int m : ms) {
    Mat step = Mat::Identity(S.rows(), S.cols());
    for (const auto& L : Ls) step = step * expm_general(L / static_cast<double>(m));
    Mat acc = Mat::Identity(S.rows(), S.cols());
    for (int i = 0; i < m; ++i) acc = acc * step;
    p.m.push_back(m);
    p.error.push_back(opnorm(acc - target));
  }
  for (size_t k = 1; k < p.error.size(); ++k)
    if (p.error[k] > p.error[k - 1] + 1e-13) p.decreasing = false;
  if (!p.m.empty()) p.fitted_c = p.error.back() * p.m.back();
  return p;
}

// D_alpha(rho||sigma) <= D_alpha(rho||omega) + D_max(omega||sigma)
inline CheckReport check_renyi_triangle(const Mat& rho, const Mat& sigma, const Mat& omega, double alpha,
                                        double tol = 1e-9) {
  if (!(alpha >= 0.5)) throw Error(ErrorCode::ParamError, "check_renyi_triangle: alpha must be >= 1/2");
  CheckReport r;
  r.name = "renyi_triangle";
  r.tol = tol;
  r.logarithmic = true;
  r.params = {{"alpha", alpha}};
  r.lhs = renyi(rho, sigma, alpha).value;
  r.rhs = renyi(rho, omega, alpha).value + d_max(omega, sigma).value;
  return finish(r);
}

}  // namespace qml
