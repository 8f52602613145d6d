#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qml/linalg.hpp"
#include "qml/quad.hpp"
#include "qml/traceineq.hpp"

namespace qml {

struct PinchingSpec {
  std::vector<Mat> projectors;
  std::vector<double> eigenvalues;  // cluster means, descending
  double gap_tol = 0.0;
};

inline constexpr double kClusterTol = 1e-8;

inline PinchingSpec pinching_spec(const Mat& H) {
  const Spectrum s = eigh(H);
  PinchingSpec p;
  const double hn = s.values.cwiseAbs().maxCoeff();
  p.gap_tol = kClusterTol * std::max(hn, 1.0);
  const long d = s.values.size();
  long start = 0;
  for (long k = 1; k <= d; ++k) {
    if (k < d && s.values(k - 1) - s.values(k) <= p.gap_tol) continue;
    const Mat Vb = s.vectors.middleCols(start, k - start);
    p.projectors.push_back(Vb * Vb.adjoint());
    p.eigenvalues.push_back(s.values.segment(start, k - start).mean());
    start = k;
  }
  return p;
}

inline Mat pinch(const PinchingSpec& p, const Mat& X) {
  if (p.projectors.empty() || X.rows() != p.projectors[0].rows())
    throw Error(ErrorCode::DimMismatch, "pinch: dimension mismatch");
  Mat Y = Mat::Zero(X.rows(), X.cols());
  for (const auto& P : p.projectors) Y.noalias() += P * X * P;
  return Y;
}

inline Mat pinch(const Mat& H, const Mat& X) {
  require_same_dim(H, X, "pinch");
  return pinch(pinching_spec(H), X);
}

// (1/m) sum_y U_y X U_y^dag with U_y = sum_z e^{2 pi i y z / m} P_z
inline Mat pinch_unitary_average(const Mat& H, const Mat& X) {
  require_same_dim(H, X, "pinch_unitary_average");
  const PinchingSpec p = pinching_spec(H);
  const long m = static_cast<long>(p.projectors.size());
  Mat Y = Mat::Zero(X.rows(), X.cols());
  for (long y = 0; y < m; ++y) {
    Mat U = Mat::Zero(X.rows(), X.cols());
    for (long z = 0; z < m; ++z)
      U += std::exp(cplx(0.0, 2.0 * std::numbers::pi * static_cast<double>(y * z) / m)) * p.projectors[z];
    Y += U * X * U.adjoint();
  }
  return Y / static_cast<double>(m);
}

inline long spectrum_size(const Mat& H) { return static_cast<long>(pinching_spec(H).projectors.size()); }

inline double spectral_gap(const Mat& H) {
  const PinchingSpec p = pinching_spec(H);
  double g = kInf;
  for (size_t k = 1; k < p.eigenvalues.size(); ++k) g = std::min(g, p.eigenvalues[k - 1] - p.eigenvalues[k]);
  return g;
}

// int mu(t) e^{itH} X e^{-itH} dt, evaluated in the eigenbasis of H
inline Mat smooth_pinch(const Mat& H, double kappa, const Mat& X, const QuadratureRule& rule) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::KappaNonpositive, "smooth_pinch: kappa must be positive");
  require_same_dim(H, X, "smooth_pinch");
  const Spectrum s = eigh(H);
  const long d = s.values.size();
  Mat Xt = s.vectors.adjoint() * X * s.vectors;
  // nodes are mirror-symmetric and mu is even, so the factor is the real cosine sum, even in w
  for (long k = 0; k < d; ++k)
    for (long l = k + 1; l < d; ++l) {
      const double w = s.values(k) - s.values(l);
      double acc = 0.0;
      for (size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * std::cos(rule.nodes[i] * w);
      Xt(k, l) *= acc;
      Xt(l, k) *= acc;
    }
  return s.vectors * Xt * s.vectors.adjoint();
}

inline Mat smooth_pinch(const Mat& H, double kappa, const Mat& X) {
  const Spectrum s = eigh(H);
  const double spread = s.values.maxCoeff() - s.values.minCoeff();
  return smooth_pinch(H, kappa, X, mu_rule(kappa, spread));
}

// binomial(m + d - 1, d - 1), exact
inline boost::multiprecision::cpp_int distinct_eig_bound(long d, long m) {
  if (d < 1 || m < 1) throw Error(ErrorCode::ParamError, "distinct_eig_bound: need d, m >= 1");
  boost::multiprecision::cpp_int b = 1;
  const long n = m + d - 1, k = d - 1;
  for (long i = 1; i <= k; ++i) {
    b *= (n - k + i);
    b /= i;
  }
  return b;
}

inline Mat tensor_power(const Mat& B, int m) {
  Mat out = Mat::Identity(1, 1);
  for (int i = 0; i < m; ++i) out = tensor(out, B);
  return out;
}

struct AsymptoticGt {
  double lhs = 0.0;  // log tr exp(log B1 + log B2)
  double rhs = 0.0;  // log tr B1 B2
  std::vector<double> pinched;   // (1/m) log tr exp(log P(B1^m) + log B2^m)
  std::vector<double> envelope;  // (1/m) log |spec(B2^m)|
  std::vector<double> upper;     // pinched + envelope, bounds lhs from above
};

inline constexpr long kMaxTensorDim = 4096;

inline AsymptoticGt asymptotic_gt_trace(const Mat& B1, const Mat& B2, int m) {
  require_same_dim(B1, B2, "asymptotic_gt_trace");
  if (m < 1) throw Error(ErrorCode::ParamError, "asymptotic_gt_trace: m must be >= 1");
  const double dimm = std::pow(static_cast<double>(B1.rows()), m);
  if (dimm > static_cast<double>(kMaxTensorDim))
    throw Error(ErrorCode::DimTooLarge, "asymptotic_gt_trace: product dimension exceeds 4096");
  const PsdSpectrum p1 = psd_spectrum(B1, ErrorCode::NotPD), p2 = psd_spectrum(B2, ErrorCode::NotPD);
  if (p1.rank != B1.rows() || p2.rank != B2.rows())
    throw Error(ErrorCode::NotPD, "asymptotic_gt_trace: inputs must be positive definite");
  AsymptoticGt r;
  r.lhs = std::log(trace_re(expm(herm(logm(p1) + logm(p2)))));
  r.rhs = std::log(trace_re(B1 * B2));
  for (int k = 1; k <= m; ++k) {
    const Mat T1 = tensor_power(B1, k), T2 = tensor_power(B2, k);
    const PinchingSpec ps = pinching_spec(T2);
    const Mat P1 = herm(pinch(ps, T1));
    const double v = std::log(trace_re(expm(herm(logm(P1) + logm(T2))))) / k;
    r.pinched.push_back(v);
    const double env = std::log(static_cast<double>(ps.projectors.size())) / k;
    r.envelope.push_back(env);
    r.upper.push_back(v + env);
  }
  return r;
}

// ---- property suites

namespace detail {
inline CheckReport prop(const std::string& name, double lhs, double rhs, double tol, const char* dir = "le") {
  CheckReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tol = tol;
  r.direction = dir;
  return finish(r);
}
}  // namespace detail

// pinching map: commutation, pinching inequality, trace against H, operator convexity, norm contraction
inline std::vector<CheckReport> pinching_properties(const Mat& H, const Mat& X, const Mat& Xpd, double tol = 1e-9) {
  require_same_dim(H, X, "pinching_properties");
  require_same_dim(H, Xpd, "pinching_properties");
  const PinchingSpec ps = pinching_spec(H);
  const double m = static_cast<double>(ps.projectors.size());
  const double sx = std::max(1.0, opnorm(X)), sp = std::max(1.0, opnorm(Xpd));
  const Mat PX = pinch(ps, X), PXpd = pinch(ps, Xpd);
  std::vector<CheckReport> out;
  out.push_back(detail::prop("pinch_commutes", opnorm(commutator(PX, H)), 0.0, tol * sx * std::max(1.0, opnorm(H))));
  out.push_back(detail::prop("pinching_inequality", min_eig(herm(PXpd - Xpd / m)), 0.0, tol * sp, "ge"));
  out.push_back(detail::prop("pinch_trace", std::abs((PX * H).trace() - (X * H).trace()), 0.0,
                             tol * sx * std::max(1.0, opnorm(H))));
  out.push_back(detail::prop("convex_square", min_eig(herm(pinch(ps, X * X) - PX * PX)), 0.0, tol * sx * sx, "ge"));
  out.push_back(detail::prop("convex_neglog", min_eig(herm(logm(herm(PXpd)) - pinch(ps, logm(Xpd)))), 0.0, tol * sp,
                             "ge"));
  for (double p : {1.0, 2.0, kInf})
    out.push_back(detail::prop("pinch_norm_" + (std::isinf(p) ? std::string("inf") : std::to_string(int(p))),
                               schatten_norm(PX, p), schatten_norm(X, p), tol * sx));
  out.push_back(detail::prop("unitary_average", opnorm(PX - pinch_unitary_average(H, X)), 0.0, 1e-10 * sx));
  out.back().params = {{"spec_size", m}};
  return out;
}

// smooth pinching: commutator contraction, the kappa bound, vanishing far off-diagonal, distance bound, norm contraction
inline std::vector<CheckReport> smooth_pinching_properties(const Mat& H, const Mat& X, double kappa,
                                                           const QuadratureRule& rule, double tol = 1e-9,
                                                           double quad_tol = 1e-7) {
  require_same_dim(H, X, "smooth_pinching_properties");
  const Mat Y = smooth_pinch(H, kappa, X, rule);
  const Mat cX = commutator(H, X), cY = commutator(H, Y);
  const double gap = spectral_gap(H);
  const double sx = std::max(1.0, opnorm(X)) * std::max(1.0, opnorm(H));
  std::vector<CheckReport> out;
  for (double p : {1.0, 2.0, kInf}) {
    const std::string tag = std::isinf(p) ? "inf" : std::to_string(int(p));
    out.push_back(detail::prop("smooth_commutator_" + tag, schatten_norm(cY, p), schatten_norm(cX, p), quad_tol * sx));
    out.push_back(detail::prop("smooth_kappa_bound_" + tag, schatten_norm(cY, p),
                               kappa > gap ? kappa * schatten_norm(X, p) : 0.0, quad_tol * sx));
    out.push_back(detail::prop("smooth_norm_" + tag, schatten_norm(Y, p), schatten_norm(X, p), quad_tol * sx));
  }
  const Spectrum s = eigh(H);
  const Mat Yt = s.vectors.adjoint() * Y * s.vectors;
  double far = 0.0;
  for (Eigen::Index k = 0; k < Yt.rows(); ++k)
    for (Eigen::Index l = 0; l < Yt.cols(); ++l)
      if (std::abs(s.values(k) - s.values(l)) >= kappa) far = std::max(far, std::abs(Yt(k, l)));
  out.push_back(detail::prop("smooth_far_offdiag", far, 0.0, quad_tol * std::max(1.0, opnorm(X))));
  const double bound = opnorm(cX) * 12.0 * std::log(2.0) / (std::numbers::pi * kappa);
  out.push_back(detail::prop("smooth_distance", opnorm(X - Y), bound, tol * sx));
  for (auto& r : out) r.params = {{"kappa", kappa}, {"gap", std::isinf(gap) ? -1.0 : gap}};
  return out;
}

// || [L, e^{itH}] ||_inf <= |t| || [L, H] ||_inf
inline CheckReport lipschitz_check(const Mat& L, const Mat& H, double t, double tol = 1e-9) {
  require_same_dim(L, H, "lipschitz_check");
  const Spectrum s = eigh(H);
  Eigen::VectorXcd f(s.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = std::exp(cplx(0.0, t * s.values(k)));
  const Mat U = from_spectrum(s.vectors, f);
  CheckReport r = detail::prop("exp_lipschitz", opnorm(commutator(L, U)), std::abs(t) * opnorm(commutator(L, H)),
                               tol * std::max(1.0, opnorm(L)));
  r.params = {{"t", t}};
  return r;
}

}  // namespace qml
