#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qml/channels.hpp"
#include "qml/entropy.hpp"
#include "qml/linalg.hpp"
#include "qml/quad.hpp"
#include "qml/traceineq.hpp"

namespace qml {

enum class RecoveryMode { Petz, Rotated, Averaged };

// T^{[t]}(X) = sigma^{(1+it)/2} E^dag( E(sigma)^{-(1+it)/2} X E(sigma)^{-(1-it)/2} ) sigma^{(1-it)/2}
// Inverses are taken on the support. Built once; apply is pure.
struct RecoveryMap {
  Mat sigma;
  KrausChannel E;
  RecoveryMode mode = RecoveryMode::Petz;
  double t = 0.0;
  QuadratureRule rule;
  PsdSpectrum sig;   // spectrum of sigma
  PsdSpectrum esig;  // spectrum of E(sigma)

  int din() const { return E.dout; }
  int dout() const { return E.din; }
};

inline RecoveryMap make_recovery(const Mat& sigma, const KrausChannel& E, RecoveryMode mode = RecoveryMode::Petz,
                                 double t = 0.0, QuadratureRule rule = {}) {
  validate_kraus(E);
  if (sigma.rows() != E.din || sigma.cols() != E.din)
    throw Error(ErrorCode::DimMismatch, "recovery: sigma does not match the channel input");
  if (mode == RecoveryMode::Averaged && rule.size() == 0) rule = beta0_rule();
  RecoveryMap R;
  R.sigma = herm(sigma);
  R.E = E;
  R.mode = mode;
  R.t = mode == RecoveryMode::Rotated ? t : 0.0;
  R.rule = std::move(rule);
  R.sig = psd_spectrum(R.sigma, ErrorCode::NotPSD);
  R.esig = psd_spectrum(herm(qml::apply(E, R.sigma)), ErrorCode::NotPSD);
  return R;
}

inline Mat apply_t(const RecoveryMap& R, const Mat& X, double t) {
  if (X.rows() != R.din() || X.cols() != R.din()) throw Error(ErrorCode::DimMismatch, "recovery: input dimension");
  const Mat a = powm(R.esig, cplx(-0.5, -0.5 * t));
  const Mat b = powm(R.sig, cplx(0.5, 0.5 * t));
  const Mat inner = qml::apply(R.E, a * X * a.adjoint(), Mode::Adjoint);
  return b * inner * b.adjoint();
}

inline Mat petz_apply(const RecoveryMap& R, const Mat& X) {
  switch (R.mode) {
    case RecoveryMode::Petz: return apply_t(R, X, 0.0);
    case RecoveryMode::Rotated: return apply_t(R, X, R.t);
    case RecoveryMode::Averaged: {
      if (X.rows() != R.din() || X.cols() != R.din())
        throw Error(ErrorCode::DimMismatch, "recovery: input dimension");
      return Mat(integrate([&](double t) { return apply_t(R, X, t); }, R.rule));
    }
  }
  return X;
}

struct RecoveryChannel {
  KrausChannel channel;
  ChoiMatrix choi;
  TpcpVerdict verdict;
  bool full_support = true;  // E(sigma) invertible; otherwise only trace-non-increasing
};

inline RecoveryChannel map_as_channel(const RecoveryMap& R, double tol = 1e-9) {
  RecoveryChannel out;
  out.choi = choi_of_map([&R](const Mat& X) { return petz_apply(R, X); }, R.din(), R.dout());
  out.choi.matrix = herm(out.choi.matrix);
  out.channel = kraus_from_choi(out.choi, true);
  out.verdict = is_tpcp(out.choi, tol);
  out.full_support = R.esig.rank == R.din();
  return out;
}

// ---- tripartite specialization: T_{B->BC} acting on rho_AB, built as the map for sigma = id_A (x) rho_BC, E = tr_C

inline RecoveryMap make_fr_map(const QuantumState& rho, RecoveryMode mode = RecoveryMode::Averaged, double t = 0.0,
                               QuadratureRule rule = {}) {
  if (rho.shape.size() != 3) throw Error(ErrorCode::ShapeError, "recovery: state must have three subsystems");
  const int dA = rho.shape[0];
  const Mat sigma = tensor(Mat::Identity(dA, dA), partial_trace(rho.rho, rho.shape, {1, 2}));
  return make_recovery(sigma, partial_trace_channel(rho.shape, {0, 1}), mode, t, std::move(rule));
}

// -int beta_0(t) log F(target, T^{[t]}(X)) dt; the averaged output is accumulated on the way if asked for
inline double fidelity_integral(const RecoveryMap& R, const Mat& X, const Mat& target, Mat* averaged = nullptr) {
  const Mat s = powm(psd_spectrum(herm(target)), 0.5);
  if (averaged) *averaged = Mat::Zero(R.dout(), R.dout());
  double acc = 0.0;
  for (size_t i = 0; i < R.rule.size(); ++i) {
    const Mat Y = herm(apply_t(R, X, R.rule.nodes[i]));
    if (averaged) *averaged += R.rule.weights[i] * Y;
    // F = (tr |sqrt(target) sqrt(Y)|)^2 = (tr sqrt(sqrt(target) Y sqrt(target)))^2
    const RVec ev = eigh(herm(s * Y * s)).values;
    double f = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) f += std::sqrt(std::max(ev(k), 0.0));
    const double v = -R.rule.weights[i] * std::log(f * f);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "fidelity_integral: non-finite integrand");
    acc += v;
  }
  return acc;
}

inline std::vector<CheckReport> fr_check(const QuantumState& rho, const QuadratureRule& rule, double tol = 1e-8,
                                         const MeasuredOptions& mopt = {}) {
  if (rho.shape.size() != 3) throw Error(ErrorCode::ShapeError, "fr_check: state must have three subsystems");
  const double I = cmi(rho);
  const RecoveryMap R = make_fr_map(rho, RecoveryMode::Averaged, 0.0, rule);
  const Mat rAB = partial_trace(rho.rho, rho.shape, {0, 1});
  Mat rec;
  const double fid = fidelity_integral(R, rAB, rho.rho, &rec);
  const DivergenceResult dm = measured_relative_entropy(rho.rho, herm(rec), mopt);

  CheckReport base;
  base.tol = tol;
  base.direction = "ge";
  base.logarithmic = true;
  base.lhs = I;
  base.quad = quad_meta(rule);
  base.params = {{"dA", double(rho.shape[0])}, {"dB", double(rho.shape[1])}, {"dC", double(rho.shape[2])}};

  CheckReport ssa = base;
  ssa.name = "fr_ssa";
  ssa.rhs = 0.0;
  CheckReport m = base;
  m.name = "fr_measured";
  m.rhs = dm.value;
  m.extra = {{"iterations", double(dm.iterations)}, {"grad_norm", dm.grad_norm}};
  CheckReport f = base;
  f.name = "fr_fidelity";
  f.rhs = fid;
  return {finish(ssa), finish(m), finish(f)};
}

// ---- strengthened data processing

inline std::vector<CheckReport> strengthened_dpi_check(const Mat& rho, const Mat& sigma, const KrausChannel& E,
                                                       const QuadratureRule& rule, double tol = 1e-8,
                                                       const MeasuredOptions& mopt = {}) {
  require_same_dim(rho, sigma, "strengthened_dpi_check");
  const PsdSpectrum sp = psd_spectrum(sigma);
  if (support_violation(rho, sp) > kSupportTol)
    throw Error(ErrorCode::SupportViolation, "strengthened_dpi_check: rho is not supported on supp(sigma)");
  const Mat Er = herm(qml::apply(E, rho)), Es = herm(qml::apply(E, sigma));
  const double contraction = relative_entropy(rho, sigma).value - relative_entropy(Er, Es).value;
  const RecoveryMap R = make_recovery(sigma, E, RecoveryMode::Averaged, 0.0, rule);
  Mat rec;
  const double fid = fidelity_integral(R, Er, rho, &rec);
  const DivergenceResult dm = measured_relative_entropy(rho, herm(rec), mopt);

  CheckReport base;
  base.tol = tol;
  base.direction = "ge";
  base.logarithmic = true;
  base.lhs = contraction;
  base.quad = quad_meta(rule);
  base.params = {{"din", double(E.din)}, {"dout", double(E.dout)}};
  CheckReport m = base;
  m.name = "dpi_measured";
  m.rhs = dm.value;
  CheckReport f = base;
  f.name = "dpi_fidelity";
  f.rhs = fid;
  return {finish(m), finish(f)};
}

// ---- upper bound on the CMI through a given recovery map

enum class LambdaSource { ClassicalLP, SuppliedInvariant, ReadOnly };

inline const char* lambda_source_name(LambdaSource s) {
  switch (s) {
    case LambdaSource::ClassicalLP: return "classical-lp";
    case LambdaSource::SuppliedInvariant: return "supplied-invariant";
    case LambdaSource::ReadOnly: return "read-only";
  }
  return "";
}

inline constexpr double kInvariantTol = 1e-9;

namespace detail {
inline bool is_diagonal(const Mat& X, double tol = 1e-12) {
  return (X - Mat(X.diagonal().asDiagonal())).norm() <= tol * std::max(1.0, X.norm());
}
}  // namespace detail

// D(rho || (id (x) R)(rho_AB)) >= I(A:C|B) - Lambda, R : B -> BC
inline CheckReport cmi_upper_check(const QuantumState& rho, const KrausChannel& R, LambdaSource src,
                                   const std::optional<Mat>& tau = std::nullopt, double tol = 1e-9) {
  if (rho.shape.size() != 3) throw Error(ErrorCode::ShapeError, "cmi_upper_check: state must have three subsystems");
  const int dA = rho.shape[0], dB = rho.shape[1], dC = rho.shape[2];
  if (R.din != dB || R.dout != dB * dC) throw Error(ErrorCode::DimMismatch, "cmi_upper_check: R must map B to BC");
  const Mat rAB = partial_trace(rho.rho, rho.shape, {0, 1});
  const KrausChannel RA = extend(R, dA, 1);
  const KrausChannel RBB = extend(compose(partial_trace_channel({dB, dC}, {0}), R), dA, 1);
  const Mat rec = herm(qml::apply(RA, rAB));
  CheckReport r;
  r.name = "cmi_upper";
  r.tol = tol;
  r.direction = "ge";
  r.logarithmic = true;
  r.note = lambda_source_name(src);
  const double I = cmi(rho);
  double lambda = 0.0;
  switch (src) {
    case LambdaSource::ClassicalLP: {
      if (!detail::is_diagonal(rho.rho))
        throw Error(ErrorCode::ParamError, "cmi_upper_check: classical mode needs a diagonal state");
      Eigen::MatrixXd W(dB, dB);
      for (int y = 0; y < dB; ++y) {
        Mat e = Mat::Zero(dB * dA, dB * dA);
        e(y, y) = 1.0;  // a = 0 block is enough: RBB acts on B only
        const Mat out = qml::apply(RBB, e);
        for (int yp = 0; yp < dB; ++yp) W(yp, y) = out(yp, yp).real();
      }
      // round-off from the Kraus form would otherwise link closed classes
      W = (W.array() < 1e-12).select(0.0, W);
      for (int y = 0; y < dB; ++y) W.col(y) /= W.col(y).sum();
      Eigen::MatrixXd P(dA, dB);
      for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dB; ++b) P(a, b) = std::max(0.0, rAB(a * dB + b, a * dB + b).real());
      const LambdaMaxResult lm = classical_lambda_max(P, W);
      lambda = lm.value;
      break;
    }
    case LambdaSource::SuppliedInvariant: {
      if (!tau) throw Error(ErrorCode::ParamError, "cmi_upper_check: invariant state required");
      if (tau->rows() != rAB.rows()) throw Error(ErrorCode::DimMismatch, "cmi_upper_check: tau must live on AB");
      const double dev = trace_norm(qml::apply(RBB, *tau) - *tau);
      if (dev > kInvariantTol)
        throw Error(ErrorCode::InvariantViolation, "cmi_upper_check: tau is not invariant (" + std::to_string(dev) + ")");
      lambda = d_max(rAB, *tau).value;
      r.extra.push_back({"lambda_is_upper_bound", 1.0});
      break;
    }
    case LambdaSource::ReadOnly: {
      const double dev = trace_norm(qml::apply(RBB, rAB) - rAB);
      if (dev > kInvariantTol)
        throw Error(ErrorCode::InvariantViolation,
                    "cmi_upper_check: R does not leave rho_AB unchanged (" + std::to_string(dev) + ")");
      break;
    }
  }
  r.lhs = relative_entropy(rho.rho, rec).value;
  r.rhs = I - lambda;
  r = finish(r);
  r.extra.insert(r.extra.begin(), {{"cmi", I}, {"lambda", lambda}});
  return r;
}

// classical version: P over (X,Y,Z), W((y',z'), y) column-stochastic from Y to Y'Z'
inline CheckReport cmi_upper_check_classical(const ClassicalJoint& P, const Eigen::MatrixXd& W, double tol = 1e-9) {
  validate_joint(P, 1e-9);
  if (P.shape.size() != 3) throw Error(ErrorCode::ShapeError, "cmi_upper_check: need three variables");
  const int dX = P.shape[0], dY = P.shape[1], dZ = P.shape[2];
  if (W.cols() != dY || W.rows() != dY * dZ) throw Error(ErrorCode::DimMismatch, "cmi_upper_check: W shape");
  validate_stochastic(W, 1e-9);
  const ClassicalJoint PXY = marginal(P, {0, 1});
  std::vector<double> rec(P.p.size(), 0.0);
  for (int x = 0; x < dX; ++x)
    for (int y = 0; y < dY; ++y) {
      const double pxy = PXY.p[x * dY + y];
      if (pxy == 0.0) continue;
      for (int o = 0; o < dY * dZ; ++o) rec[static_cast<size_t>(x) * dY * dZ + o] += pxy * W(o, y);
    }
  Eigen::MatrixXd WBB = Eigen::MatrixXd::Zero(dY, dY);
  for (int y = 0; y < dY; ++y)
    for (int yp = 0; yp < dY; ++yp)
      for (int z = 0; z < dZ; ++z) WBB(yp, y) += W(yp * dZ + z, y);
  Eigen::MatrixXd Pm(dX, dY);
  for (int x = 0; x < dX; ++x)
    for (int y = 0; y < dY; ++y) Pm(x, y) = PXY.p[x * dY + y];
  const LambdaMaxResult lm = classical_lambda_max(Pm, WBB);
  CheckReport r;
  r.name = "cmi_upper";
  r.note = "classical-lp";
  r.tol = tol;
  r.direction = "ge";
  r.logarithmic = true;
  const double I = classical_cmi(P);
  r.lhs = classical_relative_entropy(P.p, rec).value;
  r.rhs = I - lm.value;
  r = finish(r);
  r.extra = {{"cmi", I}, {"lambda", lm.value}, {"classes", double(lm.classes)}};
  return r;
}

// ---- Markov chains

struct MarkovVerdict {
  double cmi = 0.0;
  bool markov = false;
  double residual[3] = {0.0, 0.0, 0.0};  // t = 0, 1, -1
  double bound = 0.0;                    // 10 sqrt(tol)
  bool recovery_ok = true;               // asserted at t = 0 only
  bool rotated_ok = true;                // reported
  bool pass() const { return markov && recovery_ok; }
};

inline MarkovVerdict markov_verify(const QuantumState& rho, double tol = 1e-9) {
  if (rho.shape.size() != 3) throw Error(ErrorCode::ShapeError, "markov_verify: state must have three subsystems");
  MarkovVerdict v;
  v.cmi = cmi(rho);
  v.markov = v.cmi <= tol;
  v.bound = 10.0 * std::sqrt(tol);
  const RecoveryMap R = make_fr_map(rho, RecoveryMode::Petz);
  const Mat rAB = partial_trace(rho.rho, rho.shape, {0, 1});
  const double ts[3] = {0.0, 1.0, -1.0};
  for (int k = 0; k < 3; ++k) v.residual[k] = trace_norm(apply_t(R, rAB, ts[k]) - rho.rho);
  if (v.markov) {
    v.recovery_ok = v.residual[0] <= v.bound;
    v.rotated_ok = v.residual[1] <= v.bound && v.residual[2] <= v.bound;
  }
  return v;
}

struct DecompositionVerdict {
  bool pass = false;
  double leakage = 0.0;          // || rho - sum_j Pi_j rho Pi_j ||_1
  double factor_residual = 0.0;  // max_j || rho_j - rho_{A bL_j} (x) rho_{bR_j C} ||_1 (normalized blocks)
  std::vector<double> weights;
};

// rho_ABC = (+)_j P(j) rho_{A bL_j} (x) rho_{bR_j C} after rotating B by U (columns = new basis)
inline DecompositionVerdict markov_decomposition_verify(const QuantumState& rho,
                                                        const std::vector<std::pair<int, int>>& blocks,
                                                        const Mat& U, double tol = 1e-8) {
  if (rho.shape.size() != 3) throw Error(ErrorCode::ShapeError, "decomposition: state must have three subsystems");
  const int dA = rho.shape[0], dB = rho.shape[1], dC = rho.shape[2];
  int total = 0;
  for (const auto& [l, r] : blocks) {
    if (l < 1 || r < 1) throw Error(ErrorCode::ShapeError, "decomposition: block dimensions must be positive");
    total += l * r;
  }
  if (total != dB) throw Error(ErrorCode::ShapeError, "decomposition: blocks do not fill B");
  if (U.rows() != dB || U.cols() != dB) throw Error(ErrorCode::ShapeError, "decomposition: basis unitary shape");
  const Mat W = tensor({Mat::Identity(dA, dA), U, Mat::Identity(dC, dC)});
  const Mat r = W.adjoint() * rho.rho * W;
  DecompositionVerdict v;
  Mat kept = Mat::Zero(r.rows(), r.cols());
  int off = 0;
  for (const auto& [dl, dr] : blocks) {
    const int nb = dl * dr;
    std::vector<long> idx;
    for (int a = 0; a < dA; ++a)
      for (int b = 0; b < nb; ++b)
        for (int c = 0; c < dC; ++c) idx.push_back((static_cast<long>(a) * dB + off + b) * dC + c);
    const long n = static_cast<long>(idx.size());
    Mat blk(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        blk(i, j) = r(idx[i], idx[j]);
        kept(idx[i], idx[j]) = r(idx[i], idx[j]);
      }
    const double w = trace_re(blk);
    v.weights.push_back(w);
    if (w > 1e-14) {
      const Mat nbk = blk / w;
      const Shape sh{dA, dl, dr, dC};
      const Mat prod = tensor(partial_trace(nbk, sh, {0, 1}), partial_trace(nbk, sh, {2, 3}));
      v.factor_residual = std::max(v.factor_residual, trace_norm(nbk - prod));
    }
    off += nb;
  }
  v.leakage = trace_norm(r - kept);
  v.pass = v.leakage <= tol && v.factor_residual <= tol;
  return v;
}

// I(A:C|B)_rho <= D(rho || mu) for a Markov chain mu
inline CheckReport winter_bound_check(const QuantumState& rho, const QuantumState& mu, double tol = 1e-9) {
  if (rho.shape != mu.shape) throw Error(ErrorCode::ShapeError, "winter_bound_check: shapes differ");
  const MarkovVerdict mv = markov_verify(mu, 1e-9);
  if (!mv.pass()) throw Error(ErrorCode::NotMarkov, "winter_bound_check: mu is not a Markov chain");
  CheckReport r;
  r.name = "markov_distance";
  r.tol = tol;
  r.logarithmic = true;
  r.lhs = cmi(rho);
  r.rhs = relative_entropy(rho.rho, mu.rho).value;
  return finish(r);
}

// ---- ensembles: concavity of conditional entropy and joint convexity of relative entropy

inline std::vector<CheckReport> ensemble_checks(const std::vector<double>& weights,
                                                const std::vector<QuantumState>& rhos,
                                                const std::vector<Mat>& sigmas, const QuadratureRule& rule,
                                                double tol = 1e-8, const MeasuredOptions& mopt = {}) {
  if (weights.size() != rhos.size() || rhos.empty())
    throw Error(ErrorCode::ParamError, "ensemble_checks: weights and members differ in number");
  double ws = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::ParamError, "ensemble_checks: negative weight");
    ws += w;
  }
  if (std::abs(ws - 1.0) > 1e-10) throw Error(ErrorCode::ParamError, "ensemble_checks: weights must sum to one");
  const Shape shape = rhos[0].shape;
  const long d = shape_product(shape);
  Mat bar = Mat::Zero(d, d);
  for (size_t x = 0; x < rhos.size(); ++x) {
    if (rhos[x].shape != shape) throw Error(ErrorCode::ShapeError, "ensemble_checks: members differ in shape");
    bar += weights[x] * rhos[x].rho;
  }
  bar = herm(bar);
  std::vector<CheckReport> out;

  if (shape.size() == 2) {
    const QuantumState sbar{bar, shape};
    const RecoveryMap R = make_recovery(bar, partial_trace_channel(shape, {1}), RecoveryMode::Averaged, 0.0, rule);
    double lhs = conditional_entropy(sbar), rhs = 0.0;
    for (size_t x = 0; x < rhos.size(); ++x) {
      if (weights[x] == 0.0) continue;
      lhs -= weights[x] * conditional_entropy(rhos[x]);
      const Mat rB = partial_trace(rhos[x].rho, shape, {1});
      rhs += weights[x] * measured_relative_entropy(rhos[x].rho, herm(petz_apply(R, rB)), mopt).value;
    }
    CheckReport r;
    r.name = "concavity_conditional_entropy";
    r.tol = tol;
    r.direction = "ge";
    r.logarithmic = true;
    r.quad = quad_meta(rule);
    r.lhs = lhs;
    r.rhs = rhs;
    out.push_back(finish(r));
  }

  if (!sigmas.empty()) {
    if (sigmas.size() != rhos.size()) throw Error(ErrorCode::ParamError, "ensemble_checks: one sigma per member");
    const int m = static_cast<int>(rhos.size());
    Mat sbar = Mat::Zero(d, d);
    Mat rXA = Mat::Zero(m * d, m * d), sXA = Mat::Zero(m * d, m * d);
    double lhs = 0.0;
    for (int x = 0; x < m; ++x) {
      require_same_dim(rhos[x].rho, sigmas[x], "ensemble_checks");
      sbar += weights[x] * sigmas[x];
      rXA.block(x * d, x * d, d, d) = weights[x] * rhos[x].rho;
      sXA.block(x * d, x * d, d, d) = weights[x] * sigmas[x];
      if (weights[x] > 0.0) lhs += weights[x] * relative_entropy(rhos[x].rho, sigmas[x]).value;
    }
    lhs -= relative_entropy(bar, herm(sbar)).value;
    const RecoveryMap R =
        make_recovery(sXA, partial_trace_channel({m, static_cast<int>(d)}, {1}), RecoveryMode::Averaged, 0.0, rule);
    CheckReport r;
    r.name = "joint_convexity";
    r.tol = tol;
    r.direction = "ge";
    r.logarithmic = true;
    r.quad = quad_meta(rule);
    r.lhs = lhs;
    r.rhs = std::isinf(lhs) ? 0.0 : measured_relative_entropy(rXA, herm(petz_apply(R, bar)), mopt).value;
    out.push_back(finish(r));
  }
  return out;
}

}  // namespace qml
