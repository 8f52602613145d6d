#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qml/channels.hpp"
#include "qml/linalg.hpp"

namespace qml {

inline constexpr double kSupportTol = 1e-10;  // tr(P_sigma^perp rho) above this means rho is not << sigma

struct DivergenceResult {
  double value = 0.0;
  bool infinite = false;
  std::string kind;
  // measured relative entropy only
  Mat certificate;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

inline double shannon(const RVec& p) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p(k) > 0.0) h -= p(k) * std::log(p(k));
  return h;
}

inline double von_neumann(const Mat& rho) {
  RVec ev = eigh(rho).values;
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) <= kSuppEps * lmax) ev(k) = 0.0;
  return shannon(ev);
}

inline double von_neumann(const QuantumState& s) { return von_neumann(s.rho); }

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ParamError, "binary_entropy: p must lie in [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

inline std::vector<int> join(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

inline double marginal_entropy(const QuantumState& s, const std::vector<int>& keep) {
  if (keep.empty()) return 0.0;
  return von_neumann(partial_trace(s.rho, s.shape, keep));
}

// I(A:C|B) for arbitrary groups of subsystems; B may be empty
inline double cmi(const QuantumState& s, const std::vector<int>& A, const std::vector<int>& B,
                  const std::vector<int>& C) {
  return marginal_entropy(s, join(A, B)) + marginal_entropy(s, join(B, C)) -
         marginal_entropy(s, join(join(A, B), C)) - marginal_entropy(s, B);
}

inline double cmi(const QuantumState& s) {
  if (s.shape.size() != 3) throw Error(ErrorCode::ShapeError, "cmi: state must have three subsystems");
  return cmi(s, {0}, {1}, {2});
}

inline double mutual_information(const QuantumState& s, const std::vector<int>& A, const std::vector<int>& B) {
  return cmi(s, A, {}, B);
}

// H(A|B) of a bipartite state
inline double conditional_entropy(const QuantumState& s) {
  if (s.shape.size() != 2) throw Error(ErrorCode::ShapeError, "conditional_entropy: need two subsystems");
  return von_neumann(s.rho) - marginal_entropy(s, {1});
}

inline double support_violation(const Mat& rho, const PsdSpectrum& sig) {
  const Mat P = support_projector(sig);
  return trace_re(rho) - trace_re(P * rho);
}

inline DivergenceResult relative_entropy(const Mat& rho, const Mat& sigma) {
  require_same_dim(rho, sigma, "relative_entropy");
  DivergenceResult r;
  r.kind = "D";
  const PsdSpectrum sp = psd_spectrum(sigma, ErrorCode::NotPSD);
  if (support_violation(rho, sp) > kSupportTol) {
    r.infinite = true;
    r.value = kInf;
    return r;
  }
  const PsdSpectrum rp = psd_spectrum(rho, ErrorCode::NotPSD);
  r.value = trace_re(rho * logm(rp)) - trace_re(rho * logm(sp));
  return r;
}

// minimal (sandwiched) Renyi divergence
inline DivergenceResult renyi(const Mat& rho, const Mat& sigma, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::ParamError, "renyi: alpha must be positive");
  if (alpha == 1.0) return relative_entropy(rho, sigma);
  require_same_dim(rho, sigma, "renyi");
  DivergenceResult r;
  r.kind = std::isinf(alpha) ? "Dmax" : "D_alpha";
  const PsdSpectrum sp = psd_spectrum(sigma, ErrorCode::NotPSD);
  const double tr = trace_re(rho);
  if (alpha > 1.0 && support_violation(rho, sp) > kSupportTol) {
    r.infinite = true;
    r.value = kInf;
    return r;
  }
  if (std::isinf(alpha)) {
    const Mat s = powm(sp, -0.5);
    r.value = std::log(eigh(herm(s * rho * s)).values.maxCoeff() / tr);
    return r;
  }
  const Mat s = powm(sp, (1.0 - alpha) / (2.0 * alpha));
  const PsdSpectrum mid = psd_spectrum(herm(s * rho * s), ErrorCode::NotPSD);
  double Q = 0.0;
  for (Eigen::Index k = 0; k < mid.values.size(); ++k)
    if (mid.support[k]) Q += std::pow(mid.values(k), alpha);
  if (Q <= 0.0) {
    r.infinite = true;
    r.value = kInf;
    return r;
  }
  r.value = std::log(Q / tr) / (alpha - 1.0);
  return r;
}

inline DivergenceResult d_max(const Mat& rho, const Mat& sigma) { return renyi(rho, sigma, kInf); }
inline DivergenceResult d_min(const Mat& rho, const Mat& sigma) { return renyi(rho, sigma, 0.5); }

// ---- measured relative entropy

struct MeasuredOptions {
  int max_iter = 500;
  double grad_tol = 1e-8;
  double slack = 1e-8;
};

namespace detail {
struct AscentPoint {
  Mat H;
  Spectrum s;
  double f = 0.0;
};

inline AscentPoint ascent_point(const Mat& H, const Mat& rho, const Mat& sigma) {
  AscentPoint a;
  a.H = herm(H);
  a.s = eigh(a.H);
  const RVec ex = a.s.values.array().exp();
  const Mat eH = from_spectrum(a.s.vectors, ex);
  a.f = trace_re(rho * a.H) + 1.0 - trace_re(sigma * eH);
  return a;
}

// measured value in the eigenbasis of H, with optimal eigenvalues
inline double basis_value(const Mat& V, const Mat& rho, const Mat& sigma, RVec& ratio) {
  const long d = V.cols();
  ratio.resize(d);
  double v = 0.0;
  for (long k = 0; k < d; ++k) {
    const double p = std::max(0.0, (V.col(k).adjoint() * rho * V.col(k))(0, 0).real());
    const double q = std::max(0.0, (V.col(k).adjoint() * sigma * V.col(k))(0, 0).real());
    if (p > 0.0 && q <= 0.0) return kInf;
    ratio(k) = (p > 0.0) ? p / q : 0.0;
    if (p > 0.0) v += p * std::log(p / q);
  }
  return v + 1.0 - trace_re(rho);
}
}  // namespace detail

// f(omega) = tr rho log omega + 1 - tr sigma omega for a positive definite omega
inline double measured_objective(const Mat& rho, const Mat& sigma, const Mat& omega) {
  const PsdSpectrum p = psd_spectrum(omega, ErrorCode::NotPD);
  if (p.rank != omega.rows()) throw Error(ErrorCode::NotPD, "measured_objective: omega must be positive definite");
  return trace_re(rho * logm(p)) + 1.0 - trace_re(sigma * omega);
}

inline DivergenceResult measured_relative_entropy(const Mat& rho, const Mat& sigma, const MeasuredOptions& opt = {}) {
  require_same_dim(rho, sigma, "measured_relative_entropy");
  DivergenceResult r;
  r.kind = "D_M";
  const PsdSpectrum sp = psd_spectrum(sigma, ErrorCode::NotPSD);
  if (support_violation(rho, sp) > kSupportTol) {
    r.infinite = true;
    r.value = kInf;
    return r;
  }
  const long d = rho.rows();
  // work on supp(sigma), where sigma is invertible
  Mat Vs(d, sp.rank);
  for (long k = 0, c = 0; k < d; ++k)
    if (sp.support[k]) Vs.col(c++) = sp.vectors.col(k);
  const Mat rs = herm(Vs.adjoint() * rho * Vs);
  const Mat ss = herm(Vs.adjoint() * sigma * Vs);

  const Mat H0 = logm(rs) - logm(ss);
  detail::AscentPoint cur = detail::ascent_point(H0, rs, ss);
  Mat G = rs - frechet_exp(cur.s, ss);
  double gnorm = G.norm();
  Mat Hprev, Gprev;
  double step = 1.0;
  int it = 0;
  // gradient steps get the iterate into the basin, Newton finishes
  const int grad_budget = opt.max_iter / 2;
  for (; it < grad_budget && gnorm > std::max(opt.grad_tol, 1e-6); ++it) {
    if (it > 0) {
      const Mat sdiff = cur.H - Hprev, ydiff = G - Gprev;
      const double sy = std::real((sdiff.adjoint() * ydiff).trace());
      const double ss2 = sdiff.squaredNorm();
      step = (std::abs(sy) > 1e-300) ? ss2 / std::abs(sy) : 1.0;
      step = std::clamp(step, 1e-8, 1e8);
    }
    // Armijo backtracking on the ascent direction G
    detail::AscentPoint next;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      next = detail::ascent_point(cur.H + step * G, rs, ss);
      if (std::isfinite(next.f) && next.f >= cur.f + 1e-4 * step * gnorm * gnorm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Hprev = cur.H;
    Gprev = G;
    cur = std::move(next);
    G = rs - frechet_exp(cur.s, ss);
    gnorm = G.norm();
  }
  // Newton on the real coordinates of H; Hessian by central differences of the gradient
  const long ds = rs.rows();
  std::vector<Mat> basis;
  for (long j = 0; j < ds; ++j) {
    Mat E = Mat::Zero(ds, ds);
    E(j, j) = 1.0;
    basis.push_back(E);
    for (long k = j + 1; k < ds; ++k) {
      Mat A = Mat::Zero(ds, ds), B = Mat::Zero(ds, ds);
      A(j, k) = A(k, j) = std::sqrt(0.5);
      B(j, k) = cplx(0.0, std::sqrt(0.5));
      B(k, j) = cplx(0.0, -std::sqrt(0.5));
      basis.push_back(A);
      basis.push_back(B);
    }
  }
  const long np = static_cast<long>(basis.size());
  auto grad_at = [&](const Mat& H) {
    const Spectrum sh = eigh(herm(H));
    const Mat Gh = rs - frechet_exp(sh, ss);
    RVec g(np);
    for (long a = 0; a < np; ++a) g(a) = std::real((Gh * basis[a]).trace());
    return g;
  };
  for (; it < opt.max_iter && gnorm > opt.grad_tol; ++it) {
    const RVec g = grad_at(cur.H);
    Eigen::MatrixXd Hs(np, np);
    const double h = 1e-5;
    for (long a = 0; a < np; ++a) Hs.col(a) = (grad_at(cur.H + h * basis[a]) - grad_at(cur.H - h * basis[a])) / (2 * h);
    Hs = 0.5 * (Hs + Hs.transpose()).eval();
    // maximizing: need -Hs positive definite, shift if it is not
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-Hs);
    const double lo = es.eigenvalues().minCoeff();
    const double shift = lo > 1e-10 ? 0.0 : 1e-8 - lo;
    const RVec delta = (-Hs + shift * Eigen::MatrixXd::Identity(np, np)).ldlt().solve(g);
    Mat D = Mat::Zero(ds, ds);
    for (long a = 0; a < np; ++a) D += delta(a) * basis[a];
    bool accepted = false;
    double t = 1.0;
    for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
      detail::AscentPoint next = detail::ascent_point(cur.H + t * D, rs, ss);
      if (!std::isfinite(next.f)) continue;
      const double gn = (rs - frechet_exp(next.s, ss)).norm();
      // near the optimum f moves below roundoff, so a smaller gradient also counts
      if (next.f > cur.f + 1e-4 * t * g.dot(delta) || (next.f >= cur.f - 1e-14 && gn < gnorm)) {
        cur = std::move(next);
        gnorm = gn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  G = rs - frechet_exp(cur.s, ss);
  gnorm = G.norm();
  r.iterations = it;
  r.grad_norm = gnorm;
  r.converged = gnorm <= opt.grad_tol;

  // the optimal eigenvalues for the current eigenbasis never do worse
  RVec ratio;
  const double polished = detail::basis_value(cur.s.vectors, rs, ss, ratio);
  Mat omega_s;
  if (std::isfinite(polished) && polished > cur.f) {
    for (Eigen::Index k = 0; k < ratio.size(); ++k) ratio(k) = std::max(ratio(k), 1e-300);
    omega_s = from_spectrum(cur.s.vectors, ratio);
  } else {
    omega_s = from_spectrum(cur.s.vectors, RVec(cur.s.values.array().exp()));
  }
  // embed, identity on ker(sigma)
  r.certificate = Vs * omega_s * Vs.adjoint() + (Mat::Identity(d, d) - Vs * Vs.adjoint());
  r.certificate = herm(r.certificate);
  // certified value: evaluate on the reduced space where the certificate is exact
  const Spectrum os = eigh(herm(omega_s));
  RVec lg(os.values.size());
  for (Eigen::Index k = 0; k < lg.size(); ++k) lg(k) = std::log(std::max(os.values(k), 1e-300));
  r.value = trace_re(rs * from_spectrum(os.vectors, lg)) + 1.0 - trace_re(ss * herm(omega_s));
  return r;
}

// grid over rank-one qubit measurements, refined once around the best cell
inline double measured_qubit_oracle(const Mat& rho, const Mat& sigma, int grid_n = 100) {
  if (rho.rows() != 2 || sigma.rows() != 2) throw Error(ErrorCode::DimMismatch, "qubit oracle needs 2x2 inputs");
  auto bloch = [](const Mat& m, double out[3]) {
    out[0] = 2.0 * m(0, 1).real();
    out[1] = -2.0 * m(0, 1).imag();
    out[2] = (m(0, 0) - m(1, 1)).real();
  };
  double a[3], b[3];
  bloch(rho, a);
  bloch(sigma, b);
  const double tra = trace_re(rho), trb = trace_re(sigma);
  auto value = [&](double th, double ph) {
    const double n[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    const double na = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
    const double nb = n[0] * b[0] + n[1] * b[1] + n[2] * b[2];
    double v = 0.0;
    for (int s : {1, -1}) {
      const double p = 0.5 * (tra + s * na), q = 0.5 * (trb + s * nb);
      if (p <= 0.0) continue;
      if (q <= 0.0) return kInf;
      v += p * std::log(p / q);
    }
    return v;
  };
  const double hth = std::numbers::pi / (grid_n - 1), hph = 2.0 * std::numbers::pi / grid_n;
  double best = -kInf, bth = 0.0, bph = 0.0;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double th = i * hth, ph = j * hph;
      const double v = value(th, ph);
      if (v > best) {
        best = v;
        bth = th;
        bph = ph;
      }
    }
  const double c0 = bth, c1 = bph;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      const double th = c0 - hth + 2.0 * hth * i / (grid_n - 1);
      const double ph = c1 - hph + 2.0 * hph * j / (grid_n - 1);
      best = std::max(best, value(th, ph));
    }
  return best;
}

// ---- classical distributions

struct ClassicalJoint {
  Shape shape;
  std::vector<double> p;  // row-major over shape
  long size() const { return static_cast<long>(p.size()); }
};

inline void validate_joint(const ClassicalJoint& P, double tol = 1e-12) {
  if (shape_product(P.shape) != P.size()) throw Error(ErrorCode::ShapeError, "joint: shape does not match size");
  double s = 0.0;
  for (double v : P.p) {
    if (!(v >= 0.0)) throw Error(ErrorCode::ParamError, "joint: negative or non-finite probability");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) throw Error(ErrorCode::BadTrace, "joint: probabilities sum to " + std::to_string(s));
}

inline ClassicalJoint marginal(const ClassicalJoint& P, const std::vector<int>& keep) {
  ClassicalJoint M;
  for (int k : keep) M.shape.push_back(P.shape.at(k));
  std::vector<char> kept(P.shape.size(), 0);
  for (int k : keep) kept[k] = 1;
  std::vector<int> traced;
  for (int k = 0; k < static_cast<int>(P.shape.size()); ++k)
    if (!kept[k]) traced.push_back(k);
  const auto ok = detail::offsets(P.shape, keep);
  const auto ot = detail::offsets(P.shape, traced);
  M.p.assign(ok.size(), 0.0);
  for (size_t r = 0; r < ok.size(); ++r)
    for (long t : ot) M.p[r] += P.p[ok[r] + t];
  return M;
}

inline double shannon(const ClassicalJoint& P) {
  double h = 0.0;
  for (double v : P.p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

inline double classical_cmi(const ClassicalJoint& P) {
  if (P.shape.size() != 3) throw Error(ErrorCode::ShapeError, "classical_cmi: need three variables");
  return shannon(marginal(P, {0, 1})) + shannon(marginal(P, {1, 2})) - shannon(P) - shannon(marginal(P, {1}));
}

inline DivergenceResult classical_relative_entropy(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimMismatch, "classical_relative_entropy: sizes differ");
  DivergenceResult r;
  r.kind = "D";
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      r.infinite = true;
      r.value = kInf;
      return r;
    }
    r.value += p[i] * std::log(p[i] / q[i]);
  }
  return r;
}

inline DivergenceResult classical_dmax(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimMismatch, "classical_dmax: sizes differ");
  DivergenceResult r;
  r.kind = "Dmax";
  double m = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      r.infinite = true;
      r.value = kInf;
      return r;
    }
    m = std::max(m, p[i] / q[i]);
  }
  r.value = std::log(m);
  return r;
}

inline QuantumState embed_diagonal(const ClassicalJoint& P) {
  Mat rho = Mat::Zero(P.size(), P.size());
  for (long i = 0; i < P.size(); ++i) rho(i, i) = P.p[i];
  return QuantumState{rho, P.shape};
}

// ---- dense simplex, max c.u s.t. A u <= b, u >= 0, b >= 0; Bland's rule from the slack basis

struct LpResult {
  enum Status { Optimal, Unbounded } status = Optimal;
  double value = 0.0;
  Eigen::VectorXd u;
  int pivots = 0;
};

inline LpResult simplex_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const long m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw Error(ErrorCode::DimMismatch, "simplex: dimension mismatch");
  if (m > 0 && b.minCoeff() < 0.0) throw Error(ErrorCode::ParamError, "simplex: needs b >= 0");
  // tableau columns: n structural, m slack, rhs
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.topRightCorner(m, 1) = b;
  T.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<long> basis(m);
  for (long i = 0; i < m; ++i) basis[i] = n + i;
  const double eps = 1e-12;
  LpResult res;
  for (;;) {
    long enter = -1;
    for (long j = 0; j < n + m; ++j)
      if (T(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    long leave = -1;
    double best = kInf;
    for (long i = 0; i < m; ++i) {
      if (T(i, enter) <= eps) continue;
      const double ratio = T(i, n + m) / T(i, enter);
      if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave >= 0 && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      res.status = LpResult::Unbounded;
      res.value = kInf;
      return res;
    }
    T.row(leave) /= T(leave, enter);
    for (long i = 0; i <= m; ++i)
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    basis[leave] = enter;
    ++res.pivots;
  }
  res.u = Eigen::VectorXd::Zero(n);
  for (long i = 0; i < m; ++i)
    if (basis[i] < n) res.u(basis[i]) = T(i, n + m);
  res.value = T(m, n + m);
  return res;
}

// ---- recurrent structure of a stochastic matrix

// strongly connected components of y -> y' when W(y', y) > 0 (Tarjan)
inline std::vector<std::vector<int>> strongly_connected(const Eigen::MatrixXd& W) {
  const int n = static_cast<int>(W.cols());
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on(n, 0);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = 1;
    for (int w = 0; w < n; ++w) {
      if (!(W(w, v) > 0.0)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> comp;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return comps;
}

// stationary distributions of the closed classes, one full-length vector per class
inline std::vector<Eigen::VectorXd> recurrent_stationary(const Eigen::MatrixXd& W) {
  validate_stochastic(W);
  if (W.rows() != W.cols()) throw Error(ErrorCode::NotStochastic, "invariant cone needs a square W");
  const int n = static_cast<int>(W.cols());
  std::vector<Eigen::VectorXd> out;
  for (const auto& comp : strongly_connected(W)) {
    std::vector<char> in(n, 0);
    for (int v : comp) in[v] = 1;
    bool closed = true;
    for (int v : comp)
      for (int w = 0; w < n && closed; ++w)
        if (W(w, v) > 0.0 && !in[w]) closed = false;
    if (!closed) continue;
    const int m = static_cast<int>(comp.size());
    Eigen::MatrixXd M(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) M(i, j) = W(comp[i], comp[j]) - (i == j ? 1.0 : 0.0);
    M.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    const Eigen::VectorXd pi_c = M.fullPivLu().solve(rhs);
    Eigen::VectorXd pi_full = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) pi_full(comp[i]) = std::max(0.0, pi_c(i));
    pi_full /= pi_full.sum();
    out.push_back(std::move(pi_full));
  }
  return out;
}

struct LambdaMaxResult {
  double value = 0.0;  // log of the minimal cover mass
  bool infinite = false;
  double cover_mass = 0.0;
  std::vector<double> per_x;  // LP optimum for each x
  Eigen::MatrixXd cover;      // an optimal invariant R >= P (rows x)
  int classes = 0;
};

// Lambda_max(P_XY || id (x) W) = log min { sum R : R >= P, every row of R invariant under W }
inline LambdaMaxResult classical_lambda_max(const Eigen::MatrixXd& P, const Eigen::MatrixXd& W) {
  validate_stochastic(W);
  if (P.cols() != W.cols()) throw Error(ErrorCode::DimMismatch, "classical_lambda_max: |Y| mismatch");
  const auto pis = recurrent_stationary(W);
  const long K = static_cast<long>(pis.size()), ny = P.cols();
  Eigen::MatrixXd A(K, ny);
  for (long k = 0; k < K; ++k) A.row(k) = pis[k].transpose();
  LambdaMaxResult res;
  res.classes = static_cast<int>(K);
  res.cover = Eigen::MatrixXd::Zero(P.rows(), ny);
  for (long x = 0; x < P.rows(); ++x) {
    // dual of the covering LP min sum c s.t. sum_k c_k pi_k >= P(x, .)
    const LpResult lp = simplex_max(A, Eigen::VectorXd::Ones(K), P.row(x).transpose());
    if (lp.status == LpResult::Unbounded) {
      res.infinite = true;
      res.value = kInf;
      res.cover_mass = kInf;
      res.per_x.push_back(kInf);
      continue;
    }
    res.per_x.push_back(lp.value);
    res.cover_mass += lp.value;
    // primal solution: the class supports are disjoint, so each coefficient is a max of ratios
    for (long k = 0; k < K; ++k) {
      double ck = 0.0;
      for (long y = 0; y < ny; ++y)
        if (pis[k](y) > 0.0) ck = std::max(ck, P(x, y) / pis[k](y));
      res.cover.row(x) += ck * pis[k].transpose();
    }
  }
  if (!res.infinite) res.value = std::log(res.cover_mass);
  return res;
}

}  // namespace qml
