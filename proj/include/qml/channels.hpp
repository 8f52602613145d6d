#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qml/linalg.hpp"

namespace qml {

struct KrausChannel {
  int din = 0;
  int dout = 0;
  std::vector<Mat> kraus;  // each dout x din
};

enum class Mode { Forward, Adjoint };

inline void validate_kraus(const KrausChannel& E) {
  if (E.din < 1 || E.dout < 1) throw Error(ErrorCode::ShapeError, "channel: dimensions must be positive");
  for (const auto& K : E.kraus)
    if (K.rows() != E.dout || K.cols() != E.din)
      throw Error(ErrorCode::ShapeError, "channel: Kraus operator has the wrong shape");
}

inline Mat apply(const KrausChannel& E, const Mat& X, Mode mode = Mode::Forward) {
  const int in = mode == Mode::Forward ? E.din : E.dout;
  const int out = mode == Mode::Forward ? E.dout : E.din;
  if (X.rows() != in || X.cols() != in) throw Error(ErrorCode::DimMismatch, "apply: input dimension mismatch");
  Mat Y = Mat::Zero(out, out);
  if (mode == Mode::Forward)
    for (const auto& K : E.kraus) Y.noalias() += K * X * K.adjoint();
  else
    for (const auto& K : E.kraus) Y.noalias() += K.adjoint() * X * K;
  return Y;
}

// G o F (F first)
inline KrausChannel compose(const KrausChannel& G, const KrausChannel& F) {
  if (G.din != F.dout) throw Error(ErrorCode::DimMismatch, "compose: dimension mismatch");
  KrausChannel C{F.din, G.dout, {}};
  for (const auto& a : G.kraus)
    for (const auto& b : F.kraus) C.kraus.push_back(a * b);
  return C;
}

inline KrausChannel identity_channel(int d) { return KrausChannel{d, d, {Mat::Identity(d, d)}}; }

inline KrausChannel unitary_channel(const Mat& U) {
  return KrausChannel{static_cast<int>(U.cols()), static_cast<int>(U.rows()), {U}};
}

// partial trace as a channel; one Kraus operator per basis vector of the traced factors
inline KrausChannel partial_trace_channel(const Shape& shape, const std::vector<int>& keep) {
  const long d = shape_product(shape);
  std::vector<char> kept(shape.size(), 0);
  for (int k : keep) kept.at(k) = 1;
  std::vector<int> traced;
  for (int k = 0; k < static_cast<int>(shape.size()); ++k)
    if (!kept[k]) traced.push_back(k);
  const auto ok = detail::offsets(shape, keep);
  const auto ot = detail::offsets(shape, traced);
  KrausChannel E{static_cast<int>(d), static_cast<int>(ok.size()), {}};
  for (long t : ot) {
    Mat K = Mat::Zero(ok.size(), d);
    for (size_t r = 0; r < ok.size(); ++r) K(r, ok[r] + t) = 1.0;
    E.kraus.push_back(std::move(K));
  }
  return E;
}

// id_A (x) E (x) id_C
inline KrausChannel extend(const KrausChannel& E, int dleft, int dright) {
  KrausChannel F{E.din * dleft * dright, E.dout * dleft * dright, {}};
  const Mat Il = Mat::Identity(dleft, dleft), Ir = Mat::Identity(dright, dright);
  for (const auto& K : E.kraus) F.kraus.push_back(tensor(tensor(Il, K), Ir));
  return F;
}

// ---- Choi

// tau = (E (x) id)(|Omega><Omega|), output factor first, |Omega> normalized
struct ChoiMatrix {
  Mat matrix;
  int din = 0;
  int dout = 0;
};

inline ChoiMatrix choi_of_map(const std::function<Mat(const Mat&)>& map, int din, int dout) {
  ChoiMatrix C{Mat::Zero(static_cast<long>(din) * dout, static_cast<long>(din) * dout), din, dout};
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j) {
      Mat Eij = Mat::Zero(din, din);
      Eij(i, j) = 1.0;
      const Mat Y = map(Eij);
      if (Y.rows() != dout || Y.cols() != dout) throw Error(ErrorCode::DimMismatch, "choi: map output dimension");
      C.matrix += tensor(Y, Eij);
    }
  C.matrix /= static_cast<double>(din);
  return C;
}

inline ChoiMatrix choi(const KrausChannel& E) {
  validate_kraus(E);
  return choi_of_map([&E](const Mat& X) { return apply(E, X); }, E.din, E.dout);
}

// action recovered from the Choi matrix: E(X) = din tr_in tau (id (x) X^T)
inline Mat apply_choi(const ChoiMatrix& C, const Mat& X) {
  if (X.rows() != C.din) throw Error(ErrorCode::DimMismatch, "apply_choi: input dimension");
  const Mat M = C.matrix * tensor(Mat::Identity(C.dout, C.dout), X.transpose());
  return static_cast<double>(C.din) * partial_trace(M, Shape{C.dout, C.din}, {0});
}

inline KrausChannel kraus_from_choi(const ChoiMatrix& C, bool claim_cp = true, double floor = 1e-12) {
  const Spectrum s = eigh(static_cast<double>(C.din) * C.matrix);
  const double lmax = std::max(s.values.cwiseAbs().maxCoeff(), 1e-300);
  if (claim_cp && s.values.minCoeff() < -1e-9 * std::max(1.0, lmax))
    throw Error(ErrorCode::ChoiNotPSD, "kraus_from_choi: Choi matrix has eigenvalue " +
                                           std::to_string(s.values.minCoeff()));
  KrausChannel E{C.din, C.dout, {}};
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    if (s.values(k) <= floor * lmax) continue;
    Mat K(C.dout, C.din);
    for (int b = 0; b < C.dout; ++b)
      for (int a = 0; a < C.din; ++a) K(b, a) = s.vectors(static_cast<long>(b) * C.din + a, k);
    E.kraus.push_back(std::sqrt(s.values(k)) * K);
  }
  return E;
}

struct TpcpVerdict {
  bool tp = false;
  bool cp = false;
  double tp_error = 0.0;     // || sum K^dag K - id ||_inf
  double choi_min_eig = 0.0;
  bool ok() const { return tp && cp; }
};

inline TpcpVerdict is_tpcp(const ChoiMatrix& C, double tol = 1e-10) {
  TpcpVerdict v;
  const Mat red = partial_trace(C.matrix, Shape{C.dout, C.din}, {1});
  v.tp_error = opnorm(static_cast<double>(C.din) * red - Mat::Identity(C.din, C.din));
  v.tp = v.tp_error <= tol;
  v.choi_min_eig = min_eig(herm(C.matrix));
  const double scale = std::max(1.0, opnorm(C.matrix));
  v.cp = (C.matrix - C.matrix.adjoint()).norm() <= 1e-9 * scale && v.choi_min_eig >= -tol * scale;
  return v;
}

inline TpcpVerdict is_tpcp(const KrausChannel& E, double tol = 1e-10) {
  validate_kraus(E);
  TpcpVerdict v;
  Mat S = Mat::Zero(E.din, E.din);
  for (const auto& K : E.kraus) S.noalias() += K.adjoint() * K;
  v.tp_error = opnorm(S - Mat::Identity(E.din, E.din));
  v.tp = v.tp_error <= tol;
  const ChoiMatrix C = choi(E);
  v.choi_min_eig = min_eig(herm(C.matrix));
  v.cp = v.choi_min_eig >= -tol * std::max(1.0, opnorm(C.matrix));
  return v;
}

// V = sum_k K_k (x) |k>, environment last; X -> tr_env V X V^dag
inline Mat stinespring(const KrausChannel& E) {
  const TpcpVerdict v = is_tpcp(E, 1e-10);
  if (!v.ok()) throw Error(ErrorCode::NotTPCP, "stinespring: channel is not trace-preserving CP");
  const int r = static_cast<int>(E.kraus.size());
  Mat V = Mat::Zero(static_cast<long>(E.dout) * r, E.din);
  for (int k = 0; k < r; ++k)
    for (int b = 0; b < E.dout; ++b) V.row(static_cast<long>(b) * r + k) = E.kraus[k].row(b);
  return V;
}

// W(y'|y) stored as W(y', y): columns sum to one
inline void validate_stochastic(const Eigen::MatrixXd& W, double tol = 1e-12) {
  if (W.rows() == 0 || W.cols() == 0) throw Error(ErrorCode::NotStochastic, "stochastic matrix is empty");
  if (!W.allFinite()) throw Error(ErrorCode::NotStochastic, "stochastic matrix has non-finite entries");
  if (W.minCoeff() < 0.0) throw Error(ErrorCode::NotStochastic, "stochastic matrix has a negative entry");
  for (Eigen::Index c = 0; c < W.cols(); ++c)
    if (std::abs(W.col(c).sum() - 1.0) > tol * std::max<double>(1.0, static_cast<double>(W.rows())))
      throw Error(ErrorCode::NotStochastic, "column " + std::to_string(c) + " does not sum to one");
}

inline KrausChannel classical_channel(const Eigen::MatrixXd& W) {
  validate_stochastic(W);
  KrausChannel E{static_cast<int>(W.cols()), static_cast<int>(W.rows()), {}};
  for (Eigen::Index y = 0; y < W.cols(); ++y)
    for (Eigen::Index yp = 0; yp < W.rows(); ++yp) {
      if (W(yp, y) <= 0.0) continue;
      Mat K = Mat::Zero(W.rows(), W.cols());
      K(yp, y) = std::sqrt(W(yp, y));
      E.kraus.push_back(std::move(K));
    }
  return E;
}

}  // namespace qml
