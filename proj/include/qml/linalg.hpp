#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qml/errors.hpp"

namespace qml {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Shape = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// tolerances, all relative to the operator norm of the input unless noted
inline constexpr double kHermTol = 1e-10;
inline constexpr double kSuppEps = 1e-12;  // eigenvalues below this * lambda_max are zero
inline constexpr double kPsdTol = 1e-10;   // eigenvalues down to -this * lambda_max still count as PSD
inline constexpr double kDegenTol = 1e-8;  // divided differences switch to the derivative

struct Spectrum {
  RVec values;  // descending
  Mat vectors;  // columns
};

inline bool all_finite(const Mat& A) { return A.allFinite(); }

inline Mat herm(const Mat& A) { return (A + A.adjoint()) * 0.5; }

inline Mat identity(int d) { return Mat::Identity(d, d); }

inline double trace_re(const Mat& A) { return A.trace().real(); }

inline Mat commutator(const Mat& A, const Mat& B) { return A * B - B * A; }

inline void require_square(const Mat& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw Error(ErrorCode::ShapeError, std::string(who) + ": matrix must be square and nonempty");
  if (!all_finite(A)) throw Error(ErrorCode::NonFiniteValue, std::string(who) + ": non-finite entry");
}

inline void require_same_dim(const Mat& A, const Mat& B, const char* who) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(ErrorCode::DimMismatch, std::string(who) + ": dimension mismatch");
}

inline RVec singular_values(const Mat& L) {
  Eigen::JacobiSVD<Mat> svd(L);
  return svd.singularValues();
}

inline double opnorm(const Mat& L) {
  if (L.size() == 0) return 0.0;
  return singular_values(L)(0);
}

inline Spectrum eigh(const Mat& H) {
  require_square(H, "eigh");
  Eigen::SelfAdjointEigenSolver<Mat> es(herm(H));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::DomainError, "eigh: solver failed");
  const RVec& ev = es.eigenvalues();
  const double hnorm = ev.cwiseAbs().maxCoeff();
  // Frobenius bounds the operator norm from above; only fall back to the exact test when it fails
  const double defect_f = (H - H.adjoint()).norm();
  if (defect_f > kHermTol * hnorm) {
    Eigen::SelfAdjointEigenSolver<Mat> ed(cplx(0, 1) * (H - H.adjoint()), Eigen::EigenvaluesOnly);
    const double defect = ed.eigenvalues().cwiseAbs().maxCoeff();
    if (defect > kHermTol * hnorm)
      throw Error(ErrorCode::NotHermitian, "eigh: input is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  Spectrum s;
  s.values = ev.reverse();
  s.vectors = es.eigenvectors().rowwise().reverse();
  return s;
}

inline Mat from_spectrum(const Mat& V, const Eigen::VectorXcd& f) {
  return V * f.asDiagonal() * V.adjoint();
}

inline Mat from_spectrum(const Mat& V, const RVec& f) {
  return V * f.cast<cplx>().asDiagonal() * V.adjoint();
}

// f(H) for a real scalar function, no clipping
template <class F>
inline Mat matfunc(const Mat& H, F&& f) {
  const Spectrum s = eigh(H);
  RVec fv(s.values.size());
  for (Eigen::Index k = 0; k < fv.size(); ++k) {
    fv(k) = f(s.values(k));
    if (!std::isfinite(fv(k)))
      throw Error(ErrorCode::DomainError, "matfunc: f undefined at eigenvalue " + std::to_string(s.values(k)));
  }
  return from_spectrum(s.vectors, fv);
}

inline Mat expm(const Mat& H) {
  return matfunc(H, [](double x) { return std::exp(x); });
}

// general (non-normal) exponential, Pade based
inline Mat expm_general(const Mat& L) {
  require_square(L, "expm_general");
  return L.exp();
}

// Spectrum of a PSD operator with the support split off.
struct PsdSpectrum {
  RVec values;
  Mat vectors;
  std::vector<char> support;
  double lmax = 0.0;
  int rank = 0;
};

inline PsdSpectrum psd_spectrum(const Mat& B, ErrorCode on_negative = ErrorCode::NotPSD) {
  Spectrum s = eigh(B);
  PsdSpectrum p;
  p.lmax = std::max(0.0, s.values.maxCoeff());
  const double scale = std::max(p.lmax, s.values.cwiseAbs().maxCoeff());
  p.support.assign(s.values.size(), 0);
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    const double l = s.values(k);
    if (l < -kPsdTol * scale)
      throw Error(on_negative, "negative eigenvalue " + std::to_string(l));
    if (l > kSuppEps * p.lmax) {
      p.support[k] = 1;
      ++p.rank;
    } else {
      s.values(k) = 0.0;
    }
  }
  p.values = std::move(s.values);
  p.vectors = std::move(s.vectors);
  return p;
}

// B^z in the eigenbasis; zero on the kernel (pseudo-power)
inline Mat powm(const PsdSpectrum& p, cplx z) {
  Eigen::VectorXcd f(p.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k)
    f(k) = p.support[k] ? std::exp(z * std::log(p.values(k))) : cplx(0.0);
  return from_spectrum(p.vectors, f);
}

inline Mat powm(const Mat& B, cplx z) { return powm(psd_spectrum(B, ErrorCode::DomainError), z); }

inline Mat powm(const Mat& B, double a) { return powm(B, cplx(a, 0.0)); }

inline Mat sqrtm(const Mat& B) { return powm(B, 0.5); }

// log with the convention log 0 = 0
inline Mat logm(const PsdSpectrum& p) {
  RVec f(p.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = p.support[k] ? std::log(p.values(k)) : 0.0;
  return from_spectrum(p.vectors, f);
}

inline Mat logm(const Mat& B) { return logm(psd_spectrum(B, ErrorCode::DomainError)); }

inline Mat support_projector(const PsdSpectrum& p) {
  RVec f(p.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = p.support[k] ? 1.0 : 0.0;
  return from_spectrum(p.vectors, f);
}

inline double min_eig(const Mat& H) { return eigh(H).values.minCoeff(); }

inline bool is_psd(const Mat& H, double tol = kPsdTol) {
  const RVec v = eigh(H).values;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  return v.minCoeff() >= -tol * scale;
}

// Daleckii-Krein: V (Gamma o V^dag X V) V^dag
template <class G>
inline Mat divided_difference_apply(const Spectrum& s, const Mat& X, G&& gamma) {
  require_same_dim(s.vectors, X, "frechet");
  const Mat Xt = s.vectors.adjoint() * X * s.vectors;
  Mat Y(Xt.rows(), Xt.cols());
  for (Eigen::Index k = 0; k < Xt.rows(); ++k)
    for (Eigen::Index l = 0; l < Xt.cols(); ++l) Y(k, l) = Xt(k, l) * gamma(s.values(k), s.values(l));
  return s.vectors * Y * s.vectors.adjoint();
}

inline double dd_log(double a, double b, double scale) {
  if (std::abs(a - b) <= kDegenTol * scale) return 2.0 / (a + b);
  return std::log1p((a - b) / b) / (a - b);
}

inline double dd_exp(double a, double b, double scale) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (hi - lo <= kDegenTol * scale) return std::exp(0.5 * (a + b));
  return std::exp(hi) * (-std::expm1(lo - hi)) / (hi - lo);
}

// D log[B](X)
inline Mat frechet_log(const Mat& B, const Mat& X) {
  const Spectrum s = eigh(B);
  const double lmax = s.values.maxCoeff();
  if (!(s.values.minCoeff() > kSuppEps * lmax) || lmax <= 0.0)
    throw Error(ErrorCode::NotPD, "frechet_log: B must be positive definite");
  return divided_difference_apply(s, X, [lmax](double a, double b) { return dd_log(a, b, lmax); });
}

// D exp[H](X), given the spectrum of H
inline Mat frechet_exp(const Spectrum& s, const Mat& X) {
  const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
  return divided_difference_apply(s, X, [scale](double a, double b) { return dd_exp(a, b, scale); });
}

inline Mat frechet_exp(const Mat& H, const Mat& X) { return frechet_exp(eigh(H), X); }

// ---- norms and distances

inline double schatten_norm(const Mat& L, double p) {
  if (!(p > 0)) throw Error(ErrorCode::ParamError, "schatten_norm: p must be positive");
  const RVec sv = singular_values(L);
  if (sv.size() == 0) return 0.0;
  const double smax = sv.maxCoeff();
  if (std::isinf(p)) return smax;
  if (smax == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) acc += std::pow(sv(k) / smax, p);
  return smax * std::pow(acc, 1.0 / p);
}

inline double trace_norm(const Mat& L) { return singular_values(L).sum(); }

inline double fidelity(const Mat& rho, const Mat& sigma) {
  require_same_dim(rho, sigma, "fidelity");
  const Mat a = powm(psd_spectrum(rho, ErrorCode::NotPSD), 0.5);
  const Mat b = powm(psd_spectrum(sigma, ErrorCode::NotPSD), 0.5);
  const double f = trace_norm(a * b);
  return f * f;
}

inline double trace_distance(const Mat& rho, const Mat& sigma) {
  require_same_dim(rho, sigma, "trace_distance");
  return 0.5 * trace_norm(rho - sigma);
}

// ---- tensor structure

inline Mat tensor(const Mat& A, const Mat& B) { return Eigen::kroneckerProduct(A, B).eval(); }

inline Mat tensor(const std::vector<Mat>& ops) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& op : ops) out = tensor(out, op);
  return out;
}

inline long shape_product(const Shape& shape) {
  long d = 1;
  for (int s : shape) {
    if (s < 1) throw Error(ErrorCode::ShapeError, "subsystem dimension must be >= 1");
    d *= s;
  }
  return d;
}

namespace detail {
// flat offsets of all multi-indices over the given subsystems, in row-major order of those subsystems
inline std::vector<long> offsets(const Shape& shape, const std::vector<int>& which) {
  std::vector<long> stride(shape.size());
  long st = 1;
  for (int k = static_cast<int>(shape.size()) - 1; k >= 0; --k) {
    stride[k] = st;
    st *= shape[k];
  }
  std::vector<long> out{0};
  for (int w : which) {
    std::vector<long> next;
    next.reserve(out.size() * shape[w]);
    for (long o : out)
      for (int i = 0; i < shape[w]; ++i) next.push_back(o + i * stride[w]);
    out.swap(next);
  }
  return out;
}
}  // namespace detail

// trace out every subsystem not listed in keep (order of keep is preserved in the output)
inline Mat partial_trace(const Mat& X, const Shape& shape, const std::vector<int>& keep) {
  if (X.rows() != X.cols() || shape_product(shape) != X.rows())
    throw Error(ErrorCode::ShapeError, "partial_trace: shape does not match matrix dimension");
  std::vector<char> kept(shape.size(), 0);
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(shape.size()) || kept[k])
      throw Error(ErrorCode::ShapeError, "partial_trace: bad keep index");
    kept[k] = 1;
  }
  std::vector<int> traced;
  for (int k = 0; k < static_cast<int>(shape.size()); ++k)
    if (!kept[k]) traced.push_back(k);
  const auto ok = detail::offsets(shape, keep);
  const auto ot = detail::offsets(shape, traced);
  const long dk = static_cast<long>(ok.size());
  Mat out = Mat::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      cplx acc = 0;
      for (long t : ot) acc += X(ok[r] + t, ok[c] + t);
      out(r, c) = acc;
    }
  return out;
}

// reorder subsystems: output subsystem j is input subsystem perm[j]
inline Mat permute_subsystems(const Mat& X, const Shape& shape, const std::vector<int>& perm) {
  if (perm.size() != shape.size() || shape_product(shape) != X.rows())
    throw Error(ErrorCode::ShapeError, "permute_subsystems: bad permutation");
  const auto idx = detail::offsets(shape, perm);
  const long d = static_cast<long>(idx.size());
  Mat out(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) out(r, c) = X(idx[r], idx[c]);
  return out;
}

// ---- states

struct QuantumState {
  Mat rho;
  Shape shape;
  int dim() const { return static_cast<int>(rho.rows()); }
};

inline void validate_state(const QuantumState& s) {
  require_square(s.rho, "state");
  if (shape_product(s.shape) != s.rho.rows())
    throw Error(ErrorCode::ShapeError, "state: shape product does not match dimension");
  if ((s.rho - s.rho.adjoint()).norm() > 1e-12)
    throw Error(ErrorCode::NotHermitian, "state: density matrix is not Hermitian");
  const double tr = trace_re(s.rho);
  if (std::abs(tr - 1.0) > 1e-10) throw Error(ErrorCode::BadTrace, "state: trace is " + std::to_string(tr));
  if (min_eig(s.rho) < -1e-10) throw Error(ErrorCode::NotPSD, "state: negative eigenvalue");
}

inline QuantumState make_state(Mat rho, Shape shape) {
  QuantumState s{std::move(rho), std::move(shape)};
  validate_state(s);
  return s;
}

inline QuantumState make_state(Mat rho) {
  const int d = static_cast<int>(rho.rows());
  return make_state(std::move(rho), Shape{d});
}

inline QuantumState marginal(const QuantumState& s, const std::vector<int>& keep) {
  Shape sh;
  for (int k : keep) sh.push_back(s.shape.at(k));
  return QuantumState{partial_trace(s.rho, s.shape, keep), sh};
}

inline Mat pure(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

inline Mat diag(const std::vector<double>& v) {
  Mat m = Mat::Zero(v.size(), v.size());
  for (size_t k = 0; k < v.size(); ++k) m(k, k) = v[k];
  return m;
}

}  // namespace qml
