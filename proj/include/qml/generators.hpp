#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qml/channels.hpp"
#include "qml/entropy.hpp"
#include "qml/linalg.hpp"

namespace qml {

// Counter-based SplitMix64: draw k of stream (seed, id) is mix(key + k * gamma), key = mix(seed ^ mix(id + gamma)).
// Normals by Box-Muller, both outputs used in order. Pinned; changing any of this changes every fuzz corpus.
class Stream {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  explicit Stream(std::uint64_t seed, std::uint64_t id = 0) : key_(mix(seed ^ mix(id + kGamma))) {}

  std::uint64_t next_u64() { return mix(key_ + (++ctr_) * kGamma); }

  // [0,1) with 53 bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // E|z|^2 = 1
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return cplx(re, im) * std::sqrt(0.5);
  }

  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline Mat gaussian_matrix(Stream& s, long rows, long cols) {
  Mat G(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) G(i, j) = s.complex_normal();
  return G;
}

// Q factor with the phases of diag(R) divided out
inline Mat phase_fixed_q(const Mat& G) {
  Eigen::HouseholderQR<Mat> qr(G);
  const long m = G.rows(), n = G.cols();
  Mat Q = qr.householderQ() * Mat::Identity(m, n);
  const Mat& R = qr.matrixQR();
  for (long j = 0; j < n; ++j) {
    const cplx r = R(j, j);
    if (std::abs(r) > 0.0) Q.col(j) *= r / std::abs(r);
  }
  return Q;
}

inline QuantumState random_density(const Shape& shape, int rank, std::uint64_t seed, std::uint64_t stream = 0) {
  const long d = shape_product(shape);
  if (rank < 1 || rank > d) throw Error(ErrorCode::ParamError, "random_density: need 1 <= rank <= d");
  Stream s(seed, stream);
  const Mat G = gaussian_matrix(s, d, rank);
  Mat rho = G * G.adjoint();
  rho = herm(rho / trace_re(rho));
  return QuantumState{rho, shape};
}

inline QuantumState random_density(int d, int rank, std::uint64_t seed, std::uint64_t stream = 0) {
  return random_density(Shape{d}, rank, seed, stream);
}

inline QuantumState random_density(int d, std::uint64_t seed, std::uint64_t stream = 0) {
  return random_density(Shape{d}, d, seed, stream);
}

inline Mat random_hermitian(int d, std::uint64_t seed, std::uint64_t stream = 0) {
  if (d < 1) throw Error(ErrorCode::ParamError, "random_hermitian: d must be positive");
  Stream s(seed, stream);
  const Mat G = gaussian_matrix(s, d, d);
  return (G + G.adjoint()) * 0.5;
}

inline Mat random_unitary(int d, std::uint64_t seed, std::uint64_t stream = 0) {
  Stream s(seed, stream);
  return phase_fixed_q(gaussian_matrix(s, d, d));
}

// positive definite with spectrum bounded away from zero: e^{H}
inline Mat random_pd(int d, std::uint64_t seed, std::uint64_t stream = 0, double scale = 1.0) {
  return expm(scale * random_hermitian(d, seed, stream));
}

inline KrausChannel random_channel(int din, int dout, int rank, std::uint64_t seed, std::uint64_t stream = 0) {
  if (din < 1 || dout < 1 || rank < 1 || rank > din * dout || dout * rank < din)
    throw Error(ErrorCode::ParamError, "random_channel: need 1 <= rank <= din*dout and dout*rank >= din");
  Stream s(seed, stream);
  const Mat V = phase_fixed_q(gaussian_matrix(s, static_cast<long>(dout) * rank, din));
  KrausChannel E{din, dout, {}};
  for (int k = 0; k < rank; ++k) {
    Mat K(dout, din);
    for (int b = 0; b < dout; ++b) K.row(b) = V.row(static_cast<long>(b) * rank + k);
    E.kraus.push_back(std::move(K));
  }
  return E;
}

inline std::vector<double> random_simplex(Stream& s, long n) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& v : p) {
    v = -std::log(1.0 - s.uniform());
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

inline ClassicalJoint random_classical(const Shape& shape, std::uint64_t seed, std::uint64_t stream = 0) {
  Stream s(seed, stream);
  return ClassicalJoint{shape, random_simplex(s, shape_product(shape))};
}

// column-stochastic W(y', y) with Dirichlet columns
inline Eigen::MatrixXd random_stochastic(int dout, int din, Stream& s) {
  Eigen::MatrixXd W(dout, din);
  for (int c = 0; c < din; ++c) {
    const auto col = random_simplex(s, dout);
    for (int r = 0; r < dout; ++r) W(r, c) = col[r];
  }
  return W;
}

inline Eigen::MatrixXd random_stochastic(int dout, int din, std::uint64_t seed, std::uint64_t stream = 0) {
  Stream s(seed, stream);
  return random_stochastic(dout, din, s);
}

// P_X P_{Y|X} P_{Z|Y}
inline ClassicalJoint random_markov_joint(const Shape& dims, std::uint64_t seed, std::uint64_t stream = 0) {
  if (dims.size() != 3) throw Error(ErrorCode::ShapeError, "random_markov_joint: need three alphabets");
  Stream s(seed, stream);
  const int dx = dims[0], dy = dims[1], dz = dims[2];
  const auto px = random_simplex(s, dx);
  const Eigen::MatrixXd wyx = random_stochastic(dy, dx, s);
  const Eigen::MatrixXd wzy = random_stochastic(dz, dy, s);
  ClassicalJoint P{dims, std::vector<double>(static_cast<size_t>(dx) * dy * dz)};
  for (int x = 0; x < dx; ++x)
    for (int y = 0; y < dy; ++y)
      for (int z = 0; z < dz; ++z) P.p[(static_cast<size_t>(x) * dy + y) * dz + z] = px[x] * wyx(y, x) * wzy(z, y);
  return P;
}

}  // namespace qml
