#pragma once

// Brute-force oracles for the two appendix constructions, built from their generative
// descriptions rather than from the cell formulas.

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qml/linalg.hpp"

namespace enumerate {

using qml::kInf;
namespace o = oracle;


// dense distribution on N^3 points, index (x, y, z)
struct Dense3 {
  long N;
  std::vector<double> v;
  explicit Dense3(long n) : N(n), v(n * n * n, 0.0) {}
  double& operator()(long x, long y, long z) { return v[(x * N + y) * N + z]; }
  double operator()(long x, long y, long z) const { return v[(x * N + y) * N + z]; }
};

inline double bits(double nat) { return nat / std::log(2.0); }

inline double shannon_of(const std::vector<double>& p) { return o::shannon(p); }

inline std::vector<double> marg_xy(const Dense3& P) {
  std::vector<double> m(P.N * P.N, 0.0);
  for (long x = 0; x < P.N; ++x)
    for (long y = 0; y < P.N; ++y)
      for (long z = 0; z < P.N; ++z) m[x * P.N + y] += P(x, y, z);
  return m;
}
inline std::vector<double> marg_yz(const Dense3& P) {
  std::vector<double> m(P.N * P.N, 0.0);
  for (long x = 0; x < P.N; ++x)
    for (long y = 0; y < P.N; ++y)
      for (long z = 0; z < P.N; ++z) m[y * P.N + z] += P(x, y, z);
  return m;
}

inline double cmi_bits(const Dense3& P) {
  std::vector<double> y(P.N, 0.0);
  for (long a = 0; a < P.N; ++a)
    for (long b = 0; b < P.N; ++b)
      for (long c = 0; c < P.N; ++c) y[b] += P(a, b, c);
  return bits(shannon_of(marg_xy(P)) + shannon_of(marg_yz(P)) - shannon_of(P.v) - shannon_of(y));
}

// D(P||Q) and max log P/Q in bits, +inf off the support
inline std::pair<double, double> div_bits(const std::vector<double>& P, const std::vector<double>& Q) {
  double d = 0.0, m = -kInf;
  for (size_t i = 0; i < P.size(); ++i) {
    if (P[i] == 0.0) continue;
    if (Q[i] == 0.0) return {kInf, kInf};
    d += P[i] * std::log(P[i] / Q[i]);
    m = std::max(m, std::log(P[i] / Q[i]));
  }
  return {bits(d), bits(m)};
}

// (y', z') kernel from y applied to P_XY: out(x, y', z') = sum_y P(x, y) K(y', z' | y)
template <class K>
Dense3 recover(const std::vector<double>& pxy, long N, K&& kernel) {
  Dense3 Q(N);
  for (long x = 0; x < N; ++x)
    for (long y = 0; y < N; ++y) {
      const double w = pxy[x * N + y];
      if (w == 0.0) continue;
      kernel(y, [&](long yp, long zp, double k) { Q(x, yp, zp) += w * k; });
    }
  return Q;
}

// ---- first construction, straight from the generative description
struct EnumA {
  Dense3 P, Q;
  double h_given_y_flags = 0.0, h_given_yz_flags = 0.0;  // bits
  Eigen::MatrixXd W;                                       // Y -> Y'
  Eigen::MatrixXd Pxy;
};

inline EnumA enumerate_a(int n, double p, double q) {
  const long N = 1L << n;
  const double pz[2] = {p + q, 1.0 - p - q}, py[3] = {p, q, 1.0 - p - q};
  Dense3 P(N);
  // flags-resolved joint for the conditional entropies: (x, y, z, ey, ez)
  std::vector<double> F(N * N * N * 6, 0.0);
  for (long x = 0; x < N; ++x)
    for (int ez = 0; ez < 2; ++ez)
      for (long uz = 0; uz < N; ++uz)
        for (int ey = 0; ey < 3; ++ey)
          for (long uy = 0; uy < N; ++uy) {
            const double w = (1.0 / N) * pz[ez] * (1.0 / N) * py[ey] * (1.0 / N);
            if (w == 0.0) continue;
            const long z = ez == 0 ? x : uz;
            const long y = ey == 0 ? x : (ey == 1 ? z : uy);
            P(x, y, z) += w;
            F[(((x * N + y) * N + z) * 3 + ey) * 2 + ez] += w;
          }
  // marginals over (x, y, flags), (y, flags), (y, z, flags)
  std::vector<double> xyf(N * N * 6, 0.0), yf(N * 6, 0.0), yzf(N * N * 6, 0.0);
  for (long x = 0; x < N; ++x)
    for (long y = 0; y < N; ++y)
      for (long z = 0; z < N; ++z)
        for (int f = 0; f < 6; ++f) {
          const double w = F[((x * N + y) * N + z) * 6 + f];
          xyf[(x * N + y) * 6 + f] += w;
          yf[y * 6 + f] += w;
          yzf[(y * N + z) * 6 + f] += w;
        }
  EnumA E{P, Dense3(N), 0.0, 0.0, Eigen::MatrixXd::Zero(N, N), Eigen::MatrixXd::Zero(N, N)};
  // -sum w log(w / marginal), summed directly
  double h1 = 0.0, h2 = 0.0;
  for (long x = 0; x < N; ++x)
    for (long y = 0; y < N; ++y)
      for (int f = 0; f < 6; ++f) {
        const double w = xyf[(x * N + y) * 6 + f];
        if (w > 0.0) h1 -= w * std::log(w / yf[y * 6 + f]);
        for (long z = 0; z < N; ++z) {
          const double v = F[((x * N + y) * N + z) * 6 + f];
          if (v > 0.0) h2 -= v * std::log(v / yzf[(y * N + z) * 6 + f]);
        }
      }
  E.h_given_y_flags = bits(h1);
  E.h_given_yz_flags = bits(h2);

  const double c = p * p + q + p * q;
  auto kernel = [&](long y, auto&& emit) {
    emit(y, y, c);
    for (long u = 0; u < N; ++u) {
      emit(y, u, 0.5 * (1.0 - c) / N);
      emit(u, y, 0.5 * (1.0 - c) / N);
    }
  };
  const std::vector<double> pxy = marg_xy(P);
  E.Q = recover(pxy, N, kernel);
  for (long y = 0; y < N; ++y)
    kernel(y, [&](long yp, long, double k) { E.W(yp, y) += k; });
  for (long x = 0; x < N; ++x)
    for (long y = 0; y < N; ++y) E.Pxy(x, y) = pxy[x * N + y];
  return E;
}

// ---- second construction
struct EnumB {
  Dense3 P, Q;
  Eigen::MatrixXd W, Pxy;
  std::vector<double> recovered_yz;  // R(P_Y)
};

inline EnumB enumerate_b(int n, double p) {
  const long N = 1L << n;
  Dense3 P(N);
  for (long x = 0; x < N; ++x) {
    P(x, x, x) += p / N;
    for (long y = 0; y < N; ++y) P(x, y, (x + y) % N) += (1.0 - p) / (N * N);
  }
  auto kernel = [&](long y, auto&& emit) {
    emit(y, y, p);
    for (long u = 0; u < N; ++u) emit(u, ((y - u) % N + N) % N, (1.0 - p) / N);
  };
  const std::vector<double> pxy = marg_xy(P);
  EnumB E{P, recover(pxy, N, kernel), Eigen::MatrixXd::Zero(N, N), Eigen::MatrixXd::Zero(N, N), {}};
  for (long y = 0; y < N; ++y)
    kernel(y, [&](long yp, long, double k) { E.W(yp, y) += k; });
  for (long x = 0; x < N; ++x)
    for (long y = 0; y < N; ++y) E.Pxy(x, y) = pxy[x * N + y];
  E.recovered_yz.assign(N * N, 0.0);
  for (long y = 0; y < N; ++y)
    kernel(y, [&](long yp, long zp, double k) { E.recovered_yz[yp * N + zp] += k / N; });
  return E;
}

inline std::vector<std::pair<double, double>> pq_grid() {
  std::vector<std::pair<double, double>> g;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) g.push_back({i / 4.0, j / 4.0});
  return g;
}

}  // namespace enumerate
