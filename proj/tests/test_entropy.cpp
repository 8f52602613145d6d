#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qml/channels.hpp"
#include "qml/entropy.hpp"
#include "qml/generators.hpp"

using namespace qml;
namespace o = oracle;

namespace {

Mat direct_sum(const Mat& A, const Mat& B) {
  Mat C = Mat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  C.topLeftCorner(A.rows(), A.cols()) = A;
  C.bottomRightCorner(B.rows(), B.cols()) = B;
  return C;
}

Mat commuting_partner(const Mat& rho, std::uint64_t seed) {
  // same eigenbasis, fresh spectrum
  const Spectrum s = eigh(rho);
  Stream st(seed, 77);
  const auto w = random_simplex(st, rho.rows());
  Eigen::VectorXd v(rho.rows());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = 0.05 + w[k];
  v /= v.sum();
  return s.vectors * v.cast<cplx>().asDiagonal() * s.vectors.adjoint();
}

}  // namespace

TEST(VonNeumann, Examples) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
  psi << 0.6, cplx(0, 0.8), 0;
  EXPECT_NEAR(von_neumann(pure(psi)), 0.0, 1e-14);
  EXPECT_NEAR(von_neumann(Mat::Identity(2, 2) / 2.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(von_neumann(o::diag({0.75, 0.25})), 0.562335, 1e-6);
  EXPECT_NEAR(von_neumann(o::diag({0.75, 0.25})), o::shannon({0.75, 0.25}), 1e-15);
  for (int seed = 0; seed < 10; ++seed) {
    const Mat r = random_density(4, 3, seed).rho;
    EXPECT_NEAR(von_neumann(r), o::entropy(r), 1e-10);
  }
}

TEST(Cmi, ProductGhzAndMarkovChain) {
  const Mat a = random_density(2, 2, 1).rho, b = random_density(3, 3, 2).rho, c = random_density(2, 2, 3).rho;
  EXPECT_NEAR(cmi(QuantumState{o::kron(o::kron(a, b), c), {2, 3, 2}}), 0.0, 1e-10);

  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(8);
  ghz(0) = ghz(7) = 1 / std::sqrt(2.0);
  // H(AB)=H(BC)=H(B)=ln2, H(ABC)=0
  EXPECT_NEAR(cmi(QuantumState{pure(ghz), {2, 2, 2}}), std::log(2.0), 1e-12);

  for (int seed = 0; seed < 10; ++seed) {
    const ClassicalJoint P = random_markov_joint({2, 3, 2}, seed);
    EXPECT_NEAR(cmi(embed_diagonal(P)), 0.0, 1e-10);
    EXPECT_NEAR(classical_cmi(P), 0.0, 1e-10);
  }
  EXPECT_THROW(cmi(QuantumState{Mat::Identity(4, 4) / 4.0, {2, 2}}), Error);
}

TEST(Cmi, SsaAndClassicalAgreement) {
  for (int seed = 0; seed < 20; ++seed) {
    const QuantumState s = random_density(Shape{2, 2, 2}, 1 + seed % 8, seed);
    EXPECT_GE(cmi(s), -1e-8);
    // the four marginal entropies by index loops and the general solver
    const double ref = o::entropy(o::partial_trace(s.rho, s.shape, {0, 1})) +
                       o::entropy(o::partial_trace(s.rho, s.shape, {1, 2})) - o::entropy(s.rho) -
                       o::entropy(o::partial_trace(s.rho, s.shape, {1}));
    EXPECT_NEAR(cmi(s), ref, 1e-9);
    const ClassicalJoint P = random_classical({2, 3, 2}, seed);
    EXPECT_NEAR(classical_cmi(P), cmi(embed_diagonal(P)), 1e-12);
  }
}

TEST(Relative, Examples) {
  const Mat r = random_density(3, 3, 5).rho;
  EXPECT_NEAR(relative_entropy(r, r).value, 0.0, 1e-12);
  EXPECT_NEAR(relative_entropy(o::diag({0.75, 0.25}), o::diag({0.25, 0.75})).value, 0.5 * std::log(3.0), 1e-15);
  const DivergenceResult inf = relative_entropy(o::diag({1, 0}), o::diag({0, 1}));
  EXPECT_TRUE(inf.infinite);
  EXPECT_TRUE(std::isinf(inf.value));
  // rank-deficient sigma that still contains the support stays finite
  EXPECT_FALSE(relative_entropy(o::diag({1, 0, 0}), o::diag({0.5, 0.5, 0})).infinite);
  for (int seed = 0; seed < 10; ++seed) {
    const Mat a = random_density(3, 3, seed, 0).rho, b = random_density(3, 3, seed, 1).rho;
    const double d = relative_entropy(a, b).value;
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, o::relative_entropy(a, b), 1e-9);
  }
}

TEST(Relative, Properties) {
  for (int seed = 0; seed < 20; ++seed) {
    const Mat r1 = random_density(2, 2, seed, 0).rho, s1 = random_density(2, 2, seed, 1).rho;
    const Mat r2 = random_density(3, 3, seed, 2).rho, s2 = random_density(3, 3, seed, 3).rho;
    const double d1 = relative_entropy(r1, s1).value, d2 = relative_entropy(r2, s2).value;
    EXPECT_NEAR(relative_entropy(o::kron(r1, r2), o::kron(s1, s2)).value, d1 + d2, 1e-9);

    const Mat V = random_unitary(4, seed, 4).leftCols(2);
    EXPECT_NEAR(relative_entropy(V * r1 * V.adjoint(), V * s1 * V.adjoint()).value, d1, 1e-8);

    const KrausChannel E = random_channel(3, 2, 2, seed, 5);
    EXPECT_LE(relative_entropy(qml::apply(E, r2), qml::apply(E, s2)).value, d2 + 1e-8);

    const Mat r3 = random_density(2, 2, seed, 6).rho, s3 = random_density(2, 2, seed, 7).rho;
    const double lam = 0.35;
    const double mixed = relative_entropy(lam * r1 + (1 - lam) * r3, lam * s1 + (1 - lam) * s3).value;
    EXPECT_LE(mixed, lam * d1 + (1 - lam) * relative_entropy(r3, s3).value + 1e-8);

    const double ds = relative_entropy(direct_sum(lam * r1, (1 - lam) * r2), direct_sum(lam * s1, (1 - lam) * s2)).value;
    EXPECT_NEAR(ds, lam * d1 + (1 - lam) * d2, 1e-8);
  }
}

TEST(Renyi, Examples) {
  const Mat r = random_density(3, 3, 8).rho;
  for (double a : {0.5, 0.8, 1.0, 1.5, 2.0, kInf}) EXPECT_NEAR(renyi(r, r, a).value, 0.0, 1e-9) << a;
  EXPECT_NEAR(d_max(o::diag({0.75, 0.25}), o::diag({0.5, 0.5})).value, std::log(1.5), 1e-14);
  EXPECT_TRUE(d_max(o::diag({1, 0}), o::diag({0, 1})).infinite);
  EXPECT_TRUE(renyi(o::diag({1, 0}), o::diag({0, 1}), 2.0).infinite);
  EXPECT_THROW(renyi(r, r, 0.0), Error);
  for (int seed = 0; seed < 20; ++seed) {
    const Mat a = random_density(3, 3, seed, 0).rho, b = random_density(3, 3, seed, 1).rho;
    const Mat m = o::sqrtm(a) * o::sqrtm(b);
    const double f = o::singular_values(m).sum();
    EXPECT_NEAR(d_min(a, b).value, -std::log(f * f), 1e-9 * std::max(1.0, std::abs(std::log(f * f))));
    // sandwiched alpha = 2 by hand: log tr (s^-1/4 a s^-1/4)^2
    const Mat s4 = o::sqrtm(o::sqrtm(b)).inverse();
    const Mat mid = s4 * a * s4;
    EXPECT_NEAR(renyi(a, b, 2.0).value, std::log((mid * mid).trace().real()), 1e-9);
  }
}

TEST(Renyi, OrderingMonotonicityAndTriangle) {
  const std::vector<double> grid = {0.5, 0.6, 0.75, 0.9, 0.99, 1.0, 1.01, 1.5, 2.0, 4.0, kInf};
  for (int seed = 0; seed < 20; ++seed) {
    const Mat a = random_density(3, 3, seed, 0).rho, b = random_density(3, 3, seed, 1).rho;
    const Mat w = random_density(3, 3, seed, 2).rho;
    const double dmin = d_min(a, b).value, d = relative_entropy(a, b).value, dm = d_max(a, b).value;
    EXPECT_LE(dmin, d + 1e-9);
    EXPECT_LE(d, dm + 1e-9);
    double prev = -kInf;
    for (double al : grid) {
      const double v = renyi(a, b, al).value;
      EXPECT_GE(v, prev - 1e-9) << al;
      prev = v;
      EXPECT_LE(v, renyi(a, w, al).value + d_max(w, b).value + 1e-9) << al;
    }
  }
}

TEST(Renyi, TriangleFailsForRelativeEntropy) {
  const Mat rho = o::diag({0.75, 0.25}), sigma = o::diag({0.25, 0.75}), omega = o::diag({0.5, 0.5});
  const double lhs = relative_entropy(rho, sigma).value;
  const double rhs = relative_entropy(rho, omega).value + relative_entropy(omega, sigma).value;
  EXPECT_NEAR(lhs, 0.549306, 1e-6);
  EXPECT_NEAR(rhs, 0.274653, 1e-6);
  EXPECT_GT(lhs, rhs);
}

TEST(Measured, CommutingEqualsRelativeEntropy) {
  for (int seed = 0; seed < 10; ++seed) {
    const Mat r = random_density(3, 3, seed).rho, s = commuting_partner(r, seed);
    const DivergenceResult m = measured_relative_entropy(r, s);
    EXPECT_NEAR(m.value, relative_entropy(r, s).value, 1e-6);
    EXPECT_EQ(m.kind, "D_M");
  }
  const Mat r = random_density(2, 2, 3).rho;
  EXPECT_NEAR(measured_relative_entropy(r, r).value, 0.0, 1e-9);
}

TEST(Measured, CertificateAndSandwich) {
  for (int seed = 0; seed < 10; ++seed) {
    const Mat r = random_density(3, 3, seed, 0).rho, s = random_density(3, 3, seed, 1).rho;
    const DivergenceResult m = measured_relative_entropy(r, s);
    ASSERT_TRUE(m.converged) << seed;
    // the certificate is a PD omega reproducing the value through the variational objective
    EXPECT_GT(o::eigenvalues(m.certificate).minCoeff(), 0.0);
    const double f = (r * o::logm(m.certificate)).trace().real() + 1.0 - (s * m.certificate).trace().real();
    EXPECT_NEAR(m.value, f, 1e-10);
    EXPECT_LE(m.value, relative_entropy(r, s).value + 1e-8);
    EXPECT_GE(m.value, -std::log(fidelity(r, s)) - 1e-8);
  }
}

TEST(Measured, QubitGridOracle) {
  for (int seed = 0; seed < 20; ++seed) {
    const Mat r = random_density(2, 2, seed, 0).rho, s = random_density(2, 2, seed, 1).rho;
    EXPECT_NEAR(measured_relative_entropy(r, s).value, measured_qubit_oracle(r, s), 1e-4) << seed;
  }
  const Mat r = o::diag({0.7, 0.3}), s = o::diag({0.4, 0.6});
  EXPECT_NEAR(measured_qubit_oracle(r, s), relative_entropy(r, s).value, 1e-6);
  EXPECT_NEAR(measured_qubit_oracle(r, r), 0.0, 1e-12);
}

TEST(Measured, SupportFailureIsInfinite) {
  EXPECT_TRUE(measured_relative_entropy(o::diag({0.5, 0.5}), o::diag({1, 0})).infinite);
}

TEST(Binary, Values) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(binary_entropy(0.25), 0.562335, 1e-6);
  EXPECT_THROW(binary_entropy(1.5), Error);
}

TEST(LambdaMax, InvariantInputIsZero) {
  Eigen::MatrixXd W(2, 2);
  W << 0.7, 0.3, 0.3, 0.7;
  Eigen::MatrixXd P(2, 2);
  P << 0.25, 0.25, 0.25, 0.25;
  EXPECT_NEAR(classical_lambda_max(P, W).value, 0.0, 1e-14);
}

TEST(LambdaMax, UniformReplacementPointMass) {
  const Eigen::MatrixXd W = Eigen::MatrixXd::Constant(2, 2, 0.5);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(1, 2);
  P(0, 0) = 1.0;
  const LambdaMaxResult r = classical_lambda_max(P, W);
  EXPECT_NEAR(r.value, std::log(2.0), 1e-14);
  EXPECT_NEAR(r.cover(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(r.cover(0, 1), 1.0, 1e-14);
}

TEST(LambdaMax, SingleClassScanOracle) {
  for (int seed = 0; seed < 30; ++seed) {
    const int nx = 2 + seed % 3, ny = 2 + seed % 4;
    Eigen::MatrixXd W = random_stochastic(ny, ny, seed, 0);
    const ClassicalJoint J = random_classical({nx, ny}, seed, 1);
    Eigen::MatrixXd P(nx, ny);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) P(x, y) = J.p[x * ny + y];
    const LambdaMaxResult r = classical_lambda_max(P, W);
    ASSERT_EQ(r.classes, 1);
    EXPECT_NEAR(r.value, o::lambda_scan(P, W), 1e-9) << seed;
    EXPECT_GE(r.value, -1e-12);
    // the returned cover dominates P and is invariant row by row
    EXPECT_GE((r.cover - P).minCoeff(), -1e-12);
    for (int x = 0; x < nx; ++x) EXPECT_LE((W * r.cover.row(x).transpose() - r.cover.row(x).transpose()).norm(), 1e-10);
  }
}

TEST(LambdaMax, TransientMassIsUncoverable) {
  // state 1 drains into the absorbing state 0
  Eigen::MatrixXd W(2, 2);
  W << 1.0, 1.0, 0.0, 0.0;
  Eigen::MatrixXd P(1, 2);
  P << 0.5, 0.5;
  const LambdaMaxResult r = classical_lambda_max(P, W);
  EXPECT_TRUE(r.infinite);
  // two absorbing states: each row covered separately
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_NEAR(classical_lambda_max(P, I).value, 0.0, 1e-14);
}

TEST(Classical, JointValidationAndDivergences) {
  ClassicalJoint P{{2, 2}, {0.5, 0.25, 0.25, 0.1}};
  try {
    validate_joint(P);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadTrace);
  }
  P.p[3] = 0.0;
  EXPECT_NO_THROW(validate_joint(P));
  const ClassicalJoint M = marginal(P, {1});
  EXPECT_NEAR(M.p[0], 0.75, 1e-15);
  EXPECT_NEAR(classical_relative_entropy({0.75, 0.25}, {0.25, 0.75}).value, 0.5 * std::log(3.0), 1e-15);
  EXPECT_TRUE(classical_relative_entropy({0.5, 0.5}, {1.0, 0.0}).infinite);
  EXPECT_NEAR(classical_dmax({0.75, 0.25}, {0.5, 0.5}).value, std::log(1.5), 1e-15);
}
