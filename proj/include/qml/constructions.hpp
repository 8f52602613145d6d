#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "qml/entropy.hpp"
#include "qml/linalg.hpp"
#include "qml/traceineq.hpp"

namespace qml {

using Real = boost::multiprecision::cpp_bin_float_50;
using BigInt = boost::multiprecision::cpp_int;

// a set of support points sharing one probability under P and one under R
struct Cell {
  std::string label;
  BigInt count;
  Real P;
  Real R;
};

struct ConstructionReport {
  std::string name;
  std::string log_base = "2";
  Params params;
  Params values;  // in log_base
  std::vector<CheckReport> checks;
  std::string note;

  double get(const std::string& key) const {
    for (const auto& [k, v] : values)
      if (k == key) return v;
    return std::nan("");
  }
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; });
  }
};

namespace cells {

inline Real to_real(const BigInt& c) { return Real(c); }

inline Real log_base(const std::string& base) {
  if (base == "2") return boost::multiprecision::log(Real(2));
  if (base == "e") return Real(1);
  throw Error(ErrorCode::ParamError, "log base must be e or 2");
}

inline Real mass(const std::vector<Cell>& cs) {
  Real m = 0;
  for (const auto& c : cs) m += to_real(c.count) * c.P;
  return m;
}

inline Real mass_r(const std::vector<Cell>& cs) {
  Real m = 0;
  for (const auto& c : cs) m += to_real(c.count) * c.R;
  return m;
}

// entropy of the P column, natural log
inline Real entropy(const std::vector<Cell>& cs) {
  Real h = 0;
  for (const auto& c : cs)
    if (c.P > 0 && c.count > 0) h -= to_real(c.count) * c.P * boost::multiprecision::log(c.P);
  return h;
}

// D(P || R), natural log; sets inf when P is not supported on R
inline Real divergence(const std::vector<Cell>& cs, bool& inf) {
  inf = false;
  Real d = 0;
  for (const auto& c : cs) {
    if (c.count == 0 || c.P == 0) continue;
    if (c.R == 0) {
      inf = true;
      return Real(0);
    }
    d += to_real(c.count) * c.P * boost::multiprecision::log(c.P / c.R);
  }
  return d;
}

// max P/R over the support of P
inline Real max_ratio(const std::vector<Cell>& cs, bool& inf) {
  inf = false;
  Real m = 0;
  for (const auto& c : cs) {
    if (c.count == 0 || c.P == 0) continue;
    if (c.R == 0) {
      inf = true;
      return Real(0);
    }
    m = std::max(m, Real(c.P / c.R));
  }
  return m;
}

inline std::vector<Cell> swapped(std::vector<Cell> cs) {
  for (auto& c : cs) std::swap(c.P, c.R);
  return cs;
}

}  // namespace cells

// ---- first construction: large CMI, good max-divergence recovery

struct AppendixA {
  int n = 0;
  double p = 0.0, q = 0.0;
  BigInt N;
  std::vector<Cell> joint;  // P_XYZ against Q = R(P_XY), patterns over (x,y,z)
  std::vector<Cell> xy;     // P_XY
  std::vector<Cell> yz;     // P_YZ against Q_Y'Z'
  Real c;                   // weight of (Y,Y) in the recovery map
};

inline void check_pq(double p, double q) {
  if (!(p >= 0.0 && q >= 0.0 && p + q <= 1.0 + 1e-15))
    throw Error(ErrorCode::ParamError, "need p, q >= 0 and p + q <= 1");
}

inline AppendixA appendix_a_cells(int n, double p_, double q_) {
  if (n < 1) throw Error(ErrorCode::ParamError, "appendix a: n must be >= 1");
  if (n > 4096) throw Error(ErrorCode::ParamError, "appendix a: n too large");
  check_pq(p_, q_);
  AppendixA A;
  A.n = n;
  A.p = p_;
  A.q = q_;
  A.N = BigInt(1) << n;
  const Real N = cells::to_real(A.N), p = p_, q = q_;
  const Real a = p + q, r = 1 - p - q;
  const Real c = p * p + q + p * q;
  A.c = c;
  // P_XY(x,y) = (e [y=x] + g / N) / N
  const Real e = p + q * a, g = q * (1 - a) + r;
  const Real Pe = (e + g / N) / N, Pn = g / N / N;
  const Real k = (1 - c) / (2 * N);
  const BigInt Nm1 = A.N - 1, Nm2 = A.N - 2;
  // P(x,y,z) = (1/N)(a[z=x] + (1-a)/N)(p[y=x] + q[y=z] + r/N)
  A.joint = {
      {"x=y=z", A.N, (a + (1 - a) / N) * (p + q + r / N) / N, Pe * (c + (1 - c) / N)},
      {"y=x!=z", A.N * Nm1, ((1 - a) / N) * (p + r / N) / N, k * (Pe + Pn)},
      {"z=x!=y", A.N * Nm1, (a + (1 - a) / N) * (r / N) / N, k * (Pn + Pe)},
      {"y=z!=x", A.N * Nm1, ((1 - a) / N) * (q + r / N) / N, Pn * (c + (1 - c) / N)},
      {"distinct", A.N * Nm1 * Nm2, ((1 - a) / N) * (r / N) / N, 2 * k * Pn},
  };
  A.xy = {{"x=y", A.N, Pe, Pe}, {"x!=y", A.N * Nm1, Pn, Pn}};
  const auto& J = A.joint;
  const Real Nm1r = cells::to_real(Nm1), Nm2r = cells::to_real(Nm2);
  A.yz = {
      {"y=z", A.N, J[0].P + Nm1r * J[3].P, J[0].R + Nm1r * J[3].R},
      {"y!=z", A.N * Nm1, J[1].P + J[2].P + Nm2r * J[4].P, J[1].R + J[2].R + Nm2r * J[4].R},
  };
  return A;
}

// P and Q at one point, for cross-checks against enumeration
inline std::pair<double, double> appendix_a_point(const AppendixA& A, long x, long y, long z) {
  int idx;
  if (x == y && y == z)
    idx = 0;
  else if (y == x)
    idx = 1;
  else if (z == x)
    idx = 2;
  else if (y == z)
    idx = 3;
  else
    idx = 4;
  return {static_cast<double>(A.joint[idx].P), static_cast<double>(A.joint[idx].R)};
}

// the max-of-ratios lists for both directions; a zero numerator drops its entry
inline std::pair<double, double> appendix_a_ratio_lists(double p, double q) {
  const double pxy = p + p * q + q * q, pnxy = 1.0 - pxy;
  const double c = p * p + q + p * q, h = 0.5 * (1.0 - c);
  const double r = 1.0 - p - q;
  const std::vector<std::pair<double, double>> fwd = {
      {(p + q) * (p + q), pxy * c}, {r * q, pnxy * c}, {(p + q) * r, pxy * h}, {r * p, pxy * h}, {r * r, pnxy * 2 * h}};
  auto best = [](const std::vector<std::pair<double, double>>& list) {
    double m = -kInf;
    for (const auto& [num, den] : list) {
      if (num == 0.0) continue;
      m = std::max(m, den == 0.0 ? kInf : num / den);
    }
    return m;
  };
  std::vector<std::pair<double, double>> rev;
  for (const auto& [num, den] : fwd) rev.push_back({den, num});
  return {best(fwd), best(rev)};
}

inline ConstructionReport appendix_a_report(int n, double p, double q, const std::string& base = "2") {
  const AppendixA A = appendix_a_cells(n, p, q);
  const Real lb = cells::log_base(base);
  auto out = [&](const Real& v) { return static_cast<double>(v / lb); };
  auto logb = [&](double v) { return std::log(v) / static_cast<double>(lb); };
  ConstructionReport R;
  R.name = "appendix_a";
  R.log_base = base;
  R.params = {{"n", double(n)}, {"p", p}, {"q", q}};

  const Real hxyz = cells::entropy(A.joint), hxy = cells::entropy(A.xy), hyz = cells::entropy(A.yz);
  const Real hy = Real(n) * boost::multiprecision::log(Real(2));
  const Real I = hxy + hyz - hxyz - hy;
  const double nn = n, rr = 1.0 - p - q;
  const double ln2 = std::log(2.0), ln6 = std::log(6.0);
  // closed forms are in bits times ln 2
  const Real h1 = Real(nn * rr * (1.0 + q) * ln2), h2 = Real(nn * rr * (1.0 - p) * ln2);
  const Real bound = Real(nn * rr * (p + q) * ln2 - ln6);

  const auto [ratio_fwd, ratio_rev] = appendix_a_ratio_lists(p, q);
  bool inf1 = false, inf2 = false, infd = false;
  const Real mfwd = cells::max_ratio(A.joint, inf1);
  const Real mrev = cells::max_ratio(cells::swapped(A.joint), inf2);
  const Real D = cells::divergence(A.joint, infd);

  // R(P_Y) = P_YZ, on the two cells of YZ
  Real dev = 0;
  for (const auto& c : A.yz) dev = std::max(dev, Real(boost::multiprecision::abs(c.P - c.R)));

  // exact Lambda_max for the induced Y -> Y' map: W = (c + (1-c)/2) id + (1-c)/2 uniform
  Real lambda = 0;
  if (A.c < 1) {
    const Real N = cells::to_real(A.N);
    lambda = boost::multiprecision::log(N * A.xy[0].P * N);  // sum_x N max_y P(x,y)
  }

  R.values = {
      {"dmax", ratio_fwd > 0 ? logb(ratio_fwd) : -kInf},
      {"dmax_bits", ratio_fwd > 0 ? std::log2(ratio_fwd) : -kInf},
      {"dmax_reverse", ratio_rev > 0 ? logb(ratio_rev) : -kInf},
      {"dmax_exact", inf1 ? kInf : out(boost::multiprecision::log(mfwd))},
      {"dmax_reverse_exact", inf2 ? kInf : out(boost::multiprecision::log(mrev))},
      {"d_exact", infd ? kInf : out(D)},
      {"cmi_exact", out(I)},
      {"cmi_bound", out(bound)},
      {"h_x_given_y_flags", out(h1)},
      {"h_x_given_yz_flags", out(h2)},
      {"h_y", out(hy)},
      {"lambda_max", out(lambda)},
      {"recovery_marginal_dev", static_cast<double>(dev)},
      {"mass", static_cast<double>(cells::mass(A.joint))},
      {"mass_recovered", static_cast<double>(cells::mass_r(A.joint))},
  };

  CheckReport mass;
  mass.name = "cell_mass";
  mass.tol = 1e-30;
  mass.lhs = static_cast<double>(boost::multiprecision::abs(cells::mass(A.joint) - 1));
  mass.rhs = 0.0;
  CheckReport marg = mass;
  marg.name = "recovery_marginal";
  marg.lhs = static_cast<double>(dev);
  CheckReport cb;
  cb.name = "cmi_bound";
  cb.tol = 1e-12;
  cb.direction = "ge";
  cb.logarithmic = true;
  cb.lhs = out(I);
  cb.rhs = out(bound);
  CheckReport up;
  up.name = "cmi_upper";
  up.note = "classical-lp";
  up.tol = 1e-12;
  up.direction = "ge";
  up.logarithmic = true;
  up.lhs = infd ? kInf : out(D);
  up.rhs = out(I - lambda);
  R.checks = {finish(mass), finish(marg), finish(cb), finish(up)};
  R.note = "dmax and dmax_reverse from the max-of-ratios lists; *_exact from the cells at this n";
  return R;
}

// ---- second construction: Lambda_max cannot be replaced by Lambda_alpha

struct AppendixB {
  int n = 0;
  double p = 0.0;
  BigInt N;
  std::vector<Cell> joint;  // P_XYZ against R(P_XY)
  std::vector<Cell> xy;     // P_XY against uniform Q'_XY
};

inline AppendixB appendix_b_cells(int n, double p_) {
  if (n < 1) throw Error(ErrorCode::ParamError, "appendix b: n must be >= 1");
  if (n > 4096) throw Error(ErrorCode::ParamError, "appendix b: n too large");
  if (!(p_ >= 0.0 && p_ <= 1.0)) throw Error(ErrorCode::ParamError, "appendix b: p must lie in [0,1]");
  AppendixB B;
  B.n = n;
  B.p = p_;
  B.N = BigInt(1) << n;
  const Real N = cells::to_real(B.N), p = p_;
  const BigInt Nm1 = B.N - 1, Nm2 = B.N - 2;
  const Real eq = p / N + (1 - p) / (N * N);  // P_XY on the diagonal
  const Real off = (1 - p) / (N * N);          // P_XY off the diagonal
  const Real s = (1 - p) / N;                  // weight of the (U, Y-U) branch per output
  B.joint = {
      {"0,0,0", BigInt(1), eq, (p + s) * eq},
      {"x,x,x", Nm1, p / N, p * eq + s * off},
      {"0,h,h", BigInt(1), off, p * off + s * eq},
      {"0,y,y", Nm2, off, p * off + s * off},
      {"x,0,x", Nm1, off, s * eq},
      {"x,h,x+h", Nm1, off, s * eq},
      {"x,y,x+y", Nm1 * Nm2, off, s * off},
  };
  const Real u = 1 / (N * N);
  B.xy = {{"x=y", B.N, eq, u}, {"x!=y", B.N * Nm1, off, u}};
  return B;
}

inline std::pair<double, double> appendix_b_point(const AppendixB& B, long x, long y, long z) {
  const long N = static_cast<long>(B.N), h = N / 2;
  const auto val = [&](int i) {
    return std::pair<double, double>{static_cast<double>(B.joint[i].P), static_cast<double>(B.joint[i].R)};
  };
  const bool diag = x == y && y == z;
  const bool sum = z == (x + y) % N;
  if (diag && x == 0) return val(0);
  if (diag) return val(1);
  if (!sum) {
    // off the support of P; R there is p P_XY(x,y)[z=y] + (1-p)/N P_XY(x, y+z)
    const double n = static_cast<double>(N), p = B.p;
    const double pxy_y = (x == y ? p / n : 0.0) + (1 - p) / (n * n);
    const double pxy_yz = (x == (y + z) % N ? p / n : 0.0) + (1 - p) / (n * n);
    return {0.0, (z == y ? p * pxy_y : 0.0) + (1 - p) / n * pxy_yz};
  }
  if (x == 0) return val(y == h ? 2 : 3);
  if (y == 0) return val(4);
  if (y == h) return val(5);
  return val(6);
}

inline ConstructionReport appendix_b_report(int alpha, const std::string& base = "2") {
  if (alpha < 2) throw Error(ErrorCode::ParamError, "appendix b: alpha must be an integer >= 2");
  const int n = alpha;
  const double p = 1.0 / (double(alpha) * alpha);
  const AppendixB B = appendix_b_cells(n, p);
  const Real lb = cells::log_base(base);
  auto out = [&](const Real& v) { return static_cast<double>(v / lb); };
  ConstructionReport R;
  R.name = "appendix_b";
  R.log_base = base;
  R.params = {{"alpha", double(alpha)}, {"n", double(n)}, {"p", p}};

  const Real N = cells::to_real(B.N), pr = p;
  const Real ln2 = boost::multiprecision::log(Real(2));
  // P_YZ has the same two cells as P_XY; Y is uniform
  const Real hxy = cells::entropy(B.xy);
  const Real I = hxy + hxy - cells::entropy(B.joint) - Real(n) * ln2;
  bool infd = false;
  const Real D = cells::divergence(B.joint, infd);
  const Real dbound = -boost::multiprecision::log(pr);
  const Real a = alpha;
  const Real dalpha = boost::multiprecision::log(boost::multiprecision::pow(1 - pr, a) * (N - 1) / N +
                                                 boost::multiprecision::pow(1 - pr + pr * N, a) / N) /
                      (a - 1);
  // the same Renyi divergence directly from the P_XY cells
  Real qsum = 0;
  for (const auto& c : B.xy)
    qsum += cells::to_real(c.count) * boost::multiprecision::pow(c.P, a) * boost::multiprecision::pow(c.R, 1 - a);
  const Real dalpha_cells = boost::multiprecision::log(qsum) / (a - 1);
  // W(y'|y) = p [y'=y] + (1-p)/N applied to the uniform Q'_Y: p/N + N (1-p)/N / N
  const Real inv_dev = boost::multiprecision::abs(pr / N + N * ((1 - pr) / N) / N - 1 / N) * N;
  // every row of the cover is a multiple of the uniform stationary law of W
  const Real lambda_max = boost::multiprecision::log(1 + pr * (N - 1));
  const Real cmi_lower = (1 - pr) * Real(n) * ln2 - Real(binary_entropy(p));
  const Real lhs_chain = D + dalpha;
  const bool chain = !infd && lhs_chain < I;

  Real marg_dev = 0;
  {
    // R(P_Y)(y', z') against P_YZ: diagonal and off-diagonal entries
    const Real eq = pr / N + (1 - pr) / (N * N), off = (1 - pr) / (N * N);
    const Real r_diag = pr * (1 / N) + (1 - pr) / N * (1 / N);
    const Real r_off = (1 - pr) / N * (1 / N);
    marg_dev = std::max(boost::multiprecision::abs(r_diag - eq), boost::multiprecision::abs(r_off - off));
  }

  R.values = {
      {"cmi_exact", out(I)},
      {"cmi_lower", out(cmi_lower)},
      {"d_exact", infd ? kInf : out(D)},
      {"d_bound", out(dbound)},
      {"d_alpha", out(dalpha)},
      {"d_alpha_cells", out(dalpha_cells)},
      {"lambda_max_exact", out(lambda_max)},
      {"chain_lhs", infd ? kInf : out(lhs_chain)},
      {"chain_holds", chain ? 1.0 : 0.0},
      {"invariance_dev", static_cast<double>(inv_dev)},
      {"recovery_marginal_dev", static_cast<double>(marg_dev)},
      {"mass", static_cast<double>(cells::mass(B.joint))},
        };

  CheckReport inv;
  inv.name = "invariance";
  inv.tol = 1e-30;
  inv.lhs = static_cast<double>(inv_dev);
  inv.rhs = 0.0;
  CheckReport marg = inv;
  marg.name = "recovery_marginal";
  marg.lhs = static_cast<double>(marg_dev);
  CheckReport db;
  db.name = "d_bound";
  db.tol = 1e-12;
  db.logarithmic = true;
  db.lhs = infd ? kInf : out(D);
  db.rhs = out(dbound);
  CheckReport ch;
  ch.name = "strict_chain";
  ch.tol = 0.0;
  ch.logarithmic = true;
  ch.lhs = infd ? kInf : out(lhs_chain);
  ch.rhs = out(I);
  ch = finish(ch);
  ch.pass = chain;
  CheckReport up;
  up.name = "cmi_upper";
  up.note = "classical-lp";
  up.tol = 1e-12;
  up.direction = "ge";
  up.logarithmic = true;
  up.lhs = infd ? kInf : out(D);
  up.rhs = out(I - lambda_max);
  R.checks = {finish(inv), finish(marg), finish(db), ch, finish(up)};
  return R;
}

struct AppendixBSweep {
  std::vector<ConstructionReport> reports;
  int smallest_alpha = -1;  // first alpha with the strict chain, -1 if none
};

inline AppendixBSweep appendix_b_sweep(const std::vector<int>& alphas = {4, 8, 16, 32, 64},
                                       const std::string& base = "2") {
  AppendixBSweep s;
  for (int a : alphas) {
    s.reports.push_back(appendix_b_report(a, base));
    if (s.smallest_alpha < 0 && s.reports.back().get("chain_holds") == 1.0) s.smallest_alpha = a;
  }
  return s;
}

// ---- antisymmetric state on d qudits

inline Eigen::VectorXcd slater_vector(int d) {
  if (d < 2) throw Error(ErrorCode::ParamError, "slater: d must be >= 2");
  if (d > 4) throw Error(ErrorCode::DimTooLarge, "slater: d^d exceeds the supported size (d <= 4)");
  long dim = 1;
  for (int i = 0; i < d; ++i) dim *= d;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  do {
    int inv = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (perm[i] > perm[j]) ++inv;
    long idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * d + perm[i];
    psi(idx) = (inv % 2 ? -1.0 : 1.0) / std::sqrt(fact);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return psi;
}

inline ConstructionReport slater_cmi(int d, const std::string& base = "e", double tol = 1e-9) {
  const Eigen::VectorXcd psi = slater_vector(d);
  const QuantumState s{pure(psi), Shape(d, d)};
  const double lb = base == "2" ? std::log(2.0) : 1.0;
  ConstructionReport R;
  R.name = "slater";
  R.log_base = base;
  R.params = {{"d", double(d)}};
  std::vector<double> terms;
  for (int k = 1; k < d; ++k) {
    std::vector<int> mid;
    for (int j = 1; j < k; ++j) mid.push_back(j);
    terms.push_back(cmi(s, {0}, mid, {k}));
    R.values.push_back({"cmi_" + std::to_string(k + 1), terms.back() / lb});
  }
  std::vector<int> rest;
  for (int j = 1; j < d; ++j) rest.push_back(j);
  const double total = mutual_information(s, {0}, rest);
  const double sum = std::accumulate(terms.begin(), terms.end(), 0.0);
  const double mn = *std::min_element(terms.begin(), terms.end());
  const double bound = 2.0 / (d - 1) * std::log(double(d));
  // descriptive: distance to the Markov chain rho_1 (x) rho_rest
  const Mat prod = tensor(partial_trace(s.rho, s.shape, {0}), partial_trace(s.rho, s.shape, rest));
  R.values.push_back({"min_cmi", mn / lb});
  R.values.push_back({"bound", bound / lb});
  R.values.push_back({"chain_sum", sum / lb});
  R.values.push_back({"mutual_information", total / lb});
  R.values.push_back({"norm", psi.squaredNorm()});
  R.values.push_back({"product_distance", trace_distance(s.rho, prod)});

  CheckReport b;
  b.name = "slater_bound";
  b.tol = tol;
  b.logarithmic = true;
  b.lhs = mn;
  b.rhs = bound;
  CheckReport c;
  c.name = "chain_rule";
  c.tol = tol;
  c.lhs = std::abs(sum - total);
  c.rhs = 0.0;
  CheckReport nrm = c;
  nrm.name = "normalization";
  nrm.lhs = std::abs(psi.squaredNorm() - 1.0);
  R.checks = {finish(b), finish(c), finish(nrm)};
  return R;
}

// ---- the relative entropy is not a metric

struct TriangleStates {
  Mat rho, sigma, omega;
};

inline TriangleStates triangle_states() {
  return {diag({0.75, 0.25}), diag({0.25, 0.75}), diag({0.5, 0.5})};
}

inline ConstructionReport triangle_counterexample(const std::string& base = "e") {
  const TriangleStates t = triangle_states();
  const double lb = base == "2" ? std::log(2.0) : 1.0;
  const double drs = relative_entropy(t.rho, t.sigma).value;
  const double dro = relative_entropy(t.rho, t.omega).value;
  const double dos = relative_entropy(t.omega, t.sigma).value;
  ConstructionReport R;
  R.name = "triangle";
  R.log_base = base;
  R.values = {{"d_rho_sigma", drs / lb}, {"d_rho_omega", dro / lb}, {"d_omega_sigma", dos / lb},
              {"sum", (dro + dos) / lb}};
  CheckReport v;
  v.name = "triangle_violation";
  v.logarithmic = true;
  v.tol = 0.0;
  v.direction = "ge";
  v.lhs = drs;
  v.rhs = dro + dos;
  v = finish(v);
  v.pass = v.margin > 0.0;  // strict
  R.checks = {v};
  return R;
}

}  // namespace qml
