// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   only N (repeatable)

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "enumerate.hpp"
#include "oracles.hpp"
#include "qml/constructions.hpp"
#include "qml/fuzz.hpp"

using namespace qml;
namespace o = oracle;

namespace {

struct Line {
  std::string id;
  bool pass;
  std::string what;
};

class Outcome {
 public:
  void add(const std::string& id, bool pass, const std::string& what) { lines_.push_back({id, pass, what}); }
  bool all() const {
    for (const auto& l : lines_)
      if (!l.pass) return false;
    return true;
  }
  void print() const {
    for (const auto& l : lines_) std::printf("criterion %-3s %s  %s\n", l.id.c_str(), l.pass ? "PASS" : "FAIL", l.what.c_str());
    std::fflush(stdout);
  }

 private:
  std::vector<Line> lines_;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

double min_margin(const FuzzResult& f, const std::string& name) {
  double m = kInf;
  for (const auto& r : f.reports)
    if (r.name == name) m = std::min(m, r.margin);
  return m;
}

int count(const FuzzResult& f, const std::string& name) {
  int n = 0;
  for (const auto& r : f.reports) n += r.name == name;
  return n;
}

int failures(const FuzzResult& f, const std::string& name) {
  int n = 0;
  for (const auto& r : f.reports) n += r.name == name && !r.pass;
  return n;
}

FuzzOptions fuzz_options(int trials) {
  FuzzOptions opt;
  opt.seed = 7;
  opt.trials = trials;
  return opt;
}

// ---- 1: weight densities
void criterion_1(Outcome& out) {
  Clock c;
  const double b0 = beta_density(0.0, 0.0), bh = beta_density(0.5, 0.0), b34 = beta_density(0.75, 0.0);
  const QuadratureRule rule = beta0_rule();
  const bool anchors = std::abs(b0 - 0.785398) <= 1e-5 && std::abs(bh - 1.0) <= 1e-5 && std::abs(b34 - 1.60948) <= 1e-5;
  // the theta = 0 density is pi/4 at the origin
  const bool exact = std::abs(b0 - M_PI / 4) <= 1e-15;
  const bool mass = std::abs(rule.raw_mass - 1.0) <= 1e-9;
  const double s = c.seconds();
  out.add("1", anchors && exact && mass && s < 1.0,
          fmt("beta densities at 0: %.6f %.6f %.6f, raw mass %.12f, %.2fs", b0, bh, b34, rule.raw_mass, s));
}

// ---- 2: two-operator Golden-Thompson
void criterion_2(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("gt", fuzz_options(1000));
  const double nc = min_margin(f, "gt2");
  double comm = 0.0;
  for (const auto& r : f.reports)
    if (r.name == "gt2_commuting_equality") comm = std::max(comm, r.lhs);
  // oracle traces on every tenth pair
  double worst = 0.0;
  for (int i = 0; i < 1000; i += 10) {
    const int d = 2 + i % 7;
    const Mat H1 = random_hermitian(d, 7, fuzz_detail::sid(i, 0)), H2 = random_hermitian(d, 7, fuzz_detail::sid(i, 1));
    const double lhs = o::expm(H1 + H2).trace().real(), rhs = (o::expm(H1) * o::expm(H2)).trace().real();
    const CheckReport g = check_gt2(H1, H2);
    worst = std::max({worst, std::abs(g.lhs - lhs) / lhs, std::abs(g.rhs - rhs) / rhs});
  }
  const double s = c.seconds();
  const bool ok = count(f, "gt2") == 1000 && nc >= -1e-9 && comm <= 1e-10 && worst <= 1e-10 && s < 30.0;
  out.add("2", ok,
          fmt("1000 pairs: min margin %.3e, max commuting |margin| %.2e, oracle rel dev %.1e, %.1fs", nc, comm, worst, s));
}

// ---- 3: three-operator Golden-Thompson
void criterion_3(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("lieb", fuzz_options(100));
  double agree = 0.0;
  for (const auto& r : f.reports)
    if (r.name == "lieb_triple") agree = std::max(agree, r.get("agreement"));
  const double m = min_margin(f, "gt_multi");
  const double s = c.seconds();
  const bool ok = count(f, "lieb_triple") == 100 && count(f, "gt_multi") == 100 && agree <= 1e-6 && m >= -1e-7 &&
                  failures(f, "lieb_triple") == 0 && s < 60.0;
  out.add("3", ok, fmt("100 triples: worst rhs agreement %.2e, min margin %.3e, %.1fs", agree, m, s));
}

// ---- 4: Araki-Lieb-Thirring direction
void criterion_4(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("alt", fuzz_options(200));
  int wrong_dir = 0, n = 0;
  double m = kInf;
  for (const auto& r : f.reports) {
    if (r.name != "alt2") continue;
    ++n;
    const double rr = r.get("r");
    wrong_dir += (rr < 1.0) != (r.direction == "le");
    m = std::min(m, r.margin);
  }
  // oracle values through MatrixFunctions on a sample
  double worst = 0.0;
  for (int i = 0; i < 200; i += 8) {
    const int d = 2 + i % 4;
    const Mat B1 = random_pd(d, 7, fuzz_detail::sid(i, 0)), B2 = random_pd(d, 7, fuzz_detail::sid(i, 1));
    const double q = (i % 2) ? 2.0 : 1.0;
    const Mat s1 = o::sqrtm(B1);
    const double base = o::eigenvalues(s1 * B2 * s1).array().pow(q).sum();
    for (double r : {0.25, 0.5, 2.0, 4.0}) {
      const Mat a = o::expm(0.5 * r * o::logm(B1)), b = o::expm(r * o::logm(B2));
      const double lhs = o::eigenvalues(a * b * a).array().pow(q / r).sum();
      const bool dir_ok = r < 1 ? lhs <= base * (1 + 1e-9) : lhs >= base * (1 - 1e-9);
      if (!dir_ok) ++wrong_dir;
      const CheckReport rep = check_alt2(B1, B2, q, r);
      worst = std::max({worst, std::abs(rep.lhs - lhs) / lhs, std::abs(rep.rhs - base) / base});
    }
  }
  const bool ok = n == 800 && wrong_dir == 0 && m >= -1e-9 && worst <= 1e-8;
  out.add("4", ok,
          fmt("200 pairs x r in {1/4,1/2,2,4}: min margin %.3e, direction errors %d, oracle rel dev %.1e, %.1fs", m,
              wrong_dir, worst, c.seconds()));
}

// ---- 5: multivariate log-trace
void criterion_5(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("log-trace", fuzz_options(100));
  int bad = 0, n = 0;
  double m = kInf;
  for (const auto& r : f.reports)
    if (r.name == "log_trace_multi") {
      ++n;
      bad += !r.pass;
      m = std::min(m, r.margin);
    }
  const double trend = f.value("trend_fraction");
  out.add("5", n == 200 && bad == 0 && trend >= 0.95,
          fmt("100 triples x q in {1,1/2}: %d violations, min margin %.3e; q->0 trend fraction %.2f, %.1fs", bad, m,
              trend, c.seconds()));
}

// ---- 6: recovery lower bounds on the conditional mutual information
void criterion_6(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("fr", fuzz_options(500));
  const double s = c.seconds();
  const bool ok = count(f, "fr_ssa") == 500 && f.failures() == 0 && f.value("worst_markov") <= 1e-8 && s < 300.0;
  out.add("6", ok,
          fmt("500 states: min margins fidelity %.3e measured %.3e, worst Markov value %.1e, %d failures, %.1fs",
              min_margin(f, "fr_fidelity"), min_margin(f, "fr_measured"), f.value("worst_markov"), f.failures(), s));
}

// ---- 7: strengthened data processing
void criterion_7(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("dpi", fuzz_options(200));
  const bool ok = count(f, "dpi_measured") == 200 && f.failures() == 0;
  out.add("7", ok,
          fmt("200 (rho, sigma, E): min margins measured %.3e fidelity %.3e, %d failures, %.1fs",
              min_margin(f, "dpi_measured"), min_margin(f, "dpi_fidelity"), f.failures(), c.seconds()));
}

// ---- 8: first classical construction
void criterion_8(Outcome& out) {
  Clock c;
  const ConstructionReport r = appendix_a_report(10, 0.5, 0.0, "2");
  const double dmax = r.get("dmax_bits"), cmi = r.get("cmi_exact"), bound = 10.0 / 4.0 - std::log2(6.0);
  double worst = 0.0;
  for (const auto& [p, q] : enumerate::pq_grid()) {
    const AppendixA A = appendix_a_cells(3, p, q);
    const enumerate::EnumA E = enumerate::enumerate_a(3, p, q);
    for (long x = 0; x < 8; ++x)
      for (long y = 0; y < 8; ++y)
        for (long z = 0; z < 8; ++z) {
          const auto [cp, cq] = appendix_a_point(A, x, y, z);
          worst = std::max({worst, std::abs(cp - E.P(x, y, z)), std::abs(cq - E.Q(x, y, z))});
        }
  }
  const double s = c.seconds();
  const bool ok = std::abs(dmax - 1.0) <= 1e-12 && cmi >= bound && worst <= 1e-14 && r.pass() && s < 5.0;
  out.add("8", ok,
          fmt("n=10: D_max %.15f bits, CMI %.6f >= %.6f; n=3 cells vs enumeration %.1e, %.2fs", dmax, cmi, bound, worst,
              s));
}

// ---- 9: second classical construction
void criterion_9(Outcome& out) {
  Clock c;
  std::vector<ConstructionReport> rs;
  for (int a : {4, 8, 16}) rs.push_back(appendix_b_report(a, "2"));

  bool inv = true;
  for (const auto& r : rs) {
    for (const auto& ch : r.checks)
      if (ch.name == "invariance") inv = inv && ch.pass;
    inv = inv && r.get("invariance_dev") == 0.0;
  }
  // uniform law is a fixed point of the Y -> Y' kernel, from the generative model
  const enumerate::EnumB E = enumerate::enumerate_b(4, 1.0 / 16);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(16, 1.0 / 16);
  const double kdev = (E.W * u - u).cwiseAbs().maxCoeff();
  inv = inv && kdev <= 1e-15;
  out.add("9a", inv, fmt("invariance deviation %.1e (cells), %.1e (kernel oracle)", rs[0].get("invariance_dev"), kdev));

  bool dok = true;
  std::ostringstream d;
  for (size_t k = 0; k < rs.size(); ++k) {
    const int a = 4 << k;
    const double lhs = rs[k].get("d_exact"), rhs = 2.0 * std::log2(a);
    dok = dok && lhs <= rhs + 1e-12;
    d << fmt("%s%.3f <= %.3f", k ? ", " : "", lhs, rhs);
  }
  out.add("9b", dok, "D(P||R(P)) vs 2 log2 alpha at alpha 4, 8, 16: " + d.str());

  const AppendixBSweep sw = appendix_b_sweep({4, 8, 16, 32, 64}, "2");
  std::ostringstream ch;
  for (const auto& r : sw.reports)
    ch << fmt("%s%.3f<%.3f", ch.tellp() > 0 ? ", " : "", r.get("chain_lhs"), r.get("cmi_exact"));
  const double s = c.seconds();
  const bool found = sw.smallest_alpha > 0 && sw.smallest_alpha <= 64;
  out.add("9c", found && s < 10.0,
          fmt("smallest alpha with strict chain: %d (chain lhs<cmi: %s), %.1fs", sw.smallest_alpha, ch.str().c_str(), s));
}

// ---- 10: measured relative entropy
double qubit_measured_oracle(const Mat& rho, const Mat& sigma) {
  // rank-one projective measurements along Bloch direction n, coarse grid then local refinement
  auto bloch = [](const Mat& m) {
    return Eigen::Vector3d(2 * m(0, 1).real(), -2 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real());
  };
  const Eigen::Vector3d r = bloch(rho), s = bloch(sigma);
  auto f = [&](double th, double ph) {
    const Eigen::Vector3d n(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    double v = 0.0;
    for (int sg : {1, -1}) {
      const double p = 0.5 * (1 + sg * r.dot(n)), q = 0.5 * (1 + sg * s.dot(n));
      if (p > 0) v += p * std::log(p / q);
    }
    return v;
  };
  double bt = 0, bp = 0, best = -kInf;
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j < 400; ++j) {
      const double th = M_PI * i / 200, ph = 2 * M_PI * j / 400, v = f(th, ph);
      if (v > best) best = v, bt = th, bp = ph;
    }
  double h = M_PI / 200;
  for (int it = 0; it < 60; ++it, h *= 0.7)
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        const double th = bt + h * i / 4, ph = bp + h * j / 4, v = f(th, ph);
        if (v > best) best = v, bt = th, bp = ph;
      }
  return best;
}

void criterion_10(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("measured", fuzz_options(100));
  double worst_q = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Mat rho = random_density(2, 2, 7, 5000 + 2 * i).rho, sigma = random_density(2, 2, 7, 5001 + 2 * i).rho;
    worst_q = std::max(worst_q, std::abs(measured_relative_entropy(rho, sigma).value - qubit_measured_oracle(rho, sigma)));
  }
  const bool ok = count(f, "measured_commuting") == 100 && f.failures() == 0 && worst_q <= 1e-4;
  out.add("10", ok,
          fmt("commuting gap %.1e, qubit grid gap %.1e (suite) %.1e (independent grid), sandwich failures %d, %.1fs",
              f.value("worst_commuting_gap"), f.value("worst_qubit_gap"), worst_q,
              failures(f, "measured_sandwich_lower") + failures(f, "measured_sandwich_upper"), c.seconds()));
}

// ---- 11: pinching properties
void criterion_11(Outcome& out) {
  Clock c;
  const FuzzResult f = run_fuzz("pinching", fuzz_options(200));
  std::set<std::string> kinds;
  for (const auto& r : f.reports) kinds.insert(r.name);
  double op = kInf;
  for (const char* k : {"pinching_inequality", "convex_square", "convex_neglog"}) op = std::min(op, min_margin(f, k));
  const int dist = failures(f, "smooth_distance");
  out.add("11", f.failures() == 0 && op >= -1e-9 && dist == 0 && count(f, "smooth_distance") > 0,
          fmt("200 operators, %zu checks of %zu kinds: %d failures, operator-inequality min margin %.3e, "
              "smooth distance bound violations %d, %.1fs",
              f.reports.size(), kinds.size(), f.failures(), op, dist, c.seconds()));
}

// ---- 12: classical Lambda_max
void criterion_12(Outcome& out) {
  Clock c;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int dx = 2 + i % 2, dy = 2 + (i / 2) % 3;
    const ClassicalJoint J = random_classical({dx, dy}, 7, 9000 + 2 * i);
    Eigen::MatrixXd P(dx, dy);
    for (int x = 0; x < dx; ++x)
      for (int y = 0; y < dy; ++y) P(x, y) = J.p[x * dy + y];
    // strictly positive columns: a single closed class
    Eigen::MatrixXd W = random_stochastic(dy, dy, 7, 9001 + 2 * i);
    W = (W.array() + 0.05).matrix();
    for (int y = 0; y < dy; ++y) W.col(y) /= W.col(y).sum();
    worst = std::max(worst, std::abs(classical_lambda_max(P, W).value - o::lambda_scan(P, W)));
  }
  const FuzzResult f = run_fuzz("lambda", fuzz_options(100));
  out.add("12", worst <= 1e-9 && count(f, "cmi_upper") == 100 && f.failures() == 0,
          fmt("LP vs scan oracle %.1e on 100 channels; inequality with exact Lambda: %d failures, min margin %.3e, %.1fs",
              worst, f.failures(), min_margin(f, "cmi_upper"), c.seconds()));
}

// ---- 13: antisymmetric state
void criterion_13(Outcome& out) {
  Clock c;
  const ConstructionReport r = slater_cmi(3, "e");
  const double mn = r.get("min_cmi");
  const double chain = std::abs(r.get("chain_sum") - r.get("mutual_information"));
  // oracle: I(1:23) = S(1) + S(23) - S(123), pure state
  const Eigen::VectorXcd psi = slater_vector(3);
  const Mat rho = psi * psi.adjoint();
  const std::vector<int> dims = {3, 3, 3};
  const double I = o::entropy(o::partial_trace(rho, dims, {0})) + o::entropy(o::partial_trace(rho, dims, {1, 2})) -
                   o::entropy(rho);
  const double s = c.seconds();
  const bool ok = mn <= std::log(3.0) + 1e-9 && chain <= 1e-9 && std::abs(r.get("chain_sum") - I) <= 1e-9 && s < 10.0;
  out.add("13", ok,
          fmt("d=3: min CMI %.9f <= log 3 = %.9f, chain rule residual %.1e, oracle I(1:23) %.9f, %.2fs", mn,
              std::log(3.0), chain, I, s));
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<void(Outcome&)>> all = {
      {1, criterion_1},   {2, criterion_2},   {3, criterion_3},   {4, criterion_4},  {5, criterion_5},
      {6, criterion_6},   {7, criterion_7},   {8, criterion_8},   {9, criterion_9},  {10, criterion_10},
      {11, criterion_11}, {12, criterion_12}, {13, criterion_13}};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (!all.count(n)) {
        std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
        return 2;
      }
      pick.insert(n);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (pick.empty())
    for (const auto& [k, v] : all) pick.insert(k);

  bool ok = true;
  for (int k : pick) {
    Outcome out;
    try {
      all.at(k)(out);
    } catch (const std::exception& e) {
      out.add(std::to_string(k), false, std::string("error: ") + e.what());
    }
    out.print();
    ok = ok && out.all();
  }
  return ok ? 0 : 1;
}
