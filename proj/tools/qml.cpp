// qml: command-line front end for the checks, constructions and fuzz campaigns.
// exit 0: every check passed; 1: some check failed; 2: input error (code on stderr)

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qml/qml.hpp"

using namespace qml;

namespace {

struct Globals {
  double tol = -1.0;
  double quad_T = -1.0;
  int quad_panels = -1;
  int quad_nodes = -1;
  std::uint64_t seed = 7;
  int trials = -1;
  std::string out;
  std::string log_base;  // empty: command default
};

Globals G;

QuadOptions quad_opts() {
  QuadOptions o;
  if (G.quad_T > 0) o.T = G.quad_T;
  if (G.quad_panels > 0) o.panels = G.quad_panels;
  if (G.quad_nodes > 0) o.nodes = G.quad_nodes;
  return o;
}

double tol_or(double def) { return G.tol > 0 ? G.tol : def; }

std::string display_base(const std::string& def = "e") { return G.log_base.empty() ? def : G.log_base; }

json meta() {
  const QuadOptions q = quad_opts();
  json m;
  m["seed"] = G.seed;
  m["quad"] = {{"T", q.T}, {"panels", q.panels}, {"nodes", q.nodes}};
  m["log_base"] = display_base();
  if (G.tol > 0) m["tol"] = G.tol;
  return m;
}

int emit(ReportFile& f, const std::string& base = "") {
  f.meta = meta();
  const std::string b = base.empty() ? display_base() : base;
  f.meta["log_base"] = b;
  write_text(G.out, report_file_to_json(f, b).dump(2));
  return f.failures() == 0 ? 0 : 1;
}

std::vector<Mat> need(const StateFile& s, size_t n, const std::string& what) {
  if (s.mats.size() < n)
    throw Error(ErrorCode::ShapeError, what + " needs " + std::to_string(n) + " matrices, file has " +
                                           std::to_string(s.mats.size()));
  return s.mats;
}

QuantumState tripartite(const StateFile& s, size_t i = 0) {
  if (s.kind != "density") throw Error(ErrorCode::Schema, "expected a density file");
  if (s.dims.size() != 3) throw Error(ErrorCode::ShapeError, "state must have three subsystems (dims [dA, dB, dC])");
  return s.state(i);
}

std::vector<std::pair<int, int>> parse_blocks(const std::string& spec) {
  // "l:r,l:r"
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto c = item.find(':');
    if (c == std::string::npos) throw Error(ErrorCode::ParamError, "blocks: expected l:r pairs");
    try {
      out.push_back({std::stoi(item.substr(0, c)), std::stoi(item.substr(c + 1))});
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParamError, "blocks: bad integer in '" + item + "'");
    }
  }
  return out;
}

// ---- subcommands

int cmd_entropy(const std::string& in, const std::string& sigma_path) {
  const StateFile s = parse_state_file(in);
  ReportFile f;
  f.command = "entropy";
  if (s.kind == "classical") {
    if (s.is_stochastic) throw Error(ErrorCode::Schema, "entropy: expected a joint distribution, got a stochastic matrix");
    f.values.push_back({"shannon", shannon(s.joint)});
    for (size_t k = 0; k < s.dims.size(); ++k)
      f.values.push_back({"H_" + std::to_string(k), shannon(marginal(s.joint, {static_cast<int>(k)}))});
    if (s.dims.size() == 3) f.values.push_back({"cmi", classical_cmi(s.joint)});
    return emit(f);
  }
  if (s.kind != "density") throw Error(ErrorCode::Schema, "entropy: expected a density or classical file");
  const QuantumState rho = s.state();
  f.values.push_back({"von_neumann", von_neumann(rho)});
  if (s.dims.size() > 1)
    for (size_t k = 0; k < s.dims.size(); ++k)
      f.values.push_back({"H_" + std::to_string(k), marginal_entropy(rho, {static_cast<int>(k)})});
  if (s.dims.size() == 2) {
    f.values.push_back({"mutual_information", mutual_information(rho, {0}, {1})});
    f.values.push_back({"conditional_entropy", conditional_entropy(rho)});
  }
  if (s.dims.size() == 3) f.values.push_back({"cmi", cmi(rho)});
  std::optional<Mat> sigma;
  if (!sigma_path.empty()) sigma = parse_state_file(sigma_path).state().rho;
  else if (s.mats.size() > 1) sigma = s.mats[1];
  if (sigma) {
    require_same_dim(rho.rho, *sigma, "entropy");
    const auto D = relative_entropy(rho.rho, *sigma);
    f.values.push_back({"relative_entropy", D.infinite ? kInf : D.value});
    f.values.push_back({"d_max", d_max(rho.rho, *sigma).value});
    f.values.push_back({"d_min", d_min(rho.rho, *sigma).value});
    for (double a : {0.5, 2.0}) f.values.push_back({"renyi_" + std::to_string(a).substr(0, 3), renyi(rho.rho, *sigma, a).value});
    const auto M = measured_relative_entropy(rho.rho, *sigma);
    f.values.push_back({"measured_lower_bound", M.infinite ? kInf : M.value});
  }
  return emit(f);
}

struct VerifyArgs {
  std::string check, in, sigma, channel, tau, source = "lp", f = "tlogt";
  double p = 2.0, q = 1.0, r = 0.5, alpha = 1.0, kappa = 1.0;
  int grid = 11;
  std::vector<int> ms{1, 2, 4, 8, 16, 32, 64};
};

int cmd_verify(const VerifyArgs& a) {
  ReportFile f;
  f.command = "verify " + a.check;
  const QuadratureRule b0 = beta0_rule(quad_opts());
  auto load = [&]() {
    if (a.in.empty()) throw Error(ErrorCode::ParamError, "verify " + a.check + ": --in is required");
    return parse_state_file(a.in);
  };
  const std::string& c = a.check;
  if (c == "gt2") {
    const auto m = need(load(), 2, c);
    f.add(check_gt2(m[0], m[1], tol_or(1e-9)));
  } else if (c == "peierls") {
    const auto m = need(load(), 2, c);
    f.add(check_peierls(m[0], m[1], tol_or(1e-9)));
  } else if (c == "lieb") {
    const auto m = need(load(), 3, c);
    f.add(check_lieb_triple(m[0], m[1], m[2], b0, tol_or(1e-7)));
  } else if (c == "gt-multi") {
    f.add(check_gt_multi(need(load(), 2, c), a.p, b0, tol_or(1e-7)));
  } else if (c == "gt-general") {
    f.add(check_gt_general(need(load(), 1, c), a.p, b0, tol_or(1e-7)));
  } else if (c == "alt") {
    const auto m = need(load(), 2, c);
    f.add(check_alt2(m[0], m[1], a.q, a.r, tol_or(1e-9)));
  } else if (c == "alt-multi") {
    f.add(check_alt_multi(need(load(), 1, c), a.p, a.r, make_rule(Density::Beta, a.r, quad_opts()), tol_or(1e-7)));
  } else if (c == "log-trace") {
    const auto m = need(load(), 2, c);
    f.add(check_log_trace2(m[0], m[1], a.p, tol_or(1e-9)));
  } else if (c == "log-trace-multi") {
    f.add(check_log_trace_multi(need(load(), 2, c), a.q, b0, tol_or(1e-7)));
  } else if (c == "klein") {
    const auto m = need(load(), 2, c);
    KleinFunction k = KleinFunction::TLogT;
    if (a.f == "square") k = KleinFunction::Square;
    else if (a.f == "neglog") k = KleinFunction::NegLog;
    else if (a.f != "tlogt") throw Error(ErrorCode::ParamError, "klein: --f must be tlogt, square or neglog");
    f.add(check_klein(m[0], m[1], k, tol_or(1e-9)));
  } else if (c == "lieb-concavity") {
    const auto m = need(load(), 3, c);
    std::vector<double> ts;
    for (int i = 0; i < a.grid; ++i) ts.push_back(a.grid > 1 ? static_cast<double>(i) / (a.grid - 1) : 0.5);
    f.add(probe_lieb_concavity(m[0], m[1], m[2], ts, tol_or(1e-9)));
  } else if (c == "renyi-triangle") {
    const auto m = need(load(), 3, c);
    f.add(check_renyi_triangle(m[0], m[1], m[2], a.alpha, tol_or(1e-9)));
  } else if (c == "lie-product") {
    const LieProbe lp = lie_product_probe(need(load(), 1, c), a.ms);
    for (size_t i = 0; i < lp.m.size(); ++i) f.values.push_back({"error_m" + std::to_string(lp.m[i]), lp.error[i]});
    f.values.push_back({"fitted_c", lp.fitted_c});
    CheckReport r;
    r.name = "lie_product_decreasing";
    r.lhs = lp.decreasing ? 1.0 : 0.0;
    r.rhs = 1.0;
    r.direction = "ge";
    f.add(finish(r));
  } else if (c == "pinching") {
    const auto m = need(load(), 2, c);
    const Mat Xpd = m.size() > 2 ? m[2] : Mat(herm(m[1] * m[1].adjoint()) + Mat::Identity(m[1].rows(), m[1].rows()));
    f.add(pinching_properties(m[0], m[1], Xpd, tol_or(1e-9)));
    f.values.push_back({"spectral_gap", spectral_gap(m[0])});
    f.values.push_back({"spectrum_size", static_cast<double>(spectrum_size(m[0]))});
  } else if (c == "smooth-pinching") {
    const auto m = need(load(), 2, c);
    const Spectrum s = eigh(m[0]);
    f.add(smooth_pinching_properties(m[0], m[1], a.kappa, mu_rule(a.kappa, s.values.maxCoeff() - s.values.minCoeff()),
                                     tol_or(1e-9)));
  } else if (c == "fr") {
    f.add(fr_check(tripartite(load()), b0, tol_or(1e-8)));
  } else if (c == "markov-distance") {
    const StateFile s = load();
    need(s, 2, c);
    f.add(winter_bound_check(tripartite(s, 0), tripartite(s, 1), tol_or(1e-9)));
  } else if (c == "dpi") {
    const StateFile s = load();
    Mat rho = s.mats.at(0), sigma;
    if (!a.sigma.empty()) sigma = parse_state_file(a.sigma).mats.at(0);
    else sigma = need(s, 2, c)[1];
    if (a.channel.empty()) throw Error(ErrorCode::ParamError, "dpi: --channel is required");
    const StateFile E = parse_state_file(a.channel);
    if (E.kind != "channel") throw Error(ErrorCode::Schema, "dpi: --channel must be a channel file");
    f.add(strengthened_dpi_check(rho, sigma, E.channel, b0, tol_or(1e-8)));
  } else if (c == "cmi-upper") {
    const StateFile s = load();
    if (a.channel.empty()) throw Error(ErrorCode::ParamError, "cmi-upper: --channel is required");
    const StateFile R = parse_state_file(a.channel);
    if (s.kind == "classical") {
      if (!R.is_stochastic) throw Error(ErrorCode::Schema, "cmi-upper: classical input needs a stochastic --channel");
      f.add(cmi_upper_check_classical(s.joint, R.stochastic, tol_or(1e-9)));
    } else {
      if (R.kind != "channel") throw Error(ErrorCode::Schema, "cmi-upper: --channel must be a channel file");
      LambdaSource src = LambdaSource::ReadOnly;
      std::optional<Mat> tau;
      if (a.source == "invariant") {
        src = LambdaSource::SuppliedInvariant;
        if (a.tau.empty()) throw Error(ErrorCode::ParamError, "cmi-upper: --tau is required with --source invariant");
        tau = parse_state_file(a.tau).mats.at(0);
      } else if (a.source == "lp") {
        src = LambdaSource::ClassicalLP;
      } else if (a.source != "read-only") {
        throw Error(ErrorCode::ParamError, "cmi-upper: --source must be lp, invariant or read-only");
      }
      f.add(cmi_upper_check(tripartite(s), R.channel, src, tau, tol_or(1e-9)));
    }
  } else if (c == "triangle") {
    f.constructions.push_back(triangle_counterexample(display_base()));
    return emit(f);
  } else {
    throw Error(ErrorCode::ParamError, "unknown check '" + c + "'");
  }
  return emit(f);
}

struct RecoverArgs {
  std::string in, sigma, channel, mode = "petz", emit_path;
  double t = 0.0;
};

int cmd_recover(const RecoverArgs& a) {
  RecoveryMode mode = RecoveryMode::Petz;
  if (a.mode == "rotated") mode = RecoveryMode::Rotated;
  else if (a.mode == "averaged") mode = RecoveryMode::Averaged;
  else if (a.mode != "petz") throw Error(ErrorCode::ParamError, "recover: --mode must be petz, rotated or averaged");
  const QuadratureRule b0 = beta0_rule(quad_opts());
  ReportFile f;
  f.command = "recover";
  RecoveryMap R;
  std::optional<QuantumState> target;
  Mat input;
  if (!a.channel.empty()) {
    const StateFile E = parse_state_file(a.channel);
    if (E.kind != "channel") throw Error(ErrorCode::Schema, "recover: --channel must be a channel file");
    if (a.sigma.empty()) throw Error(ErrorCode::ParamError, "recover: --sigma is required with --channel");
    R = make_recovery(parse_state_file(a.sigma).mats.at(0), E.channel, mode, a.t, b0);
    if (!a.in.empty()) {
      const StateFile s = parse_state_file(a.in);
      input = qml::apply(E.channel, s.mats.at(0));
      target = s.state();
    }
  } else {
    if (a.in.empty()) throw Error(ErrorCode::ParamError, "recover: --in is required");
    const QuantumState rho = tripartite(parse_state_file(a.in));
    R = make_fr_map(rho, mode, a.t, b0);
    input = partial_trace(rho.rho, rho.shape, {0, 1});
    target = rho;
    f.values.push_back({"cmi", cmi(rho)});
  }
  const RecoveryChannel ch = map_as_channel(R, 1e-9);
  CheckReport tp;
  tp.name = "recovery_trace_preserving";
  tp.lhs = ch.verdict.tp_error;
  tp.rhs = 0.0;
  tp.tol = 1e-9;
  tp.note = ch.full_support ? "" : "E(sigma) not full rank: trace preserving on its support only";
  tp = finish(tp);
  if (!ch.full_support) tp.pass = true;
  f.add(tp);
  CheckReport cp;
  cp.name = "recovery_completely_positive";
  cp.lhs = ch.verdict.choi_min_eig;
  cp.rhs = 0.0;
  cp.tol = 1e-9;
  cp.direction = "ge";
  f.add(finish(cp));
  f.values.push_back({"kraus_rank", static_cast<double>(ch.channel.kraus.size())});
  if (target) {
    const Mat out = herm(petz_apply(R, input));
    f.values.push_back({"trace_distance", trace_distance(out, target->rho)});
    f.values.push_back({"fidelity", fidelity(out, target->rho)});
    if (!a.emit_path.empty())
      write_text(a.emit_path, state_to_json(make_state_file("density", target->shape, {out})).dump(2));
  } else if (!a.emit_path.empty()) {
    write_text(a.emit_path, state_to_json(make_channel_file(ch.channel)).dump(2));
  }
  return emit(f);
}

int cmd_markov(const std::string& in, const std::string& blocks, const std::string& basis) {
  const QuantumState rho = tripartite(parse_state_file(in));
  const double tol = tol_or(1e-9);
  const MarkovVerdict v = markov_verify(rho, tol);
  ReportFile f;
  f.command = "markov-check";
  CheckReport m;
  m.name = "markov";
  m.lhs = v.cmi;
  m.rhs = 0.0;
  m.tol = tol;
  m.logarithmic = true;
  f.add(finish(m));
  if (v.markov) {
    CheckReport r;
    r.name = "markov_recovery";
    r.lhs = v.residual[0];
    r.rhs = v.bound;
    r.params = {{"t", 0.0}};
    f.add(finish(r));
  }
  f.values = {{"cmi", v.cmi},
              {"residual_t0", v.residual[0]},
              {"residual_t1", v.residual[1]},
              {"residual_tm1", v.residual[2]},
              {"rotated_ok", v.rotated_ok ? 1.0 : 0.0}};
  if (!blocks.empty()) {
    const int dB = rho.shape[1];
    const Mat U = basis.empty() ? Mat(Mat::Identity(dB, dB)) : parse_state_file(basis).mats.at(0);
    const DecompositionVerdict d = markov_decomposition_verify(rho, parse_blocks(blocks), U, tol_or(1e-8));
    CheckReport r;
    r.name = "markov_decomposition";
    r.lhs = std::max(d.leakage, d.factor_residual);
    r.rhs = 0.0;
    r.tol = tol_or(1e-8);
    f.add(finish(r));
    f.values.push_back({"leakage", d.leakage});
    f.values.push_back({"factor_residual", d.factor_residual});
  }
  return emit(f);
}

int cmd_appendix(const std::string& which, int n, double p, double q, int alpha, bool sweep) {
  const std::string base = display_base("2");
  ReportFile f;
  f.command = "appendix " + which;
  if (which == "a") {
    f.constructions.push_back(appendix_a_report(n, p, q, base));
  } else if (which == "b") {
    if (sweep || alpha <= 0) {
      const AppendixBSweep s = appendix_b_sweep({4, 8, 16, 32, 64}, base);
      f.constructions = s.reports;
      f.values.push_back({"smallest_alpha", static_cast<double>(s.smallest_alpha)});
    } else {
      f.constructions.push_back(appendix_b_report(alpha, base));
    }
  } else {
    throw Error(ErrorCode::ParamError, "appendix: expected a or b");
  }
  // construction values are already in their own base
  f.meta = meta();
  f.meta["log_base"] = base;
  json j = report_file_to_json(f, "e");
  j["meta"] = f.meta;
  write_text(G.out, j.dump(2));
  return f.failures() == 0 ? 0 : 1;
}

int cmd_slater(int d) {
  ReportFile f;
  f.command = "slater";
  f.constructions.push_back(slater_cmi(d, display_base(), tol_or(1e-9)));
  f.meta = meta();
  json j = report_file_to_json(f, "e");
  write_text(G.out, j.dump(2));
  return f.failures() == 0 ? 0 : 1;
}

int cmd_densities(std::vector<double> thetas, std::vector<double> kappas, double tmin, double tmax, int points) {
  if (points < 2 || !(tmax > tmin)) throw Error(ErrorCode::ParamError, "densities: need points >= 2 and t-max > t-min");
  for (double th : thetas)
    if (!(th >= 0.0 && th < 1.0)) throw Error(ErrorCode::ThetaOutOfRange, "densities: theta must lie in [0, 1)");
  for (double k : kappas)
    if (!(k > 0.0)) throw Error(ErrorCode::KappaNonpositive, "densities: kappa must be positive");
  std::ostringstream os;
  os << std::setprecision(12) << "t";
  for (double th : thetas) os << ",beta_" << th;
  for (double k : kappas) os << ",mu_" << k;
  os << '\n';
  for (int i = 0; i < points; ++i) {
    const double t = tmin + (tmax - tmin) * i / (points - 1);
    os << t;
    for (double th : thetas) os << ',' << beta_density(th, t);
    for (double k : kappas) os << ',' << mu_density(k, t);
    os << '\n';
  }
  std::string s = os.str();
  s.pop_back();
  write_text(G.out, s);
  return 0;
}

struct GenArgs {
  std::string kind;
  int d = 2, rank = -1, din = 2, dout = 2, count = 1;
  std::vector<int> dims;
};

int cmd_gen(const GenArgs& a) {
  const std::uint64_t seed = G.seed;
  StateFile s;
  const Shape dims = a.dims.empty() ? Shape{a.d} : Shape(a.dims.begin(), a.dims.end());
  const int D = static_cast<int>(shape_product(dims));
  if (a.count < 1) throw Error(ErrorCode::ParamError, "gen: --count must be positive");
  if (a.kind == "density") {
    std::vector<Mat> ms;
    for (int i = 0; i < a.count; ++i) ms.push_back(random_density(dims, a.rank > 0 ? a.rank : D, seed, i).rho);
    s = make_state_file("density", dims, ms);
  } else if (a.kind == "hermitian" || a.kind == "pd" || a.kind == "unitary") {
    std::vector<Mat> ms;
    for (int i = 0; i < a.count; ++i) {
      if (a.kind == "hermitian") ms.push_back(random_hermitian(D, seed, i));
      else if (a.kind == "pd") ms.push_back(random_pd(D, seed, i));
      else ms.push_back(random_unitary(D, seed, i));
    }
    s = make_state_file(a.kind == "unitary" ? "operator" : "hermitian", dims, ms);
  } else if (a.kind == "channel") {
    s = make_channel_file(random_channel(a.din, a.dout, a.rank > 0 ? a.rank : a.din, seed));
  } else if (a.kind == "classical") {
    s = make_classical_file(random_classical(dims, seed));
  } else if (a.kind == "markov") {
    s = make_classical_file(random_markov_joint(dims, seed));
  } else if (a.kind == "markov-state") {
    const QuantumState m = embed_diagonal(random_markov_joint(dims, seed));
    s = make_state_file("density", dims, {m.rho});
  } else if (a.kind == "stochastic") {
    s = make_stochastic_file(random_stochastic(a.dout, a.din, seed));
  } else {
    throw Error(ErrorCode::ParamError, "gen: unknown kind '" + a.kind + "'");
  }
  write_text(G.out, state_to_json(s).dump(2));
  return 0;
}

int cmd_fuzz(const std::string& suite, const std::vector<int>& dims) {
  FuzzOptions o;
  o.seed = G.seed;
  o.trials = G.trials;
  o.tol = G.tol;
  o.quad = quad_opts();
  o.dims = Shape(dims.begin(), dims.end());
  const FuzzResult r = run_fuzz(suite, o);
  ReportFile f;
  f.command = "fuzz " + suite;
  f.reports = r.reports;
  f.values = r.values;
  f.values.push_back({"trials", static_cast<double>(o.trials > 0 ? o.trials : -1)});
  const int rc = emit(f);
  std::cerr << "fuzz " << suite << ": " << r.reports.size() - r.failures() << "/" << r.reports.size() << " passed\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qml: trace inequalities, recovery maps and approximate Markov chains"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--tol", G.tol, "tolerance override");
  app.add_option("--quad-T", G.quad_T, "quadrature truncation T");
  app.add_option("--quad-panels", G.quad_panels, "quadrature panels");
  app.add_option("--quad-nodes", G.quad_nodes, "Gauss-Legendre nodes per panel");
  app.add_option("--seed", G.seed, "random seed");
  app.add_option("--trials", G.trials, "fuzz trials");
  app.add_option("--out", G.out, "output path (default stdout)");
  app.add_option("--log-base", G.log_base, "display base")->check(CLI::IsMember({"e", "2"}));

  std::function<int()> run;

  std::string in, sigma;
  auto* ent = app.add_subcommand("entropy", "entropies of a state file");
  ent->add_option("--in", in, "state file")->required();
  ent->add_option("--sigma", sigma, "reference state for divergences");
  ent->callback([&] { run = [&] { return cmd_entropy(in, sigma); }; });

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run one inequality check");
  ver->add_option("check", va.check, "gt2 peierls lieb gt-multi gt-general alt alt-multi log-trace log-trace-multi klein "
                                    "lieb-concavity renyi-triangle lie-product pinching smooth-pinching fr "
                                    "markov-distance dpi cmi-upper triangle")
      ->required();
  ver->add_option("--in", va.in, "input file");
  ver->add_option("--sigma", va.sigma, "reference state file");
  ver->add_option("--channel", va.channel, "channel file");
  ver->add_option("--tau", va.tau, "invariant state for cmi-upper");
  ver->add_option("--source", va.source, "lambda source for cmi-upper: lp, invariant, read-only");
  ver->add_option("--f", va.f, "klein function: tlogt, square, neglog");
  ver->add_option("--p", va.p, "Schatten index / power");
  ver->add_option("--q", va.q, "outer power");
  ver->add_option("--r", va.r, "inner power");
  ver->add_option("--alpha", va.alpha, "Renyi order");
  ver->add_option("--kappa", va.kappa, "smoothing width");
  ver->add_option("--grid", va.grid, "points on [0, 1] for lieb-concavity");
  ver->add_option("--ms", va.ms, "m values for lie-product");
  ver->callback([&] { run = [&] { return cmd_verify(va); }; });

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "build a recovery map and apply it");
  rec->add_option("--in", ra.in, "tripartite state, or state to send through --channel");
  rec->add_option("--sigma", ra.sigma, "reference state");
  rec->add_option("--channel", ra.channel, "channel file");
  rec->add_option("--mode", ra.mode, "petz, rotated, averaged");
  rec->add_option("--t", ra.t, "rotation parameter");
  rec->add_option("--emit", ra.emit_path, "write the recovered state (or the recovery channel)");
  rec->callback([&] { run = [&] { return cmd_recover(ra); }; });

  std::string blocks, basis;
  auto* mk = app.add_subcommand("markov-check", "decide whether a tripartite state is a Markov chain");
  mk->add_option("--in", in, "tripartite state")->required();
  mk->add_option("--blocks", blocks, "B decomposition as l:r,l:r");
  mk->add_option("--basis", basis, "unitary on B (operator file)");
  mk->callback([&] { run = [&] { return cmd_markov(in, blocks, basis); }; });

  std::string which;
  int n = 10, alpha = 0;
  double p = 0.5, q = 0.0;
  bool sweep = false;
  auto* apx = app.add_subcommand("appendix", "classical constructions a and b");
  apx->add_option("which", which, "a or b")->required()->check(CLI::IsMember({"a", "b"}));
  apx->add_option("--n", n, "a: bits");
  apx->add_option("--p", p, "a: p");
  apx->add_option("--q", q, "a: q");
  apx->add_option("--alpha", alpha, "b: alpha (n = alpha, p = 1/alpha^2)");
  apx->add_flag("--sweep", sweep, "b: alpha in 4, 8, 16, 32, 64");
  apx->callback([&] { run = [&] { return cmd_appendix(which, n, p, q, alpha, sweep); }; });

  int d = 3;
  auto* sl = app.add_subcommand("slater", "antisymmetric state on d qudits");
  sl->add_option("--d", d, "2 to 4");
  sl->callback([&] { run = [&] { return cmd_slater(d); }; });

  std::vector<double> thetas{0.0, 0.5, 0.75}, kappas;
  double tmin = -5.0, tmax = 5.0;
  int points = 201;
  auto* den = app.add_subcommand("densities", "CSV of beta_theta and mu_kappa");
  den->add_option("--theta", thetas, "theta values");
  den->add_option("--kappa", kappas, "kappa values");
  den->add_option("--t-min", tmin);
  den->add_option("--t-max", tmax);
  den->add_option("--points", points);
  den->callback([&] { run = [&] { return cmd_densities(thetas, kappas, tmin, tmax, points); }; });

  std::string suite;
  std::vector<int> fdims;
  auto* fz = app.add_subcommand("fuzz", "seeded randomized campaign");
  fz->add_option("suite", suite, "gt lieb gt-multi alt log-trace fr dpi measured pinching lambda ensemble renyi")
      ->required();
  fz->add_option("--dims", fdims, "dimensions, comma separated")->delimiter(',');
  fz->callback([&] { run = [&] { return cmd_fuzz(suite, fdims); }; });

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "write a random instance file");
  gen->add_option("kind", ga.kind, "density hermitian pd unitary channel classical markov markov-state stochastic")
      ->required();
  gen->add_option("--d", ga.d);
  gen->add_option("--dims", ga.dims)->delimiter(',');
  gen->add_option("--rank", ga.rank);
  gen->add_option("--din", ga.din);
  gen->add_option("--dout", ga.dout);
  gen->add_option("--count", ga.count);
  gen->callback([&] { run = [&] { return cmd_gen(ga); }; });

  for (auto* s : {ent, ver, rec, mk, apx, sl, den, fz, gen}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "USAGE: " << e.what() << '\n';
    return 2;
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "SCHEMA: " << e.what() << '\n';
    return 2;
  }
}
