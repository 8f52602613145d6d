#include <cmath>
#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qml/generators.hpp"
#include "qml/io.hpp"

using namespace qml;
namespace o = oracle;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

json qubit_json() {
  return json::parse(R"({"kind": "density", "dims": [2], "data": [[[0.75, 0], [0, 0.25]], [[0, -0.25], [0.25, 0]]]})");
}

}  // namespace

TEST(StateFile, CanonicalQubitRoundTrip) {
  const StateFile s = parse_state(qubit_json());
  ASSERT_EQ(s.mats.size(), 1u);
  EXPECT_EQ(s.mats[0](0, 1), cplx(0.0, 0.25));
  EXPECT_EQ(s.mats[0](1, 0), cplx(0.0, -0.25));
  const json canon = state_to_json(s);
  EXPECT_EQ(canon["schema"], kStateSchema);
  const StateFile t = parse_state(canon);
  EXPECT_EQ(state_to_json(t).dump(), canon.dump());
  EXPECT_EQ((t.mats[0] - s.mats[0]).norm(), 0.0);
  // bare real entries are accepted
  const StateFile r = parse_state(json::parse(R"({"kind": "density", "data": [[0.5, 0], [0, 0.5]]})"));
  EXPECT_EQ(r.dims, (Shape{2}));
}

TEST(StateFile, RandomRoundTripsAreExact) {
  for (int seed = 0; seed < 5; ++seed) {
    const QuantumState rho = random_density(Shape{2, 3}, 6, seed);
    const StateFile a = make_state_file("density", rho.shape, {rho.rho});
    const json j = state_to_json(a);
    const StateFile b = parse_state(json::parse(j.dump()));
    EXPECT_EQ((b.mats[0] - rho.rho).norm(), 0.0);
    EXPECT_EQ(b.dims, rho.shape);

    const KrausChannel E = random_channel(2, 3, 2, seed);
    const StateFile c = parse_state(json::parse(state_to_json(make_channel_file(E)).dump()));
    ASSERT_EQ(c.channel.kraus.size(), E.kraus.size());
    for (size_t k = 0; k < E.kraus.size(); ++k) EXPECT_EQ((c.channel.kraus[k] - E.kraus[k]).norm(), 0.0);

    const ClassicalJoint P = random_classical({2, 3, 2}, seed);
    const StateFile d = parse_state(json::parse(state_to_json(make_classical_file(P)).dump()));
    EXPECT_EQ(d.joint.p, P.p);
    EXPECT_EQ(d.joint.shape, P.shape);

    const Eigen::MatrixXd W = random_stochastic(3, 2, seed);
    const StateFile w = parse_state(json::parse(state_to_json(make_stochastic_file(W)).dump()));
    EXPECT_TRUE(w.is_stochastic);
    EXPECT_EQ((w.stochastic - W).norm(), 0.0);

    const Mat H1 = random_hermitian(3, seed, 0), H2 = random_hermitian(3, seed, 1);
    const StateFile h = parse_state(json::parse(state_to_json(make_state_file("hermitian", {3}, {H1, H2})).dump()));
    ASSERT_EQ(h.mats.size(), 2u);
    EXPECT_EQ((h.mats[1] - H2).norm(), 0.0);
  }
}

TEST(StateFile, OperatorKindSkipsHermiticity) {
  Stream s(3, 0);
  const Mat L = gaussian_matrix(s, 2, 2);
  const StateFile f = parse_state(state_to_json(make_state_file("operator", {2}, {L})));
  EXPECT_EQ((f.mats[0] - L).norm(), 0.0);
  EXPECT_EQ(code_of([&] { parse_state(state_to_json(make_state_file("hermitian", {2}, {L}))); }),
            ErrorCode::NotHermitian);
}

TEST(StateFile, ValidationCodes) {
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "density", "data": [[0.7, 0], [0, 0.5]]})")); }),
            ErrorCode::BadTrace);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "density", "data": [[1.5, 0], [0, -0.5]]})")); }),
            ErrorCode::NotPSD);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "density", "data": [[0.5, 0.1], [0, 0.5]]})")); }),
            ErrorCode::NotHermitian);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "density", "dims": [3], "data": [[1, 0], [0, 0]]})")); }),
            ErrorCode::ShapeError);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "density", "data": [[1, 0, 0], [0, 0]]})")); }),
            ErrorCode::Schema);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "density", "data": [[[1, 0, 3], 0], [0, 0]]})")); }),
            ErrorCode::Schema);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"kind": "photon", "data": []})")); }), ErrorCode::Schema);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"({"data": [[1]]})")); }), ErrorCode::Schema);
  EXPECT_EQ(code_of([] { parse_state(json::parse(R"([1, 2])")); }), ErrorCode::Schema);
  // scaled Kraus operator: not trace preserving
  KrausChannel E = random_channel(2, 2, 2, 1);
  E.kraus[0] *= 1.5;
  EXPECT_EQ(code_of([&] { parse_state(state_to_json(make_channel_file(E))); }), ErrorCode::NotTPCP);
  EXPECT_EQ(code_of([] {
              parse_state(json::parse(R"({"kind": "classical", "data": [[0.5, 0.2], [0.2, 0.2]]})"));
            }),
            ErrorCode::BadTrace);
  EXPECT_EQ(code_of([] {
              parse_state(json::parse(R"({"kind": "classical", "data": [[0.5, 0.2], [0.3]]})"));
            }),
            ErrorCode::Schema);
  EXPECT_EQ(code_of([] {
              parse_state(json::parse(R"({"kind": "classical", "stochastic": true, "data": [[0.5, 0.2], [0.4, 0.8]]})"));
            }),
            ErrorCode::NotStochastic);
}

TEST(StateFile, ParseErrorsCarryLineAndColumn) {
  const std::string text = "{\n  \"kind\": \"density\",\n  \"data\": [[1, 0], [0 0]]\n}";
  try {
    parse_json_text(text, "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Schema);
    EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { read_text("/nonexistent/dir/x.json"); }), ErrorCode::Io);
}

TEST(StateFile, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "qml_io_roundtrip.json";
  const StateFile a = make_state_file("density", {2}, {random_density(2, 2, 9).rho});
  write_text(path.string(), state_to_json(a).dump(2));
  const StateFile b = parse_state_file(path.string());
  EXPECT_EQ((a.mats[0] - b.mats[0]).norm(), 0.0);
  std::filesystem::remove(path);
}

TEST(Report, NumbersAndRoundTrip) {
  EXPECT_EQ(num(kInf), "inf");
  EXPECT_EQ(num(-kInf), "-inf");
  EXPECT_EQ(num(std::nan("")), "nan");
  EXPECT_EQ(num(1.5), 1.5);
  EXPECT_TRUE(std::isinf(num_value("inf", "x")));
  EXPECT_EQ(code_of([] { num_value("seven", "x"); }), ErrorCode::Schema);

  CheckReport r = check_gt2(o::pauli('x'), o::pauli('z'));
  r.params = {{"d", 2.0}};
  r.note = "pauli";
  const json j = report_to_json(r);
  const CheckReport back = report_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.name, r.name);
  EXPECT_EQ(back.lhs, r.lhs);
  EXPECT_EQ(back.rhs, r.rhs);
  EXPECT_EQ(back.margin, r.margin);
  EXPECT_EQ(back.pass, r.pass);
  EXPECT_EQ(back.direction, r.direction);
  EXPECT_EQ(back.get("d"), 2.0);
  EXPECT_EQ(back.get("equality"), r.get("equality"));
  EXPECT_EQ(report_to_json(back).dump(), j.dump());
  EXPECT_EQ(code_of([] { report_from_json(json::parse(R"({"name": "x"})")); }), ErrorCode::Schema);
}

TEST(Report, DisplayBaseOnlyChangesDisplay) {
  CheckReport r;
  r.name = "entropic";
  r.logarithmic = true;
  r.lhs = std::log(2.0);
  r.rhs = 2 * std::log(2.0);
  r.tol = 1e-9;
  r = finish(r);
  const json e = report_to_json(r, "e"), b = report_to_json(r, "2");
  EXPECT_EQ(e["lhs"], b["lhs"]);
  EXPECT_FALSE(e.contains("display"));
  EXPECT_NEAR(b["display"]["lhs"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(b["display"]["margin"].get<double>(), 1.0, 1e-15);
  CheckReport plain = r;
  plain.logarithmic = false;
  EXPECT_FALSE(report_to_json(plain, "2").contains("display"));
}

TEST(Report, FileSummary) {
  ReportFile f;
  f.command = "verify test";
  CheckReport good, bad;
  good.name = "good";
  good.lhs = 0;
  good.rhs = 1;
  good = finish(good);
  bad.name = "bad";
  bad.lhs = 3;
  bad.rhs = 1;
  bad = finish(bad);
  f.add({good, bad});
  f.constructions.push_back(triangle_counterexample());
  f.values = {{"entropy", std::log(2.0)}};
  EXPECT_EQ(f.failures(), 1);
  const json j = report_file_to_json(f, "2");
  EXPECT_EQ(j["schema"], kReportSchema);
  EXPECT_EQ(j["summary"]["total"], 3);
  EXPECT_EQ(j["summary"]["pass"], 2);
  EXPECT_EQ(j["summary"]["fail"], 1);
  EXPECT_EQ(j["summary"]["worst_check"], "bad");
  EXPECT_EQ(j["summary"]["worst_margin"], -2.0);
  EXPECT_NEAR(j["display"]["values"]["entropy"].get<double>(), 1.0, 1e-15);
  EXPECT_EQ(j["values"]["entropy"], std::log(2.0));
  // stable field order
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema", "command", "reports", "constructions", "values", "display",
                                            "summary", "meta"}));
  ReportFile empty;
  EXPECT_TRUE(report_file_to_json(empty)["summary"]["worst_margin"].is_null());
}
