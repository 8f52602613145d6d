#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qml/channels.hpp"
#include "qml/constructions.hpp"
#include "qml/entropy.hpp"
#include "qml/linalg.hpp"
#include "qml/traceineq.hpp"

namespace qml {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "qml-report/1";
inline constexpr const char* kStateSchema = "qml-state/1";

// infinities and NaN as strings; JSON has no literal for them
inline json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double num_value(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw Error(ErrorCode::Schema, where + ": expected a number");
}

// ---- matrices

inline json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

// rows of [re, im] pairs; a bare number is read as real
inline Mat matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Schema, where + ": matrix must be a non-empty array of rows");
  const long rows = static_cast<long>(j.size());
  if (!j[0].is_array()) throw Error(ErrorCode::Schema, where + ": row 0 is not an array");
  const long cols = static_cast<long>(j[0].size());
  Mat M(rows, cols);
  for (long i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<long>(row.size()) != cols)
      throw Error(ErrorCode::Schema, where + ": row " + std::to_string(i) + " has the wrong length");
    for (long k = 0; k < cols; ++k) {
      const auto& e = row[k];
      const std::string at = where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      if (e.is_number()) {
        M(i, k) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        M(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw Error(ErrorCode::Schema, at + ": entry must be [re, im]");
      }
      if (!std::isfinite(M(i, k).real()) || !std::isfinite(M(i, k).imag()))
        throw Error(ErrorCode::NonFiniteValue, at + ": non-finite entry");
    }
  }
  return M;
}

// message without the leading code name, for rewrapping with context
inline std::string bare_message(const Error& e) {
  const std::string w = e.what();
  const std::string pre = std::string(code_name(e.code())) + ": ";
  return w.rfind(pre, 0) == 0 ? w.substr(pre.size()) : w;
}

inline bool is_matrix_list(const json& j) {
  // list of matrices: array -> array(rows) -> array(row) -> [re, im] or number
  return j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array() &&
         !j[0][0].empty() && j[0][0][0].is_array();
}

// ---- state files

struct StateFile {
  std::string kind;  // density | hermitian | operator | channel | classical
  Shape dims;
  std::vector<Mat> mats;  // density / hermitian (one or more)
  KrausChannel channel;
  ClassicalJoint joint;             // classical, when a distribution
  Eigen::MatrixXd stochastic;       // classical, when "stochastic": true (W(y', y))
  bool is_stochastic = false;

  QuantumState state(size_t i = 0) const { return QuantumState{mats.at(i), dims}; }
};

namespace detail {
inline void flatten_real(const json& j, std::vector<double>& out, Shape& shape, size_t depth, const std::string& where) {
  if (j.is_number()) {
    if (depth != shape.size() && !shape.empty()) throw Error(ErrorCode::Schema, where + ": ragged nested array");
    out.push_back(j.get<double>());
    return;
  }
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Schema, where + ": expected nested arrays of numbers");
  if (depth == shape.size()) shape.push_back(static_cast<int>(j.size()));
  else if (shape[depth] != static_cast<int>(j.size())) throw Error(ErrorCode::Schema, where + ": ragged nested array");
  for (size_t i = 0; i < j.size(); ++i) flatten_real(j[i], out, shape, depth + 1, where);
}
}  // namespace detail

inline StateFile parse_state(const json& j, const std::string& src = "<input>") {
  if (!j.is_object()) throw Error(ErrorCode::Schema, src + ": top level must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw Error(ErrorCode::Schema, src + ": missing string 'kind'");
  if (!j.contains("data")) throw Error(ErrorCode::Schema, src + ": missing 'data'");
  StateFile s;
  s.kind = j["kind"].get<std::string>();
  if (j.contains("dims")) {
    if (!j["dims"].is_array()) throw Error(ErrorCode::Schema, src + ": 'dims' must be an array");
    for (const auto& d : j["dims"]) {
      if (!d.is_number_integer() || d.get<int>() < 1)
        throw Error(ErrorCode::Schema, src + ": 'dims' entries must be positive integers");
      s.dims.push_back(d.get<int>());
    }
  }
  const json& data = j["data"];
  if (s.kind == "density" || s.kind == "hermitian" || s.kind == "operator") {
    if (is_matrix_list(data)) {
      for (size_t i = 0; i < data.size(); ++i)
        s.mats.push_back(matrix_from_json(data[i], src + ": data[" + std::to_string(i) + "]"));
    } else {
      s.mats.push_back(matrix_from_json(data, src + ": data"));
    }
    for (size_t i = 0; i < s.mats.size(); ++i) {
      const Mat& M = s.mats[i];
      const std::string at = src + ": data[" + std::to_string(i) + "]";
      if (M.rows() != M.cols()) throw Error(ErrorCode::ShapeError, at + ": matrix is not square");
      if (s.dims.empty()) s.dims = {static_cast<int>(M.rows())};
      if (shape_product(s.dims) != M.rows()) throw Error(ErrorCode::ShapeError, at + ": dims do not match the matrix");
      const double scale = std::max(1.0, M.norm());
      if (s.kind != "operator" && (M - M.adjoint()).norm() > 1e-10 * scale) throw Error(ErrorCode::NotHermitian, at + ": not Hermitian");
      if (s.kind == "density") {
        try {
          validate_state(QuantumState{M, s.dims});
        } catch (const Error& e) {
          throw Error(e.code(), at + ": " + bare_message(e));
        }
      }
    }
  } else if (s.kind == "channel") {
    if (!data.is_array() || data.empty()) throw Error(ErrorCode::Schema, src + ": channel data must list Kraus operators");
    for (size_t i = 0; i < data.size(); ++i)
      s.channel.kraus.push_back(matrix_from_json(data[i], src + ": data[" + std::to_string(i) + "]"));
    s.channel.dout = static_cast<int>(s.channel.kraus[0].rows());
    s.channel.din = static_cast<int>(s.channel.kraus[0].cols());
    if (s.dims.empty()) s.dims = {s.channel.din, s.channel.dout};
    if (s.dims.size() != 2 || s.dims[0] != s.channel.din || s.dims[1] != s.channel.dout)
      throw Error(ErrorCode::ShapeError, src + ": channel dims must be [din, dout] matching the Kraus operators");
    validate_kraus(s.channel);
    const TpcpVerdict v = is_tpcp(s.channel, 1e-10);
    if (!v.ok())
      throw Error(ErrorCode::NotTPCP, src + ": channel is not TPCP (tp error " + std::to_string(v.tp_error) + ")");
  } else if (s.kind == "classical") {
    std::vector<double> flat;
    Shape shape;
    detail::flatten_real(data, flat, shape, 0, src + ": data");
    if (s.dims.empty()) s.dims = shape;
    if (s.dims != shape) throw Error(ErrorCode::ShapeError, src + ": dims do not match the nested data");
    for (double v : flat)
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, src + ": non-finite entry");
    s.is_stochastic = j.value("stochastic", false);
    if (s.is_stochastic) {
      if (shape.size() != 2) throw Error(ErrorCode::ShapeError, src + ": stochastic matrix must be two-dimensional");
      s.stochastic.resize(shape[0], shape[1]);
      for (int r = 0; r < shape[0]; ++r)
        for (int c = 0; c < shape[1]; ++c) s.stochastic(r, c) = flat[static_cast<size_t>(r) * shape[1] + c];
      validate_stochastic(s.stochastic, 1e-10);
    } else {
      s.joint = ClassicalJoint{shape, flat};
      try {
        validate_joint(s.joint, 1e-10);
      } catch (const Error& e) {
        throw Error(e.code(), src + ": " + bare_message(e));
      }
    }
  } else {
    throw Error(ErrorCode::Schema, src + ": unknown kind '" + s.kind + "'");
  }
  return s;
}

inline json state_to_json(const StateFile& s) {
  json j;
  j["schema"] = kStateSchema;
  j["kind"] = s.kind;
  j["dims"] = s.dims;
  if (s.kind == "density" || s.kind == "hermitian" || s.kind == "operator") {
    if (s.mats.size() == 1) {
      j["data"] = matrix_to_json(s.mats[0]);
    } else {
      json arr = json::array();
      for (const auto& M : s.mats) arr.push_back(matrix_to_json(M));
      j["data"] = arr;
    }
  } else if (s.kind == "channel") {
    json arr = json::array();
    for (const auto& K : s.channel.kraus) arr.push_back(matrix_to_json(K));
    j["data"] = arr;
  } else if (s.kind == "classical") {
    if (s.is_stochastic) {
      j["stochastic"] = true;
      json rows = json::array();
      for (Eigen::Index r = 0; r < s.stochastic.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < s.stochastic.cols(); ++c) row.push_back(s.stochastic(r, c));
        rows.push_back(row);
      }
      j["data"] = rows;
    } else {
      // nest the flat row-major vector by shape
      std::function<json(size_t, size_t)> nest = [&](size_t depth, size_t offset) -> json {
        json arr = json::array();
        size_t stride = 1;
        for (size_t k = depth + 1; k < s.dims.size(); ++k) stride *= s.dims[k];
        for (int i = 0; i < s.dims[depth]; ++i) {
          if (depth + 1 == s.dims.size())
            arr.push_back(s.joint.p[offset + i]);
          else
            arr.push_back(nest(depth + 1, offset + i * stride));
        }
        return arr;
      };
      j["data"] = nest(0, 0);
    }
  }
  return j;
}

inline StateFile make_state_file(const std::string& kind, const Shape& dims, std::vector<Mat> mats) {
  StateFile s;
  s.kind = kind;
  s.dims = dims;
  s.mats = std::move(mats);
  return s;
}

inline StateFile make_channel_file(const KrausChannel& E) {
  StateFile s;
  s.kind = "channel";
  s.dims = {E.din, E.dout};
  s.channel = E;
  return s;
}

inline StateFile make_classical_file(const ClassicalJoint& P) {
  StateFile s;
  s.kind = "classical";
  s.dims = P.shape;
  s.joint = P;
  return s;
}

inline StateFile make_stochastic_file(const Eigen::MatrixXd& W) {
  StateFile s;
  s.kind = "classical";
  s.dims = {static_cast<int>(W.rows()), static_cast<int>(W.cols())};
  s.stochastic = W;
  s.is_stochastic = true;
  return s;
}

// parse errors carry line and column
inline json parse_json_text(const std::string& text, const std::string& src) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    size_t line = 1, col = 1;
    for (size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::Schema, src + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline StateFile parse_state_file(const std::string& path) { return parse_state(parse_json_text(read_text(path), path), path); }

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text << '\n';
}

// ---- reports

inline json params_to_json(const Params& ps) {
  json o = json::object();
  for (const auto& [k, v] : ps) o[k] = num(v);
  return o;
}

inline json report_to_json(const CheckReport& r, const std::string& display_base = "e") {
  json j;
  j["name"] = r.name;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["margin"] = num(r.margin);
  j["pass"] = r.pass;
  j["tol"] = r.tol;
  j["direction"] = r.direction;
  if (!r.params.empty()) j["params"] = params_to_json(r.params);
  if (!r.extra.empty()) j["extra"] = params_to_json(r.extra);
  if (r.quad) {
    j["quad"] = {{"density", r.quad->density}, {"param", r.quad->param},   {"T", r.quad->T},
                 {"panels", r.quad->panels},   {"nodes", r.quad->nodes},   {"raw_mass", r.quad->raw_mass}};
  }
  if (!r.note.empty()) j["note"] = r.note;
  if (r.logarithmic && display_base == "2") {
    const double l2 = std::log(2.0);
    j["display"] = {{"base", "2"}, {"lhs", num(r.lhs / l2)}, {"rhs", num(r.rhs / l2)}, {"margin", num(r.margin / l2)}};
  }
  return j;
}

inline CheckReport report_from_json(const json& j) {
  CheckReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.lhs = num_value(j.at("lhs"), "lhs");
    r.rhs = num_value(j.at("rhs"), "rhs");
    r.margin = num_value(j.at("margin"), "margin");
    r.pass = j.at("pass").get<bool>();
    r.tol = j.at("tol").get<double>();
    r.direction = j.value("direction", std::string("le"));
    if (j.contains("params"))
      for (const auto& [k, v] : j["params"].items()) r.params.push_back({k, num_value(v, k)});
    if (j.contains("extra"))
      for (const auto& [k, v] : j["extra"].items()) r.extra.push_back({k, num_value(v, k)});
    r.note = j.value("note", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("report: ") + e.what());
  }
  return r;
}

inline json construction_to_json(const ConstructionReport& c, const std::string& display_base = "e") {
  json j;
  j["name"] = c.name;
  j["log_base"] = c.log_base;
  j["params"] = params_to_json(c.params);
  j["values"] = params_to_json(c.values);
  json checks = json::array();
  for (const auto& r : c.checks) checks.push_back(report_to_json(r, display_base));
  j["checks"] = checks;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

struct ReportFile {
  std::string command;
  std::vector<CheckReport> reports;
  std::vector<ConstructionReport> constructions;
  Params values;  // informational numbers (entropies, sweeps)
  json meta = json::object();

  void add(const CheckReport& r) { reports.push_back(r); }
  void add(const std::vector<CheckReport>& rs) { reports.insert(reports.end(), rs.begin(), rs.end()); }

  std::vector<const CheckReport*> all_checks() const {
    std::vector<const CheckReport*> out;
    for (const auto& r : reports) out.push_back(&r);
    for (const auto& c : constructions)
      for (const auto& r : c.checks) out.push_back(&r);
    return out;
  }
  int failures() const {
    int f = 0;
    for (const auto* r : all_checks()) f += r->pass ? 0 : 1;
    return f;
  }
};

inline json report_file_to_json(const ReportFile& f, const std::string& display_base = "e") {
  json j;
  j["schema"] = kReportSchema;
  j["command"] = f.command;
  json reps = json::array();
  for (const auto& r : f.reports) reps.push_back(report_to_json(r, display_base));
  j["reports"] = reps;
  if (!f.constructions.empty()) {
    json cs = json::array();
    for (const auto& c : f.constructions) cs.push_back(construction_to_json(c, display_base));
    j["constructions"] = cs;
  }
  if (!f.values.empty()) {
    json v = params_to_json(f.values);
    j["values"] = v;
    if (display_base == "2") {
      json d = json::object();
      for (const auto& [k, x] : f.values) d[k] = num(x / std::log(2.0));
      j["display"] = {{"base", "2"}, {"values", d}};
    }
  }
  const auto checks = f.all_checks();
  int pass = 0;
  double worst = kInf;
  std::string worst_name;
  for (const auto* r : checks) {
    pass += r->pass ? 1 : 0;
    if (worst_name.empty() || r->margin < worst) {
      worst = r->margin;
      worst_name = r->name;
    }
  }
  j["summary"] = {{"total", checks.size()},
                  {"pass", pass},
                  {"fail", static_cast<int>(checks.size()) - pass},
                  {"worst_margin", checks.empty() ? json(nullptr) : num(worst)},
                  {"worst_check", worst_name}};
  j["meta"] = f.meta;
  return j;
}

}  // namespace qml
