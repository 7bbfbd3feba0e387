#pragma once

// File formats: graph / parameter / prior JSON, CSV datasets, NDJSON traces,
// summary and plot-data CSV. JSON uses 1-based vertex labels and row-major
// nested arrays for matrices.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgdg/error.hpp"
#include "sgdg/graph.hpp"
#include "sgdg/inference.hpp"
#include "sgdg/linalg.hpp"
#include "sgdg/sgdg.hpp"

namespace sgdg::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("write failed for " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// Vectors and matrices

inline json to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Matrix& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

inline Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(what + " entries must be numbers");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

inline Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParseError(what + " must be a nonempty array of rows");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(what + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ParseError(what + " entries must be numbers");
      m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Graphs

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i + 1, j + 1});
  return {{"k", g.size()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("edges"))
    throw ParseError("graph needs fields \"k\" and \"edges\"");
  if (!j["k"].is_number_integer() || j["k"].get<int>() < 1)
    throw ParseError("\"k\" must be a positive integer");
  const int k = j["k"].get<int>();
  if (!j["edges"].is_array()) throw ParseError("\"edges\" must be an array");
  Graph g(k);
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw ParseError("each edge must be a pair of integers");
    const int a = e[0].get<int>(), b = e[1].get<int>();
    if (a < 1 || b < 1 || a > k || b > k || a == b)
      throw ParseError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                       ") is out of range or a self-loop");
    g.add_edge(a - 1, b - 1);
  }
  return g;
}

inline Graph read_graph(const std::string& path) {
  return graph_from_json(parse_json(read_file(path), path));
}

inline void write_graph(const std::string& path, const Graph& g) {
  write_file(path, graph_to_json(g).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Parameters

/// Reparametrised parameters (mu, delta, omega2, L) with their graph.
inline json params_to_json(const ReparamParams& r, const Graph& g) {
  return {{"graph", graph_to_json(g)},
          {"mu", to_json(r.mu)},
          {"delta", to_json(r.delta)},
          {"omega2", to_json(r.omega2)},
          {"L", to_json(r.L)}};
}

struct ParamsFile {
  ReparamParams params;
  Graph graph;
};

inline ParamsFile params_from_json(const json& j) {
  for (const char* key : {"graph", "mu", "delta", "omega2", "L"})
    if (!j.contains(key)) throw ParseError(std::string("params need \"") + key + "\"");
  ParamsFile f{{vector_from_json(j["mu"], "mu"), vector_from_json(j["delta"], "delta"),
                vector_from_json(j["omega2"], "omega2"), matrix_from_json(j["L"], "L")},
               graph_from_json(j["graph"])};
  const int k = f.graph.size();
  if (f.params.mu.size() != k || f.params.delta.size() != k ||
      f.params.omega2.size() != k || f.params.L.rows() != k || f.params.L.cols() != k)
    throw InvalidParams("parameter lengths differ from graph size");
  return f;
}

// ---------------------------------------------------------------------------
// Priors

inline json prior_to_json(const PriorSpec& p) {
  json j = {{"regime", p.regime_name()}, {"b1", p.b1}};
  if (auto* q = std::get_if<IndependentProperPrior>(&p.regime)) {
    j["mu0"] = to_json(q->mu0);
    j["b2"] = q->b2;
    j["b3"] = q->b3;
    j["b4"] = q->b4;
    j["b5"] = q->b5;
  } else if (auto* w = std::get_if<PatternWishartPrior>(&p.regime)) {
    j["Psi"] = to_json(w->Psi);
    j["psi"] = to_json(w->psi);
  }
  return j;
}

inline PriorSpec prior_from_json(const json& j) {
  if (!j.contains("regime") || !j.contains("b1"))
    throw ParseError("prior needs \"regime\" and \"b1\"");
  const auto regime = j["regime"].get<std::string>();
  const double b1 = j["b1"].get<double>();
  if (regime == "noninfo") return PriorSpec::noninformative(b1);
  if (regime == "proper") {
    PriorSpec p{b1, IndependentProperPrior{vector_from_json(j.at("mu0"), "mu0"),
                                           j.at("b2").get<double>(), j.at("b3").get<double>(),
                                           j.at("b4").get<double>(), j.at("b5").get<double>()}};
    return p;
  }
  if (regime == "wishart")
    return PriorSpec::pattern_wishart(matrix_from_json(j.at("Psi"), "Psi"),
                                      vector_from_json(j.at("psi"), "psi"), b1);
  throw ParseError("unknown prior regime \"" + regime + "\"");
}

// ---------------------------------------------------------------------------
// CSV datasets

struct Dataset {
  std::vector<std::string> names;
  Matrix values;  // n x k
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Header row of column names, then numeric rows. Empty fields, NA and
/// non-numeric cells are rejected, not imputed.
inline Dataset parse_csv(const std::string& text, const std::string& what = "csv") {
  std::istringstream in(text);
  std::string line;
  Dataset d;
  if (!std::getline(in, line)) throw ParseError(what + ": empty file");
  for (auto f : detail::split_commas(line)) {
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"')
      f = f.substr(1, f.size() - 2);
    d.names.emplace_back(f);
  }
  const auto k = d.names.size();
  std::vector<double> cells;
  int n = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != k)
      throw ParseError(what + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(k));
    for (auto f : fields) {
      double v = 0.0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || r.ec != std::errc() || r.ptr != f.data() + f.size() ||
          !std::isfinite(v))
        throw ParseError(what + ": line " + std::to_string(line_no) +
                         ": missing or non-numeric value '" + std::string(f) + "'");
      cells.push_back(v);
    }
    ++n;
  }
  if (n < 1) throw ParseError(what + ": no data rows");
  d.values.resize(n, static_cast<int>(k));
  for (int i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) d.values(i, static_cast<int>(j)) = cells[i * k + j];
  return d;
}

inline Dataset read_csv(const std::string& path) {
  return parse_csv(read_file(path), path);
}

inline std::string format_csv(const Dataset& d) {
  std::string out;
  for (std::size_t j = 0; j < d.names.size(); ++j) {
    if (j) out += ',';
    out += d.names[j];
  }
  out += '\n';
  for (int i = 0; i < d.values.rows(); ++i) {
    for (int j = 0; j < d.values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(d.values(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::vector<std::string> default_names(int k) {
  std::vector<std::string> names;
  for (int j = 1; j <= k; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

// ---------------------------------------------------------------------------
// Traces

inline json trace_meta_to_json(const TraceMeta& m) {
  return {{"type", "meta"},
          {"seed", m.seed},
          {"iters", m.iters},
          {"burn_in", m.burn_in},
          {"thin", m.thin},
          {"fix_delta_zero", m.fix_delta_zero},
          {"sweep_order", m.sweep_order},
          {"prior", prior_to_json(m.prior)},
          {"graph", graph_to_json(m.graph)},
          {"n", m.n},
          {"data_fingerprint", m.data_fingerprint}};
}

inline std::string format_trace(const Trace& t) {
  std::string out = trace_meta_to_json(t.meta).dump() + "\n";
  for (std::size_t s = 0; s < t.draws.size(); ++s) {
    const auto& d = t.draws[s];
    const json rec = {{"type", "draw"},      {"index", s},
                      {"mu", to_json(d.mu)}, {"delta", to_json(d.delta)},
                      {"omega2", to_json(d.omega2)}, {"L", to_json(d.L)},
                      {"loglik", t.loglik[s]}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

inline Trace parse_trace(const std::string& text, const std::string& what = "trace") {
  std::istringstream in(text);
  std::string line;
  Trace t;
  bool have_meta = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const json j = parse_json(line, what + " line " + std::to_string(line_no));
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "meta") {
        auto& m = t.meta;
        m.seed = j.at("seed").get<std::uint64_t>();
        m.iters = j.at("iters").get<int>();
        m.burn_in = j.at("burn_in").get<int>();
        m.thin = j.at("thin").get<int>();
        m.fix_delta_zero = j.at("fix_delta_zero").get<bool>();
        m.sweep_order = j.at("sweep_order").get<std::string>();
        m.prior = prior_from_json(j.at("prior"));
        m.graph = graph_from_json(j.at("graph"));
        m.n = j.at("n").get<int>();
        m.data_fingerprint = j.at("data_fingerprint").get<std::string>();
        have_meta = true;
      } else if (type == "draw") {
        t.draws.push_back({vector_from_json(j.at("mu"), "mu"),
                           vector_from_json(j.at("delta"), "delta"),
                           vector_from_json(j.at("omega2"), "omega2"),
                           matrix_from_json(j.at("L"), "L")});
        t.loglik.push_back(j.at("loglik").get<double>());
      } else {
        throw ParseError(what + ": unknown record type " + type);
      }
    } catch (const json::exception& e) {
      throw ParseError(what + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_meta) throw ParseError(what + ": missing metadata record");
  return t;
}

inline Trace read_trace(const std::string& path) {
  return parse_trace(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Summaries and plot data

inline std::string format_summary(const std::vector<ParamSummary>& rows) {
  std::string out = "parameter,mean,sd,q2.5,q50,q97.5,ess\n";
  for (const auto& r : rows) {
    out += r.name;
    for (double v : {r.mean, r.sd, r.q025, r.q50, r.q975, r.ess}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

struct Histogram {
  std::vector<double> edges;    // bins + 1
  std::vector<double> density;  // bins, integrates to one
};

inline Histogram histogram(const Vector& x, int bins) {
  if (bins < 1) throw InvalidParams("need at least one bin");
  double lo = x.minCoeff(), hi = x.maxCoeff();
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  const double w = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + b * w);
  h.density.assign(bins, 0.0);
  for (int i = 0; i < x.size(); ++i) {
    int b = static_cast<int>((x(i) - lo) / w);
    b = std::clamp(b, 0, bins - 1);
    h.density[b] += 1.0;
  }
  for (double& d : h.density) d /= x.size() * w;
  return h;
}

/// Sturges' rule.
inline int default_bins(int n) {
  return static_cast<int>(std::ceil(std::log2(std::max(n, 1)) + 1.0));
}

}  // namespace sgdg::io
