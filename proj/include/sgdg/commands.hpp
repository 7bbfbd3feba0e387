#pragma once

// The four batch workflows behind the sgdg executable. Each takes a plain
// config struct, writes its files, and returns the text meant for stdout so
// the same code paths can be exercised from tests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgdg/error.hpp"
#include "sgdg/evidence.hpp"
#include "sgdg/graph.hpp"
#include "sgdg/inference.hpp"
#include "sgdg/io.hpp"
#include "sgdg/sgdg.hpp"

namespace sgdg::cmd {

namespace fs = std::filesystem;
using nlohmann::json;

inline fs::path prepare_out_dir(const std::string& dir) {
  if (dir.empty()) throw InvalidParams("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParseError("cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

// ---------------------------------------------------------------------------
// check-graph

struct CheckGraphConfig {
  std::string graph_path;
  std::string relabel_out;  // optional: write the graph relabelled by the ordering
};

inline std::string check_graph(const CheckGraphConfig& cfg) {
  const Graph g = io::read_graph(cfg.graph_path);
  std::ostringstream out;
  out << "vertices: " << g.size() << "\nedges: " << g.edge_count() << "\n";
  if (!is_decomposable(g)) {
    out << "decomposable: no\n";
    return out.str();
  }
  const auto ord = perfect_elimination_ordering(g);
  const bool labels_ok = verify_ordering(g, EliminationOrdering::identity(g.size()));
  out << "decomposable: yes\nelimination ordering:";
  for (int v : ord.perm) out << ' ' << v + 1;
  out << "\ngiven labels form an elimination ordering: " << (labels_ok ? "yes" : "no")
      << "\n";
  const Graph ordered = labels_ok ? g : relabel(g, ord);
  if (!labels_ok) out << "forward neighbours below use the relabelled graph\n";
  const ForwardNeighborSets nbrs(ordered);
  out << "vertex,forward_neighbours,size\n";
  for (int i = 0; i < ordered.size(); ++i) {
    out << i + 1 << ",{";
    for (std::size_t a = 0; a < nbrs[i].size(); ++a)
      out << (a ? " " : "") << nbrs[i][a] + 1;
    out << "}," << nbrs.size_of(i) << "\n";
  }
  out << "max forward neighbours: " << nbrs.max_size() << "\n"
      << "minimum n under the noninformative prior: " << nbrs.max_size() + 2 << "\n";
  if (!cfg.relabel_out.empty()) io::write_graph(cfg.relabel_out, ordered);
  return out.str();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateConfig {
  std::string template_name = "A";  // A | B | C | custom
  std::optional<double> value;      // delta (A) or L entries (B)
  std::string truth_path;           // custom only
  int n = 200;
  std::uint64_t seed = 0;
  std::string out_dir;
};

/// Case templates on the chain 1-2-3: mu = 5, omega^2 = 1.
///   A: delta = value (one of -1, 1, 2, 3), L12 = L23 = -0.5
///   B: delta = 2, L12 = L23 = value (one of -1, -0.5, 0.5, 1)
///   C: delta = (3, -2, -4), L12 = -0.5, L23 = 0.5
inline io::ParamsFile case_template(const std::string& name,
                                    std::optional<double> value) {
  const Graph g = Graph::chain(3);
  ReparamParams r{Vector::Constant(3, 5.0), Vector(3), Vector::Ones(3),
                  Matrix::Identity(3, 3)};
  if (name == "A") {
    const double d = value.value_or(2.0);
    r.delta.setConstant(d);
    r.L(0, 1) = r.L(1, 2) = -0.5;
  } else if (name == "B") {
    const double l = value.value_or(-0.5);
    if (l == 0.0) throw InvalidParams("L entries of an edge must be nonzero");
    r.delta.setConstant(2.0);
    r.L(0, 1) = r.L(1, 2) = l;
  } else if (name == "C") {
    if (value) throw InvalidParams("template C takes no value");
    r.delta << 3.0, -2.0, -4.0;
    r.L(0, 1) = -0.5;
    r.L(1, 2) = 0.5;
  } else {
    throw InvalidParams("unknown template " + name);
  }
  return {r, g};
}

inline std::string simulate(const SimulateConfig& cfg) {
  if (cfg.n < 1) throw InvalidParams("n must be positive");
  io::ParamsFile truth;
  if (cfg.template_name == "custom") {
    if (cfg.truth_path.empty()) throw InvalidParams("custom template needs --truth");
    truth = io::params_from_json(io::parse_json(io::read_file(cfg.truth_path),
                                                cfg.truth_path));
  } else {
    truth = case_template(cfg.template_name, cfg.value);
  }
  // Validates pattern, ordering and omega^2 > 0.
  reparam_inverse(truth.params, truth.graph).validate();

  Rng rng(cfg.seed);
  const Matrix x = sample_sgdg(truth.params, rng, cfg.n);
  const auto dir = prepare_out_dir(cfg.out_dir);
  io::write_file((dir / "data.csv").string(),
                 io::format_csv({io::default_names(truth.graph.size()), x}));
  json t = io::params_to_json(truth.params, truth.graph);
  t["template"] = cfg.template_name;
  t["n"] = cfg.n;
  t["seed"] = cfg.seed;
  io::write_file((dir / "truth.json").string(), t.dump(2) + "\n");
  io::write_graph((dir / "graph.json").string(), truth.graph);

  std::ostringstream out;
  out << "wrote " << cfg.n << " rows of " << truth.graph.size()
      << " variables to " << (dir / "data.csv").string() << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// fit

struct FitConfig {
  std::string data_path;
  std::string graph_path;
  std::string prior = "proper";  // proper | wishart | noninfo
  std::map<std::string, std::string> hyper;
  int iters = 50000;
  std::optional<int> burn_in;
  int thin = 10;
  std::uint64_t seed = 0;
  bool fix_delta_zero = false;
  std::string out_dir;
  int grid_points = 200;
  int density_mc = 2000;
};

namespace detail {

inline std::vector<double> parse_number_list(const std::string& key,
                                             const std::string& text) {
  std::vector<double> out;
  std::string_view rest(text);
  for (auto f : io::detail::split_commas(rest)) {
    double v = 0.0;
    const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || r.ec != std::errc() || r.ptr != f.data() + f.size())
      throw ParseError("--hyper " + key + ": '" + std::string(f) + "' is not a number");
    out.push_back(v);
  }
  return out;
}

inline Vector broadcast(const std::string& key, const std::vector<double>& v, int k) {
  if (v.size() == 1) return Vector::Constant(k, v[0]);
  if (static_cast<int>(v.size()) != k)
    throw DimensionMismatch("--hyper " + key + " needs 1 or " + std::to_string(k) +
                            " values");
  return Eigen::Map<const Vector>(v.data(), k);
}

}  // namespace detail

/// Defaults: b1 = 100, mu0 = 0, b2 = 1e4, b3 = b4 = 1e-6, b5 = 100; for the
/// pattern-Wishart prior Psi = I and psi_i = |N<(i)| + 2.
inline PriorSpec build_prior(const std::string& regime,
                             const std::map<std::string, std::string>& hyper,
                             const Graph& g) {
  const int k = g.size();
  std::map<std::string, std::vector<double>> h;
  for (const auto& [key, val] : hyper) h[key] = detail::parse_number_list(key, val);
  auto scalar = [&](const std::string& key, double def) {
    auto it = h.find(key);
    if (it == h.end()) return def;
    if (it->second.size() != 1) throw ParseError("--hyper " + key + " takes one value");
    return it->second[0];
  };
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : h) {
      bool ok = false;
      for (const char* a : keys) ok = ok || key == a;
      if (!ok)
        throw InvalidParams("hyperparameter " + key + " does not apply to the " +
                            regime + " prior");
    }
  };
  PriorSpec p;
  if (regime == "proper") {
    allow({"b1", "mu0", "b2", "b3", "b4", "b5"});
    p = PriorSpec::independent_proper(k, scalar("b1", 100.0), scalar("b2", 1e4),
                                      scalar("b3", 1e-6), scalar("b4", 1e-6),
                                      scalar("b5", 100.0));
    if (h.count("mu0"))
      std::get<IndependentProperPrior>(p.regime).mu0 =
          detail::broadcast("mu0", h["mu0"], k);
  } else if (regime == "wishart") {
    allow({"b1", "Psi", "psi"});
    const ForwardNeighborSets nbrs(g);
    Vector psi(k);
    for (int i = 0; i < k; ++i) psi(i) = nbrs.size_of(i) + 2.0;
    if (h.count("psi")) psi = detail::broadcast("psi", h["psi"], k);
    const Matrix Psi = scalar("Psi", 1.0) * Matrix::Identity(k, k);
    p = PriorSpec::pattern_wishart(Psi, psi, scalar("b1", 100.0));
  } else if (regime == "noninfo") {
    allow({"b1"});
    p = PriorSpec::noninformative(scalar("b1", 100.0));
  } else {
    throw InvalidParams("unknown prior " + regime + " (proper, wishart, noninfo)");
  }
  p.validate(k);
  return p;
}

inline std::string fit(const FitConfig& cfg) {
  const Graph g = io::read_graph(cfg.graph_path);
  if (!is_decomposable(g))
    throw NotDecomposable("graph has a chordless cycle of length >= 4");
  require_ordered(g);
  const io::Dataset data = io::read_csv(cfg.data_path);
  if (data.values.cols() != g.size())
    throw DimensionMismatch("data has " + std::to_string(data.values.cols()) +
                            " columns, graph has " + std::to_string(g.size()) +
                            " vertices");
  const PriorSpec prior = build_prior(cfg.prior, cfg.hyper, g);
  if (cfg.grid_points < 2 || cfg.density_mc < 1)
    throw InvalidParams("need >= 2 grid points and >= 1 density draw");

  ChainConfig chain;
  chain.iters = cfg.iters;
  chain.burn_in = cfg.burn_in;
  chain.thin = cfg.thin;
  chain.seed = cfg.seed;
  chain.fix_delta_zero = cfg.fix_delta_zero;
  const Trace trace = run_chain(data.values, g, prior, chain);
  if (trace.draws.empty()) throw EmptyTrace("no draws retained after burn-in and thinning");

  const auto dir = prepare_out_dir(cfg.out_dir);
  io::write_file((dir / "trace.ndjson").string(), io::format_trace(trace));
  const auto rows = summarize(trace);
  io::write_file((dir / "summary.csv").string(), io::format_summary(rows));

  // Plot data: histogram of each column and the fitted marginal density at
  // the posterior mean.
  const SgdgParams fitted = reparam_inverse(posterior_mean(trace), g);
  Rng plot_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::string hist = "variable,bin_lo,bin_hi,density\n";
  std::string dens = "variable,x,density\n";
  const int n = static_cast<int>(data.values.rows());
  for (int j = 0; j < g.size(); ++j) {
    const Vector col = data.values.col(j);
    const auto h = io::histogram(col, io::default_bins(n));
    for (std::size_t b = 0; b < h.density.size(); ++b)
      hist += data.names[j] + "," + io::format_double(h.edges[b]) + "," +
              io::format_double(h.edges[b + 1]) + "," +
              io::format_double(h.density[b]) + "\n";
    const double lo = col.minCoeff(), hi = col.maxCoeff();
    const double pad = 0.25 * std::max(hi - lo, 1e-8);
    std::vector<double> grid(cfg.grid_points);
    for (int t = 0; t < cfg.grid_points; ++t)
      grid[t] = lo - pad + (hi - lo + 2 * pad) * t / (cfg.grid_points - 1);
    const auto f = marginal_density(fitted, j, grid, plot_rng, cfg.density_mc);
    for (std::size_t t = 0; t < grid.size(); ++t)
      dens += data.names[j] + "," + io::format_double(grid[t]) + "," +
              io::format_double(f[t]) + "\n";
  }
  io::write_file((dir / "histogram.csv").string(), hist);
  io::write_file((dir / "fitted_density.csv").string(), dens);

  std::ostringstream out;
  out << "model: " << (cfg.fix_delta_zero ? "GG" : "SGDG") << ", prior: "
      << prior.regime_name() << ", draws kept: " << trace.draws.size() << "\n";
  out << io::format_summary(rows);
  return out.str();
}

// ---------------------------------------------------------------------------
// compare

struct CompareConfig {
  std::string trace_a;
  std::string trace_b;
  EvidenceOptions evidence;
  std::string out_path;  // optional JSON report
};

inline json estimate_to_json(const EvidenceEstimate& e, const std::string& path) {
  return {{"trace", path},
          {"log_marginal", e.log_marginal},
          {"n_draws_used", e.n_draws_used},
          {"mix_weight", e.mix_weight},
          {"converged", e.converged},
          {"iterations", e.iterations}};
}

inline std::string compare(const CompareConfig& cfg) {
  const Trace a = io::read_trace(cfg.trace_a);
  const Trace b = io::read_trace(cfg.trace_b);
  const BayesFactor bf = bayes_factor(a, b, cfg.evidence);
  const json report = {{"log_bayes_factor", bf.log_bf},
                       {"a", estimate_to_json(bf.numerator, cfg.trace_a)},
                       {"b", estimate_to_json(bf.denominator, cfg.trace_b)}};
  if (!cfg.out_path.empty()) io::write_file(cfg.out_path, report.dump(2) + "\n");

  std::ostringstream out;
  auto line = [&](const char* tag, const EvidenceEstimate& e, const std::string& p) {
    out << tag << ": " << p << "\n  log marginal " << io::format_double(e.log_marginal)
        << " from " << e.n_draws_used << " draws, converged "
        << (e.converged ? "yes" : "no") << " after " << e.iterations
        << " iterations\n";
  };
  line("A", bf.numerator, cfg.trace_a);
  line("B", bf.denominator, cfg.trace_b);
  out << "log BF (A vs B): " << io::format_double(bf.log_bf) << "\n";
  out << "log10 BF: " << io::format_double(bf.log_bf / std::log(10.0)) << "\n";
  return out.str();
}

}  // namespace sgdg::cmd
