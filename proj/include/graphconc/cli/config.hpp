#pragma once

// Experiment configuration: JSON parsing with key-level diagnostics.
// The grammar is described in docs/config.md.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/graph.hpp"
#include "graphconc/graphon.hpp"
#include "graphconc/perturbation.hpp"
#include "graphconc/random_graphs.hpp"

namespace graphconc::cli {

using json = nlohmann::json;

enum class Experiment { Deviation, FreedmanTail, PercolationGap, GraphonSpectrum, Quasirandom, PerturbationSuite };

inline constexpr const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Deviation: return "deviation";
    case Experiment::FreedmanTail: return "freedman-tail";
    case Experiment::PercolationGap: return "percolation-gap";
    case Experiment::GraphonSpectrum: return "graphon-spectrum";
    case Experiment::Quasirandom: return "quasirandom";
    case Experiment::PerturbationSuite: return "perturbation-suite";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(const std::string& s) {
  for (auto e : {Experiment::Deviation, Experiment::FreedmanTail, Experiment::PercolationGap,
                 Experiment::GraphonSpectrum, Experiment::Quasirandom, Experiment::PerturbationSuite})
    if (s == experiment_name(e)) return e;
  return std::nullopt;
}

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string key;
  std::string message;
  bool io = false;  // the problem is an unreadable file, not a bad value

  std::string str() const {
    return std::string(severity == Severity::Error ? "error" : "warning") + ": " + key + ": " + message;
  }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Diagnostic::Severity::Error) return true;
  return false;
}

struct GraphSpec {
  std::string kind;  // complete | cycle | path | file | erdos-renyi
  std::size_t n = 0;
  double p = 0.0;    // erdos-renyi only
  std::filesystem::path file;
};

struct KernelSpec {
  std::string kind;  // constant | rank-one | block | gaussian-band | cosine-product
  std::vector<double> params;
  std::optional<double> K;
  std::optional<double> L;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Deviation;
  std::uint64_t master_seed = 0;
  std::size_t trials = 1;
  double delta = 0.1;
  std::optional<std::string> output_path;

  // deviation
  std::string model_kind;  // erdos-renyi | percolation
  GraphMatrix matrix = GraphMatrix::Adjacency;

  // shared by several experiments
  std::size_t n = 0;
  double p = 0.0;
  GraphSpec graph;

  // freedman-tail
  std::string generator_kind;  // diagonal-rademacher | rank-one-sign | bernoulli-edge
  std::size_t d = 0;
  double scale = 1.0;
  std::uint64_t vector_seed = 0;
  double q = 0.5;
  std::size_t steps = 0;
  std::vector<double> thresholds;

  // percolation-gap
  double c1 = 1.0;
  double c2 = 1.0;

  // graphon-spectrum
  KernelSpec kernel;
  std::size_t top_k = 0;
  double tolerance = 0.1;
  double eps = 0.0;
  double c_const = 1.0;
  std::vector<IntervalSet::Interval> intervals;
  std::optional<double> gamma;

  // quasirandom
  double slack = 0.1;

  // perturbation-suite
  double lo = -1.0;
  double hi = 1.0;
  double a = 0.0;
  double b = 0.0;
  double eps_fraction = 0.5;
  IntervalSet::Interval interval{0.0, 0.0};
  std::size_t quad_points = 256;
};

namespace detail {

// Reads typed keys from one JSON object, remembering which keys were used so
// unknown ones can be reported.
class Section {
 public:
  Section(const json& obj, std::string path, std::vector<Diagnostic>& diags)
      : obj_(obj), path_(std::move(path)), diags_(diags) {}

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) const { return obj_.is_object() && obj_.contains(k); }

  void error(const std::string& k, const std::string& msg, bool io = false) {
    diags_.push_back({Diagnostic::Severity::Error, key(k), msg, io});
  }
  void warning(const std::string& k, const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::Warning, key(k), msg, false});
  }

  const json* raw(const std::string& k, bool required) {
    used_.insert(k);
    if (!has(k)) {
      if (required) error(k, "missing required key");
      return nullptr;
    }
    return &obj_.at(k);
  }

  std::optional<std::string> str(const std::string& k, bool required = true) {
    const json* v = raw(k, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(k, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::uint64_t> uint(const std::string& k, bool required = true) {
    const json* v = raw(k, required);
    if (!v) return std::nullopt;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v->get<std::int64_t>());
    error(k, "expected a nonnegative integer");
    return std::nullopt;
  }

  std::optional<double> num(const std::string& k, bool required = true) {
    const json* v = raw(k, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      error(k, "expected a number");
      return std::nullopt;
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) {
      error(k, "expected a finite number");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::vector<double>> numbers(const std::string& k, bool required = true) {
    const json* v = raw(k, required);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
      error(k, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        error(k, "expected an array of finite numbers");
        return std::nullopt;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::optional<Section> sub(const std::string& k, bool required = true) {
    const json* v = raw(k, required);
    if (!v) return std::nullopt;
    if (!v->is_object()) {
      error(k, "expected a table");
      return std::nullopt;
    }
    return Section(*v, key(k), diags_);
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& [k, _] : obj_.items())
      if (!used_.count(k)) error(k, "unknown key");
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> used_;
};

inline void check(Section& s, bool ok, const std::string& k, const std::string& msg) {
  if (!ok) s.error(k, msg);
}

inline GraphSpec read_graph_spec(Section& s, const std::filesystem::path& base_dir, bool allow_random) {
  GraphSpec g;
  g.kind = s.str("kind").value_or("");
  if (g.kind == "complete" || g.kind == "cycle" || g.kind == "path") {
    g.n = s.uint("n").value_or(0);
    const std::size_t min_n = g.kind == "cycle" ? 3 : 2;
    check(s, g.n >= min_n && g.n <= 5000, "n", "must lie in [" + std::to_string(min_n) + ", 5000]");
  } else if (g.kind == "erdos-renyi" && allow_random) {
    g.n = s.uint("n").value_or(0);
    check(s, g.n >= 2 && g.n <= 5000, "n", "must lie in [2, 5000]");
    g.p = s.num("p").value_or(0.5);
    check(s, g.p > 0.0 && g.p < 1.0, "p", "must lie in (0, 1)");
  } else if (g.kind == "file") {
    const auto f = s.str("graph_file");
    if (f) {
      g.file = std::filesystem::path(*f);
      if (g.file.is_relative()) g.file = base_dir / g.file;
      try {
        g.n = load_graph(g.file).order();
      } catch (const Error& e) {
        s.error("graph_file", e.what(), e.code() == Errc::IoError);
      }
    }
  } else {
    s.error("kind", std::string("must be one of complete, cycle, path, file") +
                        (allow_random ? ", erdos-renyi" : ""));
  }
  s.finish();
  return g;
}

inline KernelSpec read_kernel_spec(Section& s) {
  KernelSpec k;
  k.kind = s.str("kind").value_or("");
  k.params = s.numbers("params", false).value_or(std::vector<double>{});
  k.K = s.num("K", false);
  k.L = s.num("L", false);
  s.finish();
  return k;
}

}  // namespace detail

/// Builds the kernel described by a KernelSpec; throws Error(InvalidParameter) on bad parameters.
inline Kernel make_kernel(const KernelSpec& spec) {
  const auto& q = spec.params;
  auto need = [&](std::size_t count) {
    require(q.size() == count, Errc::InvalidParameter,
            "kernel '" + spec.kind + "' takes " + std::to_string(count) + " params");
  };
  if (spec.kind == "constant") {
    need(1);
    return Kernel::constant(q[0]);
  }
  if (spec.kind == "rank-one") {
    need(2);
    return Kernel::rank_one_product(q[0], q[1]);
  }
  if (spec.kind == "block") {
    const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(q.size()))));
    require(k >= 1 && k * k == q.size(), Errc::InvalidParameter, "kernel 'block' takes k*k params (row-major)");
    Eigen::MatrixXd v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = q[i * k + j];
    return Kernel::block(std::move(v));
  }
  if (spec.kind == "gaussian-band") {
    need(1);
    return Kernel::gaussian_band(q[0]);
  }
  if (spec.kind == "cosine-product") {
    need(0);
    return Kernel::cosine_product();
  }
  throw Error(Errc::InvalidParameter,
              "kernel kind must be one of constant, rank-one, block, gaussian-band, cosine-product");
}

/// Builds the deterministic graph described by a GraphSpec (not erdos-renyi).
inline Graph make_graph(const GraphSpec& spec) {
  if (spec.kind == "complete") return complete_graph(spec.n);
  if (spec.kind == "cycle") return cycle_graph(spec.n);
  if (spec.kind == "path") return path_graph(spec.n);
  if (spec.kind == "file") return load_graph(spec.file);
  throw Error(Errc::InvalidParameter, "graph kind '" + spec.kind + "' is not a fixed graph");
}

struct ParseResult {
  std::optional<ExperimentConfig> config;  // set iff there are no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

/// Parses and checks a config. Relative graph_file paths resolve against base_dir.
inline ParseResult parse_config(const json& doc, const std::filesystem::path& base_dir = {}) {
  ParseResult out;
  auto& diags = out.diagnostics;
  if (!doc.is_object()) {
    diags.push_back({Diagnostic::Severity::Error, "<root>", "config must be a JSON object"});
    return out;
  }
  detail::Section root(doc, "", diags);
  ExperimentConfig c;
  using detail::check;

  const auto name = root.str("experiment");
  const auto exp = name ? parse_experiment(*name) : std::nullopt;
  if (name && !exp)
    root.error("experiment",
               "must be one of deviation, freedman-tail, percolation-gap, graphon-spectrum, quasirandom, "
               "perturbation-suite");
  c.master_seed = root.uint("master_seed").value_or(0);
  c.trials = root.uint("trials").value_or(1);
  check(root, c.trials >= 1, "trials", "must be a positive integer");
  check(root, c.trials <= 1000000, "trials", "must not exceed 1000000");
  c.output_path = root.str("output_path", false);

  auto read_delta = [&] {
    c.delta = root.num("delta").value_or(0.1);
    check(root, c.delta > 0.0 && c.delta <= 0.5, "delta",
          "must lie in (0, 1/2]; the deviation bounds hold only for delta <= 1/2");
  };

  if (exp) {
    c.experiment = *exp;
    switch (c.experiment) {
      case Experiment::Deviation: {
        read_delta();
        const auto m = root.str("matrix", false).value_or("adjacency");
        if (m == "adjacency") c.matrix = GraphMatrix::Adjacency;
        else if (m == "laplacian") c.matrix = GraphMatrix::Laplacian;
        else root.error("matrix", "must be adjacency or laplacian");
        if (auto model = root.sub("model")) {
          c.model_kind = model->str("kind").value_or("");
          if (c.model_kind == "erdos-renyi") {
            c.n = model->uint("n").value_or(0);
            check(*model, c.n >= 2 && c.n <= 5000, "n", "must lie in [2, 5000]");
            c.p = model->num("p").value_or(0.5);
            check(*model, c.p > 0.0 && c.p < 1.0, "p", "must lie in (0, 1)");
          } else if (c.model_kind == "percolation") {
            c.p = model->num("p").value_or(0.5);
            check(*model, c.p > 0.0 && c.p < 1.0, "p", "must lie in (0, 1)");
            if (auto g = model->sub("graph")) {
              c.graph = detail::read_graph_spec(*g, base_dir, false);
              if (!has_errors(diags) && c.matrix == GraphMatrix::Laplacian) {
                const auto deg = make_graph(c.graph).degrees();
                check(*model, std::find(deg.begin(), deg.end(), 0) == deg.end(), "graph",
                      "has an isolated vertex; the Laplacian bound needs positive degrees");
              }
            }
          } else {
            model->error("kind", "must be erdos-renyi or percolation");
          }
          model->finish();
        }
        break;
      }
      case Experiment::FreedmanTail: {
        c.steps = root.uint("steps").value_or(0);
        check(root, c.steps >= 1 && c.steps <= 100000, "steps", "must lie in [1, 100000]");
        c.thresholds = root.numbers("thresholds").value_or(std::vector<double>{});
        check(root, !c.thresholds.empty(), "thresholds", "must be a nonempty array");
        for (double t : c.thresholds) check(root, t > 0.0, "thresholds", "entries must be positive");
        if (auto g = root.sub("generator")) {
          c.generator_kind = g->str("kind").value_or("");
          c.scale = g->num("scale", false).value_or(1.0);
          check(*g, c.scale > 0.0, "scale", "must be positive");
          if (c.generator_kind == "diagonal-rademacher" || c.generator_kind == "rank-one-sign") {
            c.d = g->uint("d").value_or(0);
            check(*g, c.d >= 1 && c.d <= 500, "d", "must lie in [1, 500]");
            if (c.generator_kind == "rank-one-sign") c.vector_seed = g->uint("vector_seed", false).value_or(0);
          } else if (c.generator_kind == "bernoulli-edge") {
            c.q = g->num("q").value_or(0.5);
            check(*g, c.q > 0.0 && c.q < 1.0, "q", "must lie in (0, 1)");
            if (auto gs = g->sub("graph")) {
              c.graph = detail::read_graph_spec(*gs, base_dir, false);
              c.d = c.graph.n;
              if (!has_errors(diags)) check(*g, make_graph(c.graph).size() >= 1, "graph", "must have an edge");
            }
          } else {
            g->error("kind", "must be diagonal-rademacher, rank-one-sign or bernoulli-edge");
          }
          g->finish();
        }
        break;
      }
      case Experiment::PercolationGap: {
        read_delta();
        c.p = root.num("p").value_or(0.5);
        check(root, c.p > 0.0 && c.p < 1.0, "p", "must lie in (0, 1)");
        if (auto g = root.sub("graph")) {
          c.graph = detail::read_graph_spec(*g, base_dir, false);
          if (!has_errors(diags)) {
            const auto deg = make_graph(c.graph).degrees();
            check(root, std::find(deg.begin(), deg.end(), 0) == deg.end(), "graph",
                  "has an isolated vertex; the Laplacian bound needs positive degrees");
          }
        }
        if (auto ch = root.sub("chung_horn", false)) {
          c.c1 = ch->num("c1", false).value_or(1.0);
          c.c2 = ch->num("c2", false).value_or(1.0);
          check(*ch, c.c1 >= 0.0 && c.c2 >= 0.0, "c1", "constants must be >= 0");
          ch->finish();
        }
        check(root, c.graph.n >= 3 || has_errors(diags), "graph", "needs at least 3 vertices");
        break;
      }
      case Experiment::GraphonSpectrum: {
        c.n = root.uint("n").value_or(0);
        check(root, c.n >= 2 && c.n <= 4000, "n", "must lie in [2, 4000]");
        c.p = root.num("p").value_or(0.5);
        check(root, c.p > 0.0 && c.p <= 1.0, "p", "must lie in (0, 1]");
        c.top_k = root.uint("top_k", false).value_or(0);
        check(root, c.top_k <= c.n, "top_k", "must not exceed n");
        c.tolerance = root.num("tolerance", false).value_or(0.1);
        check(root, c.tolerance > 0.0, "tolerance", "must be positive");
        c.eps = root.num("eps", false).value_or(0.0);
        check(root, c.eps >= 0.0, "eps", "must be >= 0");
        c.c_const = root.num("c_const", false).value_or(1.0);
        check(root, c.c_const >= 0.0, "c_const", "must be >= 0");
        c.gamma = root.num("gamma", false);
        if (c.gamma) check(root, *c.gamma > 0.0, "gamma", "must be positive");
        if (root.has("intervals")) {
          const json* iv = root.raw("intervals", false);
          bool ok = iv->is_array();
          if (ok)
            for (const auto& e : *iv) {
              if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number() ||
                  !(e[0].get<double>() <= e[1].get<double>())) {
                ok = false;
                break;
              }
              c.intervals.emplace_back(e[0].get<double>(), e[1].get<double>());
            }
          if (!ok) root.error("intervals", "expected an array of [a, b] pairs with a <= b");
        }
        if (auto ks = root.sub("kernel")) {
          c.kernel = detail::read_kernel_spec(*ks);
          try {
            const auto k = make_kernel(c.kernel);
            if (!k.has_closed_form_spectrum())
              root.error("kernel.kind", "kernel has no closed-form spectrum to compare against");
            if (c.kernel.K) {
              check(root, *c.kernel.K >= k.sup_bound() - 1e-12, "kernel.K", "is below the supremum of the kernel");
            }
            if (c.kernel.L) check(root, *c.kernel.L >= 0.0, "kernel.L", "must be >= 0");
            const double K = c.kernel.K.value_or(k.sup_bound());
            check(root, K > 0.0, "kernel", "must not vanish identically");
            if (K > 0.0 && c.p > 1.0 / K)
              root.warning("p", "p > 1/K: probabilities are clipped at 1 and the kernel-comparison theorem's "
                                "hypothesis p <= 1/K fails");
          } catch (const Error& e) {
            root.error("kernel", e.what());
          }
        }
        break;
      }
      case Experiment::Quasirandom: {
        c.p = root.num("p").value_or(0.5);
        check(root, c.p > 0.0 && c.p < 1.0, "p", "must lie in (0, 1)");
        c.slack = root.num("slack", false).value_or(0.1);
        check(root, c.slack >= 0.0, "slack", "must be >= 0");
        if (auto g = root.sub("graph")) c.graph = detail::read_graph_spec(*g, base_dir, true);
        if (!has_errors(diags) && c.graph.kind == "file")
          check(root, !make_graph(c.graph).has_loops(), "graph", "must not contain loops");
        break;
      }
      case Experiment::PerturbationSuite: {
        c.n = root.uint("n").value_or(0);
        check(root, c.n >= 2 && c.n <= 200, "n", "must lie in [2, 200]");
        c.lo = root.num("spectrum_lo", false).value_or(-1.0);
        c.hi = root.num("spectrum_hi", false).value_or(1.0);
        c.a = root.num("a").value_or(0.0);
        c.b = root.num("b").value_or(0.0);
        c.gamma = root.num("gamma").value_or(0.0);
        c.eps_fraction = root.num("eps_fraction", false).value_or(0.5);
        c.quad_points = root.uint("quad_points", false).value_or(256);
        const auto s = root.numbers("interval").value_or(std::vector<double>{});
        const double g = c.gamma.value_or(0.0);
        check(root, c.lo < c.hi, "spectrum_lo", "must be below spectrum_hi");
        check(root, g > 0.0, "gamma", "must be positive");
        check(root, c.a + g < c.b - g, "a", "need a + gamma < b - gamma");
        check(root, c.hi - c.lo > 4.0 * g, "gamma", "spectrum range must exceed 4 gamma");
        check(root, c.eps_fraction > 0.0 && c.eps_fraction < 1.0, "eps_fraction", "must lie in (0, 1)");
        check(root, c.quad_points >= 16 && c.quad_points <= 100000, "quad_points", "must lie in [16, 100000]");
        if (s.size() == 2 && s[0] <= s[1]) {
          c.interval = {s[0], s[1]};
          check(root, IntervalSet{c.interval}.inf_abs() > c.eps_fraction * g, "interval",
                "must stay farther than eps_fraction * gamma from 0");
        } else {
          root.error("interval", "expected [lo, hi] with lo <= hi");
        }
        break;
      }
    }
  }
  root.finish();
  if (!has_errors(diags)) out.config = c;
  return out;
}

/// Reads a config file. Throws Error(IoError) if unreadable and
/// Error(ConfigError) if it is not valid JSON.
inline json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
}

/// Diagnostics only (never throws on bad values).
inline std::vector<Diagnostic> validate(const json& doc, const std::filesystem::path& base_dir = {}) {
  return parse_config(doc, base_dir).diagnostics;
}

}  // namespace graphconc::cli
