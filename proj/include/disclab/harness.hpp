#pragma once

// Seeded batch experiments.
//
// A config names an experiment kind and a parameter grid. Every grid cell is
// run `trials` times; trial j of a cell uses seed derive_seed(master_seed,
// {cell_hash, j}) where cell_hash depends only on the cell's parameters, so
// reordering the grid does not change any cell's results. Rows are written
// in (cell, trial) order and the CSV is flushed after each cell. Rerunning a
// config over an existing CSV keeps the complete cells and recomputes only
// the rest.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "disclab/discrepancy.hpp"
#include "disclab/error.hpp"
#include "disclab/h2_moments.hpp"
#include "disclab/hypergraph.hpp"
#include "disclab/rng.hpp"
#include "disclab/spectral.hpp"
#include "disclab/two_stage.hpp"

namespace disclab {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { kTwoStageSweep, kNormSweep, kH2Sweep, kBaselineCompare };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kTwoStageSweep: return "two-stage-sweep";
    case ExperimentKind::kNormSweep: return "norm-sweep";
    case ExperimentKind::kH2Sweep: return "h2-sweep";
    case ExperimentKind::kBaselineCompare: return "baseline-compare";
  }
  return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
  if (s == "two-stage-sweep") return ExperimentKind::kTwoStageSweep;
  if (s == "norm-sweep") return ExperimentKind::kNormSweep;
  if (s == "h2-sweep") return ExperimentKind::kH2Sweep;
  if (s == "baseline-compare") return ExperimentKind::kBaselineCompare;
  throw ParameterError("unknown experiment kind '" + s + "'");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTwoStageSweep;
  std::vector<int> n;
  std::vector<int> t;
  std::vector<int> m;
  std::vector<double> p;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string csv_path;   // empty: keep rows in memory only
  std::string json_path;  // sidecar with config echo, version and timings
  int baseline_trials = 101;
  unsigned jobs = 0;      // 0: all cores

  void validate() const {
    if (n.empty()) throw ParameterError("config: grid.n must be nonempty");
    if (trials < 1) throw ParameterError("config: trials must be >= 1");
    if ((kind == ExperimentKind::kTwoStageSweep || kind == ExperimentKind::kNormSweep ||
         kind == ExperimentKind::kBaselineCompare) &&
        t.empty())
      throw ParameterError("config: grid.t must be nonempty for " + to_string(kind));
    if (kind == ExperimentKind::kH2Sweep)
      for (int v : n)
        if (v % 2 != 0) throw ParameterError("config: h2-sweep needs even n");
    if (baseline_trials < 1) throw ParameterError("config: baseline_trials must be >= 1");
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"grid", {{"n", c.n}, {"t", c.t}, {"m", c.m}, {"p", c.p}}},
          {"trials", c.trials},
          {"master_seed", c.master_seed},
          {"output", {{"csv", c.csv_path}, {"json", c.json_path}}},
          {"baseline_trials", c.baseline_trials},
          {"jobs", c.jobs}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.kind = parse_kind(j.at("kind").get<std::string>());
    const auto& g = j.at("grid");
    c.n = g.value("n", std::vector<int>{});
    c.t = g.value("t", std::vector<int>{});
    c.m = g.value("m", std::vector<int>{});
    c.p = g.value("p", std::vector<double>{});
    c.trials = j.value("trials", 1);
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    if (j.contains("output")) {
      c.csv_path = j["output"].value("csv", std::string{});
      c.json_path = j["output"].value("json", std::string{});
    }
    c.baseline_trials = j.value("baseline_trials", 101);
    c.jobs = j.value("jobs", 0U);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

struct Cell {
  int n = 0;
  int m = 0;
  int t = 0;
  double p = 0.0;

  std::string key() const {
    std::ostringstream os;
    os << "n=" << n << ",m=" << m << ",t=" << t << ",p=" << p;
    return os.str();
  }
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : key()) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

inline std::vector<Cell> expand_grid(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (int n : c.n) {
    switch (c.kind) {
      case ExperimentKind::kH2Sweep: {
        const std::vector<int> ms = c.m.empty() ? std::vector<int>{m_default(n)} : c.m;
        for (int m : ms) cells.push_back({n, m, 0, 0.5});
        break;
      }
      default:
        for (int t : c.t) cells.push_back({n, n, t, 0.0});
    }
  }
  return cells;
}

/// One CSV row. Empty strings are written as empty fields.
struct ResultRow {
  std::size_t cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int n = 0, m = 0, t = 0;
  double p = 0.0;
  std::string disc, sigma, c_norm, x, disc_ok, baseline_median, beck_fiala_disc, ratio, status;
};

inline const char* kResultHeader =
    "cell,trial,seed,n,m,t,p,disc,sigma,c_norm,x,disc_ok,baseline_median,beck_fiala_disc,ratio,status";

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline std::string to_csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << r.cell << ',' << r.trial << ',' << r.seed << ',' << r.n << ',' << r.m << ',' << r.t << ','
     << format_number(r.p) << ',' << r.disc << ',' << r.sigma << ',' << r.c_norm << ',' << r.x << ','
     << r.disc_ok << ',' << r.baseline_median << ',' << r.beck_fiala_disc << ',' << r.ratio << ','
     << r.status;
  return os.str();
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::optional<ResultRow> parse_csv_line(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != 16) return std::nullopt;
  try {
    ResultRow r;
    r.cell = std::stoul(f[0]);
    r.trial = std::stoi(f[1]);
    r.seed = std::stoull(f[2]);
    r.n = std::stoi(f[3]);
    r.m = std::stoi(f[4]);
    r.t = std::stoi(f[5]);
    r.p = std::stod(f[6]);
    r.disc = f[7];
    r.sigma = f[8];
    r.c_norm = f[9];
    r.x = f[10];
    r.disc_ok = f[11];
    r.baseline_median = f[12];
    r.beck_fiala_disc = f[13];
    r.ratio = f[14];
    r.status = f[15];
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Cell> cells;
  std::vector<ResultRow> rows;
  std::vector<double> cell_wall_ms;
  std::vector<bool> cell_reused;
};

namespace detail {

inline std::uint64_t trial_seed(std::uint64_t master, const Cell& cell, int trial) {
  return derive_seed(master, {cell.hash(), static_cast<std::uint64_t>(trial)});
}

inline ResultRow run_trial(const ExperimentConfig& cfg, std::size_t cell_index, const Cell& cell,
                           int trial, const std::string& cell_ratio) {
  ResultRow row;
  row.cell = cell_index;
  row.trial = trial;
  row.seed = trial_seed(cfg.master_seed, cell, trial);
  row.n = cell.n;
  row.m = cell.m;
  row.t = cell.t;
  row.p = cell.p;
  row.status = "ok";
  const RandomSource rng{row.seed};
  try {
    switch (cfg.kind) {
      case ExperimentKind::kNormSweep: {
        const auto h = generate_h1(cell.n, cell.m, cell.t, rng);
        const auto est = restricted_norm(h, cell.t, 1e-7, 0, rng);
        row.sigma = format_number(est.sigma);
        row.c_norm = format_number(est.c_norm);
        if (!est.converged) row.status = "unconverged";
        break;
      }
      case ExperimentKind::kTwoStageSweep:
      case ExperimentKind::kBaselineCompare: {
        const auto h = generate_h1(cell.n, cell.m, cell.t, rng);
        StageParams params;
        params.t = cell.t;
        const auto res = color_two_stage(h, params, rng);
        row.disc = std::to_string(res.trace.report.disc);
        row.c_norm = format_number(res.trace.c_norm);
        row.sigma = format_number(res.trace.c_norm * std::sqrt(static_cast<double>(cell.t)));
        if (cfg.kind == ExperimentKind::kBaselineCompare) {
          row.baseline_median = format_number(random_coloring_baseline(h, cfg.baseline_trials, rng).median);
          if (cell.n <= 256) row.beck_fiala_disc = std::to_string(disc_of(h, beck_fiala_color(h)).disc);
        }
        break;
      }
      case ExperimentKind::kH2Sweep: {
        const auto exp = h2_experiment(cell.n, cell.m, 1, rng, H2Mode::kExact);
        row.x = exp.trials.front().x.str();
        row.disc_ok = exp.trials.front().disc_ok ? "1" : "0";
        row.ratio = cell_ratio;
        break;
      }
    }
  } catch (const ConvergenceError& e) {
    row.status = std::string("convergence: ") + e.what();
    for (auto& c : row.status)
      if (c == ',' || c == '\n') c = ';';
  }
  return row;
}

}  // namespace detail

/// Executes every cell; see the file comment for seeding and resume rules.
inline ExperimentResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.config = cfg;
  res.cells = expand_grid(cfg);

  // Rows from a previous (possibly interrupted) run, grouped by cell key.
  std::map<std::string, std::vector<ResultRow>> previous;
  if (!cfg.csv_path.empty() && std::filesystem::exists(cfg.csv_path)) {
    std::ifstream in(cfg.csv_path);
    std::string line;
    std::getline(in, line);
    if (line == kResultHeader)
      while (std::getline(in, line))
        if (auto row = parse_csv_line(line))
          previous[Cell{row->n, row->m, row->t, row->p}.key()].push_back(*row);
  }

  std::ofstream out;
  if (!cfg.csv_path.empty()) {
    out.open(cfg.csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + cfg.csv_path + " for writing");
    out << kResultHeader << '\n';
    out.flush();
  }

  for (std::size_t ci = 0; ci < res.cells.size(); ++ci) {
    const Cell& cell = res.cells[ci];
    const auto start = std::chrono::steady_clock::now();
    std::vector<ResultRow> rows;

    auto prev = previous.find(cell.key());
    bool reused = false;
    if (prev != previous.end() && prev->second.size() == static_cast<std::size_t>(cfg.trials)) {
      rows = prev->second;
      reused = true;
      for (int j = 0; j < cfg.trials; ++j) {
        auto& r = rows[static_cast<std::size_t>(j)];
        if (r.trial != j || r.seed != detail::trial_seed(cfg.master_seed, cell, j)) reused = false;
        r.cell = ci;
      }
    }
    if (!reused) {
      std::string ratio;
      if (cfg.kind == ExperimentKind::kH2Sweep) ratio = format_number(second_moment(cell.n, cell.m).ratio_float);
      rows.assign(static_cast<std::size_t>(cfg.trials), ResultRow{});
      detail::parallel_chunks(static_cast<std::size_t>(cfg.trials), cfg.jobs, [&](std::size_t j) {
        rows[j] = detail::run_trial(cfg, ci, cell, static_cast<int>(j), ratio);
      });
    }
    if (out.is_open()) {
      for (const auto& r : rows) out << to_csv_line(r) << '\n';
      out.flush();
      if (!out) throw IoError("write failed: " + cfg.csv_path);
    }
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    res.cell_reused.push_back(reused);
    res.cell_wall_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }

  if (!cfg.json_path.empty()) {
    nlohmann::json side;
    side["version"] = kVersion;
    side["config"] = to_json(cfg);
    side["cells"] = nlohmann::json::array();
    for (std::size_t ci = 0; ci < res.cells.size(); ++ci)
      side["cells"].push_back({{"cell", ci},
                               {"key", res.cells[ci].key()},
                               {"wall_ms", res.cell_wall_ms[ci]},
                               {"reused", static_cast<bool>(res.cell_reused[ci])}});
    std::ofstream js(cfg.json_path);
    if (!js) throw IoError("cannot open " + cfg.json_path + " for writing");
    js << side.dump(2) << '\n';
  }
  return res;
}

/// Reads rows back from a CSV written by run().
inline std::vector<ResultRow> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != kResultHeader) throw ParseError(1, "not an experiment CSV");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto row = parse_csv_line(line);
    if (!row) throw ParseError(lineno, "malformed experiment row");
    rows.push_back(*row);
  }
  return rows;
}

/// Per-cell (x, y) series with error columns: y is the median over trials
/// (or the success fraction for frac_disc_le_1), y_lo and y_hi the min and
/// max (or +-1 binomial standard error).
inline std::string emit_plot_data(const std::vector<ResultRow>& rows, const std::string& metric) {
  if (metric != "disc_vs_sqrt_t" && metric != "sigma_vs_sqrt_t" && metric != "ratio_vs_n" &&
      metric != "frac_disc_le_1")
    throw ParameterError("emit_plot_data: unknown metric '" + metric + "'");
  std::ostringstream os;
  os << "cell,x,y,y_lo,y_hi\n";
  std::map<std::size_t, std::vector<const ResultRow*>> by_cell;
  for (const auto& r : rows) by_cell[r.cell].push_back(&r);
  for (const auto& [cell, group] : by_cell) {
    const ResultRow& first = *group.front();
    std::vector<double> ys;
    double x = 0.0;
    if (metric == "disc_vs_sqrt_t" || metric == "sigma_vs_sqrt_t") {
      x = std::sqrt(static_cast<double>(first.t));
      for (const auto* r : group) {
        const auto& f = metric == "disc_vs_sqrt_t" ? r->disc : r->sigma;
        if (!f.empty()) ys.push_back(std::stod(f));
      }
    } else if (metric == "ratio_vs_n") {
      x = first.n;
      if (!first.ratio.empty()) ys.push_back(std::stod(first.ratio));
    } else {
      x = first.n;
      double ok = 0.0;
      for (const auto* r : group)
        if (!r->disc_ok.empty()) {
          ok += r->disc_ok == "1";
          ys.push_back(0.0);
        }
      if (!ys.empty()) {
        const double k = static_cast<double>(ys.size());
        const double y = ok / k, se = std::sqrt(y * (1.0 - y) / k);
        os << cell << ',' << format_number(x) << ',' << format_number(y) << ','
           << format_number(y - se) << ',' << format_number(y + se) << '\n';
      }
      continue;
    }
    if (ys.empty()) continue;
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    os << cell << ',' << format_number(x) << ',' << format_number(median_of(ys)) << ','
       << format_number(*lo) << ',' << format_number(*hi) << '\n';
  }
  return os.str();
}

inline std::string emit_plot_data(const ExperimentResult& result, const std::string& metric) {
  return emit_plot_data(result.rows, metric);
}

}  // namespace disclab
