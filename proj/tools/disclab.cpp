// disclab: command-line front end.
//
// Exit codes: 0 success, 2 parameter error, 3 convergence error, 4 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "disclab/disclab.hpp"

namespace {

using namespace disclab;

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out;
  std::string format = "csv";
};

// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write(os);
  if (!os) throw IoError("write failed: " + path);
}

void emit_hypergraph(const Globals& g, const Hypergraph& h) {
  if (!g.out.empty()) {
    save(h, g.out);
    return;
  }
  if (g.format == "json")
    std::cout << to_json(h).dump() << '\n';
  else
    write_text(std::cout, h);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disclab: discrepancy of random hypergraphs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "csv|json")->check(CLI::IsMember({"csv", "json", "text"}));

  int n = 0, m = 0, t = 0, trials = 100, cap = kDefaultBruteForceCap;
  double p = 0.5;
  std::string input, coloring_path, trace_path, mode = "exact", config_path, plot_metric, plot_out;
  bool even = false, per_edge = false;

  auto* gen1 = app.add_subcommand("generate-h1", "random t-regular hypergraph");
  gen1->add_option("--n", n)->required();
  gen1->add_option("--m", m)->required();
  gen1->add_option("--t", t)->required();

  auto* gen2 = app.add_subcommand("generate-h2", "Bernoulli(p) incidence hypergraph");
  gen2->add_option("--n", n)->required();
  gen2->add_option("--m", m)->required();
  gen2->add_option("--p", p);
  gen2->add_flag("--even", even, "p = 1/2 conditioned on even edge sizes");

  auto* disc = app.add_subcommand("disc", "discrepancy of a given coloring");
  disc->add_option("--input", input)->required();
  disc->add_option("--coloring", coloring_path)->required();
  disc->add_flag("--per-edge", per_edge);

  auto* brute = app.add_subcommand("brute", "exact discrepancy by enumeration");
  brute->add_option("--input", input)->required();
  brute->add_option("--cap", cap);

  auto* bf = app.add_subcommand("beck-fiala", "iterative-rounding coloring (disc <= 2t-1)");
  bf->add_option("--input", input)->required();

  auto* two = app.add_subcommand("color-two-stage", "two-stage partial-coloring pipeline");
  two->add_option("--input", input)->required();
  two->add_option("--t", t)->required();
  two->add_option("--trace", trace_path, "per-round CSV");

  auto* norm = app.add_subcommand("norm", "restricted operator norm of the incidence matrix");
  norm->add_option("--input", input)->required();
  norm->add_option("--t", t)->required();

  auto* moments = app.add_subcommand("moments", "exact E[X], E[X^2] for the even-row model");
  moments->add_option("--n", n)->required();
  moments->add_option("--m", m)->required();

  auto* h2 = app.add_subcommand("h2-exp", "count good balanced colorings on even-row instances");
  h2->add_option("--n", n)->required();
  h2->add_option("--m", m)->required();
  h2->add_option("--trials", trials);
  h2->add_option("--mode", mode)->check(CLI::IsMember({"exact", "resample"}));
  h2->add_option("--cap", cap);

  auto* exp = app.add_subcommand("experiment", "run a JSON experiment config");
  exp->add_option("--config", config_path)->required();
  exp->add_option("--plot", plot_metric, "also emit plot data for this metric");
  exp->add_option("--plot-out", plot_out);

  // Let global flags appear after the subcommand too.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const RandomSource rng{g.seed};
  try {
    if (*gen1) {
      emit_hypergraph(g, generate_h1(n, m, t, rng));
    } else if (*gen2) {
      emit_hypergraph(g, even ? generate_h2_even(n, m, rng) : generate_h2(n, m, p, rng));
    } else if (*disc) {
      const auto h = load(input);
      const auto report = disc_of(h, load_coloring(coloring_path));
      emit(g.out, [&](std::ostream& os) { os << to_json(report, per_edge).dump() << '\n'; });
    } else if (*brute) {
      const auto h = load(input);
      const auto res = brute_force_disc(h, cap, g.jobs);
      emit(g.out, [&](std::ostream& os) {
        os << "# optimum " << res.optimum << '\n';
        write_coloring(os, res.witness);
      });
    } else if (*bf) {
      const auto chi = beck_fiala_color(load(input));
      emit(g.out, [&](std::ostream& os) { write_coloring(os, chi); });
    } else if (*two) {
      const auto h = load(input);
      StageParams params;
      params.t = t;
      const auto res = color_two_stage(h, params, rng);
      if (!trace_path.empty()) {
        std::ofstream os(trace_path);
        if (!os) throw IoError("cannot open " + trace_path + " for writing");
        res.trace.write_csv(os);
      }
      emit(g.out, [&](std::ostream& os) { write_coloring(os, res.coloring); });
      std::cerr << "disc " << res.trace.report.disc << " rounds " << res.trace.rounds.size() << '\n';
    } else if (*norm) {
      const auto est = restricted_norm(load(input), t, 1e-9, 0, rng);
      emit(g.out, [&](std::ostream& os) { os << to_json(est).dump() << '\n'; });
    } else if (*moments) {
      const auto report = second_moment(n, m);
      emit(g.out, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
    } else if (*h2) {
      const auto res = h2_experiment(n, m, trials, rng,
                                     mode == "resample" ? H2Mode::kResample : H2Mode::kExact, cap,
                                     g.jobs);
      emit(g.out, [&](std::ostream& os) {
        os << "seed,X,disc_check\n";
        for (const auto& tr : res.trials) os << tr.seed << ',' << tr.x << ',' << tr.disc_ok << '\n';
      });
      std::cerr << "fraction " << res.fraction << '\n';
    } else if (*exp) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open " + config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: ") + e.what());
      }
      auto cfg = config_from_json(j);
      if (!g.out.empty()) cfg.csv_path = g.out;
      if (g.jobs) cfg.jobs = g.jobs;
      if (app.get_option("--seed")->count()) cfg.master_seed = g.seed;
      const auto res = run(cfg);
      if (cfg.csv_path.empty()) {
        std::cout << kResultHeader << '\n';
        for (const auto& r : res.rows) std::cout << to_csv_line(r) << '\n';
      }
      if (!plot_metric.empty()) {
        const auto data = emit_plot_data(res, plot_metric);
        emit(plot_out, [&](std::ostream& os) { os << data; });
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
