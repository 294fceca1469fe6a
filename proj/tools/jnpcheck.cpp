// Command-line driver: build constructions, run the registered claims and
// summarize CSV reports.
//
// Exit status: 0 all rows pass, 1 some row fails, 2 usage error, 3 accuracy or
// internal error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jnp/claims.hpp"
#include "jnp/functional.hpp"
#include "jnp/optimizer.hpp"
#include "jnp/towers.hpp"

namespace {

using namespace jnp;

Family family_arg(const std::string& name) {
  try {
    return parse_family(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number in --s: '" + item + "'");
    }
    if (used != item.size()) throw UsageError("bad number in --s: '" + item + "'");
    out.push_back(x);
  }
  return out;
}

int print_rows(const std::vector<ClaimReport>& rows, std::size_t max_failures) {
  std::size_t failed = 0;
  for (const auto& t : tally(rows)) {
    std::printf("%-16s %5zu rows  %s\n", t.claim_id.c_str(), t.rows,
                t.failed == 0 ? "PASS" : ("FAIL (" + std::to_string(t.failed) + ")").c_str());
    failed += t.failed;
  }
  std::size_t shown = 0;
  for (const auto& r : rows) {
    if (r.pass) continue;
    if (shown++ == max_failures) {
      std::printf("  ... %zu more failing rows\n", failed - max_failures);
      break;
    }
    std::printf("  fail %s [%s] #%lld lhs=%s rhs=%s ratio=%.6g%s%s\n", r.claim_id.c_str(), r.param_set.c_str(),
                static_cast<long long>(r.index), r.lhs.to_string().c_str(), r.rhs.to_string().c_str(), r.ratio,
                r.note.empty() ? "" : "  ", r.note.c_str());
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks for the tower counterexample constructions"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "key=value file with default parameters")->check(CLI::ExistingFile);

  // construct
  auto* construct = app.add_subcommand("construct", "build a construction and write it as text");
  std::string family = "u";
  double c_p = 2.0, power = 1.0;
  int c_depth = 8;
  std::string custom_s, out_path;
  construct->add_option("--family", family, "u, g, g0 or custom")->required();
  construct->add_option("--p", c_p, "exponent p > 1");
  construct->add_option("--depth", c_depth, "number of levels");
  construct->add_option("--power", power, "power applied to the roofs");
  construct->add_option("--s", custom_s, "comma separated s_i for the custom family");
  construct->add_option("--out", out_path, "output file")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "run one claim or all of them");
  std::string claim = "all";
  double v_p = 0, v_q = 0, tol = 0, window = 0;
  int v_depth = 0, refine = 0;
  long long seed = 0;
  std::string csv_out;
  bool list = false;
  std::size_t max_failures = 20;
  verify->add_option("claim", claim, "claim ID or 'all'");
  auto* o_p = verify->add_option("--p", v_p, "exponent p");
  auto* o_q = verify->add_option("--q", v_q, "exponent q >= p");
  auto* o_depth = verify->add_option("--depth", v_depth, "construction depth");
  auto* o_refine = verify->add_option("--refine", refine, "grid refinement rounds");
  auto* o_seed = verify->add_option("--seed", seed, "seed of the randomized suites");
  auto* o_tol = verify->add_option("--tol", tol, "relative tolerance for identities");
  auto* o_window = verify->add_option("--window", window, "relative window for fitted constants");
  verify->add_option("--csv", csv_out, "write all rows to this CSV file");
  verify->add_option("--show", max_failures, "failing rows to print");
  verify->add_flag("--list", list, "list the registered claims and exit");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "search lower bound of the partition sum by dynamic programming");
  std::string o_family = "u", in_path;
  double opt_p = 2.0, max_len = 0;
  int opt_depth = 8, grid_refine = 2;
  optimize->add_option("--family", o_family, "u, g or g0 (ignored with --in)");
  optimize->add_option("--in", in_path, "construction file written by construct")->check(CLI::ExistingFile);
  optimize->add_option("--p", opt_p, "exponent p");
  optimize->add_option("--depth", opt_depth, "construction depth (at most 20)");
  auto* o_max_len = optimize->add_option("--max-len", max_len, "length cap of the intervals");
  optimize->add_option("--grid-refine", grid_refine, "grid refinement rounds");

  // report
  auto* report = app.add_subcommand("report", "summarize a CSV written by verify");
  std::string csv_in;
  report->add_option("--csv", csv_in, "CSV file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*construct) {
      Family fam = family_arg(family);
      std::vector<double> s;
      if (fam == Family::Custom) {
        s = parse_list(custom_s);
        if (static_cast<int>(s.size()) < c_depth) throw UsageError("--s needs at least depth values");
      }
      if (!(c_p > 1.0)) throw UsageError("p must exceed 1");
      if (c_depth < 1 || c_depth > TowerSet::kMaxDepth) throw UsageError("depth out of range");
      if (!(power > 0.0)) throw UsageError("power must be positive");
      TowerSet ts = TowerSet::build(Schedule::of(fam, c_p, s), c_depth, power);
      std::ofstream os(out_path);
      if (!os) throw UsageError("cannot write " + out_path);
      ts.write(os);
      std::printf("%s: family %s, p %g, depth %d, power %g, %llu towers\n", out_path.c_str(), family.c_str(), c_p,
                  c_depth, power, static_cast<unsigned long long>(ts.node_count()));
      return 0;
    }

    if (*verify) {
      if (list) {
        for (const auto& id : claim_ids()) std::printf("%-16s %s\n", id.c_str(), claim_summary(id).c_str());
        return 0;
      }
      Params prm;
      if (!config.empty()) {
        std::ifstream is(config);
        prm.load(is);
      }
      if (o_p->count()) prm.p = v_p;
      if (o_q->count()) prm.q = v_q;
      if (o_depth->count()) prm.depth = v_depth;
      if (o_refine->count()) prm.refine = refine;
      if (o_seed->count()) {
        if (seed < 0) throw UsageError("seed must be nonnegative");
        prm.seed = static_cast<std::uint64_t>(seed);
      }
      if (o_tol->count()) prm.tol = tol;
      if (o_window->count()) prm.window = window;
      std::vector<std::string> ids = claim == "all" ? claim_ids() : std::vector<std::string>{claim};
      auto t0 = std::chrono::steady_clock::now();
      auto rows = run_claims(ids, prm);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("parameters %s (values refer to the depth %d truncation)\n", prm.describe().c_str(), prm.depth);
      int rc = print_rows(rows, max_failures);
      std::printf("%zu rows in %.1f s\n", rows.size(), secs);
      if (!csv_out.empty()) {
        std::ofstream os(csv_out);
        if (!os) throw UsageError("cannot write " + csv_out);
        write_csv(os, rows);
      }
      return rc;
    }

    if (*optimize) {
      std::optional<TowerSet> ts;
      if (!in_path.empty()) {
        std::ifstream is(in_path);
        ts = TowerSet::read(is);
      } else {
        if (!(opt_p > 1.0)) throw UsageError("p must exceed 1");
        ts = TowerSet::build(Schedule::of(family_arg(o_family), opt_p), opt_depth);
      }
      if (ts->depth() > 20) throw UsageError("optimize supports depth <= 20");
      if (grid_refine < 0) throw UsageError("--grid-refine must be nonnegative");
      std::optional<ExtReal> cap;
      if (o_max_len->count()) {
        if (!(max_len > 0.0)) throw UsageError("--max-len must be positive");
        cap = ExtReal(max_len);
      }
      const double p = in_path.empty() ? opt_p : ts->schedule().p();
      BreakpointGrid grid = candidate_grid(*ts, grid_refine);
      DpResult r = dp_max(*ts, p, grid, cap);
      std::printf("grid %zu points, search lower bound %s over %zu intervals\n", grid.size(),
                  r.value.to_string().c_str(), r.partition.size());
      for (const auto& j : r.partition)
        std::printf("  start %s  length %s  F = %s\n", j.start.to_string().c_str(),
                    j.measure().to_string().c_str(), osc_term(*ts, j, p).to_string().c_str());
      return 0;
    }

    if (*report) {
      std::ifstream is(csv_in);
      auto rows = read_csv(is);
      return print_rows(rows, 20);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const AccuracyError& e) {
    std::fprintf(stderr, "accuracy error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
