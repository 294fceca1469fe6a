#include "jnp/optimizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "jnp/functional.hpp"

namespace jnp {

BreakpointGrid BreakpointGrid::from(std::vector<std::pair<Coord, PointTag>> pts) {
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  BreakpointGrid g;
  g.points.reserve(pts.size());
  g.tags.reserve(pts.size());
  for (auto& [x, tag] : pts) {
    if (!g.points.empty() && g.points.back() == x) continue;
    g.points.push_back(std::move(x));
    g.tags.push_back(tag);
  }
  return g;
}

std::size_t BreakpointGrid::index_of(const Coord& x) const {
  auto it = std::lower_bound(points.begin(), points.end(), x);
  if (it == points.end() || !(*it == x)) throw std::out_of_range("grid point not found");
  return static_cast<std::size_t>(it - points.begin());
}

BreakpointGrid candidate_grid(const TowerSet& ts, int refine) {
  if (refine < 0) throw PreconditionError("candidate_grid: refine must be >= 0");
  if (ts.depth() > 20) throw std::length_error("candidate_grid: depth above 20 gives too many points");
  std::vector<std::pair<Coord, PointTag>> pts;
  Interval dom = ts.domain();
  pts.emplace_back(dom.start, PointTag::Boundary);
  pts.emplace_back(dom.end, PointTag::Boundary);
  Coord prev_end = dom.start;
  auto add_gap = [&](const Coord& a, const Coord& b) {
    if (refine < 1 || !(a < b)) return;
    Coord len = b - a;
    pts.emplace_back(a + len.half(), PointTag::Midpoint);
    Coord step = len.half();
    for (int r = 2; r <= refine; ++r) {
      step = step.half();
      pts.emplace_back(a + step, PointTag::DyadicRefine);
      pts.emplace_back(b - step, PointTag::DyadicRefine);
    }
  };
  ts.for_each_node([&](const TowerNode& n) {
    pts.emplace_back(n.interval.start, PointTag::TowerEdge);
    pts.emplace_back(n.interval.end, PointTag::TowerEdge);
    if (refine >= 1) pts.emplace_back(n.interval.start + n.interval.length().half(), PointTag::Midpoint);
    add_gap(prev_end, n.interval.start);
    prev_end = n.interval.end;
  });
  add_gap(prev_end, dom.end);
  return BreakpointGrid::from(std::move(pts));
}

namespace {

struct Pick {
  ExtReal value;
  std::ptrdiff_t from = -1;  // -1: no pick
};

// Larger value wins; equal values go to the smaller start index.
bool better(const Pick& a, const Pick& b) {
  if (a.from < 0) return false;
  if (b.from < 0) return true;
  if (b.value < a.value) return true;
  return a.value == b.value && a.from < b.from;
}

template <bool Parallel>
DpResult solve(const BreakpointGrid& grid, const WeightFn& weight, const std::optional<Coord>& cap,
               std::span<const DpExtra> extras) {
  DpResult res;
  const std::size_t n = grid.size();
  if (n < 2) return res;
  const auto& g = grid.points;

  std::vector<std::vector<std::size_t>> extras_at(n);
  for (std::size_t e = 0; e < extras.size(); ++e) {
    if (extras[e].from >= extras[e].to || extras[e].to >= n)
      throw std::out_of_range("dp: extra item outside the grid");
    extras_at[extras[e].to].push_back(e);
  }

  std::vector<ExtReal> best(n);
  std::vector<DpChoice> choice(n);
  std::vector<bool> skip(n, true);
  std::size_t lo = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (cap) {
      while (lo < k && *cap < g[k] - g[lo]) ++lo;
    }
    Pick shared;
    if constexpr (Parallel) {
      const auto first = static_cast<std::ptrdiff_t>(lo);
      const auto last = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel if (last - first > 32)
      {
        Pick local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t j = first; j < last; ++j) {
          auto uj = static_cast<std::size_t>(j);
          Pick c{best[uj] + weight(Interval(g[uj], g[k])), j};
          if (better(c, local)) local = c;
        }
#pragma omp critical(jnp_dp_merge)
        if (better(local, shared)) shared = local;
      }
    } else {
      for (std::size_t j = lo; j < k; ++j) {
        Pick c{best[j] + weight(Interval(g[j], g[k])), static_cast<std::ptrdiff_t>(j)};
        if (better(c, shared)) shared = c;
      }
    }
    best[k] = best[k - 1];
    if (shared.from >= 0 && best[k] < shared.value) {
      best[k] = shared.value;
      skip[k] = false;
      choice[k] = {static_cast<std::size_t>(shared.from), k, -1,
                   shared.value - best[static_cast<std::size_t>(shared.from)]};
    }
    for (std::size_t e : extras_at[k]) {
      ExtReal v = best[extras[e].from] + extras[e].value;
      if (best[k] < v) {
        best[k] = v;
        skip[k] = false;
        choice[k] = {extras[e].from, k, static_cast<int>(e), extras[e].value};
      }
    }
  }

  res.value = best[n - 1];
  for (std::size_t k = n - 1; k > 0;) {
    if (skip[k]) {
      --k;
      continue;
    }
    res.choices.push_back(choice[k]);
    k = choice[k].from;
  }
  std::reverse(res.choices.begin(), res.choices.end());
  for (auto& c : res.choices) {
    // Plain choices carry the weight itself rather than a difference of sums.
    if (c.extra < 0) c.value = weight(Interval(g[c.from], g[c.to]));
    res.partition.emplace_back(g[c.from], g[c.to]);
  }
  return res;
}

WeightFn osc_weight(const TowerSet& f, double p) {
  return [&f, p](const Interval& j) { return osc_term(f, j, p); };
}

std::optional<Coord> cap_coord(const std::optional<ExtReal>& max_len) {
  if (!max_len) return std::nullopt;
  return Coord(*max_len);
}

}  // namespace

DpResult dp_solve(const BreakpointGrid& grid, const WeightFn& weight, const std::optional<Coord>& cap,
                  std::span<const DpExtra> extras) {
  return solve<true>(grid, weight, cap, extras);
}

DpResult dp_solve_serial(const BreakpointGrid& grid, const WeightFn& weight,
                         const std::optional<Coord>& cap, std::span<const DpExtra> extras) {
  return solve<false>(grid, weight, cap, extras);
}

DpResult dp_max(const TowerSet& f, double p, const BreakpointGrid& grid,
                const std::optional<ExtReal>& max_len) {
  return dp_solve(grid, osc_weight(f, p), cap_coord(max_len));
}

DpResult dp_max_serial(const TowerSet& f, double p, const BreakpointGrid& grid,
                       const std::optional<ExtReal>& max_len) {
  return dp_solve_serial(grid, osc_weight(f, p), cap_coord(max_len));
}

std::vector<Interval> witness_dyadic(const TowerSet& ts) {
  std::vector<Interval> out;
  ts.for_each_node([&](const TowerNode& n) { out.push_back(n.interval); });
  return out;
}

namespace {

template <bool Parallel>
std::vector<ExtReal> level_sums(const TowerSet& f, double p) {
  const int depth = f.depth();
  const int split = std::min(depth, 7);
  const auto chunks = static_cast<std::int64_t>(f.nodes_at(split));
  // Levels above the split are few; evaluate them directly.
  std::vector<CompensatedSum> top(static_cast<std::size_t>(depth) + 1);
  for (int i = 1; i < split; ++i)
    for (std::uint64_t path = 0; path < f.nodes_at(i); ++path)
      top[static_cast<std::size_t>(i)].add(osc_term(f, f.node(i, path).interval, p));

  std::vector<std::vector<CompensatedSum>> parts(static_cast<std::size_t>(chunks),
                                                 std::vector<CompensatedSum>(static_cast<std::size_t>(depth) + 1));
  auto run_chunk = [&](std::int64_t c) {
    auto& acc = parts[static_cast<std::size_t>(c)];
    auto path = static_cast<std::uint64_t>(c);
    f.for_each_node_in(split, path, f.node_start(split, path), [&](const TowerNode& n) {
      acc[static_cast<std::size_t>(n.level)].add(osc_term(f, n, p));
    });
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }

  std::vector<ExtReal> out(static_cast<std::size_t>(depth) + 1);
  for (int i = 1; i <= depth; ++i) {
    auto& acc = top[static_cast<std::size_t>(i)];
    for (const auto& part : parts) acc.add(part[static_cast<std::size_t>(i)].value());
    out[static_cast<std::size_t>(i)] = acc.value();
  }
  return out;
}

}  // namespace

std::vector<ExtReal> dyadic_level_sums(const TowerSet& f, double p) { return level_sums<true>(f, p); }

std::vector<ExtReal> dyadic_level_sums_serial(const TowerSet& f, double p) {
  return level_sums<false>(f, p);
}

Interval cover_interval(const TowerSet& g, int k, std::uint64_t path) {
  Coord t = g.node_start(k, path);
  const Coord& l = g.level(k).width_c;
  return Interval(t - l, t + l);
}

ExtReal cover_average_ratio(const TowerSet& g, int k) {
  if (!g.schedule().flat()) throw PreconditionError("cover witnesses need flat roofs");
  Interval j = cover_interval(g, k, 0);
  ExtReal h = g.schedule().roof_left(k);
  return g.integral(j) / j.measure() / h;
}

int cover_threshold(const TowerSet& g) {
  const ExtReal three_quarters(0.75);
  int k0 = g.depth() - 1;
  for (int k = g.depth() - 1; k >= 1; --k) {
    if (cover_average_ratio(g, k) <= three_quarters) {
      k0 = k;
    } else {
      break;
    }
  }
  return k0;
}

std::vector<Interval> witness_cover(const TowerSet& g, int k) {
  if (k < 1 || k >= g.depth())
    throw PreconditionError("witness_cover: k must lie in [1, depth - 1]");
  int k0 = cover_threshold(g);
  if (k < k0)
    throw PreconditionError("witness_cover: k = " + std::to_string(k) +
                            " is below the minimal valid level " + std::to_string(k0));
  if (k > 18) throw std::length_error("witness_cover: too many intervals to materialize");
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(g.nodes_at(k)));
  for (std::uint64_t path = 0; path < g.nodes_at(k); ++path) out.push_back(cover_interval(g, k, path));
  return out;
}

ExtReal lp_mass(const TowerSet& ts, double p) { return ts.lp_mass(p); }

ModulusSearch::ModulusSearch(const TowerSet& f, double p, int sub_levels)
    : f_(f), p_(p), sub_levels_(sub_levels) {
  if (sub_levels < 1) throw PreconditionError("ModulusSearch: sub_levels must be >= 1");
}

std::optional<Coord> ModulusSearch::cap_of(int cap_level) const {
  if (cap_level < 0) return std::nullopt;
  return f_.level(cap_level).inner_gap_c;
}

Interval ModulusSearch::tower_window_span(int level) const {
  Coord s = f_.node_start(level, 0);
  Coord m = f_.level(level).inner_gap_c.half();
  return Interval(s - m, s + f_.level(level).width_c + m);
}

Interval ModulusSearch::subtree_window_span(int level) const {
  Interval hull = f_.subtree_hull(level, 0);
  Coord m = f_.level(level - 1).inner_gap_c.half();
  return Interval(hull.start - m, hull.end + m);
}

const ModulusSearch::Solved& ModulusSearch::solve_tower(int level, int cap_level) {
  auto key = std::make_pair(level, cap_level);
  if (auto it = towers_.find(key); it != towers_.end()) return it->second;

  Interval win = tower_window_span(level);
  Coord s = f_.node_start(level, 0);
  const Coord& l = f_.level(level).width_c;
  std::vector<std::pair<Coord, PointTag>> pts{{win.start, PointTag::Window},
                                              {win.end, PointTag::Window},
                                              {s, PointTag::TowerEdge},
                                              {s + l, PointTag::TowerEdge},
                                              {s + l.half(), PointTag::Midpoint}};
  // Offsets of half of every smaller gap from both edges; the grid does not
  // depend on the cap, so a smaller cap can only lower the value.
  for (int j = level; j <= f_.depth(); ++j) {
    Coord m = f_.level(j).inner_gap_c.half();
    for (const Coord& edge : {s, s + l}) {
      pts.emplace_back(edge - m, PointTag::Window);
      pts.emplace_back(edge + m, PointTag::Window);
    }
  }
  Solved sol;
  sol.grid = BreakpointGrid::from(std::move(pts));
  sol.dp = dp_solve(sol.grid, osc_weight(f_, p_), cap_of(cap_level));
  return towers_.emplace(key, std::move(sol)).first->second;
}

const ModulusSearch::Solved& ModulusSearch::solve_subtree(int level, int cap_level) {
  if (level < 2 || level > f_.depth()) throw std::out_of_range("subtree window level out of range");
  Interval win = subtree_window_span(level);
  if (cap_level >= 0 && win.length() <= *cap_of(cap_level)) cap_level = -1;
  auto key = std::make_pair(level, cap_level);
  if (auto it = subtrees_.find(key); it != subtrees_.end()) return it->second;

  const int last = std::min(level + sub_levels_ - 1, f_.depth());
  const Coord cap_half = f_.level(level - 1).inner_gap_c.half();
  std::vector<std::pair<Coord, PointTag>> pts{{win.start, PointTag::Window},
                                              {win.end, PointTag::Window}};
  struct Item {
    Interval span;
    Extra extra;
  };
  std::vector<Item> items;

  const Solved& root = solve_tower(level, cap_level);
  items.push_back({tower_window_span(level), {false, level, 0, &root}});

  for (int lv = level; lv <= last; ++lv) {
    const LevelData& L = f_.level(lv);
    const std::uint64_t count = std::uint64_t{1} << (lv - level);
    for (std::uint64_t rel = 0; rel < count; ++rel) {
      Coord s = f_.node_start(lv, rel);
      Coord e = s + L.width_c;
      Coord m = L.inner_gap_c.half();
      pts.emplace_back(s, PointTag::TowerEdge);
      pts.emplace_back(e, PointTag::TowerEdge);
      pts.emplace_back(s + L.width_c.half(), PointTag::Midpoint);
      pts.emplace_back(s - L.width_c, PointTag::Window);
      pts.emplace_back(e + L.width_c, PointTag::Window);
      pts.emplace_back(s - L.reach_c, PointTag::Window);
      pts.emplace_back(e + L.reach_c, PointTag::Window);
      pts.emplace_back(s - m, PointTag::Window);
      pts.emplace_back(e + m, PointTag::Window);
      for (const Coord& edge : {s, e}) {
        pts.emplace_back(edge - cap_half, PointTag::Window);
        pts.emplace_back(edge + cap_half, PointTag::Window);
      }
    }
  }
  // Whole child subtrees below the truncation, and the two children of the root.
  auto add_child = [&](int lv, std::uint64_t rel) {
    const Solved& sub = solve_subtree(lv, cap_level);
    Interval span0 = subtree_window_span(lv);
    Coord shift = f_.node_start(lv, rel) - f_.node_start(lv, 0);
    Interval span(span0.start + shift, span0.end + shift);
    pts.emplace_back(span.start, PointTag::Window);
    pts.emplace_back(span.end, PointTag::Window);
    items.push_back({span, {true, lv, rel, &sub}});
  };
  if (last < f_.depth()) {
    for (std::uint64_t rel = 0; rel < (std::uint64_t{1} << (last + 1 - level)); ++rel)
      add_child(last + 1, rel);
  }
  if (last > level) {
    add_child(level + 1, 0);
    add_child(level + 1, 1);
  }

  std::erase_if(pts, [&](const auto& pt) { return pt.first < win.start || win.end < pt.first; });
  Solved sol;
  sol.grid = BreakpointGrid::from(std::move(pts));
  std::vector<DpExtra> extras;
  for (const auto& it : items) {
    extras.push_back({sol.grid.index_of(it.span.start), sol.grid.index_of(it.span.end),
                      it.extra.solved->dp.value});
    sol.extras.push_back(it.extra);
  }
  sol.dp = dp_solve(sol.grid, osc_weight(f_, p_), cap_of(cap_level), extras);
  return subtrees_.emplace(key, std::move(sol)).first->second;
}

ExtReal ModulusSearch::tower_window(int level, int cap_level) {
  return solve_tower(level, cap_level).dp.value;
}

ExtReal ModulusSearch::subtree_window(int level, int cap_level) {
  return solve_subtree(level, cap_level).dp.value;
}

ModulusPoint ModulusSearch::at_level(int k) {
  if (k < 1 || k >= f_.depth()) throw PreconditionError("modulus: k must lie in [1, depth - 1]");
  ModulusPoint pt;
  pt.k = k;
  pt.cap = f_.gap_inner(k);
  CompensatedSum towers;
  for (int i = 1; i <= k; ++i) towers.add(tower_window(i, k).ldexp(i - 1));
  pt.towers_part = towers.value();
  pt.subtree_part = subtree_window(k + 1, k).ldexp(k);
  pt.value = pt.towers_part + pt.subtree_part;
  return pt;
}

void ModulusSearch::expand(const Solved& s, int level, std::uint64_t path, const Coord& shift,
                           std::vector<Interval>& out) {
  for (const auto& c : s.dp.choices) {
    if (c.extra < 0) {
      out.emplace_back(s.grid.points[c.from] + shift, s.grid.points[c.to] + shift);
      continue;
    }
    const Extra& e = s.extras[static_cast<std::size_t>(c.extra)];
    std::uint64_t abs_path = (path << (e.level - level)) | e.rel_path;
    Coord sub_shift = f_.node_start(e.level, abs_path) - f_.node_start(e.level, 0);
    expand(*e.solved, e.level, abs_path, sub_shift, out);
  }
}

std::vector<Interval> ModulusSearch::partition(int k) {
  if (f_.depth() > 12) throw std::length_error("modulus partition: depth above 12");
  at_level(k);
  std::vector<Interval> out;
  for (int i = 1; i <= k; ++i) {
    const Solved& s = solve_tower(i, k);
    for (std::uint64_t path = 0; path < f_.nodes_at(i); ++path)
      expand(s, i, path, f_.node_start(i, path) - f_.node_start(i, 0), out);
  }
  const Solved& s = solve_subtree(k + 1, k);
  for (std::uint64_t path = 0; path < f_.nodes_at(k + 1); ++path)
    expand(s, k + 1, path, f_.node_start(k + 1, path) - f_.node_start(k + 1, 0), out);
  return out;
}

}  // namespace jnp
