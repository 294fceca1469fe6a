#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jnp/errors.hpp"
#include "jnp/towers.hpp"

namespace jnp {

enum class PointTag { Boundary, TowerEdge, Midpoint, DyadicRefine, Window };

/// Sorted, strictly increasing candidate endpoints.
struct BreakpointGrid {
  std::vector<Coord> points;
  std::vector<PointTag> tags;

  std::size_t size() const { return points.size(); }
  /// Sorts and removes duplicates; the first tag seen for a point is kept.
  static BreakpointGrid from(std::vector<std::pair<Coord, PointTag>> pts);
  /// Index of an exact point; throws std::out_of_range when absent.
  std::size_t index_of(const Coord& x) const;
};

/// Tower endpoints plus the domain ends, then `refine` rounds of insertion in
/// every gap between towers: round 1 adds gap and tower midpoints, round r >= 2
/// adds the points at gap * 2^-r from each gap end. Size <= 2^(N+1) (refine + 2).
BreakpointGrid candidate_grid(const TowerSet& ts, int refine);

/// A fixed-value item for the DP: choosing [points[from], points[to]) earns
/// `value`, whatever the length cap.
struct DpExtra {
  std::size_t from = 0;
  std::size_t to = 0;
  ExtReal value;
};

struct DpChoice {
  std::size_t from = 0;
  std::size_t to = 0;
  int extra = -1;  // index into the extras list, or -1 for a plain interval
  ExtReal value;
};

struct DpResult {
  ExtReal value;
  std::vector<DpChoice> choices;    // left to right
  std::vector<Interval> partition;  // the spans of the choices
};

using WeightFn = std::function<ExtReal(const Interval&)>;

/// best[k] = max(best[k-1], max_j best[j] + w([g_j, g_k])) over pairs within the
/// cap, plus the extras. Ties go to the smallest j, so the parallel and serial
/// versions return the same partition.
DpResult dp_solve(const BreakpointGrid& grid, const WeightFn& weight,
                  const std::optional<Coord>& cap, std::span<const DpExtra> extras = {});
DpResult dp_solve_serial(const BreakpointGrid& grid, const WeightFn& weight,
                         const std::optional<Coord>& cap, std::span<const DpExtra> extras = {});

/// Search lower bound for sum F(J) over disjoint J with endpoints in the grid.
DpResult dp_max(const TowerSet& f, double p, const BreakpointGrid& grid,
                const std::optional<ExtReal>& max_len = std::nullopt);
DpResult dp_max_serial(const TowerSet& f, double p, const BreakpointGrid& grid,
                       const std::optional<ExtReal>& max_len = std::nullopt);

/// Every tower interval, left to right.
std::vector<Interval> witness_dyadic(const TowerSet& ts);

/// Per-level sums of F over the tower intervals: entry i (1-based) is the sum
/// over the 2^(i-1) towers of level i. Streams over subtrees, so any depth
/// works; the parallel version splits the work by subtree and combines the
/// parts in a fixed order, giving the same result as the serial one.
std::vector<ExtReal> dyadic_level_sums(const TowerSet& f, double p);
std::vector<ExtReal> dyadic_level_sums_serial(const TowerSet& f, double p);

/// The cover interval [t - l_k, t + l_k) of the level-k tower at `path`.
Interval cover_interval(const TowerSet& g, int k, std::uint64_t path);
/// g_J / h_k for the cover intervals of level k (all equal by translation).
ExtReal cover_average_ratio(const TowerSet& g, int k);
/// Smallest k0 such that g_J <= (3/4) h_k for every k in [k0, depth - 1].
int cover_threshold(const TowerSet& g);
/// All 2^(k-1) cover intervals of level k. Throws PreconditionError below the
/// threshold (naming it) and std::length_error for k > 18.
std::vector<Interval> witness_cover(const TowerSet& g, int k);

/// sum_i 2^(i-1) int |tower_i|^p, exact per level.
ExtReal lp_mass(const TowerSet& ts, double p);

/// Lower bound of the modulus sup { sum F(J) : |J| <= delta_k } assembled from
/// windows around single towers and around whole subtrees; see README.
struct ModulusPoint {
  int k = 0;
  ExtReal cap;
  ExtReal value;
  ExtReal towers_part;   // windows of the towers of levels <= k
  ExtReal subtree_part;  // windows of the level k+1 subtrees
};

class ModulusSearch {
 public:
  ModulusSearch(const TowerSet& f, double p, int sub_levels = 4);

  /// Requires 1 <= k < depth.
  ModulusPoint at_level(int k);
  /// Explicit partition achieving at_level(k).value; only for depth <= 12.
  std::vector<Interval> partition(int k);

  /// Best sum inside the window of the level-i tower (margins delta_i / 2).
  ExtReal tower_window(int level, int cap_level);
  /// Best sum inside the window of the level-j subtree (margins delta_(j-1) / 2).
  ExtReal subtree_window(int level, int cap_level);

 private:
  struct Solved;
  struct Extra {
    bool subtree;
    int level;
    std::uint64_t rel_path;
    const Solved* solved;  // memo entries never move
  };
  struct Solved {
    BreakpointGrid grid;
    DpResult dp;
    std::vector<Extra> extras;
  };

  std::optional<Coord> cap_of(int cap_level) const;
  Interval tower_window_span(int level) const;
  Interval subtree_window_span(int level) const;
  const Solved& solve_tower(int level, int cap_level);
  const Solved& solve_subtree(int level, int cap_level);
  void expand(const Solved& s, int level, std::uint64_t path, const Coord& shift,
              std::vector<Interval>& out);

  const TowerSet& f_;
  double p_;
  int sub_levels_;
  std::map<std::pair<int, int>, Solved> towers_;
  std::map<std::pair<int, int>, Solved> subtrees_;
};

}  // namespace jnp
