#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jnp/coord.hpp"
#include "jnp/xreal.hpp"

namespace jnp {

enum class Family { U, G, G0, Custom };

std::string to_string(Family f);
Family parse_family(const std::string& name);

/// Per-level widths, gaps and roof heights of a tower construction.
///
/// All families share widths l(i) = 2^-(i+1/2)^2 and gaps d(i) = 2^-(i+1)^2.
/// U has an inclined roof from (1 - i^-1/p) 2^(i^2/p) to (1 + i^-1/p) 2^(i^2/p);
/// G, G0 and Custom have flat roofs at 2^(i^2/p), (2^(i^2)/i)^(1/p) and
/// (2^(i^2) s_i)^(1/p) respectively.
class Schedule {
 public:
  static Schedule u(double p);
  static Schedule g(double p);
  static Schedule g0(double p);
  static Schedule custom(double p, std::vector<double> s);
  static Schedule of(Family f, double p, std::vector<double> s = {});

  Family family() const { return family_; }
  double p() const { return p_; }
  const std::vector<double>& custom_s() const { return s_; }
  bool flat() const { return family_ != Family::U; }

  ExtReal width(int i) const;
  ExtReal gap(int i) const;
  ExtReal roof_left(int i) const;
  ExtReal roof_right(int i) const;

 private:
  Schedule(Family f, double p, std::vector<double> s);
  ExtReal base_height(int i) const;

  Family family_;
  double p_;
  std::vector<double> s_;
};

/// One tower: the interval hat-I assigned to the dyadic interval
/// I = [path 2^-level, (path+1) 2^-level) inside [0, 1/2).
struct TowerNode {
  int level = 0;
  std::uint64_t path = 0;
  Interval interval;
  ExtReal left;   // roof height at interval.start
  ExtReal right;  // roof height at interval.end

  /// Bits b_1..b_{level-1} from the root, '0' = left half; "-" for the root.
  std::string path_bits() const;
};

/// Cached per-level quantities. Counts of descendants refer to the truncated
/// construction of the owning TowerSet.
struct LevelData {
  ExtReal width, gap, left, right, slope;
  Coord width_c, gap_c;
  Coord reach_c;       // farthest descendant extent D_i
  Coord inner_gap_c;   // nearest distance to another tower delta_i
  Coord subtree_support_c;
  ExtReal node_mass;     // integral of roof^power over one tower
  ExtReal subtree_mass;  // same, summed over the tower and all descendants
  ExtReal peak;          // max(left, right)^power
};

/// Towers of a construction met by an interval J, as whole subtrees contained
/// in J and partially covered towers.
struct Cover {
  struct Piece {
    int level;
    std::uint64_t path;
    ExtReal start_off;  // offset of the clipped piece from the tower start
    ExtReal length;
    Coord length_c;
    bool whole;
  };
  Interval span;
  ExtReal measure;  // |span|
  /// Roots (level, path) of subtrees lying entirely inside the span.
  std::vector<std::pair<int, std::uint64_t>> full_roots;
  std::vector<Piece> pieces;

  bool touches_towers() const;
};

/// Truncated fractal construction of a given depth: 2^(i-1) towers at each
/// level i <= depth, laid out recursively inside [origin, origin + 1]. The
/// function represented is the sum over towers of (linear roof)^power.
/// Nodes are generated on demand from their dyadic path.
class TowerSet {
 public:
  static constexpr int kMaxDepth = 30;

  static TowerSet build(const Schedule& schedule, int depth, double power = 1.0,
                        const Coord& origin = Coord());

  const Schedule& schedule() const { return schedule_; }
  int depth() const { return depth_; }
  double power() const { return power_; }
  const Coord& origin() const { return origin_; }
  /// Same construction translated by s.
  TowerSet translated(const Coord& s) const;
  /// Same layout with roof^power replaced by roof^new_power.
  TowerSet with_power(double new_power) const;

  const LevelData& level(int i) const { return levels_.at(static_cast<std::size_t>(i)); }
  Interval domain() const;
  std::uint64_t node_count() const { return (std::uint64_t{1} << depth_) - 1; }
  std::uint64_t nodes_at(int level) const { return std::uint64_t{1} << (level - 1); }

  Coord node_start(int level, std::uint64_t path) const;
  TowerNode node(int level, std::uint64_t path) const;
  /// Left-to-right traversal of all towers.
  template <class Fn>
  void for_each_node(Fn&& fn) const;
  /// In-order walk of the subtree rooted at (level, path) starting at `start`.
  template <class Fn>
  void for_each_node_in(int level, std::uint64_t path, const Coord& start, Fn&& fn) const {
    walk(level, path, start, fn);
  }
  /// All towers in left-to-right order. Throws for depth > 22.
  std::vector<TowerNode> nodes() const;
  /// Smallest interval containing every tower.
  Interval support_hull() const;
  /// Smallest interval containing the tower (level, path) and its descendants.
  Interval subtree_hull(int level, std::uint64_t path) const;

  /// Nearest distance from a level-i tower to any other tower, delta_i.
  ExtReal gap_inner(int i) const;
  /// Farthest distance from a level-i tower to its descendants, D_i.
  ExtReal reach(int i) const;
  /// Bound on the part of the delta/D series cut off by the truncation.
  ExtReal series_tail_bound() const;

  ExtReal eval(const Coord& x) const;

  Cover cover(const Interval& j) const;
  /// Cover of J by the subtree rooted at (level, path), whose root tower starts
  /// at `start`. Equals cover(j) when J lies inside subtree_hull(level, path);
  /// throws std::invalid_argument otherwise.
  Cover cover_in(const Interval& j, int level, std::uint64_t path, const Coord& start) const;
  /// Cover of the tower interval of `n` itself: a single whole piece, since
  /// every other tower is at least delta_i away. Equals cover(n.interval).
  Cover tower_cover(const TowerNode& n) const;
  ExtReal integral(const Interval& j) const;
  ExtReal integral(const Cover& c) const;
  /// Integral over the cover with one tower removed.
  ExtReal integral_excluding(const Cover& c, int level, std::uint64_t path) const;
  ExtReal integral_abs_dev(const Interval& j, const ExtReal& c) const;
  ExtReal integral_abs_dev(const Cover& cov, const ExtReal& c) const;
  /// Measure of J covered by towers, exact.
  Coord support_measure(const Cover& c) const;
  /// |{x in J : f(x) > t}|.
  ExtReal measure_above(const Cover& cov, const ExtReal& t) const;
  /// |{x : f(x) > t}| over the whole construction.
  ExtReal distribution(const ExtReal& t) const;
  /// Smallest m with |{x in J : f <= m}| >= |J| / 2.
  ExtReal median(const Interval& j) const;
  ExtReal median(const Cover& cov) const;
  /// Largest value of the function anywhere.
  ExtReal peak() const;
  /// Integral of |f|^p over the construction, exact per level.
  ExtReal lp_mass(double p) const;

  /// Line-oriented text snapshot: header, per-level constants, every node.
  void write(std::ostream& os) const;
  /// Rebuilds from a snapshot and checks every node line against the rebuild.
  static TowerSet read(std::istream& is);

 private:
  TowerSet(Schedule s, int depth, double power, Coord origin);
  void compute_levels();
  const LevelData& level_at_checked(int i) const;
  void piece_roof(const Cover::Piece& pc, ExtReal& y0, ExtReal& dy) const;
  // Sum over levels j >= from of 2^(j-from) * per_level(j).
  template <class PerLevel>
  ExtReal subtree_sum(int from, PerLevel&& per_level) const;
  ExtReal measure_above_root(const Cover& cov, const ExtReal& root_level) const;
  void cover_from(const Interval& j, int level, std::uint64_t path, const Coord& start, Coord lo, Coord hi,
                  Cover& cov) const;

  Schedule schedule_;
  int depth_;
  double power_;
  Coord origin_;
  std::vector<LevelData> levels_;  // index 0 unused
  Coord root_start_;

  template <class Fn>
  void walk(int level, std::uint64_t path, const Coord& start, Fn& fn) const;
};

template <class Fn>
void TowerSet::walk(int level, std::uint64_t path, const Coord& start, Fn& fn) const {
  const LevelData& L = levels_[static_cast<std::size_t>(level)];
  if (level < depth_) {
    const LevelData& C = levels_[static_cast<std::size_t>(level) + 1];
    walk(level + 1, path << 1, start - L.gap_c - C.width_c, fn);
  }
  TowerNode n;
  n.level = level;
  n.path = path;
  n.interval = Interval(start, start + L.width_c);
  n.left = L.left;
  n.right = L.right;
  fn(n);
  if (level < depth_) walk(level + 1, (path << 1) | 1u, start + L.width_c + L.gap_c, fn);
}

template <class Fn>
void TowerSet::for_each_node(Fn&& fn) const {
  walk(1, 0, root_start_, fn);
}

}  // namespace jnp
