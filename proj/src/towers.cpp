#include "jnp/towers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jnp/roof.hpp"

namespace jnp {

std::string to_string(Family f) {
  switch (f) {
    case Family::U: return "u";
    case Family::G: return "g";
    case Family::G0: return "g0";
    case Family::Custom: return "custom";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "u" || name == "U") return Family::U;
  if (name == "g" || name == "G") return Family::G;
  if (name == "g0" || name == "G0") return Family::G0;
  if (name == "custom" || name == "CUSTOM") return Family::Custom;
  throw std::invalid_argument("unknown family '" + name + "' (expected u, g, g0 or custom)");
}

Schedule::Schedule(Family f, double p, std::vector<double> s)
    : family_(f), p_(p), s_(std::move(s)) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::domain_error("Schedule: p must exceed 1");
  for (double v : s_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("Schedule: s_i must be >= 0");
  }
}

Schedule Schedule::u(double p) { return Schedule(Family::U, p, {}); }
Schedule Schedule::g(double p) { return Schedule(Family::G, p, {}); }
Schedule Schedule::g0(double p) { return Schedule(Family::G0, p, {}); }
Schedule Schedule::custom(double p, std::vector<double> s) {
  return Schedule(Family::Custom, p, std::move(s));
}

Schedule Schedule::of(Family f, double p, std::vector<double> s) {
  if (f == Family::Custom) return custom(p, std::move(s));
  return Schedule(f, p, {});
}

ExtReal Schedule::width(int i) const {
  if (i < 1) throw std::out_of_range("Schedule: level must be >= 1");
  // 2^-(i^2 + i + 1/4)
  auto n = static_cast<std::int64_t>(i);
  return ExtReal::compose(1, std::exp2(-0.25), -n * n - n);
}

ExtReal Schedule::gap(int i) const {
  if (i < 1) throw std::out_of_range("Schedule: level must be >= 1");
  auto n = static_cast<std::int64_t>(i) + 1;
  return ExtReal::pow2(-n * n);
}

ExtReal Schedule::base_height(int i) const {
  if (i < 1) throw std::out_of_range("Schedule: level must be >= 1");
  auto n = static_cast<std::int64_t>(i);
  return ExtReal::exp2_ratio(n * n, p_);
}

ExtReal Schedule::roof_left(int i) const {
  ExtReal h = base_height(i);
  switch (family_) {
    case Family::U:
      if (i == 1) return ExtReal();
      return h * ExtReal(1.0 - std::pow(static_cast<double>(i), -1.0 / p_));
    case Family::G: return h;
    case Family::G0: return h * ExtReal(std::pow(static_cast<double>(i), -1.0 / p_));
    case Family::Custom: {
      if (static_cast<std::size_t>(i) > s_.size())
        throw std::out_of_range("Schedule: custom sequence shorter than level " + std::to_string(i));
      double s = s_[static_cast<std::size_t>(i) - 1];
      if (s == 0.0) return ExtReal();
      return h * ExtReal(std::pow(s, 1.0 / p_));
    }
  }
  return h;
}

ExtReal Schedule::roof_right(int i) const {
  if (family_ != Family::U) return roof_left(i);
  return base_height(i) * ExtReal(1.0 + std::pow(static_cast<double>(i), -1.0 / p_));
}

std::string TowerNode::path_bits() const {
  if (level <= 1) return "-";
  std::string bits;
  for (int b = level - 2; b >= 0; --b) bits.push_back(((path >> b) & 1u) ? '1' : '0');
  return bits;
}

bool Cover::touches_towers() const { return !full_roots.empty() || !pieces.empty(); }

TowerSet::TowerSet(Schedule s, int depth, double power, Coord origin)
    : schedule_(std::move(s)), depth_(depth), power_(power), origin_(std::move(origin)) {}

TowerSet TowerSet::build(const Schedule& schedule, int depth, double power, const Coord& origin) {
  if (depth < 1 || depth > kMaxDepth)
    throw std::out_of_range("TowerSet: depth must be in [1, " + std::to_string(kMaxDepth) + "]");
  if (!(power > 0.0) || !std::isfinite(power)) throw std::domain_error("TowerSet: power must be > 0");
  if (schedule.family() == Family::Custom &&
      schedule.custom_s().size() < static_cast<std::size_t>(depth))
    throw std::invalid_argument("TowerSet: custom schedule needs one s_i per level");
  TowerSet ts(schedule, depth, power, origin);
  ts.compute_levels();
  return ts;
}

TowerSet TowerSet::translated(const Coord& s) const {
  return build(schedule_, depth_, power_, origin_ + s);
}

TowerSet TowerSet::with_power(double new_power) const {
  return build(schedule_, depth_, new_power, origin_);
}

void TowerSet::compute_levels() {
  const auto n = static_cast<std::size_t>(depth_);
  levels_.assign(n + 2, LevelData{});
  for (int i = 1; i <= depth_; ++i) {
    LevelData& L = levels_[static_cast<std::size_t>(i)];
    L.width = schedule_.width(i);
    L.gap = schedule_.gap(i);
    L.left = schedule_.roof_left(i);
    L.right = schedule_.roof_right(i);
    L.slope = (L.right - L.left) / L.width;
    L.width_c = Coord(L.width);
    L.gap_c = Coord(L.gap);
    L.node_mass = roof::integral(L.left, L.right - L.left, L.width, power_);
    L.peak = roof::rpow(max(L.left, L.right), power_);
  }
  // Backward recurrences; level depth+1 is an empty sentinel.
  for (int i = depth_; i >= 1; --i) {
    LevelData& L = levels_[static_cast<std::size_t>(i)];
    const LevelData& C = levels_[static_cast<std::size_t>(i) + 1];
    L.reach_c = i == depth_ ? Coord() : L.gap_c + C.width_c + C.reach_c;
    L.inner_gap_c = L.gap_c - C.reach_c;
    L.subtree_support_c = L.width_c + 2 * C.subtree_support_c;
    L.subtree_mass = L.node_mass + C.subtree_mass.ldexp(1);
  }
  root_start_ = origin_ + Coord(0.5) - levels_[1].width_c.half();
}

Interval TowerSet::domain() const { return Interval(origin_, origin_ + Coord(1.0)); }

Coord TowerSet::node_start(int level, std::uint64_t path) const {
  if (level < 1 || level > depth_) throw std::out_of_range("TowerSet: level out of range");
  if (path >= nodes_at(level)) throw std::out_of_range("TowerSet: path out of range");
  Coord start = root_start_;
  for (int cur = 1; cur < level; ++cur) {
    const LevelData& L = levels_[static_cast<std::size_t>(cur)];
    const LevelData& C = levels_[static_cast<std::size_t>(cur) + 1];
    bool right = (path >> (level - 1 - cur)) & 1u;
    if (right) {
      start += L.width_c + L.gap_c;
    } else {
      start -= L.gap_c + C.width_c;
    }
  }
  return start;
}

TowerNode TowerSet::node(int level, std::uint64_t path) const {
  TowerNode n;
  n.level = level;
  n.path = path;
  Coord s = node_start(level, path);
  const LevelData& L = levels_[static_cast<std::size_t>(level)];
  n.interval = Interval(s, s + L.width_c);
  n.left = L.left;
  n.right = L.right;
  return n;
}

std::vector<TowerNode> TowerSet::nodes() const {
  if (depth_ > 22) throw std::length_error("TowerSet::nodes: depth too large to materialize");
  std::vector<TowerNode> out;
  out.reserve(static_cast<std::size_t>(node_count()));
  for_each_node([&](const TowerNode& n) { out.push_back(n); });
  return out;
}

Interval TowerSet::support_hull() const { return subtree_hull(1, 0); }

Interval TowerSet::subtree_hull(int level, std::uint64_t path) const {
  const LevelData& L = level_at_checked(level);
  Coord s = node_start(level, path);
  return Interval(s - L.reach_c, s + L.width_c + L.reach_c);
}

const LevelData& TowerSet::level_at_checked(int i) const {
  if (i < 1 || i > depth_)
    throw std::out_of_range("TowerSet: level " + std::to_string(i) + " outside [1, " +
                            std::to_string(depth_) + "]");
  return levels_[static_cast<std::size_t>(i)];
}

ExtReal TowerSet::gap_inner(int i) const { return level_at_checked(i).inner_gap_c.to_ext(); }

ExtReal TowerSet::reach(int i) const { return level_at_checked(i).reach_c.to_ext(); }

ExtReal TowerSet::series_tail_bound() const { return levels_[static_cast<std::size_t>(depth_)].gap.ldexp(1); }

ExtReal TowerSet::eval(const Coord& x) const {
  Coord start = root_start_;
  for (int cur = 1; cur <= depth_; ++cur) {
    const LevelData& L = levels_[static_cast<std::size_t>(cur)];
    Coord end = start + L.width_c;
    if (start <= x && x < end) {
      ExtReal y = L.left + L.slope * (x - start).to_ext();
      return roof::rpow(y, power_);
    }
    if (cur == depth_) break;
    const LevelData& C = levels_[static_cast<std::size_t>(cur) + 1];
    if (x < start) {
      start -= L.gap_c + C.width_c;
    } else {
      start = end + L.gap_c;
    }
  }
  return ExtReal();
}

Cover TowerSet::cover(const Interval& j) const {
  Cover cov;
  cov.span = j;
  cov.measure = j.measure();
  if (!j.empty()) {
    const LevelData& L = levels_[1];
    cover_from(j, 1, 0, root_start_, root_start_ - L.reach_c, root_start_ + L.width_c + L.reach_c, cov);
  }
  return cov;
}

Cover TowerSet::cover_in(const Interval& j, int level, std::uint64_t path, const Coord& start) const {
  const LevelData& L = level_at_checked(level);
  Coord lo = start - L.reach_c;
  Coord hi = start + L.width_c + L.reach_c;
  if (j.start < lo || hi < j.end) throw std::invalid_argument("cover_in: J leaves the subtree hull");
  Cover cov;
  cov.span = j;
  cov.measure = j.measure();
  if (!j.empty()) cover_from(j, level, path, start, std::move(lo), std::move(hi), cov);
  return cov;
}

Cover TowerSet::tower_cover(const TowerNode& n) const {
  const LevelData& L = level_at_checked(n.level);
  Cover cov;
  cov.span = n.interval;
  cov.measure = L.width;
  Cover::Piece pc;
  pc.level = n.level;
  pc.path = n.path;
  pc.start_off = ExtReal();
  pc.length = L.width;
  pc.length_c = L.width_c;
  pc.whole = true;
  cov.pieces.push_back(std::move(pc));
  return cov;
}

// Depth-first descent carrying each subtree's hull [lo, hi). The hull of a
// left child is [lo, t - delta_i) and that of a right child [e + delta_i, hi)
// for a parent tower [t, e), so a child that misses J is rejected before its
// start is computed.
void TowerSet::cover_from(const Interval& j, int level, std::uint64_t path, const Coord& start, Coord lo,
                          Coord hi, Cover& cov) const {
  struct Item {
    int level;
    std::uint64_t path;
    Coord start, lo, hi;
  };
  std::vector<Item> stack;
  stack.push_back({level, path, start, std::move(lo), std::move(hi)});
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (it.hi <= j.start || j.end <= it.lo) continue;
    if (j.start <= it.lo && it.hi <= j.end) {
      cov.full_roots.emplace_back(it.level, it.path);
      continue;
    }
    const LevelData& L = levels_[static_cast<std::size_t>(it.level)];
    Coord end = it.start + L.width_c;
    const Coord& s = max(it.start, j.start);
    const Coord& e = min(end, j.end);
    if (s < e) {
      Cover::Piece pc;
      pc.level = it.level;
      pc.path = it.path;
      pc.whole = s == it.start && e == end;
      pc.start_off = pc.whole || s == it.start ? ExtReal() : (s - it.start).to_ext();
      pc.length_c = pc.whole ? L.width_c : e - s;
      pc.length = pc.whole ? L.width : pc.length_c.to_ext();
      cov.pieces.push_back(std::move(pc));
    }
    if (it.level < depth_) {
      const LevelData& C = levels_[static_cast<std::size_t>(it.level) + 1];
      // Right child pushed first so the left one is processed first.
      Coord right_lo = end + L.inner_gap_c;
      if (right_lo < j.end)
        stack.push_back({it.level + 1, (it.path << 1) | 1u, end + L.gap_c, std::move(right_lo), it.hi});
      Coord left_hi = it.start - L.inner_gap_c;
      if (j.start < left_hi)
        stack.push_back({it.level + 1, it.path << 1, it.start - L.gap_c - C.width_c, it.lo, std::move(left_hi)});
    }
  }
}

void TowerSet::piece_roof(const Cover::Piece& pc, ExtReal& y0, ExtReal& dy) const {
  const LevelData& L = levels_[static_cast<std::size_t>(pc.level)];
  if (pc.whole) {
    y0 = L.left;
    dy = L.right - L.left;
    return;
  }
  if (L.slope.is_zero()) {
    y0 = L.left;
    dy = ExtReal();
    return;
  }
  y0 = L.left + L.slope * pc.start_off;
  dy = L.slope * pc.length;
}

template <class PerLevel>
ExtReal TowerSet::subtree_sum(int from, PerLevel&& per_level) const {
  CompensatedSum acc;
  for (int j = from; j <= depth_; ++j) acc.add(per_level(j).ldexp(j - from));
  return acc.value();
}

ExtReal TowerSet::integral(const Interval& j) const { return integral(cover(j)); }

ExtReal TowerSet::integral(const Cover& c) const {
  CompensatedSum acc;
  for (const auto& [lvl, path] : c.full_roots) acc.add(levels_[static_cast<std::size_t>(lvl)].subtree_mass);
  for (const auto& pc : c.pieces) {
    ExtReal y0, dy;
    piece_roof(pc, y0, dy);
    acc.add(roof::integral(y0, dy, pc.length, power_));
  }
  return acc.value();
}

ExtReal TowerSet::integral_excluding(const Cover& c, int level, std::uint64_t path) const {
  CompensatedSum acc;
  for (const auto& [lvl, p] : c.full_roots) {
    bool ancestor = level >= lvl && (path >> (level - lvl)) == p;
    if (!ancestor) {
      acc.add(levels_[static_cast<std::size_t>(lvl)].subtree_mass);
      continue;
    }
    // Walk down to the excluded tower, keeping every sibling subtree met on the way.
    for (int cur = lvl; cur < level; ++cur) {
      acc.add(levels_[static_cast<std::size_t>(cur)].node_mass);
      acc.add(levels_[static_cast<std::size_t>(cur) + 1].subtree_mass);
    }
    if (level < depth_) acc.add(levels_[static_cast<std::size_t>(level) + 1].subtree_mass.ldexp(1));
  }
  for (const auto& pc : c.pieces) {
    if (pc.level == level && pc.path == path) continue;
    ExtReal y0, dy;
    piece_roof(pc, y0, dy);
    acc.add(roof::integral(y0, dy, pc.length, power_));
  }
  return acc.value();
}

Coord TowerSet::support_measure(const Cover& c) const {
  Coord m;
  for (const auto& [lvl, path] : c.full_roots) m += levels_[static_cast<std::size_t>(lvl)].subtree_support_c;
  for (const auto& pc : c.pieces) m += pc.length_c;
  return m;
}

ExtReal TowerSet::integral_abs_dev(const Interval& j, const ExtReal& c) const {
  return integral_abs_dev(cover(j), c);
}

ExtReal TowerSet::integral_abs_dev(const Cover& cov, const ExtReal& c) const {
  if (c.sign() < 0) throw std::domain_error("integral_abs_dev: c must be >= 0");
  if (c.is_zero()) return integral(cov);
  CompensatedSum acc;
  if (!cov.full_roots.empty()) {
    // Full subtrees of the same root level contribute identically.
    std::vector<int> roots_at(static_cast<std::size_t>(depth_) + 1, 0);
    for (const auto& fr : cov.full_roots) ++roots_at[static_cast<std::size_t>(fr.first)];
    for (int lvl = 1; lvl <= depth_; ++lvl) {
      int count = roots_at[static_cast<std::size_t>(lvl)];
      if (count == 0) continue;
      ExtReal one = subtree_sum(lvl, [&](int j) {
        const LevelData& L = levels_[static_cast<std::size_t>(j)];
        return roof::abs_dev(L.left, L.right - L.left, L.width, power_, c);
      });
      acc.add(one * ExtReal(static_cast<double>(count)));
    }
  }
  for (const auto& pc : cov.pieces) {
    ExtReal y0, dy;
    piece_roof(pc, y0, dy);
    acc.add(roof::abs_dev(y0, dy, pc.length, power_, c));
  }
  // A span that is exactly one tower has no gap part.
  const bool single_tower = cov.full_roots.empty() && cov.pieces.size() == 1 && cov.pieces[0].whole &&
                            cov.measure == cov.pieces[0].length;
  if (!single_tower) acc.add(c * (cov.span.length() - support_measure(cov)).to_ext());
  return acc.value();
}

ExtReal TowerSet::measure_above_root(const Cover& cov, const ExtReal& y) const {
  // Measure of {roof > y}; y is already the 1/power root of the threshold.
  auto piece = [&](const ExtReal& y0, const ExtReal& dy, const ExtReal& len) {
    return roof::measure_above(y0, dy, len, 1.0, y);
  };
  CompensatedSum acc;
  std::vector<int> roots_at(static_cast<std::size_t>(depth_) + 1, 0);
  for (const auto& fr : cov.full_roots) ++roots_at[static_cast<std::size_t>(fr.first)];
  for (int lvl = 1; lvl <= depth_; ++lvl) {
    int count = roots_at[static_cast<std::size_t>(lvl)];
    if (count == 0) continue;
    ExtReal one = subtree_sum(lvl, [&](int j) {
      const LevelData& L = levels_[static_cast<std::size_t>(j)];
      return piece(L.left, L.right - L.left, L.width);
    });
    acc.add(one * ExtReal(static_cast<double>(count)));
  }
  for (const auto& pc : cov.pieces) {
    ExtReal y0, dy;
    piece_roof(pc, y0, dy);
    acc.add(piece(y0, dy, pc.length));
  }
  return acc.value();
}

ExtReal TowerSet::measure_above(const Cover& cov, const ExtReal& t) const {
  if (t.sign() < 0) throw std::domain_error("measure_above: t must be >= 0");
  ExtReal y = t.is_zero() || power_ == 1.0 ? t : pow_real(t, 1.0 / power_);
  return measure_above_root(cov, y);
}

ExtReal TowerSet::distribution(const ExtReal& t) const { return measure_above(cover(domain()), t); }

ExtReal TowerSet::median(const Interval& j) const { return median(cover(j)); }

ExtReal TowerSet::median(const Cover& cov) const {
  if (cov.span.empty()) throw std::domain_error("median: empty interval");
  ExtReal half = cov.measure.ldexp(-1);
  if (measure_above_root(cov, ExtReal()) <= half) return ExtReal();
  // Search over roof heights y; the median of f is y^power.
  ExtReal top;
  for (int i = 1; i <= depth_; ++i) top = max(top, max(levels_[static_cast<std::size_t>(i)].left,
                                                        levels_[static_cast<std::size_t>(i)].right));
  double hi = top.log2();
  double lo = hi - 1100.0;
  if (measure_above_root(cov, ExtReal::exp2_real(lo)) <= half) return ExtReal();
  // Invariant: measure_above(2^lo) > half >= measure_above(2^hi).
  for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (measure_above_root(cov, ExtReal::exp2_real(mid)) <= half) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  ExtReal y = ExtReal::exp2_real(hi);
  // A flat roof at the median makes the answer exactly that height.
  for (int i = 1; i <= depth_; ++i) {
    const LevelData& L = levels_[static_cast<std::size_t>(i)];
    for (const ExtReal& h : {L.left, L.right}) {
      if (h.is_zero()) continue;
      if (std::fabs(h.log2() - hi) < 1e-9 && h < y && measure_above_root(cov, h) <= half) y = h;
    }
  }
  return roof::rpow(y, power_);
}

ExtReal TowerSet::peak() const {
  ExtReal m;
  for (int i = 1; i <= depth_; ++i) m = max(m, levels_[static_cast<std::size_t>(i)].peak);
  return m;
}

ExtReal TowerSet::lp_mass(double p) const {
  if (!(p > 0.0)) throw std::domain_error("lp_mass: p must be > 0");
  return subtree_sum(1, [&](int j) {
    const LevelData& L = levels_[static_cast<std::size_t>(j)];
    return roof::integral(L.left, L.right - L.left, L.width, power_ * p);
  });
}

}  // namespace jnp
