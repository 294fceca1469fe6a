#include "jnp/sampling.hpp"

#include <algorithm>

namespace jnp {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A random fraction in [lo, hi] of a length.
Coord part(const Coord& len, std::mt19937_64& rng, double lo, double hi) {
  return Coord(len.to_ext() * ExtReal(uniform(rng, lo, hi)));
}

}  // namespace

SampleKind random_kind(std::mt19937_64& rng) {
  return static_cast<SampleKind>(std::uniform_int_distribution<int>(0, 4)(rng));
}

Interval sample_interval(const TowerSet& ts, SampleKind kind, std::mt19937_64& rng, int min_level,
                         int max_level) {
  const Interval dom = ts.domain();
  if (kind == SampleKind::Uniform) {
    double a = uniform(rng, 0.0, 1.0), b = uniform(rng, 0.0, 1.0);
    if (a > b) std::swap(a, b);
    Coord s = dom.start + Coord(a);
    Coord e = dom.start + Coord(std::max(b, a + 1e-9));
    return Interval(s, min(e, dom.end));
  }
  if (max_level <= 0) max_level = ts.depth();
  min_level = std::clamp(min_level, 1, ts.depth());
  max_level = std::clamp(max_level, min_level, ts.depth());
  int level = std::uniform_int_distribution<int>(min_level, max_level)(rng);
  std::uint64_t path = std::uniform_int_distribution<std::uint64_t>(0, ts.nodes_at(level) - 1)(rng);
  const LevelData& L = ts.level(level);
  Coord s = ts.node_start(level, path);
  Coord e = s + L.width_c;

  Coord out;
  double left_share = uniform(rng, 0.0, 1.0);
  switch (kind) {
    case SampleKind::Contained: {
      Coord a = s + part(L.width_c, rng, 0.0, 0.45);
      Coord b = e - part(L.width_c, rng, 0.0, 0.45);
      return Interval(a, b);
    }
    case SampleKind::Short:
      out = part(L.inner_gap_c, rng, 0.05, 0.95);
      break;
    case SampleKind::Medium:
      out = L.inner_gap_c + part(L.reach_c + L.reach_c - L.inner_gap_c, rng, 0.05, 0.95);
      left_share = uniform(rng, 0.25, 0.75);
      break;
    case SampleKind::Long:
      out = L.reach_c + L.reach_c + part(L.reach_c + L.reach_c, rng, 0.05, 2.0);
      left_share = uniform(rng, 0.1, 0.9);
      break;
    case SampleKind::Uniform:
      break;
  }
  Coord left = Coord(out.to_ext() * ExtReal(left_share));
  Coord a = max(s - left, dom.start);
  Coord b = min(e + (out - left), dom.end);
  return Interval(a, b);
}

std::uint64_t stream_seed(std::string_view name, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer on the combination
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace jnp
