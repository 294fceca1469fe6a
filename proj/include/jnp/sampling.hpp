#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "jnp/towers.hpp"

namespace jnp {

/// Shape of a random test interval relative to a randomly chosen tower:
/// Contained lies inside it, Short sticks out by less than delta_i, Medium by
/// between delta_i and 2 D_i, Long by more than 2 D_i. Uniform ignores the
/// towers and draws both ends from the domain.
enum class SampleKind { Uniform, Contained, Short, Medium, Long };

/// Random interval of the given kind around a tower whose level is drawn from
/// [min_level, max_level] (max_level 0 means the depth). Endpoints are kept
/// inside the domain; the classification is not guaranteed for Long near the
/// domain ends, so callers that care classify again.
Interval sample_interval(const TowerSet& ts, SampleKind kind, std::mt19937_64& rng, int min_level = 1,
                         int max_level = 0);

/// A kind drawn uniformly from all five.
SampleKind random_kind(std::mt19937_64& rng);

/// Stream seed for a named randomized suite: FNV-1a of the name mixed with the
/// user seed.
std::uint64_t stream_seed(std::string_view name, std::uint64_t seed);

}  // namespace jnp
