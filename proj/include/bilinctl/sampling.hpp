#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bilinctl/matlie.hpp"

namespace bilinctl {

/// Engine used throughout; its output sequence is fixed by the standard.
using Rng = std::mt19937_64;

/// Independent stream for item `index` of a seeded batch, so batch items can
/// be produced in any order with identical results.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform point on the unit sphere S^{n-1}.
Vector random_unit_vector(int n, Rng& rng);

/// `count` seeded unit vectors from independent streams.
std::vector<Vector> random_unit_vectors(int n, int count, std::uint64_t seed);

/// Scrambled Halton points mapped to S^{n-1} (Box-Muller on quasi-random
/// uniforms, random shift chosen by `seed`).
std::vector<Vector> low_discrepancy_sphere(int n, int count, std::uint64_t seed);

}  // namespace bilinctl
