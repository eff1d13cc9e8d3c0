#include "bilinctl/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bilinctl/errors.hpp"

namespace bilinctl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv_base = 1.0 / static_cast<double>(base);
  double factor = inv_base;
  double result = 0.0;
  while (i > 0) {
    result += static_cast<double>(i % base) * factor;
    i /= base;
    factor *= inv_base;
  }
  return result;
}

constexpr std::array<std::uint64_t, 24> kPrimes = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

}  // namespace

Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

Vector random_unit_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) {
      v(i) = normal(rng);
    }
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

std::vector<Vector> random_unit_vectors(int n, int count, std::uint64_t seed) {
  std::vector<Vector> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(k));
    out.push_back(random_unit_vector(n, rng));
  }
  return out;
}

std::vector<Vector> low_discrepancy_sphere(int n, int count, std::uint64_t seed) {
  // Box-Muller consumes uniforms in pairs.
  const int dims = n + (n % 2);
  if (dims > static_cast<int>(kPrimes.size())) {
    throw InvalidInput("low_discrepancy_sphere: dimension too large");
  }
  Rng rng(splitmix64(seed));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> shift(dims);
  for (double& s : shift) {
    s = uniform(rng);
  }
  std::vector<Vector> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Vector v(n);
    for (int d = 0; d < dims; d += 2) {
      double u1 = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[d]) + shift[d];
      double u2 = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[d + 1]) + shift[d + 1];
      u1 -= std::floor(u1);
      u2 -= std::floor(u2);
      const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      const double a = 2.0 * std::numbers::pi * u2;
      v(d) = r * std::cos(a);
      if (d + 1 < n) {
        v(d + 1) = r * std::sin(a);
      }
    }
    const double norm = v.norm();
    out.push_back(norm > 0.0 ? Vector(v / norm) : Vector(Vector::Unit(n, 0)));
  }
  return out;
}

}  // namespace bilinctl
