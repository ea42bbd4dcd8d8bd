#include "core/rng.hpp"

#include <cmath>

namespace nfloc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

UnitVec3 uniform_on_sphere(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  for (;;) {
    Vec3 v(dist(rng), dist(rng), dist(rng));
    const double n = v.norm();
    if (n > 1e-300) return UnitVec3::normalized(v);
  }
}

}  // namespace nfloc
