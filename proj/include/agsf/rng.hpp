#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace agsf {

// Seeded random stream owned by exactly one sequential consumer.
//
// Normal variates use an explicit Box-Muller so that draw counts are
// platform-independent: one normal consumes exactly two engine words
// (plus retries on the measure-zero u=0 event). Two streams constructed
// from the same seed are bit-identical, and operator== compares engine
// state, which the degenerate-sampling tests rely on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Eigen::VectorXd normals(int n) {
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  bool operator==(const RngStream& other) const {
    return engine_ == other.engine_;
  }
  bool operator!=(const RngStream& other) const { return !(*this == other); }

  // Deterministic seed derivation (splitmix64 over seed ^ salted key).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace agsf
