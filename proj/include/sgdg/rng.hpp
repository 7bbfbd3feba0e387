#pragma once

#include <cstdint>
#include <random>

namespace sgdg {

/// Seeded engine plus the scalar variates the samplers need. One instance
/// per chain or thread; never shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u = 0.0;
    while (u == 0.0) u = uniform_(engine_);
    return u;
  }

  /// Gamma with shape-rate parameterisation (mean shape / rate).
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(engine_);
  }

  std::uint64_t next_seed() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace sgdg
