#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "karabo/adaptation/config.hpp"

namespace karabo::adaptation {

/// Deterministic random stream. Streams are keyed by (seed, instance id,
/// stage) so draws do not depend on processing order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view instance_id, Stage stage);
  static RandomStream for_instance(std::uint64_t seed, std::string_view instance_id, Stage stage) {
    return RandomStream(derive_seed(seed, instance_id, stage));
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Uniform on [lo, hi].
  std::size_t uniform_index(std::size_t lo, std::size_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace karabo::adaptation
