#include "karabo/adaptation/random.hpp"

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::adaptation {

std::uint64_t RandomStream::derive_seed(std::uint64_t seed, std::string_view instance_id, Stage stage) {
  std::uint64_t h = text::mix64(seed);
  h = text::mix64(h ^ text::fnv1a64(instance_id));
  h = text::mix64(h ^ (0x5354414745ULL + index_of(stage)));
  return h;
}

double RandomStream::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t RandomStream::uniform_index(std::size_t lo, std::size_t hi) {
  if (hi < lo) throw Error(ErrorCode::Range, "empty index range");
  // Rejection sampling keeps the draw exactly uniform and portable.
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = span == 0 ? 0 : (~std::uint64_t{0} - span + 1) % span;
  while (true) {
    const std::uint64_t x = engine_();
    if (x >= limit) return lo + static_cast<std::size_t>(x % span);
  }
}

}  // namespace karabo::adaptation
