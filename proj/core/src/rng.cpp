#include "bagcv/rng.hpp"

namespace bagcv {

Rng derived_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x62616763u};
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng g = derived_stream(seed, stream);
  return g();
}

}  // namespace bagcv
