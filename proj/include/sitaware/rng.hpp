#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace sitaware {

// splitmix64 finalizer; used to derive well-separated stream seeds from
// structured indices such as (base, candidate, restart).
std::uint64_t mix_bits(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

std::uint64_t fnv1a64(std::string_view bytes);

// "fnv1a:" followed by 16 hex digits; embedded in outputs as a content hash.
std::string fingerprint(std::string_view bytes);

// Deterministic uniform/normal source. mt19937_64 output is pinned by the
// standard and the polar transform avoids libm trig, so one seed reproduces
// the same stream everywhere.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sitaware
