#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace roscsim {

// Mixes a run seed with a stream label into an independent engine seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

// A labelled random stream. Identical (seed, label) pairs replay identical
// draws, so every consumer of randomness in a run gets its own stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }
  std::mt19937_64& engine() { return engine_; }

  // Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  double uniform01();
  double normal();

  RngStream child(std::string_view sublabel) const;

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

}  // namespace roscsim
