#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

namespace cpm {

// Philox4x32-10 counter-based generator: a keyed bijection of a 128-bit
// counter. Any (key, counter) pair can be evaluated independently, which gives
// every replicate and observation its own reproducible substream.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

// Uniform in (0, 1) with 52 random bits built from two 32-bit words.
double uniform_open(std::uint32_t hi, std::uint32_t lo);

// Two independent standard normals (Box-Muller) from one Philox block.
std::pair<double, double> normal_pair(const Philox4x32::Counter& block);

// Sequential engine over a substream: key = seed, counter words 2..3 = stream
// id, words 0..1 count blocks. Satisfies UniformRandomBitGenerator.
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  PhiloxEngine(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();
  double normal();

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cpm
