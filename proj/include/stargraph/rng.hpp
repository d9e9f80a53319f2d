#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stargraph {

/// Philox4x32-10 block function (Salmon et al.).  Pure: the same key and
/// counter always give the same four words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Independent random streams of a single sample path.  Each consumer draws
/// from its own stream so that, e.g., the radius of a Walsh path does not
/// depend on how many edge labels were drawn.
enum class Substream : std::uint32_t {
  Radius = 0,
  Edge = 1,
  Jumps = 2,
  Killing = 3,
  Revival = 4,
  Aux = 5,
};

/// Counter-based generator.  A stream is addressed by (seed, stream index,
/// substream); blocks are produced by incrementing the low counter word.
/// Splitting never requires communication between workers.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() : Rng(0, 0, Substream::Aux) {}
  Rng(std::uint64_t seed, std::uint64_t stream, Substream sub = Substream::Aux);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1); safe for logarithms.
  double uniform_open();
  double normal();
  /// Exponential with the given rate; +inf for rate 0.
  double exponential(double rate = 1.0);
  long poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint32_t sub_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 2;  // next 64-bit word of buf_; 2 means exhausted
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// All streams used while constructing one path.
struct PathStreams {
  Rng radius;
  Rng edge;
  Rng jumps;
  Rng killing;
  Rng revival;

  static PathStreams for_path(std::uint64_t seed, std::uint64_t path_index);
};

}  // namespace stargraph
