#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace mfchaos {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The k-th 64-bit draw of a stream is a pure function of
/// (master_seed, stream_id, k): the seed is the Philox key and
/// (k / 2, stream_id) fill the 128-bit counter. Streams with distinct ids
/// never share a counter value, so replicas can be split across workers
/// without coordination.
///
/// Gaussian variates use the Box-Muller transform; both outputs
/// of a transform are used, the second one cached. Every derived variate
/// consumes a fixed number of 64-bit draws, so two streams fed the same
/// call sequence stay in lock step (common random numbers).
class RngStream {
public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : seed_(master_seed), stream_(stream_id) {}

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t draw_counter() const { return counter_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Uniform integer in [0, n); n > 0. One draw.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  /// Exponential variate with the given rate (> 0).
  double exponential(double rate);

  /// Stream positioned at draw k of (master_seed, stream_id).
  static RngStream at(std::uint64_t master_seed, std::uint64_t stream_id,
                      std::uint64_t k);

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  std::uint64_t block_index_ = ~std::uint64_t{0};
  std::optional<double> cached_normal_;
};

/// Stream ids partitioned by purpose: the top 16 bits carry a tag, the next
/// 16 a group (e.g. index into an N-list) and the low 32 bits the replica.
constexpr std::uint64_t stream_id(std::uint32_t tag, std::uint32_t group,
                                  std::uint32_t replica) {
  return (std::uint64_t{tag & 0xffffu} << 48) |
         (std::uint64_t{group & 0xffffu} << 32) | std::uint64_t{replica};
}

/// Tags used by the library when deriving stream ids.
namespace stream_tag {
inline constexpr std::uint32_t initial = 1;
inline constexpr std::uint32_t dynamics = 2;
inline constexpr std::uint32_t oracle_initial = 3;
inline constexpr std::uint32_t oracle_dynamics = 4;
inline constexpr std::uint32_t reference = 5;
inline constexpr std::uint32_t replica_sample = 6;
inline constexpr std::uint32_t directions = 7;
inline constexpr std::uint32_t bootstrap = 8;
inline constexpr std::uint32_t bias = 9;
inline constexpr std::uint32_t auxiliary = 10;
} // namespace stream_tag

} // namespace mfchaos
