#include "mfchaos/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfchaos {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi,
                    std::uint32_t &lo) {
  const std::uint64_t p = std::uint64_t{a} * std::uint64_t{b};
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t RngStream::next_u64() {
  if (counter_ == ~std::uint64_t{0}) {
    throw std::overflow_error("RngStream exhausted: 2^64 draws consumed");
  }
  const std::uint64_t block = counter_ >> 1;
  const unsigned lane = static_cast<unsigned>(counter_ & 1u);
  if (block != block_index_) {
    block_ = philox4x32_10(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    block_index_ = block;
  }
  ++counter_;
  return (std::uint64_t{block_[2 * lane + 1]} << 32) | block_[2 * lane];
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_index: empty range");
  }
  // Multiply-high mapping; bias is below n / 2^64.
  const unsigned __int128 p =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
  return static_cast<std::uint64_t>(p >> 64);
}

double RngStream::normal() {
  if (cached_normal_) {
    const double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("exponential: rate must be positive");
  }
  return -std::log(uniform_open()) / rate;
}

RngStream RngStream::at(std::uint64_t master_seed, std::uint64_t stream_id,
                        std::uint64_t k) {
  RngStream s(master_seed, stream_id);
  s.counter_ = k;
  return s;
}

} // namespace mfchaos
