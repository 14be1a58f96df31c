#pragma once

// Counter-based random streams (Philox4x32-10).
//
// A stream is identified by (seed, path index, tag). Every draw is a pure
// function of that identity plus the draw counter, so a path produces the
// same numbers no matter which worker thread simulates it or in which order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace levyfp {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Identity of one random stream.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint32_t tag = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Well-known stream tags so that independent path sets of one experiment
/// never share randomness.
namespace stream_tag {
inline constexpr std::uint32_t kProcess = 0;
inline constexpr std::uint32_t kSubordinator = 1;
inline constexpr std::uint32_t kRemainder = 2;
inline constexpr std::uint32_t kDirectStable = 3;
inline constexpr std::uint32_t kAuxiliary = 4;
}  // namespace stream_tag

class RngStream {
 public:
  explicit RngStream(StreamId id) : id_(id) {}
  RngStream(std::uint64_t seed, std::uint64_t path, std::uint32_t tag = 0)
      : RngStream(StreamId{seed, path, tag}) {}

  const StreamId& id() const { return id_; }

  /// Number of 128-bit blocks consumed so far.
  std::uint64_t blocks() const { return block_; }

  std::uint32_t next_u32() {
    if (lane_ == 4) refill();
    return buffer_[lane_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on (-pi/2, pi/2).
  double uniform_angle() { return std::numbers::pi * (uniform() - 0.5); }

  double exponential() { return -std::log(uniform()); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  void refill() {
    const Philox4x32Counter ctr = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>((block_ >> 32) & 0xFFFFu) | (id_.tag << 16),
        static_cast<std::uint32_t>(id_.path),
        static_cast<std::uint32_t>(id_.path >> 32)};
    const Philox4x32Key key = {static_cast<std::uint32_t>(id_.seed),
                               static_cast<std::uint32_t>(id_.seed >> 32)};
    buffer_ = philox4x32_10(ctr, key);
    ++block_;
    lane_ = 0;
  }

  StreamId id_;
  std::uint64_t block_ = 0;
  Philox4x32Counter buffer_{};
  int lane_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace levyfp
