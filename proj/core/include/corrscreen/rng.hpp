#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace corrscreen {

// splitmix64 finalizer; used to derive stream ids from small integers.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Philox 4x64 with 10 rounds. Counter-based: output is a pure function of
// (counter, key), so any position in any stream is addressable in O(1) and
// distinct keys give independent sequences.
struct Philox4x64 {
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> counter,
                                            std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const unsigned __int128 prod0 =
          static_cast<unsigned __int128>(kMul0) * counter[0];
      const unsigned __int128 prod1 =
          static_cast<unsigned __int128>(kMul1) * counter[2];
      const auto hi0 = static_cast<std::uint64_t>(prod0 >> 64);
      const auto lo0 = static_cast<std::uint64_t>(prod0);
      const auto hi1 = static_cast<std::uint64_t>(prod1 >> 64);
      const auto lo1 = static_cast<std::uint64_t>(prod1);
      counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return counter;
  }
};

// One reproducible random stream, addressed by (master_seed, stream_id).
// The pair forms the Philox key, so distinct stream ids yield independent
// sequences under the same master seed, and the sequence for a given pair is
// bit-identical across runs and worker counts.
//
// Normal variates use the trigonometric Box-Muller transform: exactly two
// 64-bit words per pair of normals, with no rejection step, so consumption
// counts are deterministic.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : key_{master_seed, stream_id}, master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    if (buffer_pos_ == 4) {
      buffer_ = Philox4x64::block({block_index_, 0, 0, 0}, key_);
      ++block_index_;
      buffer_pos_ = 0;
    }
    return buffer_[buffer_pos_++];
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill_normals(double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = next_normal();
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace corrscreen
