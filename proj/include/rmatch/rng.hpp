#pragma once

#include <cstdint>
#include <string_view>

namespace rmatch {

// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to turn purpose tags into stream ids.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based 64-bit generator.
///
/// The i-th draw (i = 1, 2, ...) of stream (base_seed, stream_id) is
///   mix64(key + i * 0x9E3779B97F4A7C15),
///   key = mix64(base_seed ^ mix64(stream_id + 0xD1B54A32D192ED03)).
/// Only 64-bit unsigned arithmetic is involved, so the sequence is the same
/// on every platform and easy to reproduce in other languages.
class RngStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  constexpr RngStream(std::uint64_t base_seed, std::uint64_t stream_id)
      : base_seed_(base_seed),
        stream_id_(stream_id),
        key_(mix64(base_seed ^ mix64(stream_id + kStreamSalt))) {}

  constexpr std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on (0, 1], 53-bit resolution. Never returns 0.
  constexpr double next_unit_open_closed() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  constexpr double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  constexpr std::uint64_t base_seed() const { return base_seed_; }
  constexpr std::uint64_t stream_id() const { return stream_id_; }
  constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream id for a (purpose, index) pair under base_seed.
constexpr std::uint64_t derive_stream_id(std::uint64_t base_seed,
                                         std::string_view purpose,
                                         std::uint64_t index) {
  return mix64(mix64(base_seed ^ fnv1a64(purpose)) + index * RngStream::kGolden);
}

inline RngStream derive_stream(std::uint64_t base_seed, std::string_view purpose,
                               std::uint64_t index) {
  return RngStream(base_seed, derive_stream_id(base_seed, purpose, index));
}

/// Inverse-CDF map of u in (0, 1] to an exponential(rate) variate.
double exponential_from_uniform(double u, double rate);

/// Exponential(rate) draw; throws InvalidArgument unless rate > 0.
double sample_exponential(double rate, RngStream& rng);

}  // namespace rmatch
