#pragma once

#include <array>
#include <cstdint>

namespace gdgap {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC'11). Counter-based: output depends only on
/// (counter, key), so streams are reproducible on any platform.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// A reproducible random stream identified by (seed, stream id).
///
/// Layout: key = seed (two 32-bit words); counter words 2..3 hold the stream
/// id and words 0..1 the block index. Each block yields two 64-bit outputs.
/// Distinct stream ids never share a counter, so streams are independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 64-bit outputs consumed so far.
  std::uint64_t position() const noexcept { return 2 * block_ - (have_spare_ ? 1 : 0); }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;
  /// Uniform integer in [0, bound) (bound > 0), rejection-free for
  /// power-of-two bounds, Lemire reduction otherwise.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  /// Independent stream for a named purpose within the same trial. The
  /// lane is mixed into the key, so (seed, stream id, lane) triples never
  /// collide with plain (seed, stream id) pairs for lane != 0.
  RngStream lane(std::uint64_t lane_id) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

/// Well-known lanes used by the experiment driver.
enum class Lane : std::uint64_t { Sample = 0, Sgd = 1, MonteCarlo = 2, Probe = 3 };

inline RngStream lane(const RngStream& s, Lane l) noexcept {
  return s.lane(static_cast<std::uint64_t>(l));
}

}  // namespace gdgap
