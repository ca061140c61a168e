#pragma once

#include <array>
#include <cstdint>

namespace stoplab {

// Identifies one independent random sequence. Two streams with the same
// (master_seed, stream_id) produce the same draws; there is no shared state.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  // Child stream for sub-task `index` (a Monte Carlo trial, a sweep cell...).
  [[nodiscard]] RngStream split(std::uint64_t index) const noexcept;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator.
 *
 * Key is the master seed; the 128-bit counter is (position, stream_id), so
 * any draw is a pure function of (master_seed, stream_id, position).
 * Normal deviates use the Box-Muller transform, both outputs consumed.
 */
class CounterRng {
 public:
  explicit CounterRng(RngStream stream) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1), 53 bits.
  double uniform() noexcept;
  double normal() noexcept;

  [[nodiscard]] const RngStream& stream() const noexcept { return stream_; }
  // Number of Philox blocks consumed so far.
  [[nodiscard]] std::uint64_t position() const noexcept { return position_; }

  // Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox4x32_10(
      std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  RngStream stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stoplab
