#pragma once

#include <array>
#include <cstdint>

namespace sinebeta {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// Derives a substream id from an experiment index and an item (path or
/// particle) index. Distinct pairs map to distinct ids.
std::uint64_t derive_substream(std::uint64_t experiment, std::uint64_t item) noexcept;

/// Deterministic Gaussian increment sequence keyed by (seed, substream).
///
/// The i-th draw depends only on (seed, substream, i), so a stream replays
/// identically no matter which thread consumes it or in what order streams
/// are scheduled.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t substream) noexcept;

  /// Next standard normal variate.
  double gaussian() noexcept {
    const std::uint64_t i = cursor_++;
    if ((i / kBatch) != cached_batch_) refill(i / kBatch);
    return normals_[i % kBatch];
  }

  /// Next uniform variate in (0, 1).
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t substream() const noexcept { return substream_; }

  /// Number of 64-bit lanes consumed so far. Gaussians consume one lane
  /// each; uniforms consume one lane each.
  std::uint64_t cursor() const noexcept { return cursor_; }

 private:
  std::uint64_t lane(std::uint64_t index) noexcept;

  std::uint64_t seed_;
  std::uint64_t substream_;
  Philox4x32::Key key_{};
  std::uint64_t cursor_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  Philox4x32::Counter cached_{};
  // Normals are produced in batches so the transform pipelines; values
  // depend only on their index, not on the batch layout.
  static constexpr unsigned kBatch = 128;
  void refill(std::uint64_t batch) noexcept;
  std::uint64_t cached_batch_ = ~std::uint64_t{0};
  std::array<double, kBatch> normals_{};
};

}  // namespace sinebeta
