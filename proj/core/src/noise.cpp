#include "sinebeta/noise.hpp"

#include <cmath>

namespace sinebeta {
namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;
constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

std::uint64_t derive_substream(std::uint64_t experiment, std::uint64_t item) noexcept {
  // Experiments occupy the top 24 bits, items the low 40; both are far
  // larger than any run this library performs.
  return (experiment << 40) ^ (item & ((std::uint64_t{1} << 40) - 1));
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t substream) noexcept
    : seed_(seed), substream_(substream) {
  const std::uint64_t key64 = splitmix64(seed);
  key_ = {static_cast<std::uint32_t>(key64), static_cast<std::uint32_t>(key64 >> 32)};
}

std::uint64_t NoiseStream::lane(std::uint64_t index) noexcept {
  const std::uint64_t block = index >> 1;
  if (block != cached_block_) {
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(substream_),
        static_cast<std::uint32_t>(substream_ >> 32)};
    cached_ = Philox4x32::apply(ctr, key_);
    cached_block_ = block;
  }
  const unsigned j = static_cast<unsigned>(index & 1) * 2;
  return (static_cast<std::uint64_t>(cached_[j + 1]) << 32) | cached_[j];
}

double NoiseStream::uniform() noexcept { return to_open_unit(lane(cursor_++)); }

void NoiseStream::refill(std::uint64_t batch) noexcept {
  // Box-Muller on lanes (2k, 2k+1): draw 2k takes the cosine branch and draw
  // 2k+1 the sine branch, so each variate is a pure function of its index.
  // Lanes 2k and 2k+1 live in Philox block k.
  const std::uint64_t first_pair = batch * (kBatch / 2);
  for (unsigned p = 0; p < kBatch / 2; ++p) {
    const std::uint64_t block = first_pair + p;
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)};
    const Philox4x32::Counter r = Philox4x32::apply(ctr, key_);
    const double u1 = to_open_unit((static_cast<std::uint64_t>(r[1]) << 32) | r[0]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(r[3]) << 32) | r[2]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    normals_[2 * p] = rad * std::cos(theta);
    normals_[2 * p + 1] = rad * std::sin(theta);
  }
  cached_batch_ = batch;
}

}  // namespace sinebeta
