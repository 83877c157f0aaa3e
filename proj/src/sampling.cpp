#include "multimpact/sampling.hpp"

#include "multimpact/error.hpp"

namespace multimpact {

namespace {

struct SobolPoly {
  int degree;
  unsigned a;
  unsigned m[11];
};

#include "sobol_table.inc"

constexpr double kInv2To32 = 1.0 / 4294967296.0;

}  // namespace

int SobolStream::max_dimension() { return kSobolTableDims; }

SobolStream::SobolStream(int dimension, bool skip_zero)
    : dimension_(dimension), index_(skip_zero ? 1 : 0) {
  require(dimension >= 1 && dimension <= kSobolTableDims,
          ErrorCode::kUnsupported,
          "Sobol dimension " + std::to_string(dimension) +
              " outside the bundled table (1.." +
              std::to_string(kSobolTableDims) + ")");
  directions_.resize(dimension);
  for (int k = 0; k < kBits; ++k) directions_[0][k] = 1u << (kBits - 1 - k);
  for (int d = 1; d < dimension; ++d) {
    const SobolPoly& poly = kSobolPolys[d - 1];
    const int s = poly.degree;
    auto& v = directions_[d];
    for (int k = 0; k < s && k < kBits; ++k) v[k] = poly.m[k] << (kBits - 1 - k);
    for (int k = s; k < kBits; ++k) {
      std::uint32_t x = v[k - s] ^ (v[k - s] >> s);
      for (int j = 1; j < s; ++j) {
        if ((poly.a >> (s - 1 - j)) & 1u) x ^= v[k - j];
      }
      v[k] = x;
    }
  }
  state_.assign(dimension, 0u);
}

void SobolStream::point(std::uint64_t index, std::span<double> out) const {
  require(static_cast<int>(out.size()) == dimension_,
          ErrorCode::kDimensionMismatch, "Sobol output has wrong dimension");
  require(index < (std::uint64_t{1} << kBits), ErrorCode::kUnsupported,
          "Sobol index exceeds 2^32 - 1");
  const std::uint64_t gray = index ^ (index >> 1);
  for (int d = 0; d < dimension_; ++d) {
    std::uint32_t x = 0;
    for (int k = 0; k < kBits; ++k) {
      if ((gray >> k) & 1u) x ^= directions_[d][k];
    }
    out[d] = x * kInv2To32;
  }
}

void SobolStream::seek(std::uint64_t index) {
  index_ = index;
  state_valid_ = false;
}

void SobolStream::next(std::span<double> out) {
  require(static_cast<int>(out.size()) == dimension_,
          ErrorCode::kDimensionMismatch, "Sobol output has wrong dimension");
  require(index_ < (std::uint64_t{1} << kBits), ErrorCode::kUnsupported,
          "Sobol index exceeds 2^32 - 1");
  if (!state_valid_) {
    const std::uint64_t gray = index_ ^ (index_ >> 1);
    for (int d = 0; d < dimension_; ++d) {
      std::uint32_t x = 0;
      for (int k = 0; k < kBits; ++k) {
        if ((gray >> k) & 1u) x ^= directions_[d][k];
      }
      state_[d] = x;
    }
    state_valid_ = true;
  }
  for (int d = 0; d < dimension_; ++d) out[d] = state_[d] * kInv2To32;
  // Gray-code step: flip the direction of the lowest zero bit of the index.
  int c = 0;
  while ((index_ >> c) & 1u) ++c;
  ++index_;
  if (c < kBits) {
    for (int d = 0; d < dimension_; ++d) state_[d] ^= directions_[d][c];
  } else {
    state_valid_ = false;
  }
}

std::vector<double> SobolStream::next() {
  std::vector<double> out(dimension_);
  next(out);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

void UniformSampler::draw(std::span<double> out) {
  for (double& x : out) x = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

void SobolSampler::draw(std::span<double> out) { stream_.next(out); }

void BlockSampler::draw(std::span<double> out) {
  require(pos_ + out.size() <= values_.size(), ErrorCode::kInvalidArgument,
          "precomputed sampler block exhausted");
  for (double& x : out) x = values_[pos_++];
}

}  // namespace multimpact
