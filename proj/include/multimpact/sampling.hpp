#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace multimpact {

// Sobol sequence with Joe-Kuo direction numbers, generated in Gray-code
// order at 32 bits of resolution.
class SobolStream {
 public:
  static constexpr int kBits = 32;

  explicit SobolStream(int dimension, bool skip_zero = true);

  static int max_dimension();

  int dimension() const { return dimension_; }
  std::uint64_t next_index() const { return index_; }

  void next(std::span<double> out);
  std::vector<double> next();
  // Random access to point `index` without advancing.
  void point(std::uint64_t index, std::span<double> out) const;
  void seek(std::uint64_t index);

 private:
  int dimension_;
  std::uint64_t index_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> state_;
  bool state_valid_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);
// Independent per-stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Source of impulse-scale draws in [0, 1).
class ImpulseSampler {
 public:
  virtual ~ImpulseSampler() = default;
  virtual void draw(std::span<double> out) = 0;
  virtual std::string kind() const = 0;
};

class UniformSampler final : public ImpulseSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : rng_(seed) {}
  void draw(std::span<double> out) override;
  std::string kind() const override { return "uniform"; }

 private:
  std::mt19937_64 rng_;
};

// Successive points of a Sobol stream whose dimension is the draw size.
class SobolSampler final : public ImpulseSampler {
 public:
  SobolSampler(int dimension, std::uint64_t start_index = 1)
      : stream_(dimension, true) {
    stream_.seek(start_index);
  }
  void draw(std::span<double> out) override;
  std::string kind() const override { return "sobol"; }

 private:
  SobolStream stream_;
};

// Serves a precomputed block of values in order.
class BlockSampler final : public ImpulseSampler {
 public:
  BlockSampler(std::vector<double> values, std::string kind)
      : values_(std::move(values)), kind_(std::move(kind)) {}
  void draw(std::span<double> out) override;
  std::string kind() const override { return kind_; }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
  std::string kind_;
};

}  // namespace multimpact
