#ifndef POLYRC_RANDOM_HPP_
#define POLYRC_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace polyrc {

// Seeded generator whose derived draws do not depend on the standard
// library's distribution implementations, so sampled episodes and model
// initialisations are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);
  double normal(double mean = 0.0, double stddev = 1.0);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with a stream tag (e.g. a relation name hash).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& s);

}  // namespace polyrc

#endif  // POLYRC_RANDOM_HPP_
