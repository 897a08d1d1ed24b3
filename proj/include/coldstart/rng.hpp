#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace coldstart {

// SplitMix64 step, used to expand a master seed into per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Each episode keeps independent streams so that, e.g., switching the
// acquisition strategy does not perturb learner initialization.
enum class Stream : std::uint64_t {
  Acquisition = 0x41435155ULL,
  Prediction = 0x50524544ULL,
  Learner = 0x4c524e52ULL,
  Data = 0x44415441ULL,
  Trials = 0x54524c53ULL,
};

// mt19937_64 plus hand-rolled draw helpers. The standard pins the engine's
// output sequence but not the distributions', so bounded integers, reals and
// normals are implemented here to keep runs identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng derive(std::uint64_t master_seed, Stream stream) {
    std::uint64_t s =
        master_seed ^ (static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Unbiased integer in [0, n) by rejection.
  std::size_t uniform_index(std::size_t n) {
    assert(n > 0);
    if (n == 1) return 0;
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % un;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % un);
  }

  // Double in [0, 1) with 53 random bits.
  double uniform_real() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform_real();
    } while (u1 <= 0.0);
    const double u2 = uniform_real();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace coldstart
