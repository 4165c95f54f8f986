#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>

namespace sapd {

/// splitmix64 step; the standard 64-bit finalizer used to spread seed entropy.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Folds an ordered tuple of integers into one well-mixed 64-bit seed.
/// Distinct tuples map to distinct streams for all practical purposes.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x8C2F9D1B7A6E5C3DULL;
  std::uint64_t acc = 0;
  for (std::uint64_t p : parts) {
    state ^= p + 0x9E3779B97F4A7C15ULL + (state << 6) + (state >> 2);
    acc ^= splitmix64(state);
  }
  return acc;
}

/// One reproducible random stream.  Draw routines are implemented here rather
/// than with std distributions so the sampled sequence is pinned by this code,
/// not by the standard library's unspecified algorithms.  All draw state lives
/// in the engine, so serialize/restore round-trips the stream bit-exactly.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for a (master seed, substream, run, purpose) tuple.  Used to hand
  /// every solver/path pair its own stream independent of scheduling.
  static RngStream derive(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
    return RngStream(mix_seed({master, a, b, c}));
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (cosine branch only).  Stateless apart
  /// from the engine, which keeps mid-run checkpoints trivial.
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0,1], keeps the log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  /// Uniform integer in [0, n) via the multiply-shift reduction.
  std::uint64_t integer_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  void fill_gaussian(Eigen::Ref<Eigen::VectorXd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gaussian();
  }

  std::string serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void restore(const std::string& text) {
    std::istringstream is(text);
    is >> engine_;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sapd
