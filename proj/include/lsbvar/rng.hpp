#ifndef LSBVAR_RNG_HPP
#define LSBVAR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lsbvar {

// Hash-based seed derivation so that every (chain, purpose) pair gets its own
// independent stream from a single root seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                 std::uint64_t purpose = 0) {
  return splitmix64(splitmix64(splitmix64(root) ^ stream) ^ purpose);
}

// Seeded random stream with hand-rolled transforms on top of mt19937_64.
// The standard-library distributions are avoided on purpose: their algorithms
// are implementation-defined, while replay and checkpoint-resume here must be
// bit-stable for a given binary and serialized engine state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on the open interval (0, 1), 52-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar method; the spare value is discarded so the stream has no
  // hidden state beyond the engine itself.
  double normal() {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

  double exponential() { return -std::log(uniform()); }

  // Marsaglia-Tsang; shape > 0, unit scale.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double gamma(double shape, double scale) { return gamma(shape) * scale; }

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  double student_t(double dof) {
    return normal() / std::sqrt(chi_squared(dof) / dof);
  }

  // Uniform integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    // rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Categorical draw from unnormalized non-negative weights.
  template <typename Vec>
  int categorical(const Vec& w) {
    double total = 0.0;
    for (int h = 0; h < static_cast<int>(w.size()); ++h) total += w[h];
    double u = uniform() * total;
    for (int h = 0; h < static_cast<int>(w.size()); ++h) {
      u -= w[h];
      if (u <= 0.0) return h;
    }
    return static_cast<int>(w.size()) - 1;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  static RngStream deserialize(const std::string& s) {
    RngStream r(0);
    std::istringstream is(s);
    is >> r.engine_;
    if (!is) throw std::runtime_error("RngStream: bad serialized state");
    return r;
  }

  bool operator==(const RngStream& o) const { return engine_ == o.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lsbvar

#endif
