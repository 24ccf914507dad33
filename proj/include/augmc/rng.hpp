#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <variant>

#include "augmc/errors.hpp"

namespace augmc {

// Counter-based generator (Philox 4x32-10).  A stream is identified by
// (seed, stream_id); the stream id is baked into the high half of the 128-bit
// counter, so distinct ids walk disjoint counter blocks and can never overlap.
// Pure integer arithmetic throughout: the same (seed, stream_id) produces the
// same draw sequence on every platform.
class rng_stream {
public:
  rng_stream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id), block_(0), pos_(4) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64() {
    const std::uint32_t lo = next_u32();
    const std::uint32_t hi = next_u32();
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo <= hi)) throw domain_error("uniform: lo > hi");
    return lo + (hi - lo) * uniform01();
  }

  // Unbiased integer on [0, n) by rejecting the short tail block.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw domain_error("uniform_below: n == 0");
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller (cosine branch only, no cached spare:
  // every call consumes exactly two uniforms, which keeps stream positions
  // easy to reason about when two code paths must match draw for draw).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) {
    if (!(sd >= 0.0)) throw domain_error("normal: sd must be >= 0");
    if (sd == 0.0) return mean;  // degenerate point mass, no draw consumed
    return mean + sd * normal();
  }

  // Gamma(shape, scale) by Marsaglia-Tsang squeeze for shape >= 1; for
  // shape < 1 draw Gamma(shape + 1) and multiply by U^(1/shape).
  double gamma(double shape, double scale) {
    if (!(shape > 0.0)) throw domain_error("gamma: shape must be > 0");
    if (!(scale > 0.0)) throw domain_error("gamma: scale must be > 0");
    if (shape < 1.0) {
      const double u = 1.0 - uniform01();  // (0, 1]
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v * scale;
    }
  }

  double chi_square(double dof) {
    if (!(dof > 0.0)) throw domain_error("chi_square: dof must be > 0");
    return gamma(0.5 * dof, 2.0);
  }

  // Value distributed as numerator / chi^2_dof.
  double scaled_inv_chi_square(double dof, double numerator) {
    if (!(numerator > 0.0))
      throw domain_error("scaled_inv_chi_square: numerator must be > 0");
    double x;
    do {
      x = chi_square(dof);
    } while (x <= 0.0);
    return numerator / x;
  }

  double exponential() {  // rate 1
    return -std::log(1.0 - uniform01());
  }

private:
  std::uint32_t next_u32() {
    if (pos_ == 4) {
      refill();
      pos_ = 0;
    }
    return out_[pos_++];
  }

  void refill() {
    // counter = (block low/high, stream low/high); key from the seed.
    std::uint32_t x0 = static_cast<std::uint32_t>(block_);
    std::uint32_t x1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t x2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t x3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * x0;
      const std::uint64_t p1 = 0xCD9E8D57ull * x2;
      const std::uint32_t y0 =
          static_cast<std::uint32_t>(p1 >> 32) ^ x1 ^ k0;
      const std::uint32_t y1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t y2 =
          static_cast<std::uint32_t>(p0 >> 32) ^ x3 ^ k1;
      const std::uint32_t y3 = static_cast<std::uint32_t>(p0);
      x0 = y0;
      x1 = y1;
      x2 = y2;
      x3 = y3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = x0;
    out_[1] = x1;
    out_[2] = x2;
    out_[3] = x3;
    ++block_;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int pos_;
};

inline rng_stream make_rng(std::uint64_t seed, std::uint64_t stream_id) {
  return rng_stream(seed, stream_id);
}

// Index draw from a normalized probability vector (one uniform consumed).
inline std::size_t sample_categorical(std::span<const double> probs,
                                      rng_stream& rng) {
  if (probs.empty()) throw argument_error("sample_categorical: empty support");
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

// Named scalar distributions, for callers that carry a distribution around
// as a value rather than calling the draw methods directly.
struct normal_dist {
  double mean;
  double sd;
};
struct gamma_dist {
  double shape;
  double scale;
};
struct chi_square_dist {
  double dof;
};
struct scaled_inv_chi_square_dist {
  double dof;
  double numerator;
};
struct uniform_dist {
  double lo;
  double hi;
};

using distribution = std::variant<normal_dist, gamma_dist, chi_square_dist,
                                  scaled_inv_chi_square_dist, uniform_dist>;

inline double draw(rng_stream& rng, const distribution& dist) {
  struct visitor {
    rng_stream& rng;
    double operator()(const normal_dist& d) { return rng.normal(d.mean, d.sd); }
    double operator()(const gamma_dist& d) { return rng.gamma(d.shape, d.scale); }
    double operator()(const chi_square_dist& d) { return rng.chi_square(d.dof); }
    double operator()(const scaled_inv_chi_square_dist& d) {
      return rng.scaled_inv_chi_square(d.dof, d.numerator);
    }
    double operator()(const uniform_dist& d) { return rng.uniform(d.lo, d.hi); }
  };
  return std::visit(visitor{rng}, dist);
}

}  // namespace augmc
