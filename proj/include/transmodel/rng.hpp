#pragma once

#include <cstdint>
#include <random>

namespace transmodel {

inline constexpr std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Random stream number `stream` of the family rooted at `seed`. Streams are
//! keyed by index, so replication r draws the same numbers whatever order the
//! replications run in.
class RngStream
{
public:
  using result_type = std::mt19937_64::result_type;

  RngStream(std::uint64_t seed, std::uint64_t stream)
  {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{ static_cast<std::uint32_t>(a),
                       static_cast<std::uint32_t>(a >> 32),
                       static_cast<std::uint32_t>(b),
                       static_cast<std::uint32_t>(b >> 32) };
    engine_.seed(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  double normal() { return normal_(engine_); }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

} // namespace transmodel
