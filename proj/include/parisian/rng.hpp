#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <cmath>
#include <cstdint>

namespace parisian {

// Same sequence as std::mt19937_64, generated faster.
using Engine = boost::random::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for work item `stream` under `seed`. Results for a given
/// (seed, stream) pair do not depend on how work items are scheduled.
inline Engine stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

/// Uniform on the open interval (0,1) from 53 random bits.
inline double open_uniform(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Engine& rng) { return -std::log(open_uniform(rng)); }

}  // namespace parisian
