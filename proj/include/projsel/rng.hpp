#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace projsel {

// All randomness in the library flows from one master seed. Independent
// streams are derived from (master, label, index) so that adding or
// reordering consumers never perturbs the draws of another component.

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a(label)) ^ index);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::string_view label,
                                   std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(master, label, index));
}

// Distribution objects are constructed per call so that a stream's output is
// a pure function of the draw sequence (no cached spare values).

inline double draw_uniform(std::mt19937_64& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

inline double draw_normal(std::mt19937_64& g, double mean = 0.0, double sd = 1.0) {
  return std::normal_distribution<double>(mean, sd)(g);
}

inline double draw_gamma(std::mt19937_64& g, double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(g);
}

// X ~ InvGamma(shape, scale) iff 1/X ~ Gamma(shape, 1/scale).
inline double draw_inv_gamma(std::mt19937_64& g, double shape, double scale) {
  return scale / std::gamma_distribution<double>(shape, 1.0)(g);
}

inline double draw_half_student_t(std::mt19937_64& g, double nu) {
  return std::abs(std::student_t_distribution<double>(nu)(g));
}

}  // namespace projsel
