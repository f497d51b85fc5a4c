#include "tsdsae/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace tsdsae {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::uniform_in(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

void Rng::fill_normal(std::span<double> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[i++] = r * std::cos(theta);
    if (i < out.size()) out[i++] = r * std::sin(theta);
  }
}

double Rng::normal() {
  double v;
  fill_normal(std::span<double>(&v, 1));
  return v;
}

void Rng::shuffle(std::span<int> indices) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const int j = below(static_cast<int>(i));
    std::swap(indices[i - 1], indices[static_cast<std::size_t>(j)]);
  }
}

int Rng::below(int n) {
  // Rejection-free modulo bias is negligible for the small n used here, but
  // rejection keeps the draw exactly uniform.
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

std::string Rng::state_hex() const {
  char buf[4 * 16 + 4];
  std::snprintf(buf, sizeof(buf), "%016llx %016llx %016llx %016llx",
                static_cast<unsigned long long>(s_[0]),
                static_cast<unsigned long long>(s_[1]),
                static_cast<unsigned long long>(s_[2]),
                static_cast<unsigned long long>(s_[3]));
  return buf;
}

std::array<std::uint64_t, 4> Rng::parse_state_hex(const std::string& hex) {
  std::array<std::uint64_t, 4> s{};
  unsigned long long w[4];
  if (std::sscanf(hex.c_str(), "%llx %llx %llx %llx", &w[0], &w[1], &w[2],
                  &w[3]) != 4) {
    throw std::runtime_error("malformed rng state: '" + hex + "'");
  }
  for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = w[i];
  return s;
}

}  // namespace tsdsae
