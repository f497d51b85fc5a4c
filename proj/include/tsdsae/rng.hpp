#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace tsdsae {

// Counter-style pseudo-random generator: xoshiro256++ seeded via splitmix64.
// The uint64 stream is bit-exact across platforms for a given seed. Normal
// deviates use Box-Muller over that stream; uniform doubles take the top 53
// bits. State is exactly four 64-bit words, so it serializes losslessly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // [0, 1), 53-bit resolution.
  double uniform();
  // (0, 1]; never zero, safe under log().
  double uniform_open();
  // uniform in [lo, hi)
  double uniform_in(double lo, double hi);

  // Fills out with i.i.d. standard normals. Pairs are produced by Box-Muller
  // (cos then sin); for odd lengths the trailing sin value is discarded, so
  // the stream position depends only on the sequence of fill lengths.
  void fill_normal(std::span<double> out);
  double normal();

  // Fisher-Yates shuffle of 0..n-1.
  void shuffle(std::span<int> indices);

  // integer in [0, n)
  int below(int n);

  std::array<std::uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { s_ = s; }
  std::string state_hex() const;
  static std::array<std::uint64_t, 4> parse_state_hex(const std::string& hex);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace tsdsae
