#ifndef VPCLT_RNG_HPP
#define VPCLT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace vpclt {

// splitmix64 step (Steele/Lea/Flood). Used both as a stream generator and
// as the seed mixer that derives independent per-path streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic random stream derived from (master_seed, stream_id).
// Streams with distinct ids are independent for Monte-Carlo purposes, and a
// stream's output depends only on the two ids, never on evaluation order or
// thread placement. All distributions are implemented on top of the raw
// 64-bit output, so results are identical across compilers.
class StreamRng {
 public:
  StreamRng(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64_next(s);
    s ^= stream_id * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull;
    std::uint64_t b = splitmix64_next(s);
    state_ = a ^ (b + 0x9e3779b97f4a7c15ull);
    // warm up so that nearby (seed, id) pairs decorrelate
    splitmix64_next(state_);
    splitmix64_next(state_);
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform on (0,1), never exactly 0 or 1
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // standard normal, Marsaglia polar method with one cached deviate
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // +1 or -1 with equal probability
  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vpclt

#endif  // VPCLT_RNG_HPP
