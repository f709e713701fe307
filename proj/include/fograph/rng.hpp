#ifndef FOGRAPH_RNG_HPP
#define FOGRAPH_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace fograph {

/// Seedable, splittable random stream. Every stochastic consumer in the
/// simulator gets its own stream, keyed by (component, id), so adding one
/// consumer never perturbs another's draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; the uniform/gaussian mappings below are hand-rolled because the
/// stdlib distribution classes are implementation-defined and the event log
/// must be byte-identical across toolchains.
class RngStream {
public:
  RngStream(std::uint64_t root_seed, std::string_view component, std::string_view id);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_unit();

  /// Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  /// A degenerate span (lo == hi) consumes no draw.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi);

  /// Gaussian draw via Box-Muller (consumes two uniforms per call).
  double next_gaussian(double mean, double stddev);

  /// Seed derivation exposed for tests.
  static std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view component,
                                   std::string_view id);

private:
  std::mt19937_64 engine_;
};

}  // namespace fograph

#endif
