#pragma once

#include <cstdint>
#include <random>

namespace sparsefunc {

/// One SplitMix64 output step. Used as the mixing hash for stream addressing.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replication `replication` on stream `stream_id` under `master`.
/// Every (master, stream, replication) triple addresses its own generator
/// directly, so results do not depend on how replications are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id,
                          std::uint64_t replication) noexcept;

/// The generator behind every stochastic operation. std::mt19937_64 is fully
/// specified by the standard, so a fixed seed gives the same bits everywhere;
/// variates are drawn through Boost.Random distributions for the same reason.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal();
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool coin();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sparsefunc
