#include "sparsefunc/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace sparsefunc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id,
                          std::uint64_t replication) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ stream_id);
  h = splitmix64(h ^ replication);
  return h;
}

double RandomStream::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  boost::random::uniform_int_distribution<std::int64_t> dist(lo, hi);
  return dist(engine_);
}

bool RandomStream::coin() { return (engine_() >> 63) != 0; }

}  // namespace sparsefunc
