// Exact prime counting via a segmented sieve with checkpointed counts.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zll {

class PrimeTable {
  public:
    static constexpr std::uint64_t kStride = 1u << 16;

    // Sieve up to limit (inclusive); checkpoints every kStride integers.
    static PrimeTable build(std::uint64_t limit);

    // Exact count of primes <= floor(x).  Throws std::out_of_range outside
    // [2, limit].
    std::int64_t prime_pi(double x) const;

    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint32_t>& checkpoints() const { return checkpoints_; }

    // versioned cache file: header line then "k,count" rows
    void save(const std::string& path) const;
    static PrimeTable load(const std::string& path);  // refuses mismatched headers

  private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> base_primes_;  // primes <= sqrt(limit)
    std::vector<std::uint32_t> checkpoints_;  // checkpoints_[k] = pi(k * kStride)

    // count primes in (lo, hi] with lo, hi < limit_
    std::int64_t count_segment(std::uint64_t lo, std::uint64_t hi) const;
    void rebuild_base();
};

}  // namespace zll
