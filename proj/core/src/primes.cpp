#include "zll/primes.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef ZLL_HAVE_OPENMP
#include <omp.h>
#endif

namespace zll {
namespace {

std::vector<std::uint32_t> simple_sieve(std::uint32_t n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= n; j += i) comp[j] = true;
    }
    return primes;
}

// count primes in [lo, hi] by sieving with the given base primes
std::int64_t sieve_count(std::uint64_t lo, std::uint64_t hi,
                         const std::vector<std::uint32_t>& base) {
    if (hi < lo || hi < 2) return 0;
    if (lo < 2) lo = 2;
    const auto len = static_cast<size_t>(hi - lo + 1);
    std::vector<bool> comp(len, false);
    for (std::uint32_t p : base) {
        const std::uint64_t p2 = static_cast<std::uint64_t>(p) * p;
        if (p2 > hi) break;
        std::uint64_t start = std::max(p2, ((lo + p - 1) / p) * p);
        for (std::uint64_t j = start; j <= hi; j += p) comp[j - lo] = true;
    }
    std::int64_t cnt = 0;
    for (size_t i = 0; i < len; ++i)
        if (!comp[i]) ++cnt;
    return cnt;
}

}  // namespace

void PrimeTable::rebuild_base() {
    const auto root = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(limit_))) + 1;
    base_primes_ = simple_sieve(root);
}

PrimeTable PrimeTable::build(std::uint64_t limit) {
    if (limit < 4) throw std::invalid_argument("PrimeTable: limit too small");
    PrimeTable t;
    t.limit_ = limit;
    t.rebuild_base();

    const std::uint64_t nseg = limit / kStride + 1;
    std::vector<std::int64_t> counts(nseg, 0);
#ifdef ZLL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(nseg); ++k) {
        const std::uint64_t lo = static_cast<std::uint64_t>(k) * kStride + 1;
        const std::uint64_t hi = std::min(limit, (static_cast<std::uint64_t>(k) + 1) * kStride);
        counts[static_cast<size_t>(k)] = (hi >= lo) ? sieve_count(lo, hi, t.base_primes_) : 0;
    }
    t.checkpoints_.resize(nseg + 1);
    t.checkpoints_[0] = 0;  // pi(0)
    std::int64_t run = 0;
    for (std::uint64_t k = 0; k < nseg; ++k) {
        run += counts[static_cast<size_t>(k)];
        t.checkpoints_[static_cast<size_t>(k) + 1] = static_cast<std::uint32_t>(run);
    }
    return t;
}

std::int64_t PrimeTable::prime_pi(double x) const {
    if (!(x >= 2.0) || x > static_cast<double>(limit_))
        throw std::out_of_range("prime_pi: x outside [2, limit]");
    const auto n = static_cast<std::uint64_t>(std::floor(x));
    const std::uint64_t k = n / kStride;
    std::int64_t cnt = checkpoints_[static_cast<size_t>(k)];
    if (n >= k * kStride + 1) cnt += sieve_count(k * kStride + 1, n, base_primes_);
    return cnt;
}

std::int64_t PrimeTable::count_segment(std::uint64_t lo, std::uint64_t hi) const {
    return sieve_count(lo + 1, hi, base_primes_);
}

void PrimeTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("PrimeTable::save: cannot open " + path);
    out << "zll-primes-v1 limit=" << limit_ << " stride=" << kStride << "\n";
    for (size_t k = 0; k < checkpoints_.size(); ++k) out << k << "," << checkpoints_[k] << "\n";
}

PrimeTable PrimeTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("PrimeTable::load: cannot open " + path);
    std::string header;
    std::getline(in, header);
    std::uint64_t limit = 0, stride = 0;
    if (std::sscanf(header.c_str(), "zll-primes-v1 limit=%lu stride=%lu", &limit, &stride) != 2 ||
        stride != kStride)
        throw std::runtime_error("PrimeTable::load: unrecognized header: " + header);
    PrimeTable t;
    t.limit_ = limit;
    t.rebuild_base();
    t.checkpoints_.reserve(limit / kStride + 2);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("PrimeTable::load: bad row");
        t.checkpoints_.push_back(static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1))));
    }
    if (t.checkpoints_.size() != limit / kStride + 2)
        throw std::runtime_error("PrimeTable::load: row count does not match header limit");
    for (size_t k = 1; k < t.checkpoints_.size(); ++k)
        if (t.checkpoints_[k] < t.checkpoints_[k - 1])
            throw std::runtime_error("PrimeTable::load: checkpoints not nondecreasing");
    return t;
}

}  // namespace zll
