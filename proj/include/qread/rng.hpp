#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qread {

// splitmix64; used to derive independent stream seeds from a master seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d49bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based seed derivation: tasks hash their identifiers into the master
// seed, so parallel workers get uncorrelated streams regardless of run order.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> stream) {
    uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    for (uint64_t v : stream) s = splitmix64(s ^ (v + 0x9e3779b97f4a7c15ULL));
    return s;
}

// Thin deterministic wrapper over mt19937_64. Raw-bit conversions only, no
// std::*_distribution, so sequences are identical on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

    uint64_t next() { return eng_(); }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // unbiased integer in [0, n)
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

  private:
    std::mt19937_64 eng_;
};

// shots multinomial draws from (possibly unnormalized) weights; dense counts.
std::vector<uint64_t> multinomial_counts(const std::vector<double>& weights, uint64_t shots,
                                         uint64_t seed);

// Walker/Vose alias table for O(1) multinomial draws.
class AliasTable {
  public:
    explicit AliasTable(const std::vector<double>& weights);

    size_t size() const { return prob_.size(); }
    size_t draw(Rng& rng) const {
        size_t i = static_cast<size_t>(rng.below(prob_.size()));
        return rng.uniform01() < prob_[i] ? i : alias_[i];
    }

  private:
    std::vector<double> prob_;
    std::vector<uint32_t> alias_;
};

}  // namespace qread
