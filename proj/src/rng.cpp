#include "qread/rng.hpp"

#include <cstddef>

namespace qread {

std::vector<uint64_t> multinomial_counts(const std::vector<double>& weights, uint64_t shots,
                                         uint64_t seed) {
    AliasTable alias(weights);
    Rng rng(seed);
    std::vector<uint64_t> counts(weights.size(), 0);
    for (uint64_t s = 0; s < shots; ++s) counts[alias.draw(rng)]++;
    return counts;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
    const size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("AliasTable: negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("AliasTable: zero total weight");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

    std::vector<uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        uint32_t s = small.back();
        small.pop_back();
        uint32_t l = large.back();
        large.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (uint32_t i : large) prob_[i] = 1.0;
    for (uint32_t i : small) prob_[i] = 1.0;
}

}  // namespace qread
