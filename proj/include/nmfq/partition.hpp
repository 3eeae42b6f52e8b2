// Exhaustive set-partition enumeration via restricted growth strings.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nmfq/clustering.hpp"

namespace nmfq {

// Calls fn(HardClustering) once for every set partition of {0..n-1}, in
// restricted-growth-string order. Bell(10) = 115975, so this is fine for
// the desk scales this library targets.
template <typename Fn>
void for_each_partition(int n, Fn&& fn) {
    if (n < 0) throw std::invalid_argument("for_each_partition: negative n");
    if (n == 0) {
        fn(HardClustering{});
        return;
    }
    std::vector<int> rgs(n, 0);   // rgs[i] <= max(rgs[0..i-1]) + 1
    std::vector<int> maxp(n, 0);  // maxp[i] = max of rgs[0..i-1]
    while (true) {
        fn(HardClustering{rgs});
        int i = n - 1;
        while (i > 0 && rgs[i] > maxp[i]) --i;  // can bump only if rgs[i] <= maxp[i]
        if (i == 0) break;
        ++rgs[i];
        for (int j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            maxp[j] = std::max(maxp[j - 1], rgs[j - 1]);
        }
    }
}

inline uint64_t bell_number(int n) {
    // small table is plenty here
    static const uint64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597};
    if (n < 0 || n > 12) throw std::invalid_argument("bell_number: out of table range");
    return bell[n];
}

}  // namespace nmfq
