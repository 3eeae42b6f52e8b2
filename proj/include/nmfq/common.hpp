// Shared basics: dense matrix, deterministic RNG, small numeric helpers.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace nmfq {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Coefficients below this threshold are dropped when optimizers report
// clusterings; hand-built clusterings keep exact-zero semantics.
inline constexpr double kSupportEps = 1e-8;

class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * cols_ + j]; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * cols_ + j]; }
    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    double sum() const {
        double s = 0.0;
        for (double x : v_) s += x;
        return s;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

inline bool is_nonneg_integer(double x) {
    return std::isfinite(x) && x >= 0.0 && std::floor(x) == x;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent child streams from one root seed. Restarts, sweep cells and
// repeats each get their own stream so execution order cannot matter.
inline uint64_t derive_seed(uint64_t root, uint64_t stream) {
    return splitmix64(splitmix64(root) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

// mt19937_64 is fully specified by the standard, so results are
// reproducible across platforms. std::*_distribution is not; we roll our
// own draws on top of the raw engine.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // uniform integer in [0, n), unbiased via rejection
    int next_below(int n) {
        if (n <= 0) throw std::invalid_argument("Rng::next_below: n must be positive");
        uint64_t un = static_cast<uint64_t>(n);
        uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % un;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            std::swap(v[i], v[next_below(i + 1)]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace nmfq
