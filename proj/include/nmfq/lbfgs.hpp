// Compact L-BFGS minimizer with Armijo backtracking, for the smooth
// fixed-support subproblems. Dimensions here are a few hundred at most.

#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

namespace nmfq {

struct LbfgsOptions {
    int max_iter = 500;
    int history = 8;
    double grad_tol = 1e-9;   // stop when max|g| falls below this
    double f_tol = 1e-12;     // relative objective change
};

// fg(x, grad_out) returns f(x) and fills grad_out. Non-finite values are
// treated as +infinity by the line search. Returns the best f found; x is
// left at the corresponding point.
inline double lbfgs_minimize(std::vector<double>& x,
                             const std::function<double(const std::vector<double>&, std::vector<double>&)>& fg,
                             const LbfgsOptions& opt = {}) {
    const size_t n = x.size();
    std::vector<double> g(n), x_new(n), g_new(n), dir(n);
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    double f = fg(x, g);
    if (!std::isfinite(f)) return f;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        double gmax = 0.0;
        for (double gi : g) gmax = std::max(gmax, std::fabs(gi));
        if (gmax <= opt.grad_tol) break;

        // two-loop recursion
        for (size_t i = 0; i < n; ++i) dir[i] = -g[i];
        std::vector<double> alpha(s_hist.size());
        for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
            double a = 0.0;
            for (size_t i = 0; i < n; ++i) a += s_hist[k][i] * dir[i];
            a *= rho_hist[k];
            alpha[k] = a;
            for (size_t i = 0; i < n; ++i) dir[i] -= a * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& s = s_hist.back();
            const auto& y = y_hist.back();
            for (size_t i = 0; i < n; ++i) {
                sy += s[i] * y[i];
                yy += y[i] * y[i];
            }
            if (yy > 0) {
                double scale = sy / yy;
                for (size_t i = 0; i < n; ++i) dir[i] *= scale;
            }
        }
        for (size_t k = 0; k < s_hist.size(); ++k) {
            double b = 0.0;
            for (size_t i = 0; i < n; ++i) b += y_hist[k][i] * dir[i];
            b *= rho_hist[k];
            for (size_t i = 0; i < n; ++i) dir[i] += (alpha[k] - b) * s_hist[k][i];
        }

        double gd = 0.0;
        for (size_t i = 0; i < n; ++i) gd += g[i] * dir[i];
        if (gd >= 0) {  // not a descent direction; fall back to steepest
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            gd = 0.0;
            for (size_t i = 0; i < n; ++i) {
                dir[i] = -g[i];
                gd -= g[i] * g[i];
            }
        }

        // Armijo backtracking
        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        std::vector<double> s(n), y(n);
        double sy = 0.0;
        for (size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-14) {  // curvature condition; skip the pair otherwise
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        bool converged = std::fabs(f - f_new) <= opt.f_tol * std::max({1.0, std::fabs(f), std::fabs(f_new)});
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        if (converged) break;
    }
    return f;
}

}  // namespace nmfq
