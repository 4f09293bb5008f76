#ifndef SHADOWCAST_TEST_HELPERS_HPP
#define SHADOWCAST_TEST_HELPERS_HPP

// Test-only oracles, independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "shadowcast/curvefit.hpp"
#include "shadowcast/rng.hpp"

namespace testhelpers {

// Brute-force 2-parameter minimizer: dense grid over a box, then coordinate
// descent with shrinking steps. Uses cost evaluations only (no derivatives,
// no linear algebra), so it is an independent route to the minimum.
struct GridPolishResult {
    double p0 = 0.0, p1 = 0.0, cost = 0.0;
};

inline GridPolishResult grid_polish_2d(const std::function<double(double, double)>& cost,
                                       double lo0, double hi0, double lo1, double hi1,
                                       int grid = 160) {
    GridPolishResult best;
    best.cost = 1e308;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double a = lo0 + (hi0 - lo0) * i / (grid - 1);
            const double b = lo1 + (hi1 - lo1) * j / (grid - 1);
            const double c = cost(a, b);
            if (c < best.cost) {
                best = {a, b, c};
            }
        }
    double step0 = (hi0 - lo0) / (grid - 1);
    double step1 = (hi1 - lo1) / (grid - 1);
    while (step0 > 1e-13 * (std::abs(best.p0) + 1e-30) ||
           step1 > 1e-13 * (std::abs(best.p1) + 1e-30)) {
        bool improved = false;
        const double cand0[2] = {best.p0 - step0, best.p0 + step0};
        const double cand1[2] = {best.p1 - step1, best.p1 + step1};
        for (double a : cand0) {
            const double c = cost(a, best.p1);
            if (c < best.cost) {
                best.p0 = a;
                best.cost = c;
                improved = true;
            }
        }
        for (double b : cand1) {
            const double c = cost(best.p0, b);
            if (c < best.cost) {
                best.p1 = b;
                best.cost = c;
                improved = true;
            }
        }
        if (!improved) {
            step0 *= 0.5;
            step1 *= 0.5;
        }
    }
    return best;
}

// Relative disagreement between an analytic derivative and a central finite
// difference of f at x (step scaled to x).
inline double fd_check(const std::function<double(double)>& f, double x, double analytic) {
    const double h = 1e-6 * (std::abs(x) + 1.0);
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-12});
    return std::abs(fd - analytic) / denom;
}

// One-sample Kolmogorov-Smirnov statistic against the standard normal CDF.
inline double ks_statistic_normal(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    double d = 0.0;
    const double n = static_cast<double>(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double c = phi(z[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return d;
}

// Synthetic scan series from a model truth plus Gaussian noise. Detuning
// kinds emit non-detection rows (value 0, sigma 1) at controls >= 0,
// mirroring generate_scan's convention.
inline shadowcast::curvefit::ScanSeries synth_series(
    shadowcast::curvefit::ScanKind kind, const shadowcast::curvefit::ParametricModel& model,
    const Eigen::VectorXd& truth, const std::vector<double>& controls, double sigma,
    std::uint64_t seed) {
    shadowcast::curvefit::ScanSeries s;
    s.kind = kind;
    shadowcast::rng::Xoshiro256pp gen(seed);
    for (double c : controls) {
        shadowcast::curvefit::ScanPoint pt;
        pt.control = c;
        if (kind == shadowcast::curvefit::ScanKind::detuning && c >= 0.0) {
            pt.value = 0.0;
            pt.sigma = 1.0;
            pt.flag = shadowcast::curvefit::PointFlag::non_detection;
        } else {
            pt.value = model.value(truth, c) + gen.normal(0.0, sigma);
            pt.sigma = sigma;
        }
        s.points.push_back(pt);
    }
    return s;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

inline std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a * std::pow(b / a, double(i) / (n - 1));
    return v;
}

}  // namespace testhelpers

#endif
