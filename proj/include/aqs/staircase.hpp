// staircase.hpp — normalized eigenvalue counting functions N(λ), jump
// extraction, and exact sup-distances between step functions.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

#include "aqs/errors.hpp"

namespace aqs {

// N(λ) = #{eigenvalues <= λ} / |Q| for one finite section, plus the jump list
// obtained by fusing eigenvalue clusters no wider than the merge tolerance.
struct SpectralStaircase {
    std::size_t window_size = 0;
    double norm_bound = 0.0;            // certified K with N(K) = 1
    double merge_tol = 0.0;
    std::vector<double> eigs;           // ascending
    std::vector<std::pair<double, double>> jumps;  // (λ representative, mass)

    double value(double lambda) const {
        const auto it = std::upper_bound(eigs.begin(), eigs.end(), lambda);
        return static_cast<double>(it - eigs.begin()) / static_cast<double>(window_size);
    }

    // Left limit N(λ⁻).
    double value_left(double lambda) const {
        const auto it = std::lower_bound(eigs.begin(), eigs.end(), lambda);
        return static_cast<double>(it - eigs.begin()) / static_cast<double>(window_size);
    }

    // Mass of the merged cluster containing λ (0 when none is within tol).
    double cluster_mass(double lambda, double tol) const {
        const auto lo = std::lower_bound(eigs.begin(), eigs.end(), lambda - tol);
        const auto hi = std::upper_bound(eigs.begin(), eigs.end(), lambda + tol);
        return static_cast<double>(hi - lo) / static_cast<double>(window_size);
    }
};

inline SpectralStaircase make_staircase(std::vector<double> eigs, std::size_t window_size,
                                        double norm_bound, double merge_tol) {
    if (!std::is_sorted(eigs.begin(), eigs.end()))
        throw Error("make_staircase: eigenvalues must be sorted");
    if (window_size == 0 || eigs.size() != window_size)
        throw Error("make_staircase: eigenvalue count must equal the window size");
    SpectralStaircase s;
    s.window_size = window_size;
    s.norm_bound = norm_bound;
    s.merge_tol = merge_tol;
    s.eigs = std::move(eigs);
    std::size_t i = 0;
    while (i < s.eigs.size()) {
        std::size_t j = i + 1;
        while (j < s.eigs.size() && s.eigs[j] - s.eigs[j - 1] <= merge_tol) ++j;
        const double rep = 0.5 * (s.eigs[i] + s.eigs[j - 1]);
        s.jumps.emplace_back(rep, static_cast<double>(j - i) / static_cast<double>(window_size));
        i = j;
    }
    return s;
}

// Exact sup |N1 - N2| over the merged breakpoint set, both one-sided limits.
inline double sup_distance(const SpectralStaircase& a, const SpectralStaircase& b) {
    double sup = 0.0;
    auto consider = [&](double x) {
        sup = std::max(sup, std::fabs(a.value(x) - b.value(x)));
        sup = std::max(sup, std::fabs(a.value_left(x) - b.value_left(x)));
    };
    for (double x : a.eigs) consider(x);
    for (double x : b.eigs) consider(x);
    return sup;
}

// Sup |N - F| against a continuous monotone reference curve; between
// breakpoints N is constant and F monotone, so the sup is attained at
// breakpoint limits (and at the interval ends).
inline double sup_distance_to_curve(const SpectralStaircase& s,
                                    const std::function<double(double)>& curve) {
    double sup = std::fabs(s.value(0.0) - curve(0.0));
    sup = std::max(sup, std::fabs(1.0 - curve(s.norm_bound)));
    for (double x : s.eigs) {
        const double f = curve(x);
        sup = std::max(sup, std::fabs(s.value(x) - f));
        sup = std::max(sup, std::fabs(s.value_left(x) - f));
    }
    return sup;
}

// CSV: breakpoints as "lambda,N" rows (value after the jump).
inline void write_staircase_csv(const SpectralStaircase& s, std::ostream& os) {
    os << "lambda,N\n";
    double acc = 0.0;
    for (const auto& [lambda, mass] : s.jumps) {
        acc += mass;
        os << lambda << ',' << acc << '\n';
    }
}

// Plot-ready two-column text: both jump limits per breakpoint, no header.
inline void write_staircase_plot(const SpectralStaircase& s, std::ostream& os) {
    double acc = 0.0;
    for (const auto& [lambda, mass] : s.jumps) {
        os << lambda << ' ' << acc << '\n';
        acc += mass;
        os << lambda << ' ' << acc << '\n';
    }
    os << s.norm_bound << ' ' << 1.0 << '\n';
}

}  // namespace aqs
