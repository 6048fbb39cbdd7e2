// eigensolve.hpp — dense symmetric eigensolver: Householder reduction to
// tridiagonal form followed by the implicit-shift QL iteration.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aqs/errors.hpp"

namespace aqs {

namespace detail {

inline double pythag(double a, double b) {
    const double absa = std::fabs(a);
    const double absb = std::fabs(b);
    if (absa > absb) {
        const double r = absb / absa;
        return absa * std::sqrt(1.0 + r * r);
    }
    if (absb == 0.0) return 0.0;
    const double r = absa / absb;
    return absb * std::sqrt(1.0 + r * r);
}

// Householder reduction of a symmetric row-major matrix to tridiagonal d/e.
// With `vectors`, a is overwritten by the accumulated orthogonal transform.
inline void householder_tridiag(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                                std::vector<double>& e, bool vectors) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 0) return;
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(at(i, k));
            if (scale == 0.0) {
                e[i] = at(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    at(i, k) /= scale;
                    h += at(i, k) * at(i, k);
                }
                double f = at(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                at(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    if (vectors) at(j, i) = at(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
                    e[j] = g / h;
                    f += e[j] * at(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = at(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        at(j, k) -= f * e[k] + g * at(i, k);
                }
            }
        } else {
            e[i] = at(i, l);
        }
        d[i] = h;
    }
    if (vectors) d[0] = 0.0;
    e[0] = 0.0;
    if (vectors) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0 && d[i] != 0.0) {
                for (std::size_t j = 0; j < i; ++j) {
                    double g = 0.0;
                    for (std::size_t k = 0; k < i; ++k) g += at(i, k) * at(k, j);
                    for (std::size_t k = 0; k < i; ++k) at(k, j) -= g * at(k, i);
                }
            }
            d[i] = at(i, i);
            at(i, i) = 1.0;
            for (std::size_t j = 0; j < i; ++j) at(j, i) = at(i, j) = 0.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
    }
}

// Implicit-shift QL on a tridiagonal matrix; rotations are optionally
// accumulated into the columns of z.
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                        std::vector<double>* z) {
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw Error("eigenvalues_sym: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = pythag(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = pythag(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (std::size_t k = 0; k < n; ++k) {
                            f = (*z)[k * n + (i + 1)];
                            (*z)[k * n + (i + 1)] = s * (*z)[k * n + i] + c * f;
                            (*z)[k * n + i] = c * (*z)[k * n + i] - s * f;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

inline bool is_tridiagonal(const std::vector<double>& a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j)
            if (a[i * n + j] != 0.0 || a[j * n + i] != 0.0) return false;
    return true;
}

inline void require_symmetric(const std::vector<double>& a, std::size_t n, double tol) {
    double maxabs = 1.0;
    for (double v : a) maxabs = std::max(maxabs, std::fabs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(a[i * n + j] - a[j * n + i]) > tol * maxabs)
                throw std::invalid_argument("eigenvalues_sym: matrix not symmetric");
}

}  // namespace detail

// All eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> eigenvalues_sym(std::vector<double> a, std::size_t n,
                                           double sym_tol = 1e-12) {
    if (a.size() != n * n) throw Error("eigenvalues_sym: bad dimensions");
    detail::require_symmetric(a, n, sym_tol);
    std::vector<double> d, e;
    if (detail::is_tridiagonal(a, n)) {
        d.resize(n);
        e.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
        for (std::size_t i = 1; i < n; ++i) e[i] = a[i * n + (i - 1)];
    } else {
        // Symmetrize to kill roundoff asymmetry within tolerance.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                a[i * n + j] = a[j * n + i] = 0.5 * (a[i * n + j] + a[j * n + i]);
        detail::householder_tridiag(a, n, d, e, false);
    }
    detail::ql_implicit(d, e, n, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

struct EigenDecomp {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row-major; column j pairs with values[j]
};

inline EigenDecomp eigen_sym(std::vector<double> a, std::size_t n, double sym_tol = 1e-12) {
    if (a.size() != n * n) throw Error("eigen_sym: bad dimensions");
    detail::require_symmetric(a, n, sym_tol);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            a[i * n + j] = a[j * n + i] = 0.5 * (a[i * n + j] + a[j * n + i]);
    std::vector<double> d, e;
    detail::householder_tridiag(a, n, d, e, true);
    detail::ql_implicit(d, e, n, &a);
    // Sort eigenpairs ascending.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
    EigenDecomp out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = a[i * n + order[j]];
    }
    return out;
}

}  // namespace aqs
