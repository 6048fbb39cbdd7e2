// exactla.hpp — arbitrary-precision rational linear algebra: kernel dimensions
// by fraction-free elimination, characteristic polynomials by the
// Faddeev–LeVerrier recurrence, |det|_1 and normalized log-determinants.
#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqs/errors.hpp"
#include "aqs/rational.hpp"

namespace aqs {

class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(std::size_t n) : n_(n), a_(n * n, Rational(0)) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t size() const { return n_; }

    Rational& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Rational& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    bool is_symmetric() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (at(i, j) != at(j, i)) return false;
        return true;
    }

    RationalMatrix shifted(const Rational& lambda) const {
        RationalMatrix m = *this;
        for (std::size_t i = 0; i < n_; ++i) m.at(i, i) -= lambda;
        return m;
    }

    // Least L > 0 with L*M integer.
    Integer denominator_lcm() const {
        Integer l = 1;
        for (const auto& q : a_) l = lcm(l, Integer(q.get_den()));
        return l;
    }

    std::vector<Integer> scaled_integers(const Integer& scale) const {
        std::vector<Integer> z;
        z.reserve(a_.size());
        for (const auto& q : a_) {
            Rational s = q * Rational(scale);
            s.canonicalize();
            if (s.get_den() != 1) throw Error("scaled_integers: scale does not clear denominators");
            z.emplace_back(s.get_num());
        }
        return z;
    }

    std::vector<double> to_doubles() const {
        std::vector<double> out;
        out.reserve(a_.size());
        for (const auto& q : a_) out.push_back(to_double(q));
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<Rational> a_;
};

namespace detail {

struct EchelonResult {
    std::size_t rank = 0;
    int swap_sign = 1;
    Integer last_pivot = 0;  // equals ±det when rank == n
};

// Fraction-free (Bareiss) elimination on an integer matrix, destructive.
// Pivots pick the smallest nonzero magnitude in the column to curb growth;
// the two-by-two condensation keeps every intermediate entry an exact minor.
inline EchelonResult bareiss_echelon(std::vector<Integer>& z, std::size_t n) {
    EchelonResult res;
    Integer prev = 1;
    std::size_t row = 0;
    auto idx = [n](std::size_t i, std::size_t j) { return i * n + j; };
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t pivot = n;
        for (std::size_t i = row; i < n; ++i) {
            if (z[idx(i, col)] == 0) continue;
            if (pivot == n || mpz_cmpabs(z[idx(i, col)].get_mpz_t(), z[idx(pivot, col)].get_mpz_t()) < 0)
                pivot = i;
        }
        if (pivot == n) continue;
        if (pivot != row) {
            for (std::size_t j = col; j < n; ++j) std::swap(z[idx(pivot, j)], z[idx(row, j)]);
            res.swap_sign = -res.swap_sign;
        }
        const Integer p = z[idx(row, col)];
        for (std::size_t i = row + 1; i < n; ++i) {
            const Integer head = z[idx(i, col)];
            for (std::size_t j = col + 1; j < n; ++j) {
                Integer t = p * z[idx(i, j)] - head * z[idx(row, j)];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                z[idx(i, j)] = std::move(t);
            }
            z[idx(i, col)] = 0;
        }
        prev = p;
        res.last_pivot = p;
        ++row;
    }
    res.rank = row;
    return res;
}

}  // namespace detail

// Exact rank of M.
inline std::size_t rank(const RationalMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return 0;
    auto z = m.scaled_integers(m.denominator_lcm());
    return detail::bareiss_echelon(z, n).rank;
}

// dim Ker(M - lambda I) = n - rank, exact.
inline std::size_t kernel_dim(const RationalMatrix& m, const Rational& lambda) {
    return m.size() - rank(m.shifted(lambda));
}

// Coefficients c_0..c_n of det(xI - M), monic, exact.
struct CharPoly {
    std::vector<Rational> coeffs;  // coeffs[i] multiplies x^i; coeffs[n] == 1

    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    Rational eval(const Rational& x) const {
        Rational acc = 0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
        return acc;
    }

    // Index of the lowest nonzero coefficient (degree+1 when all zero).
    std::size_t lowest_nonzero_index() const {
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (coeffs[i] != 0) return i;
        return coeffs.size();
    }

    // Multiplicity of lambda as a root, by repeated synthetic division.
    std::size_t root_multiplicity(const Rational& lambda) const {
        std::vector<Rational> p = coeffs;
        std::size_t mult = 0;
        while (p.size() > 1) {
            // Synthetic division p(x) = (x - lambda) q(x) + rem.
            std::vector<Rational> q(p.size() - 1);
            Rational carry = p.back();
            for (std::size_t i = p.size() - 1; i-- > 0;) {
                q[i] = carry;
                carry = p[i] + carry * lambda;
            }
            if (carry != 0) break;
            ++mult;
            p = std::move(q);
        }
        return mult;
    }
};

// Faddeev–LeVerrier over exact integers (denominators cleared first, then the
// coefficients are rescaled back). The divisions by k are exact for integer
// input; this is asserted.
inline CharPoly char_poly(const RationalMatrix& m, std::size_t dense_limit = 400) {
    const std::size_t n = m.size();
    if (n > dense_limit)
        throw LimitExceeded("char_poly: size " + std::to_string(n) + " above exact dense limit " +
                            std::to_string(dense_limit) + "; use the float spectrum instead");
    CharPoly out;
    out.coeffs.assign(n + 1, Rational(0));
    out.coeffs[n] = 1;
    if (n == 0) return out;

    const Integer scale = m.denominator_lcm();
    const std::vector<Integer> a = m.scaled_integers(scale);
    auto idx = [n](std::size_t i, std::size_t j) { return i * n + j; };

    std::vector<Integer> acc(n * n, Integer(0));  // N_{k-1}, starts as I
    for (std::size_t i = 0; i < n; ++i) acc[idx(i, i)] = 1;
    std::vector<Integer> prod(n * n, Integer(0));
    std::vector<Integer> cz(n + 1);  // coefficients of the scaled matrix
    cz[n] = 1;

    for (std::size_t k = 1; k <= n; ++k) {
        // prod = a * acc
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) prod[idx(i, j)] = 0;
            for (std::size_t l = 0; l < n; ++l) {
                const Integer& ail = a[idx(i, l)];
                if (ail == 0) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (acc[idx(l, j)] == 0) continue;
                    mpz_addmul(prod[idx(i, j)].get_mpz_t(), ail.get_mpz_t(),
                               acc[idx(l, j)].get_mpz_t());
                }
            }
        }
        Integer trace = 0;
        for (std::size_t i = 0; i < n; ++i) trace += prod[idx(i, i)];
        Integer ck;
        mpz_fdiv_q_ui(ck.get_mpz_t(), trace.get_mpz_t(), static_cast<unsigned long>(k));
        if (ck * k != trace) throw Error("char_poly: Faddeev-LeVerrier division not exact");
        ck = -ck;
        cz[n - k] = ck;
        acc = prod;
        for (std::size_t i = 0; i < n; ++i) acc[idx(i, i)] += ck;
    }

    // det(xI - M) = scale^{-n} det((scale x) I - Z): coefficient i picks up scale^{i-n}.
    Integer power = 1;  // scale^(n-i)
    for (std::size_t i = n + 1; i-- > 0;) {
        Rational c(cz[i]);
        c /= Rational(power);
        c.canonicalize();
        out.coeffs[i] = c;
        if (i > 0) power *= scale;
    }
    return out;
}

// |det|_1: product of the strictly positive eigenvalues of a symmetric PSD
// matrix — the magnitude of the lowest nonzero characteristic coefficient.
// Full-rank matrices take the O(n^3) elimination determinant; only singular
// ones need the characteristic polynomial.
struct Det1Result {
    Rational value = 1;
    std::size_t rank = 0;
    bool zero_matrix = false;
};

inline Det1Result det1(const RationalMatrix& m, std::size_t charpoly_limit = 400) {
    const std::size_t n = m.size();
    if (!m.is_symmetric()) throw Error("det1: matrix not symmetric");
    Det1Result res;
    if (n == 0) {
        res.zero_matrix = true;
        return res;
    }
    const Integer scale = m.denominator_lcm();
    auto z = m.scaled_integers(scale);
    const auto ech = detail::bareiss_echelon(z, n);
    res.rank = ech.rank;
    if (ech.rank == 0) {
        res.zero_matrix = true;
        res.value = 1;
        return res;
    }
    if (ech.rank == n) {
        Rational det(ech.last_pivot);
        Integer denom = 1;
        for (std::size_t i = 0; i < n; ++i) denom *= scale;
        det /= Rational(denom);
        det.canonicalize();
        res.value = abs(det);
        return res;
    }
    const CharPoly poly = char_poly(m, charpoly_limit);
    const std::size_t low = poly.lowest_nonzero_index();
    if (low != n - ech.rank)
        throw Error("det1: characteristic coefficient index disagrees with elimination rank");
    res.value = abs(poly.coeffs[low]);
    return res;
}

// (1/|Q|) * ln det1; nonnegative whenever det1 is a positive integer.
inline double logdet_window(const Rational& det1_value, std::size_t window_size) {
    if (window_size == 0) throw Error("logdet_window: empty window");
    return log_positive(det1_value) / static_cast<double>(window_size);
}

inline nlohmann::ordered_json char_poly_to_json(const CharPoly& p) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : p.coeffs) arr.push_back(to_string(c));
    return arr;
}

}  // namespace aqs
