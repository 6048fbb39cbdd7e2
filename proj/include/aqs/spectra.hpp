// spectra.hpp — finite-section spectral runs over Følner schedules: trace
// moments with explicit boundary bounds, IDS staircases with atom detection,
// exact kernel densities, eigenspace comparisons, log-determinants with
// Fuglede–Kadison estimates, and uniform-convergence diagnostics.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqs/eigensolve.hpp"
#include "aqs/exactla.hpp"
#include "aqs/graph.hpp"
#include "aqs/operators.hpp"
#include "aqs/parallel.hpp"
#include "aqs/pattern.hpp"
#include "aqs/staircase.hpp"

namespace aqs {

struct RunLimits {
    std::size_t exact_limit = 500;   // dense exact sections and kernels
    std::size_t float_limit = 4000;  // dense float eigensolves
    int threads = 0;
    double merge_tol_factor = 1e-8;  // cluster merge tolerance = factor * K
};

struct FolnerSchedule {
    std::vector<int> levels;

    void validate() const {
        if (levels.empty()) throw ConfigError("schedule: no levels");
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (levels[i] <= levels[i - 1])
                throw ConfigError("schedule: levels must be strictly increasing");
    }
};

// ----------------------------------------------------------------- moment run

namespace detail {

// (B^k)(x,x) as a sum over weighted closed k-step walks; when `restriction`
// is set, walks are confined to the window (the section moment), otherwise
// they run in the infinite graph.
inline Rational closed_walk_value(const PatternOperator& a, const VertexId& x, int k,
                                  const Window* restriction, EvalContext& cx) {
    const int support = a.support();
    std::map<VertexId, Rational> cur{{x, Rational(1)}};
    for (int step = 0; step < k; ++step) {
        std::map<VertexId, Rational> next;
        const bool last = step + 1 == k;
        for (const auto& [u, val] : cur) {
            for (const auto& w : cx.get_ball(u, support).verts) {
                if (last && !(w == x)) continue;
                if (restriction && !restriction->contains(w)) continue;
                const Rational e = entry(a, u, w, cx);
                if (e == 0) continue;
                next[w] += val * e;
            }
        }
        cur = std::move(next);
    }
    auto it = cur.find(x);
    return it == cur.end() ? Rational(0) : it->second;
}

}  // namespace detail

struct MomentLevel {
    int level = 0;
    std::size_t window_size = 0;
    Rational section_moment;   // Tr(B_n^k) / |Q_n|, exact
    Rational true_moment;      // frequency-weighted closed-walk sum, exact
    Rational boundary_bound;   // m^k |∂_{k r} Q| q_r^{k-1} / |Q|
    std::size_t boundary_size = 0;
};

struct MomentReport {
    int k = 1;
    std::vector<MomentLevel> levels;
    Rational extrapolated;  // frequency-weighted moment at the top level
};

inline MomentReport moment_run(const PatternOperator& a, const FolnerSchedule& schedule, int k,
                               const RunLimits& lim = {}) {
    if (k < 1) throw ConfigError("moment_run: k must be >= 1");
    schedule.validate();
    MomentReport report;
    report.k = k;
    const int support = a.support();
    // Walk values are constant on patterns of radius floor(k/2)*support +
    // propagation: every step of a nonzero-weight closed walk stays within
    // floor(k/2)*support of the start, and entries need one more propagation
    // radius of context.
    const int census_radius = (k / 2) * support + a.propagation();
    const Rational q_r = Rational(max_ball_size(support, a.graph().degree_bound()));
    Rational m_pow = 1;
    for (int i = 0; i < k; ++i) m_pow *= a.entry_bound();
    Rational q_pow = 1;
    for (int i = 0; i + 1 < k; ++i) q_pow *= q_r;

    for (int n : schedule.levels) {
        const Window q = folner_window(a.graph(), n);
        MomentLevel lv;
        lv.level = n;
        lv.window_size = q.size();

        // Section moment: closed walks confined to the window.
        const int workers = resolve_threads(lim.threads);
        std::vector<Rational> partial(static_cast<std::size_t>(workers), Rational(0));
        const std::size_t chunk = (q.size() + static_cast<std::size_t>(workers) - 1) /
                                  static_cast<std::size_t>(workers);
        parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t t) {
            EvalContext cx(a.graph());
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(q.size(), lo + chunk);
            for (std::size_t i = lo; i < hi; ++i)
                partial[t] += detail::closed_walk_value(a, q.verts[i], k, &q, cx);
        });
        Rational section_sum = 0;
        for (const auto& p : partial) section_sum += p;
        lv.section_moment = section_sum / Rational(static_cast<long>(q.size()));
        lv.section_moment.canonicalize();

        // Frequency-weighted moment: one unrestricted walk sum per pattern class.
        EvalContext cx(a.graph());
        const PatternCensus census =
            pattern_census(a.graph(), q, census_radius, cx.canon_limits, cx.graph_limits,
                           lim.threads);
        Rational weighted = 0;
        for (const auto& [code, cls] : census.classes) {
            const Rational value =
                detail::closed_walk_value(a, cls.representative, k, nullptr, cx);
            weighted += Rational(static_cast<long>(cls.count)) * value;
        }
        lv.true_moment = weighted / Rational(static_cast<long>(q.size()));
        lv.true_moment.canonicalize();

        const auto boundary = inner_boundary(a.graph(), q, std::max(1, k * support));
        lv.boundary_size = boundary.size();
        lv.boundary_bound = m_pow * Rational(static_cast<long>(boundary.size())) * q_pow /
                            Rational(static_cast<long>(q.size()));
        lv.boundary_bound.canonicalize();

        report.levels.push_back(std::move(lv));
    }
    report.extrapolated = report.levels.back().true_moment;
    return report;
}

// -------------------------------------------------------------- IDS machinery

inline SpectralStaircase section_staircase(const PatternOperator& a, const Window& q, double K,
                                           double merge_tol, int threads) {
    auto m = section_doubles(a, q, threads);
    auto eigs = eigenvalues_sym(std::move(m), q.size());
    return make_staircase(std::move(eigs), q.size(), K, merge_tol);
}

// Best rational p/q with q <= max_den and |x - p/q| <= tol, via continued
// fractions; empty when none exists.
inline std::optional<Rational> rational_snap(double x, double tol, long max_den = 1000000) {
    if (!std::isfinite(x)) return std::nullopt;
    long p0 = 1, q0 = 0;
    long p1 = static_cast<long>(std::floor(x)), q1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol)
            return make_rational(p1, q1);
        if (frac == 0.0) break;
        const double inv = 1.0 / frac;
        const double ai = std::floor(inv);
        if (ai > 1e17) break;
        const long a = static_cast<long>(ai);
        const long p2 = a * p1 + p0;
        const long q2 = a * q1 + q0;
        if (q2 > max_den || q2 <= 0) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac = inv - ai;
    }
    if (q1 <= max_den && std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol)
        return make_rational(p1, q1);
    return std::nullopt;
}

struct IDSAtom {
    Rational lambda;
    double float_mass_top = 0.0;
    // (level, exact kernel density of B_n - lambda); only levels within the exact limit.
    std::vector<std::pair<int, Rational>> exact_density;
};

struct IDSLevel {
    int level = 0;
    std::size_t window_size = 0;
    SpectralStaircase staircase;
};

struct IDSOptions {
    std::vector<Rational> atom_candidates;  // rational λ to probe exactly
    bool detect_atoms = true;
    double atom_min_mass = 0.0;  // 0: auto (two eigenvalues at the top level)
    int shubin_grid = 32;
    std::function<double(double)> analytic;  // optional reference curve
};

struct IDSReport {
    double norm_bound = 0.0;
    double merge_tol = 0.0;
    std::vector<IDSLevel> levels;
    std::vector<double> cauchy_sup;  // sup distance between consecutive staircases
    std::vector<IDSAtom> atoms;
    double shubin_max_delta = 0.0;   // max |N_top - N_prev| over the continuity grid
    bool positive_ok = true;
    double min_eigenvalue = 0.0;
    bool partial_exact = false;      // some exact atom checks skipped by the size guard
    std::optional<double> sup_to_analytic;
};

inline IDSReport ids_run(const PatternOperator& a, const FolnerSchedule& schedule,
                         const IDSOptions& opt = {}, const RunLimits& lim = {}) {
    schedule.validate();
    IDSReport report;
    const double K = to_double(norm_bound(a));
    report.norm_bound = K;
    report.merge_tol = lim.merge_tol_factor * K;

    for (int n : schedule.levels) {
        const Window q = folner_window(a.graph(), n);
        if (q.size() > lim.float_limit)
            throw LimitExceeded("ids_run: window above float limit");
        IDSLevel lv;
        lv.level = n;
        lv.window_size = q.size();
        lv.staircase = section_staircase(a, q, K, report.merge_tol, lim.threads);
        report.levels.push_back(std::move(lv));
    }
    for (std::size_t i = 1; i < report.levels.size(); ++i)
        report.cauchy_sup.push_back(
            sup_distance(report.levels[i - 1].staircase, report.levels[i].staircase));

    const auto& top = report.levels.back().staircase;
    report.min_eigenvalue = top.eigs.empty() ? 0.0 : top.eigs.front();
    report.positive_ok = report.min_eigenvalue >= -1e-9 * std::max(1.0, K);

    // Atom candidates: caller-provided rationals plus stable top-level clusters.
    std::vector<Rational> candidates = opt.atom_candidates;
    if (opt.detect_atoms) {
        const double min_mass = opt.atom_min_mass > 0.0
                                    ? opt.atom_min_mass
                                    : 1.5 / static_cast<double>(top.window_size);
        for (const auto& [lambda, mass] : top.jumps) {
            if (mass < min_mass) continue;
            bool stable = true;
            for (const auto& lv : report.levels)
                if (lv.staircase.cluster_mass(lambda, 4.0 * report.merge_tol) < 0.5 * mass)
                    stable = false;
            if (!stable) continue;
            const auto snapped = rational_snap(lambda, std::max(4.0 * report.merge_tol, 1e-9));
            if (snapped) candidates.push_back(*snapped);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Exact verification: kernel dimension of B_n - lambda per level.
    std::vector<std::optional<FiniteSection>> sections(report.levels.size());
    for (std::size_t i = 0; i < report.levels.size() && !candidates.empty(); ++i) {
        const Window q = folner_window(a.graph(), report.levels[i].level);
        if (q.size() <= lim.exact_limit) {
            SectionLimits sl;
            sl.dense_limit = lim.exact_limit;
            sl.threads = lim.threads;
            sections[i] = finite_section(a, q, sl);
        } else {
            report.partial_exact = true;
        }
    }
    for (const auto& lambda : candidates) {
        IDSAtom atom;
        atom.lambda = lambda;
        atom.float_mass_top = top.cluster_mass(to_double(lambda), report.merge_tol);
        for (std::size_t i = 0; i < report.levels.size(); ++i) {
            if (!sections[i]) continue;
            const std::size_t dim = kernel_dim(sections[i]->matrix, lambda);
            Rational density = make_rational(static_cast<long>(dim),
                                             static_cast<long>(report.levels[i].window_size));
            atom.exact_density.emplace_back(report.levels[i].level, std::move(density));
        }
        report.atoms.push_back(std::move(atom));
    }

    // Shubin check on a continuity grid (grid points near detected clusters are skipped).
    if (report.levels.size() >= 2 && opt.shubin_grid > 0) {
        const auto& prev = report.levels[report.levels.size() - 2].staircase;
        double worst = 0.0;
        for (int i = 1; i <= opt.shubin_grid; ++i) {
            const double lambda = K * static_cast<double>(i) /
                                  static_cast<double>(opt.shubin_grid + 1);
            bool near_cluster = false;
            for (const auto& [cl, mass] : top.jumps)
                if (mass >= 1.5 / static_cast<double>(top.window_size) &&
                    std::fabs(lambda - cl) <= 8.0 * report.merge_tol)
                    near_cluster = true;
            if (near_cluster) continue;
            worst = std::max(worst, std::fabs(top.value(lambda) - prev.value(lambda)));
        }
        report.shubin_max_delta = worst;
    }

    if (opt.analytic) report.sup_to_analytic = sup_distance_to_curve(top, opt.analytic);
    return report;
}

// --------------------------------------------------------- exact kernel runs

struct DensityLevel {
    int level = 0;
    std::size_t window_size = 0;
    std::size_t kernel_dimension = 0;
    Rational density;
};

struct GroundStateReport {
    std::vector<DensityLevel> levels;
    std::vector<Rational> deltas;  // |density_i - density_{i-1}|
};

inline GroundStateReport ground_state_run(const PatternOperator& a,
                                          const FolnerSchedule& schedule,
                                          const RunLimits& lim = {}) {
    schedule.validate();
    GroundStateReport report;
    for (int n : schedule.levels) {
        const Window q = folner_window(a.graph(), n);
        SectionLimits sl;
        sl.dense_limit = lim.exact_limit;
        sl.threads = lim.threads;
        const FiniteSection sec = finite_section(a, q, sl);
        DensityLevel lv;
        lv.level = n;
        lv.window_size = q.size();
        lv.kernel_dimension = kernel_dim(sec.matrix, Rational(0));
        lv.density = make_rational(static_cast<long>(lv.kernel_dimension),
                                   static_cast<long>(q.size()));
        report.levels.push_back(std::move(lv));
    }
    for (std::size_t i = 1; i < report.levels.size(); ++i)
        report.deltas.push_back(abs(report.levels[i].density - report.levels[i - 1].density));
    return report;
}

struct EigenspaceLevel {
    int level = 0;
    std::size_t window_size = 0;
    std::size_t dim_shifted = 0;       // dim Ker(B_n - λ)
    std::size_t dim_squared = 0;       // dim Ker(p (A-λ)^2 i)
    Rational density_shifted;
    Rational density_squared;
    std::size_t boundary_2r = 0;       // |∂_{2 r_A} Q_n|
    bool bound_ok = false;             // |dim difference| <= boundary
};

struct EigenspaceReport {
    Rational lambda;
    std::vector<EigenspaceLevel> levels;
    bool all_bounds_ok = true;
};

inline EigenspaceReport eigenspace_run(const PatternOperator& a, const Rational& lambda,
                                       const FolnerSchedule& schedule, const RunLimits& lim = {}) {
    schedule.validate();
    EigenspaceReport report;
    report.lambda = lambda;
    const PatternOperator squared = power(shifted_operator(a, lambda), 2);
    for (int n : schedule.levels) {
        const Window q = folner_window(a.graph(), n);
        SectionLimits sl;
        sl.dense_limit = lim.exact_limit;
        sl.threads = lim.threads;
        const FiniteSection sec_a = finite_section(a, q, sl);
        const FiniteSection sec_sq = finite_section(squared, q, sl);
        EigenspaceLevel lv;
        lv.level = n;
        lv.window_size = q.size();
        lv.dim_shifted = kernel_dim(sec_a.matrix, lambda);
        lv.dim_squared = kernel_dim(sec_sq.matrix, Rational(0));
        lv.density_shifted = make_rational(static_cast<long>(lv.dim_shifted),
                                           static_cast<long>(q.size()));
        lv.density_squared = make_rational(static_cast<long>(lv.dim_squared),
                                           static_cast<long>(q.size()));
        lv.boundary_2r = inner_boundary(a.graph(), q, std::max(1, 2 * a.propagation())).size();
        const std::size_t diff = lv.dim_shifted > lv.dim_squared
                                     ? lv.dim_shifted - lv.dim_squared
                                     : lv.dim_squared - lv.dim_shifted;
        lv.bound_ok = diff <= lv.boundary_2r;
        report.all_bounds_ok = report.all_bounds_ok && lv.bound_ok;
        report.levels.push_back(std::move(lv));
    }
    return report;
}

// --------------------------------------------------------------- log-det run

struct LogdetLevel {
    int level = 0;
    std::size_t window_size = 0;
    Integer scale = 1;            // denominator-clearing factor for this section
    Rational det1_value;          // det1 of the integer-scaled section
    std::size_t rank = 0;
    bool zero_matrix = false;
    double logdet_scaled = 0.0;   // (1/|Q|) ln det1(scale * B_n), >= 0 for integer sections
    double logdet_unscaled = 0.0; // shifted back by (rank/|Q|) ln scale
    bool nonneg_exact = false;    // det1 is an integer >= 1
};

struct LogdetReport {
    std::vector<LogdetLevel> levels;
    double norm_bound_scaled = 0.0;
    double fk_estimate_scaled = 0.0;    // (1/|Q|) Σ_{λ>tol} ln λ at the top level
    double fk_estimate_unscaled = 0.0;
    double staircase_identity_exact = 0.0;            // exact top-level logdet (scaled)
    double staircase_identity_value = 0.0;        // ln K (1-N(0)) - ∫ (N(λ)-N(0))/λ dλ on the staircase
    double staircase_identity_gap = 0.0;
};

inline LogdetReport logdet_run(const PatternOperator& a, const FolnerSchedule& schedule,
                               const RunLimits& lim = {}) {
    schedule.validate();
    LogdetReport report;
    for (int n : schedule.levels) {
        const Window q = folner_window(a.graph(), n);
        SectionLimits sl;
        sl.dense_limit = lim.exact_limit;
        sl.threads = lim.threads;
        const FiniteSection sec = finite_section(a, q, sl);
        LogdetLevel lv;
        lv.level = n;
        lv.window_size = q.size();
        lv.scale = sec.matrix.denominator_lcm();
        RationalMatrix scaled(q.size());
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j) {
                scaled.at(i, j) = sec.matrix.at(i, j) * Rational(lv.scale);
                scaled.at(i, j).canonicalize();
            }
        const Det1Result d1 = det1(scaled, lim.exact_limit);
        lv.det1_value = d1.value;
        lv.rank = d1.rank;
        lv.zero_matrix = d1.zero_matrix;
        lv.nonneg_exact = lv.det1_value.get_den() == 1 && lv.det1_value >= 1;
        lv.logdet_scaled = logdet_window(lv.det1_value, q.size());
        lv.logdet_unscaled = lv.logdet_scaled - static_cast<double>(lv.rank) /
                                                    static_cast<double>(q.size()) *
                                                    log_positive(lv.scale);
        report.levels.push_back(std::move(lv));
    }

    // Float side at the top level, on the integer-scaled operator.
    const auto& top = report.levels.back();
    const Window q = folner_window(a.graph(), top.level);
    const double scale_d = mpz_get_d(top.scale.get_mpz_t());
    const double K_scaled = to_double(norm_bound(a)) * scale_d;
    report.norm_bound_scaled = K_scaled;
    const double merge_tol = lim.merge_tol_factor * std::max(1.0, K_scaled);
    auto m = section_doubles(a, q, lim.threads);
    for (double& v : m) v *= scale_d;
    auto eigs = eigenvalues_sym(std::move(m), q.size());
    const SpectralStaircase stairs = make_staircase(std::move(eigs), q.size(), K_scaled, merge_tol);

    const double zero_tol = merge_tol;
    double fk = 0.0;
    double n_zero = 0.0;
    for (const auto& [lambda, mass] : stairs.jumps) {
        if (lambda <= zero_tol)
            n_zero += mass;
        else
            fk += mass * std::log(lambda);
    }
    report.fk_estimate_scaled = fk;
    const double float_rank = (1.0 - n_zero) * static_cast<double>(q.size());
    report.fk_estimate_unscaled =
        fk - float_rank / static_cast<double>(q.size()) * std::log(std::max(scale_d, 1.0));

    // ln K (1 - N(0)) - ∫_0^K (N(λ)-N(0))/λ dλ evaluated exactly on the staircase
    // (the integrand is piecewise constant between jumps).
    double integral = 0.0;
    double cum = n_zero;
    std::vector<std::pair<double, double>> positive;
    for (const auto& j : stairs.jumps)
        if (j.first > zero_tol) positive.push_back(j);
    for (std::size_t i = 0; i < positive.size(); ++i) {
        cum += positive[i].second;
        const double next = i + 1 < positive.size() ? positive[i + 1].first : K_scaled;
        integral += (cum - n_zero) * (std::log(next) - std::log(positive[i].first));
    }
    report.staircase_identity_value = std::log(K_scaled) * (1.0 - n_zero) - integral;
    report.staircase_identity_exact = top.logdet_scaled;
    report.staircase_identity_gap = std::fabs(report.staircase_identity_exact - report.staircase_identity_value);
    return report;
}

// ------------------------------------------------- uniform convergence check

struct ConvergenceOptions {
    int grid_points = 64;
    double atom_mass_threshold = 0.02;  // clusters this heavy count as atoms
    double jump_slack = 0.0;            // 0: auto (5 / top window size)
};

struct ConvergenceReport {
    bool pointwise_ok = false;   // grid sups between consecutive levels nonincreasing
    bool jumps_ok = false;       // atom masses settle within the slack
    bool sup_decreasing = false; // full sup distances strictly decreasing
    double certificate = 0.0;    // final consecutive sup distance
    std::vector<double> sup_distances;
    std::vector<std::string> flags;
};

inline ConvergenceReport uniform_convergence_diag(const std::vector<SpectralStaircase>& stairs,
                                                  const ConvergenceOptions& opt = {}) {
    if (stairs.size() < 3)
        throw ConfigError("uniform_convergence_diag: need at least 3 staircases");
    ConvergenceReport report;
    const auto& top = stairs.back();
    const double K = top.norm_bound;

    // Atoms of the top staircase.
    std::vector<std::pair<double, double>> atoms;
    for (const auto& [lambda, mass] : top.jumps)
        if (mass >= opt.atom_mass_threshold) atoms.emplace_back(lambda, mass);

    // (i) pointwise Cauchy on a continuity grid.
    std::vector<double> grid;
    for (int i = 1; i <= opt.grid_points; ++i) {
        const double lambda = K * static_cast<double>(i) / static_cast<double>(opt.grid_points + 1);
        bool near = false;
        for (const auto& [al, am] : atoms)
            if (std::fabs(lambda - al) <= 16.0 * top.merge_tol) near = true;
        if (!near) grid.push_back(lambda);
    }
    std::vector<double> grid_sup;
    for (std::size_t i = 1; i < stairs.size(); ++i) {
        double worst = 0.0;
        for (double lambda : grid)
            worst = std::max(worst,
                             std::fabs(stairs[i].value(lambda) - stairs[i - 1].value(lambda)));
        grid_sup.push_back(worst);
    }
    report.pointwise_ok = true;
    for (std::size_t i = 1; i < grid_sup.size(); ++i)
        if (grid_sup[i] > grid_sup[i - 1] + 1e-12) report.pointwise_ok = false;
    if (!report.pointwise_ok)
        report.flags.push_back("pointwise: grid sups between consecutive levels not decreasing");

    // (ii) jump convergence at atoms: final drift within the slack.
    const double slack = opt.jump_slack > 0.0
                             ? opt.jump_slack
                             : 5.0 / static_cast<double>(top.window_size);
    report.jumps_ok = true;
    for (const auto& [lambda, mass] : atoms) {
        const std::size_t last = stairs.size() - 2;
        const double prev_mass = stairs[last].cluster_mass(lambda, 16.0 * top.merge_tol);
        if (std::fabs(prev_mass - mass) > slack) {
            report.jumps_ok = false;
            report.flags.push_back("jump at lambda=" + std::to_string(lambda) +
                                   " drifts in mass: " + std::to_string(prev_mass) + " -> " +
                                   std::to_string(mass));
        }
    }

    // Conclusion: consecutive sup distances decrease.
    for (std::size_t i = 1; i < stairs.size(); ++i)
        report.sup_distances.push_back(sup_distance(stairs[i - 1], stairs[i]));
    report.sup_decreasing = true;
    for (std::size_t i = 1; i < report.sup_distances.size(); ++i)
        if (report.sup_distances[i] > report.sup_distances[i - 1] + 1e-12)
            report.sup_decreasing = false;
    if (!report.sup_decreasing)
        report.flags.push_back("conclusion: sup distances between consecutive levels not decreasing");
    report.certificate = report.sup_distances.back();
    return report;
}

}  // namespace aqs
