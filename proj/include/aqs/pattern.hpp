// pattern.hpp — canonical codes for rooted balls, root-fixing orbits, pattern
// censuses and frequency tables over Følner windows.
//
// Codes must be exactly complete under root-preserving isomorphism (operator
// coefficients key off them), so canonicalization is refinement plus full
// backtracking, not hashing. Vertex colors (letter decorations) take part in
// the isomorphism.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "aqs/graph.hpp"
#include "aqs/parallel.hpp"
#include "aqs/rational.hpp"

namespace aqs {

struct PatternCode {
    int radius = 0;
    std::string bytes;

    friend auto operator<=>(const PatternCode&, const PatternCode&) = default;

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        out.reserve(bytes.size() * 2);
        for (unsigned char b : bytes) {
            out += digits[b >> 4];
            out += digits[b & 0xf];
        }
        return out;
    }

    static PatternCode from_hex(const std::string& hex) {
        if (hex.size() % 2 != 0) throw ConfigError("pattern code hex: odd length");
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw ConfigError("pattern code hex: bad digit");
        };
        PatternCode code;
        code.bytes.reserve(hex.size() / 2);
        for (std::size_t i = 0; i < hex.size(); i += 2)
            code.bytes += static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1]));
        if (code.bytes.size() < 3) throw ConfigError("pattern code hex: too short");
        code.radius = static_cast<unsigned char>(code.bytes[1]);
        return code;
    }
};

struct CanonLimits {
    std::size_t max_vertices = 64;
    std::size_t max_search_nodes = 1u << 22;
};

// Canonical form of a rooted ball: code, one canonical labeling, the full
// root-fixing automorphism group, and the orbit partition it induces.
struct BallCanonical {
    PatternCode code;
    std::vector<int> canon_label;               // local index -> canonical label
    std::vector<std::vector<int>> automorphisms;  // local index permutations
    std::vector<int> orbit_id;                  // local index -> min canon label in orbit

    int orbit_of(int local_index) const { return orbit_id[static_cast<std::size_t>(local_index)]; }
};

namespace detail {

struct CanonSearch {
    const RootedBall& b;
    std::size_t n;
    std::vector<std::uint64_t> rows;  // adjacency bitmask per local index
    const CanonLimits& lim;
    std::size_t nodes = 0;

    std::vector<std::uint64_t> best_rows;
    std::vector<int> best_label;                  // first labeling achieving best_rows
    std::vector<std::vector<int>> best_labelings;  // all labelings achieving best_rows

    CanonSearch(const RootedBall& ball_, const CanonLimits& lim_) : b(ball_), lim(lim_) {
        n = b.size();
        rows.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (int w : b.adj[i]) rows[i] |= std::uint64_t{1} << w;
    }

    // Initial colors: rank of (distance, vertex color, degree).
    std::vector<int> initial_colors() const {
        std::vector<std::array<int, 3>> keys(n);
        for (std::size_t i = 0; i < n; ++i)
            keys[i] = {b.dist[i], b.color[i], static_cast<int>(b.adj[i].size())};
        auto sorted = keys;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> colors(n);
        for (std::size_t i = 0; i < n; ++i)
            colors[i] = static_cast<int>(
                std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
        return colors;
    }

    // Iterated neighborhood refinement; color ids stay isomorphism-invariant.
    void refine(std::vector<int>& colors) const {
        while (true) {
            std::vector<std::pair<int, std::vector<int>>> keys(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<int> nb;
                nb.reserve(b.adj[i].size());
                for (int w : b.adj[i]) nb.push_back(colors[static_cast<std::size_t>(w)]);
                std::sort(nb.begin(), nb.end());
                keys[i] = {colors[i], std::move(nb)};
            }
            auto sorted = keys;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                const int c = static_cast<int>(
                    std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
                if (c != colors[i]) changed = true;
                colors[i] = c;
            }
            if (!changed) break;
        }
    }

    static int num_colors(const std::vector<int>& colors) {
        return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
    }

    void run() {
        auto colors = initial_colors();
        refine(colors);
        descend(colors);
    }

    void descend(std::vector<int>& colors) {
        if (++nodes > lim.max_search_nodes)
            throw LimitExceeded("canonical_code: search node guard exceeded");
        const int k = num_colors(colors);
        if (static_cast<std::size_t>(k) == n) {
            record_leaf(colors);
            return;
        }
        // First class (in color order) with more than one member.
        int target = -1;
        {
            std::vector<int> count(static_cast<std::size_t>(k), 0);
            for (int c : colors) ++count[static_cast<std::size_t>(c)];
            for (int c = 0; c < k; ++c)
                if (count[static_cast<std::size_t>(c)] > 1) {
                    target = c;
                    break;
                }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (colors[v] != target) continue;
            std::vector<int> child(n);
            for (std::size_t u = 0; u < n; ++u)
                child[u] = 2 * colors[u] + (u == v ? 0 : 1);
            refine(child);
            descend(child);
        }
    }

    void record_leaf(const std::vector<int>& label) {
        std::vector<std::uint64_t> canon(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t bits = 0;
            std::uint64_t m = rows[i];
            while (m) {
                const int w = std::countr_zero(m);
                m &= m - 1;
                bits |= std::uint64_t{1} << label[static_cast<std::size_t>(w)];
            }
            canon[static_cast<std::size_t>(label[i])] = bits;
        }
        if (best_rows.empty() || canon < best_rows) {
            best_rows = std::move(canon);
            best_label = label;
            best_labelings.clear();
            best_labelings.push_back(label);
        } else if (canon == best_rows) {
            best_labelings.push_back(label);
        }
    }
};

}  // namespace detail

inline BallCanonical canonicalize(const RootedBall& b, const CanonLimits& lim = {}) {
    const std::size_t n = b.size();
    if (n == 0) throw Error("canonicalize: empty ball");
    if (n > lim.max_vertices)
        throw LimitExceeded("canonicalize: ball has " + std::to_string(n) +
                            " vertices, limit " + std::to_string(lim.max_vertices));
    if (b.radius > 255) throw LimitExceeded("canonicalize: radius above 255");

    detail::CanonSearch search(b, lim);
    search.run();

    BallCanonical out;
    out.canon_label = search.best_label;

    // Encode: version, radius, size, colors by canonical label, packed adjacency rows.
    std::string bytes;
    bytes.push_back(static_cast<char>(0x01));
    bytes.push_back(static_cast<char>(b.radius));
    bytes.push_back(static_cast<char>(n));
    std::vector<int> inv(n);
    for (std::size_t v = 0; v < n; ++v) inv[static_cast<std::size_t>(out.canon_label[v])] = static_cast<int>(v);
    for (std::size_t i = 0; i < n; ++i)
        bytes.push_back(static_cast<char>(b.color[static_cast<std::size_t>(inv[i])]));
    const std::size_t row_bytes = (n + 7) / 8;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t r = search.best_rows[i];
        for (std::size_t byte = 0; byte < row_bytes; ++byte)
            bytes.push_back(static_cast<char>((r >> (8 * byte)) & 0xff));
    }
    out.code = PatternCode{b.radius, std::move(bytes)};

    // Automorphisms: label0^{-1} ∘ label for every minimal labeling.
    out.automorphisms.reserve(search.best_labelings.size());
    for (const auto& lab : search.best_labelings) {
        std::vector<int> sigma(n);
        for (std::size_t v = 0; v < n; ++v)
            sigma[v] = inv[static_cast<std::size_t>(lab[v])];
        out.automorphisms.push_back(std::move(sigma));
    }

    // Orbit partition via union-find over all automorphisms.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (const auto& sigma : out.automorphisms)
        for (std::size_t v = 0; v < n; ++v) {
            const int a = find(static_cast<int>(v));
            const int bb = find(sigma[v]);
            if (a != bb) parent[static_cast<std::size_t>(a)] = bb;
        }
    std::vector<int> orbit_min(n, static_cast<int>(n));
    for (std::size_t v = 0; v < n; ++v) {
        const int r = find(static_cast<int>(v));
        orbit_min[static_cast<std::size_t>(r)] =
            std::min(orbit_min[static_cast<std::size_t>(r)], out.canon_label[v]);
    }
    out.orbit_id.resize(n);
    for (std::size_t v = 0; v < n; ++v)
        out.orbit_id[v] = orbit_min[static_cast<std::size_t>(find(static_cast<int>(v)))];
    return out;
}

inline PatternCode canonical_code(const RootedBall& b, const CanonLimits& lim = {}) {
    return canonicalize(b, lim).code;
}

// Orbits of the root-fixing automorphism group, each orbit sorted, orbits
// ordered by their minimal canonical label.
inline std::vector<std::vector<VertexId>> root_fixing_orbits(const RootedBall& b,
                                                             const CanonLimits& lim = {}) {
    const auto canon = canonicalize(b, lim);
    std::map<int, std::vector<VertexId>> groups;
    for (std::size_t v = 0; v < b.size(); ++v)
        groups[canon.orbit_id[v]].push_back(b.verts[v]);
    std::vector<std::vector<VertexId>> out;
    out.reserve(groups.size());
    for (auto& [id, g] : groups) {
        std::sort(g.begin(), g.end());
        out.push_back(std::move(g));
    }
    return out;
}

struct CensusEntry {
    std::size_t count = 0;
    VertexId representative;  // lexicographically least vertex in the class
};

struct PatternCensus {
    int radius = 0;
    std::size_t total = 0;
    std::map<PatternCode, CensusEntry> classes;
};

inline PatternCensus pattern_census(const InfiniteGraph& g, const Window& q, int r,
                                    const CanonLimits& lim = {}, const GraphLimits& glim = {},
                                    int threads = 0) {
    PatternCensus census;
    census.radius = r;
    census.total = q.size();
    const int workers = resolve_threads(threads);
    std::vector<std::map<PatternCode, CensusEntry>> partial(static_cast<std::size_t>(workers));
    const std::size_t chunk = (q.size() + static_cast<std::size_t>(workers) - 1) /
                              static_cast<std::size_t>(workers);
    parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(q.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& v = q.verts[i];
            auto code = canonical_code(ball(g, v, r, glim), lim);
            auto& entry = partial[t][std::move(code)];
            if (entry.count == 0 || v < entry.representative) entry.representative = v;
            ++entry.count;
        }
    });
    for (auto& part : partial) {
        for (auto& [code, entry] : part) {
            auto& acc = census.classes[code];
            if (acc.count == 0 || entry.representative < acc.representative)
                acc.representative = entry.representative;
            acc.count += entry.count;
        }
    }
    return census;
}

inline Rational census_frequency(const PatternCensus& census, const PatternCode& code) {
    auto it = census.classes.find(code);
    if (it == census.classes.end()) return 0;
    return make_rational(static_cast<long>(it->second.count),
                         static_cast<long>(census.total));
}

struct FrequencyLevel {
    int level = 0;
    std::size_t window_size = 0;
    PatternCensus census;
};

struct FrequencyTable {
    int radius = 0;
    std::vector<FrequencyLevel> levels;
    Rational convergence_indicator = 0;  // max over codes |freq(top) - freq(prev)|
    std::map<PatternCode, Rational> analytic;  // optional reference values
};

inline FrequencyTable frequency_table(const InfiniteGraph& g, const std::vector<int>& levels,
                                      int r, const CanonLimits& lim = {},
                                      const GraphLimits& glim = {}, int threads = 0) {
    if (levels.empty() || !std::is_sorted(levels.begin(), levels.end()))
        throw ConfigError("frequency_table: levels must be nonempty and increasing");
    FrequencyTable table;
    table.radius = r;
    for (int n : levels) {
        const Window q = folner_window(g, n);
        FrequencyLevel lv;
        lv.level = n;
        lv.window_size = q.size();
        lv.census = pattern_census(g, q, r, lim, glim, threads);
        table.levels.push_back(std::move(lv));
    }
    if (table.levels.size() >= 2) {
        const auto& top = table.levels.back();
        const auto& prev = table.levels[table.levels.size() - 2];
        Rational worst = 0;
        auto consider = [&](const PatternCode& code) {
            const Rational d = abs(census_frequency(top.census, code) -
                                   census_frequency(prev.census, code));
            if (d > worst) worst = d;
        };
        for (const auto& [code, e] : top.census.classes) consider(code);
        for (const auto& [code, e] : prev.census.classes) consider(code);
        table.convergence_indicator = worst;
    }
    return table;
}

// CSV: level, code-hex, count, frequency.
inline void write_frequency_csv(const FrequencyTable& table, std::ostream& os) {
    os << "level,code,count,frequency\n";
    for (const auto& lv : table.levels) {
        for (const auto& [code, entry] : lv.census.classes) {
            os << lv.level << ',' << code.hex() << ',' << entry.count << ','
               << to_string(make_rational(static_cast<long>(entry.count),
                                          static_cast<long>(lv.window_size)))
               << '\n';
        }
    }
}

}  // namespace aqs
