// oracles.hpp — independent brute-force references used to validate the fast
// paths: permutation-search rooted isomorphism, exhaustive closed-walk
// enumeration on lattices, and a seeded rooted-graph corpus generator.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "aqs/graph.hpp"

namespace aqs {

// Root-preserving isomorphism test by pruned permutation search. Exponential
// in the worst case; meant for graphs of at most ~12 vertices.
inline bool brute_force_rooted_iso(const RootedBall& a, const RootedBall& b) {
    const std::size_t n = a.size();
    if (n != b.size()) return false;
    std::vector<std::uint64_t> ra(n, 0), rb(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int w : a.adj[i]) ra[i] |= std::uint64_t{1} << w;
        for (int w : b.adj[i]) rb[i] |= std::uint64_t{1} << w;
    }
    std::vector<int> map(n, -1);
    std::vector<bool> used(n, false);
    std::function<bool(std::size_t)> extend = [&](std::size_t i) -> bool {
        if (i == n) return true;
        for (std::size_t w = 0; w < n; ++w) {
            if (used[w]) continue;
            if (b.dist[w] != a.dist[i] || b.color[w] != a.color[i]) continue;
            if (b.adj[w].size() != a.adj[i].size()) continue;
            bool ok = true;
            for (std::size_t u = 0; u < i && ok; ++u) {
                const bool ea = (ra[i] >> u) & 1;
                const bool eb = (rb[w] >> static_cast<std::size_t>(map[u])) & 1;
                ok = ea == eb;
            }
            if (!ok) continue;
            map[i] = static_cast<int>(w);
            used[w] = true;
            if (extend(i + 1)) return true;
            used[w] = false;
            map[i] = -1;
        }
        return false;
    };
    return extend(0);
}

// All root-fixing automorphism orbits by exhaustive permutation search;
// reference for the refinement-based computation.
inline std::vector<int> brute_force_orbit_ids(const RootedBall& b) {
    const std::size_t n = b.size();
    std::vector<std::uint64_t> rows(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (int w : b.adj[i]) rows[i] |= std::uint64_t{1} << w;
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    std::vector<int> map(n, -1);
    std::vector<bool> used(n, false);
    std::function<void(std::size_t)> extend = [&](std::size_t i) {
        if (i == n) {
            for (std::size_t v = 0; v < n; ++v) {
                const int x = find(static_cast<int>(v));
                const int y = find(map[v]);
                if (x != y) parent[static_cast<std::size_t>(x)] = y;
            }
            return;
        }
        for (std::size_t w = 0; w < n; ++w) {
            if (used[w]) continue;
            if (b.dist[w] != b.dist[i] || b.color[w] != b.color[i]) continue;
            if (b.adj[w].size() != b.adj[i].size()) continue;
            bool ok = true;
            for (std::size_t u = 0; u < i && ok; ++u) {
                const bool ea = (rows[i] >> u) & 1;
                const bool eb = (rows[w] >> static_cast<std::size_t>(map[u])) & 1;
                ok = ea == eb;
            }
            if (!ok) continue;
            map[i] = static_cast<int>(w);
            used[w] = true;
            extend(i + 1);
            used[w] = false;
            map[i] = -1;
        }
    };
    extend(0);
    std::vector<int> ids(n);
    for (std::size_t v = 0; v < n; ++v) {
        int least = static_cast<int>(v);
        for (std::size_t u = 0; u < n; ++u)
            if (find(static_cast<int>(u)) == find(static_cast<int>(v)))
                least = std::min(least, static_cast<int>(u));
        ids[v] = least;
    }
    return ids;
}

// Number of closed k-step nearest-neighbor walks from the origin of Z^dim.
inline long closed_walk_count(int dim, int k) {
    std::vector<int> pos(static_cast<std::size_t>(dim), 0);
    long count = 0;
    std::function<void(int)> step = [&](int remaining) {
        if (remaining == 0) {
            bool home = true;
            for (int c : pos) home = home && c == 0;
            if (home) ++count;
            return;
        }
        for (int axis = 0; axis < dim; ++axis) {
            for (int s : {-1, +1}) {
                pos[static_cast<std::size_t>(axis)] += s;
                step(remaining - 1);
                pos[static_cast<std::size_t>(axis)] -= s;
            }
        }
    };
    step(k);
    return count;
}

// Seeded corpus of small connected rooted graphs (optionally colored), shaped
// as RootedBalls with a uniform declared radius so codes are comparable.
inline std::vector<RootedBall> make_rooted_corpus(std::uint64_t seed, std::size_t count,
                                                  std::size_t max_vertices = 8,
                                                  bool with_colors = true) {
    std::mt19937_64 rng(seed);
    std::vector<RootedBall> corpus;
    while (corpus.size() < count) {
        const std::size_t n =
            2 + rng() % (max_vertices - 1);
        const double p = 0.25 + 0.25 * static_cast<double>(rng() % 3);
        std::vector<std::pair<int, int>> edges;
        std::vector<std::uint64_t> rows(n, 0);
        auto add_edge = [&](std::size_t i, std::size_t j) {
            if (i == j || ((rows[i] >> j) & 1)) return;
            rows[i] |= std::uint64_t{1} << j;
            rows[j] |= std::uint64_t{1} << i;
            edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
        };
        // Random spanning tree first, then extra edges.
        for (std::size_t i = 1; i < n; ++i) add_edge(i, rng() % i);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::uniform_real_distribution<double>(0, 1)(rng) < p) add_edge(i, j);

        RootedBall b;
        b.radius = 8;
        for (std::size_t i = 0; i < n; ++i) b.verts.push_back(vertex(static_cast<int>(i)));
        b.finalize_edges(edges);
        // BFS distances from the root (vertex 0).
        b.dist.assign(n, -1);
        b.dist[0] = 0;
        std::vector<int> frontier{0};
        while (!frontier.empty()) {
            std::vector<int> next;
            for (int u : frontier)
                for (int w : b.adj[static_cast<std::size_t>(u)])
                    if (b.dist[static_cast<std::size_t>(w)] < 0) {
                        b.dist[static_cast<std::size_t>(w)] =
                            b.dist[static_cast<std::size_t>(u)] + 1;
                        next.push_back(w);
                    }
            frontier = std::move(next);
        }
        b.color.assign(n, 0);
        if (with_colors && rng() % 2 == 0)
            for (std::size_t i = 0; i < n; ++i) b.color[i] = static_cast<int>(rng() % 3);
        corpus.push_back(std::move(b));
    }
    return corpus;
}

}  // namespace aqs
