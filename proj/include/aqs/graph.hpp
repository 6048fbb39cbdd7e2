// graph.hpp — lazily representable infinite graphs: neighbor oracles keyed by
// coordinates, Følner box windows, rooted balls, and inner boundary sets.
//
// Oracles are pure functions of (descriptor, vertex); nothing is ever stored,
// so a window is always a restriction of the same infinite object.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqs/errors.hpp"
#include "aqs/rational.hpp"
#include "aqs/rng.hpp"
#include "aqs/vertex.hpp"

namespace aqs {

using json = nlohmann::ordered_json;

enum class Generator { Lattice, DecoratedLattice, PendantChain, SubstitutionChain };

struct GraphDescriptor {
    Generator kind = Generator::Lattice;
    int dim = 1;           // Lattice only
    int pendants = 0;      // PendantChain only
    Rational p = 0;        // DecoratedLattice only
    std::uint64_t seed = 0;

    friend bool operator==(const GraphDescriptor& a, const GraphDescriptor& b) {
        return a.kind == b.kind && a.dim == b.dim && a.pendants == b.pendants &&
               a.p == b.p && a.seed == b.seed;
    }
};

namespace detail {

// floor(m * (sqrt(5)-1)/2) in exact integer arithmetic. Doubles are not safe
// here: m*(sqrt(5)-1)/2 approaches integers like 1/(sqrt(5) m), below double
// resolution for large m.
inline std::int64_t floor_inv_phi(std::int64_t m) {
    if (m == 0) return 0;
    if (m < 0) return -floor_inv_phi(-m) - 1;  // the value is irrational for m != 0
    using u128 = unsigned __int128;
    const u128 target = static_cast<u128>(m) * static_cast<u128>(m) * 5u;
    // isqrt(5 m^2) = floor(m sqrt(5))
    std::uint64_t s = static_cast<std::uint64_t>(std::sqrt(5.0) * static_cast<double>(m));
    while (static_cast<u128>(s) * s > target) --s;
    while (static_cast<u128>(s + 1) * (s + 1) <= target) ++s;
    const std::int64_t t = static_cast<std::int64_t>(s) - m;  // m*sqrt(5)-m in [t, t+1)
    return t >= 0 ? t / 2 : (t - 1) / 2;
}

}  // namespace detail

// Letter of the two-sided Fibonacci word at position n: 1 = 'a', 2 = 'b'.
// Computed by the cut-and-project formula, O(1) per query.
inline int fibonacci_letter(std::int64_t n) {
    const std::int64_t d = detail::floor_inv_phi(n + 2) - detail::floor_inv_phi(n + 1);
    return d == 1 ? 1 : 2;
}

class InfiniteGraph {
public:
    static InfiniteGraph lattice(int dim) {
        if (dim < 1 || dim > 3)
            throw ConfigError("lattice: unsupported dimension " + std::to_string(dim));
        GraphDescriptor d;
        d.kind = Generator::Lattice;
        d.dim = dim;
        return InfiniteGraph(d);
    }

    static InfiniteGraph decorated_lattice(const Rational& p, std::uint64_t seed) {
        if (p < 0 || p > 1) throw ConfigError("decorated_lattice: p outside [0,1]");
        if (!p.get_den().fits_ulong_p())
            throw ConfigError("decorated_lattice: denominator of p too large");
        GraphDescriptor d;
        d.kind = Generator::DecoratedLattice;
        d.dim = 2;
        d.p = p;
        d.seed = seed;
        return InfiniteGraph(d);
    }

    static InfiniteGraph pendant_chain(int k) {
        if (k < 2) throw ConfigError("pendant_chain: k must be >= 2");
        GraphDescriptor d;
        d.kind = Generator::PendantChain;
        d.dim = 1;
        d.pendants = k;
        return InfiniteGraph(d);
    }

    static InfiniteGraph substitution_chain() {
        GraphDescriptor d;
        d.kind = Generator::SubstitutionChain;
        d.dim = 1;
        return InfiniteGraph(d);
    }

    const GraphDescriptor& descriptor() const { return desc_; }

    int degree_bound() const {
        switch (desc_.kind) {
            case Generator::Lattice: return 2 * desc_.dim;
            case Generator::DecoratedLattice: return 6;
            case Generator::PendantChain: return desc_.pendants + 2;
            case Generator::SubstitutionChain: return 2;
        }
        return 0;
    }

    int dims() const { return desc_.dim; }

    bool colored() const { return desc_.kind == Generator::SubstitutionChain; }

    // Vertex decoration visible to pattern codes; 0 on uncolored generators.
    int color(const VertexId& v) const {
        if (desc_.kind == Generator::SubstitutionChain) return fibonacci_letter(v.c[0]);
        return 0;
    }

    std::vector<VertexId> neighbors(const VertexId& v) const {
        std::vector<VertexId> out;
        switch (desc_.kind) {
            case Generator::Lattice: {
                out.reserve(static_cast<std::size_t>(2 * desc_.dim));
                for (int axis = 0; axis < desc_.dim; ++axis) {
                    for (int s : {-1, +1}) {
                        VertexId u = v;
                        u.c[static_cast<std::size_t>(axis)] += s;
                        out.push_back(u);
                    }
                }
                break;
            }
            case Generator::DecoratedLattice: {
                out.reserve(6);
                out.push_back(vertex(v.c[0] - 1, v.c[1]));
                out.push_back(vertex(v.c[0] + 1, v.c[1]));
                out.push_back(vertex(v.c[0], v.c[1] - 1));
                out.push_back(vertex(v.c[0], v.c[1] + 1));
                if (diagonal_present(v.c[0], v.c[1]))
                    out.push_back(vertex(v.c[0] + 1, v.c[1] + 1));
                if (diagonal_present(v.c[0] - 1, v.c[1] - 1))
                    out.push_back(vertex(v.c[0] - 1, v.c[1] - 1));
                break;
            }
            case Generator::PendantChain: {
                if (v.slot == 0) {
                    out.reserve(static_cast<std::size_t>(desc_.pendants + 2));
                    out.push_back(vertex(v.c[0] - 1));
                    out.push_back(vertex(v.c[0] + 1));
                    for (int s = 1; s <= desc_.pendants; ++s)
                        out.push_back(pendant_vertex(v.c[0], s));
                } else {
                    out.push_back(vertex(v.c[0]));
                }
                break;
            }
            case Generator::SubstitutionChain: {
                out.push_back(vertex(v.c[0] - 1));
                out.push_back(vertex(v.c[0] + 1));
                break;
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Diagonal edge ((a,b),(a+1,b+1)) present for this cell?
    bool diagonal_present(std::int64_t a, std::int64_t b) const {
        if (desc_.kind != Generator::DecoratedLattice) return false;
        return bernoulli_hit(counter_hash(desc_.seed, a, b), desc_.p);
    }

    json to_json() const {
        json j;
        switch (desc_.kind) {
            case Generator::Lattice:
                j["generator"] = "lattice";
                j["dim"] = desc_.dim;
                break;
            case Generator::DecoratedLattice:
                j["generator"] = "decorated_lattice";
                j["p"] = to_string(desc_.p);
                j["seed"] = desc_.seed;
                break;
            case Generator::PendantChain:
                j["generator"] = "pendant_chain";
                j["pendants"] = desc_.pendants;
                break;
            case Generator::SubstitutionChain:
                j["generator"] = "substitution_chain";
                break;
        }
        return j;
    }

    static InfiniteGraph from_json(const json& j) {
        if (!j.contains("generator") || !j["generator"].is_string())
            throw ConfigError("graph: missing 'generator'");
        const std::string gen = j["generator"].get<std::string>();
        if (gen == "lattice") {
            if (!j.contains("dim")) throw ConfigError("graph: lattice requires 'dim'");
            return lattice(j["dim"].get<int>());
        }
        if (gen == "decorated_lattice") {
            const Rational p = parse_rational(j.value("p", std::string("1/2")));
            const std::uint64_t seed = j.value("seed", std::uint64_t{0});
            return decorated_lattice(p, seed);
        }
        if (gen == "pendant_chain") {
            if (!j.contains("pendants")) throw ConfigError("graph: pendant_chain requires 'pendants'");
            return pendant_chain(j["pendants"].get<int>());
        }
        if (gen == "substitution_chain") return substitution_chain();
        throw ConfigError("graph: unknown generator '" + gen + "'");
    }

private:
    explicit InfiniteGraph(GraphDescriptor d) : desc_(d) {}
    GraphDescriptor desc_;
};

// Convenience constructors mirroring the generator names.
inline InfiniteGraph lattice_graph(int dim) { return InfiniteGraph::lattice(dim); }
inline InfiniteGraph decorated_lattice(const Rational& p, std::uint64_t seed) {
    return InfiniteGraph::decorated_lattice(p, seed);
}
inline InfiniteGraph pendant_chain(int k) { return InfiniteGraph::pendant_chain(k); }
inline InfiniteGraph substitution_chain() { return InfiniteGraph::substitution_chain(); }

struct GraphLimits {
    int max_ball_radius = 64;
    std::size_t max_ball_vertices = 200000;
};

// BFS-materialized induced subgraph on {u : d(u, root) <= radius}.
// Vertices are listed shell by shell, each shell in lexicographic order, so
// the materialization is canonical.
struct RootedBall {
    VertexId root;
    int radius = 0;
    std::vector<VertexId> verts;
    std::vector<int> dist;                 // parallel to verts
    std::vector<int> color;                // parallel to verts
    std::vector<std::vector<int>> adj;     // local indices, sorted
    std::unordered_map<VertexId, int, VertexIdHash> index;

    std::size_t size() const { return verts.size(); }
    bool contains(const VertexId& v) const { return index.count(v) != 0; }
    int index_of(const VertexId& v) const {
        auto it = index.find(v);
        return it == index.end() ? -1 : it->second;
    }

    // Recomputes adjacency and index from verts/dist/color; for hand-built balls.
    void finalize_edges(const std::vector<std::pair<int, int>>& edges) {
        index.clear();
        for (std::size_t i = 0; i < verts.size(); ++i)
            index[verts[i]] = static_cast<int>(i);
        adj.assign(verts.size(), {});
        for (auto [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& row : adj) std::sort(row.begin(), row.end());
    }
};

inline RootedBall ball(const InfiniteGraph& g, const VertexId& root, int radius,
                       const GraphLimits& limits = {}) {
    if (radius < 0) throw ConfigError("ball: negative radius");
    if (radius > limits.max_ball_radius)
        throw LimitExceeded("ball: radius " + std::to_string(radius) + " above guard " +
                            std::to_string(limits.max_ball_radius));
    RootedBall b;
    b.root = root;
    b.radius = radius;
    b.verts.push_back(root);
    b.dist.push_back(0);
    b.index[root] = 0;
    std::vector<VertexId> shell{root};
    for (int d = 1; d <= radius && !shell.empty(); ++d) {
        std::vector<VertexId> next;
        for (const auto& u : shell) {
            for (const auto& w : g.neighbors(u)) {
                if (b.index.count(w)) continue;
                b.index[w] = -1;  // mark seen; real index assigned after sorting
                next.push_back(w);
            }
        }
        std::sort(next.begin(), next.end());
        for (const auto& w : next) {
            b.index[w] = static_cast<int>(b.verts.size());
            b.verts.push_back(w);
            b.dist.push_back(d);
            if (b.verts.size() > limits.max_ball_vertices)
                throw LimitExceeded("ball: vertex guard exceeded");
        }
        shell = std::move(next);
    }
    b.color.resize(b.verts.size());
    for (std::size_t i = 0; i < b.verts.size(); ++i) b.color[i] = g.color(b.verts[i]);
    b.adj.assign(b.verts.size(), {});
    for (std::size_t i = 0; i < b.verts.size(); ++i) {
        for (const auto& w : g.neighbors(b.verts[i])) {
            auto it = b.index.find(w);
            if (it != b.index.end()) b.adj[i].push_back(it->second);
        }
        std::sort(b.adj[i].begin(), b.adj[i].end());
    }
    return b;
}

// Finite Følner window: vertex set in canonical order plus its index bijection.
struct Window {
    int level = 0;
    std::vector<VertexId> verts;
    std::unordered_map<VertexId, int, VertexIdHash> index;

    std::size_t size() const { return verts.size(); }
    bool contains(const VertexId& v) const { return index.count(v) != 0; }
    int index_of(const VertexId& v) const {
        auto it = index.find(v);
        return it == index.end() ? -1 : it->second;
    }

    void build_index() {
        index.clear();
        index.reserve(verts.size() * 2);
        for (std::size_t i = 0; i < verts.size(); ++i)
            index[verts[i]] = static_cast<int>(i);
    }
};

// Box window [-n, n]^d including all pendant decorations of box vertices.
inline Window folner_window(const InfiniteGraph& g, int n) {
    if (n < 1) throw ConfigError("folner_window: level must be positive");
    Window q;
    q.level = n;
    const auto& d = g.descriptor();
    switch (d.kind) {
        case Generator::Lattice: {
            if (d.dim == 1) {
                for (int x = -n; x <= n; ++x) q.verts.push_back(vertex(x));
            } else if (d.dim == 2) {
                for (int x = -n; x <= n; ++x)
                    for (int y = -n; y <= n; ++y) q.verts.push_back(vertex(x, y));
            } else {
                for (int x = -n; x <= n; ++x)
                    for (int y = -n; y <= n; ++y)
                        for (int z = -n; z <= n; ++z) q.verts.push_back(vertex(x, y, z));
            }
            break;
        }
        case Generator::DecoratedLattice: {
            for (int x = -n; x <= n; ++x)
                for (int y = -n; y <= n; ++y) q.verts.push_back(vertex(x, y));
            break;
        }
        case Generator::PendantChain: {
            for (int x = -n; x <= n; ++x)
                for (int s = 0; s <= d.pendants; ++s) q.verts.push_back(pendant_vertex(x, s));
            break;
        }
        case Generator::SubstitutionChain: {
            for (int x = -n; x <= n; ++x) q.verts.push_back(vertex(x));
            break;
        }
    }
    std::sort(q.verts.begin(), q.verts.end());
    q.build_index();
    return q;
}

// {x in Q : exists y outside Q with d(x,y) <= a}; exact per-vertex BFS in G.
inline std::vector<VertexId> inner_boundary(const InfiniteGraph& g, const Window& q, int a) {
    if (a < 1) throw ConfigError("inner_boundary: a must be >= 1");
    std::vector<VertexId> out;
    for (const auto& x : q.verts) {
        std::unordered_set<VertexId, VertexIdHash> seen{x};
        std::deque<std::pair<VertexId, int>> frontier{{x, 0}};
        bool boundary = false;
        while (!frontier.empty() && !boundary) {
            auto [u, du] = frontier.front();
            frontier.pop_front();
            if (du == a) continue;
            for (const auto& w : g.neighbors(u)) {
                if (seen.count(w)) continue;
                if (!q.contains(w)) {
                    boundary = true;
                    break;
                }
                seen.insert(w);
                frontier.emplace_back(w, du + 1);
            }
        }
        if (boundary) out.push_back(x);
    }
    return out;
}

// One "u v" line per window-internal edge, canonical order.
inline void write_edge_list(const InfiniteGraph& g, const Window& q, std::ostream& os) {
    for (const auto& u : q.verts) {
        for (const auto& w : g.neighbors(u)) {
            if (u < w && q.contains(w))
                os << format_vertex(u, g.dims()) << ' ' << format_vertex(w, g.dims()) << '\n';
        }
    }
}

}  // namespace aqs
