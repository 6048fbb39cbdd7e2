// operators.hpp — the algebra of pattern-invariant operators: constructors,
// star-algebra operations, entry evaluation by local ball convolution, finite
// sections over windows, invariance validation and the a-priori norm bound.
//
// Operators are immutable rule trees over exact rationals. Entries never
// depend on a window; sections only restrict which pairs are materialized.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqs/exactla.hpp"
#include "aqs/graph.hpp"
#include "aqs/parallel.hpp"
#include "aqs/pattern.hpp"
#include "aqs/rational.hpp"

namespace aqs {

namespace detail {

struct OpNode {
    enum class Kind {
        Adjacency,
        Identity,
        Degree,
        LetterPotential,
        Diagonal,
        OrbitTable,
        Sum,
        Scale,
        Product,
        Star
    };

    Kind kind = Kind::Adjacency;
    int radius = 0;                                     // Diagonal / OrbitTable
    std::map<PatternCode, Rational> table;              // Diagonal
    std::map<std::pair<PatternCode, int>, Rational> orbit_table;  // OrbitTable
    Rational scalar = 0;                                // Scale
    Rational letter_a = 0, letter_b = 0;                // LetterPotential
    std::vector<std::shared_ptr<const OpNode>> kids;
};

using NodePtr = std::shared_ptr<const OpNode>;

}  // namespace detail

// Maximal number of vertices in a radius-r ball when degrees are bounded by d:
// 1 + d * sum_{i<r} (d-1)^i.
inline Integer max_ball_size(int r, int d) {
    if (r <= 0) return 1;
    Integer total = 1;
    Integer layer = d;
    for (int i = 0; i < r; ++i) {
        total += layer;
        layer *= (d - 1);
    }
    return total;
}

class PatternOperator {
public:
    const InfiniteGraph& graph() const { return graph_; }
    const detail::NodePtr& node() const { return node_; }

    // Propagation radius r_A: entries vanish beyond it and pattern invariance
    // is taken over r_A-balls.
    int propagation() const { return propagation_; }
    // Support radius: entries vanish beyond it (<= propagation; 0 for diagonal rules).
    int support() const { return support_; }
    // Cached upper bound m_A on |entry|.
    const Rational& entry_bound() const { return bound_; }
    bool self_adjoint_hint() const { return self_adjoint_; }

    // Test hook: overrides the declared propagation radius (used to exercise
    // the invariance validator on deliberately broken declarations).
    PatternOperator with_declared_propagation(int r) const {
        PatternOperator a = *this;
        a.propagation_ = r;
        return a;
    }

    friend PatternOperator make_operator(const InfiniteGraph& g, detail::NodePtr node,
                                         int propagation, int support, Rational bound,
                                         bool self_adjoint);

private:
    PatternOperator(InfiniteGraph g, detail::NodePtr node, int propagation, int support,
                    Rational bound, bool self_adjoint)
        : graph_(std::move(g)),
          node_(std::move(node)),
          propagation_(propagation),
          support_(support),
          bound_(std::move(bound)),
          self_adjoint_(self_adjoint) {}

    InfiniteGraph graph_;
    detail::NodePtr node_;
    int propagation_ = 0;
    int support_ = 0;
    Rational bound_ = 0;
    bool self_adjoint_ = false;
};

inline PatternOperator make_operator(const InfiniteGraph& g, detail::NodePtr node,
                                     int propagation, int support, Rational bound,
                                     bool self_adjoint) {
    return PatternOperator(g, std::move(node), propagation, support, std::move(bound),
                           self_adjoint);
}

// ---------------------------------------------------------------- constructors

inline PatternOperator adjacency_operator(const InfiniteGraph& g) {
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Adjacency;
    return make_operator(g, n, 1, 1, Rational(1), true);
}

inline PatternOperator identity_operator(const InfiniteGraph& g) {
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Identity;
    return make_operator(g, n, 0, 0, Rational(1), true);
}

// Diagonal with V(x,x) = deg(x); degree is a radius-1 pattern quantity.
inline PatternOperator degree_operator(const InfiniteGraph& g) {
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Degree;
    return make_operator(g, n, 1, 0, Rational(g.degree_bound()), true);
}

inline PatternOperator letter_potential(const InfiniteGraph& g, const Rational& va,
                                        const Rational& vb) {
    if (!g.colored()) throw ConfigError("letter_potential: graph carries no letters");
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::LetterPotential;
    n->letter_a = va;
    n->letter_b = vb;
    Rational m = std::max(abs(va), abs(vb));
    return make_operator(g, n, 0, 0, m, true);
}

inline PatternOperator pattern_potential(const InfiniteGraph& g, int r,
                                         std::map<PatternCode, Rational> table) {
    for (const auto& [code, value] : table)
        if (code.radius != r)
            throw ConfigError("pattern_potential: table key of radius " +
                              std::to_string(code.radius) + " in radius-" + std::to_string(r) +
                              " potential");
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Diagonal;
    n->radius = r;
    Rational m = 0;
    for (const auto& [code, value] : table) m = std::max(m, abs(value));
    n->table = std::move(table);
    return make_operator(g, n, r, 0, m, true);
}

// Values keyed by (root pattern, root-fixing orbit of the target vertex).
inline PatternOperator orbit_operator(const InfiniteGraph& g, int r,
                                      std::map<std::pair<PatternCode, int>, Rational> table) {
    for (const auto& [key, value] : table)
        if (key.first.radius != r)
            throw ConfigError("orbit_operator: table key of radius " +
                              std::to_string(key.first.radius) + " in radius-" +
                              std::to_string(r) + " operator");
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::OrbitTable;
    n->radius = r;
    Rational m = 0;
    for (const auto& [key, value] : table) m = std::max(m, abs(value));
    n->orbit_table = std::move(table);
    return make_operator(g, n, r, r, m, false);
}

inline void require_same_graph(const PatternOperator& a, const PatternOperator& b) {
    if (!(a.graph().descriptor() == b.graph().descriptor()))
        throw ConfigError("operator algebra: operands live on different graphs");
}

inline PatternOperator add(const PatternOperator& a, const PatternOperator& b) {
    require_same_graph(a, b);
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Sum;
    n->kids = {a.node(), b.node()};
    return make_operator(a.graph(), n, std::max(a.propagation(), b.propagation()),
                         std::max(a.support(), b.support()), a.entry_bound() + b.entry_bound(),
                         a.self_adjoint_hint() && b.self_adjoint_hint());
}

inline PatternOperator scale(const Rational& c, const PatternOperator& a) {
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Scale;
    n->scalar = c;
    n->kids = {a.node()};
    return make_operator(a.graph(), n, a.propagation(), a.support(), abs(c) * a.entry_bound(),
                         a.self_adjoint_hint());
}

inline PatternOperator star(const PatternOperator& a) {
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Star;
    n->kids = {a.node()};
    return make_operator(a.graph(), n, a.propagation(), a.support(), a.entry_bound(),
                         a.self_adjoint_hint());
}

inline PatternOperator mul(const PatternOperator& a, const PatternOperator& b) {
    require_same_graph(a, b);
    auto n = std::make_shared<detail::OpNode>();
    n->kind = detail::OpNode::Kind::Product;
    n->kids = {a.node(), b.node()};
    const Rational m =
        a.entry_bound() * b.entry_bound() *
        Rational(max_ball_size(a.support(), a.graph().degree_bound()));
    // A product is self-adjoint when it is literally A*A with equal factors.
    const bool sa = a.self_adjoint_hint() && b.self_adjoint_hint() && a.node() == b.node();
    return make_operator(a.graph(), n, a.propagation() + b.propagation(),
                         a.support() + b.support(), m, sa);
}

inline PatternOperator sub(const PatternOperator& a, const PatternOperator& b) {
    return add(a, scale(Rational(-1), b));
}

// A - lambda * I.
inline PatternOperator shifted_operator(const PatternOperator& a, const Rational& lambda) {
    return sub(a, scale(lambda, identity_operator(a.graph())));
}

// star(C) * C; positive and self-adjoint by construction.
inline PatternOperator gram(const PatternOperator& c) {
    PatternOperator out = mul(star(c), c);
    auto n = std::make_shared<detail::OpNode>(*out.node());
    return make_operator(c.graph(), n, out.propagation(), out.support(), out.entry_bound(), true);
}

inline PatternOperator power(const PatternOperator& a, int k) {
    if (k < 1) throw ConfigError("power: exponent must be >= 1");
    PatternOperator out = a;
    for (int i = 1; i < k; ++i) out = mul(out, a);
    if (a.self_adjoint_hint()) {
        // Powers of a self-adjoint operator stay self-adjoint.
        return make_operator(a.graph(), out.node(), out.propagation(), out.support(),
                             out.entry_bound(), true);
    }
    return out;
}

inline PatternOperator laplacian_operator(const InfiniteGraph& g) {
    return sub(degree_operator(g), adjacency_operator(g));
}

// ------------------------------------------------------------------ evaluation

// Per-thread evaluation context: caches materialized balls and canonical forms.
struct EvalContext {
    const InfiniteGraph* g = nullptr;
    CanonLimits canon_limits;
    GraphLimits graph_limits;

    explicit EvalContext(const InfiniteGraph& graph) : g(&graph) {}

    const RootedBall& get_ball(const VertexId& v, int r) {
        auto key = std::make_pair(v, r);
        auto it = balls_.find(key);
        if (it == balls_.end())
            it = balls_.emplace(key, std::make_shared<RootedBall>(ball(*g, v, r, graph_limits)))
                     .first;
        return *it->second;
    }

    const BallCanonical& get_canon(const VertexId& v, int r) {
        auto key = std::make_pair(v, r);
        auto it = canons_.find(key);
        if (it == canons_.end())
            it = canons_
                     .emplace(key, std::make_shared<BallCanonical>(
                                       canonicalize(get_ball(v, r), canon_limits)))
                     .first;
        return *it->second;
    }

private:
    std::map<std::pair<VertexId, int>, std::shared_ptr<const RootedBall>> balls_;
    std::map<std::pair<VertexId, int>, std::shared_ptr<const BallCanonical>> canons_;
};

namespace detail {

inline int node_support(const OpNode& node);

inline Rational node_entry(const OpNode& node, const VertexId& x, const VertexId& y,
                           EvalContext& cx) {
    using Kind = OpNode::Kind;
    switch (node.kind) {
        case Kind::Adjacency: {
            if (x == y) return 0;
            const auto& b1 = cx.get_ball(x, 1);
            return b1.contains(y) ? 1 : 0;
        }
        case Kind::Identity:
            return x == y ? 1 : 0;
        case Kind::Degree: {
            if (x != y) return 0;
            return Rational(static_cast<long>(cx.get_ball(x, 1).size()) - 1);
        }
        case Kind::LetterPotential: {
            if (x != y) return 0;
            return cx.g->color(x) == 1 ? node.letter_a : node.letter_b;
        }
        case Kind::Diagonal: {
            if (x != y) return 0;
            const auto& canon = cx.get_canon(x, node.radius);
            auto it = node.table.find(canon.code);
            return it == node.table.end() ? Rational(0) : it->second;
        }
        case Kind::OrbitTable: {
            const auto& b = cx.get_ball(x, node.radius);
            const int i = b.index_of(y);
            if (i < 0) return 0;
            const auto& canon = cx.get_canon(x, node.radius);
            auto it = node.orbit_table.find({canon.code, canon.orbit_of(i)});
            return it == node.orbit_table.end() ? Rational(0) : it->second;
        }
        case Kind::Sum: {
            Rational acc = 0;
            for (const auto& kid : node.kids) acc += node_entry(*kid, x, y, cx);
            return acc;
        }
        case Kind::Scale:
            return node.scalar * node_entry(*node.kids[0], x, y, cx);
        case Kind::Star:
            return node_entry(*node.kids[0], y, x, cx);  // rational conjugation is identity
        case Kind::Product: {
            // (AB)(x,y) = sum over z in ball(x, support(A)) of A(x,z) B(z,y).
            Rational acc = 0;
            const int ra = node_support(*node.kids[0]);
            const auto& bx = cx.get_ball(x, ra);
            for (const auto& z : bx.verts) {
                const Rational av = node_entry(*node.kids[0], x, z, cx);
                if (av == 0) continue;
                const Rational bv = node_entry(*node.kids[1], z, y, cx);
                if (bv == 0) continue;
                acc += av * bv;
            }
            return acc;
        }
    }
    return 0;
}

inline int node_support(const OpNode& node) {
    using Kind = OpNode::Kind;
    switch (node.kind) {
        case Kind::Adjacency: return 1;
        case Kind::Identity:
        case Kind::Degree:
        case Kind::LetterPotential:
        case Kind::Diagonal: return 0;
        case Kind::OrbitTable: return node.radius;
        case Kind::Sum: {
            int r = 0;
            for (const auto& kid : node.kids) r = std::max(r, node_support(*kid));
            return r;
        }
        case Kind::Scale:
        case Kind::Star: return node_support(*node.kids[0]);
        case Kind::Product: return node_support(*node.kids[0]) + node_support(*node.kids[1]);
    }
    return 0;
}

inline bool node_diagonal(const OpNode& node) { return node_support(node) == 0; }

}  // namespace detail

inline Rational entry(const PatternOperator& a, const VertexId& x, const VertexId& y,
                      EvalContext& cx) {
    return detail::node_entry(*a.node(), x, y, cx);
}

inline Rational entry(const PatternOperator& a, const VertexId& x, const VertexId& y) {
    EvalContext cx(a.graph());
    return entry(a, x, y, cx);
}

// ------------------------------------------------------------- finite sections

struct SectionLimits {
    std::size_t dense_limit = 500;  // exact rational path
    int threads = 0;
};

struct FiniteSection {
    Window window;
    RationalMatrix matrix;
    bool self_adjoint_hint = false;
};

// B_n = p_Q A i_Q as an exact rational matrix in the window's canonical order.
inline FiniteSection finite_section(const PatternOperator& a, const Window& q,
                                    const SectionLimits& lim = {}) {
    if (q.size() > lim.dense_limit)
        throw LimitExceeded("finite_section: window size " + std::to_string(q.size()) +
                            " above exact dense limit " + std::to_string(lim.dense_limit));
    FiniteSection sec;
    sec.window = q;
    sec.matrix = RationalMatrix(q.size());
    sec.self_adjoint_hint = a.self_adjoint_hint();
    const bool diag = detail::node_diagonal(*a.node());
    const int support = a.support();
    const std::size_t n = q.size();
    const int workers = resolve_threads(lim.threads);
    const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) /
                              static_cast<std::size_t>(workers);
    parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t t) {
        EvalContext cx(a.graph());
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const VertexId& x = sec.window.verts[i];
            if (diag) {
                sec.matrix.at(i, i) = entry(a, x, x, cx);
                continue;
            }
            for (const auto& y : cx.get_ball(x, support).verts) {
                const int j = sec.window.index_of(y);
                if (j < 0) continue;
                sec.matrix.at(i, static_cast<std::size_t>(j)) = entry(a, x, y, cx);
            }
        }
    });
    return sec;
}

// Row-major dense double section, for the floating-point spectral path.
inline std::vector<double> section_doubles(const PatternOperator& a, const Window& q,
                                           int threads = 0) {
    const std::size_t n = q.size();
    std::vector<double> out(n * n, 0.0);
    const bool diag = detail::node_diagonal(*a.node());
    const int support = a.support();
    const int workers = resolve_threads(threads);
    const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) /
                              static_cast<std::size_t>(workers);
    parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t t) {
        EvalContext cx(a.graph());
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const VertexId& x = q.verts[i];
            if (diag) {
                out[i * n + i] = to_double(entry(a, x, x, cx));
                continue;
            }
            for (const auto& y : cx.get_ball(x, support).verts) {
                const int j = q.index_of(y);
                if (j < 0) continue;
                out[i * n + static_cast<std::size_t>(j)] = to_double(entry(a, x, y, cx));
            }
        }
    });
    return out;
}

// Exact-rational matrix-market-style text: "n n nnz" header then "i j num/den"
// (1-based, row-major order).
inline void write_section(const FiniteSection& sec, std::ostream& os) {
    const std::size_t n = sec.matrix.size();
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sec.matrix.at(i, j) != 0) ++nnz;
    os << n << ' ' << n << ' ' << nnz << '\n';
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sec.matrix.at(i, j) != 0)
                os << (i + 1) << ' ' << (j + 1) << ' ' << to_string(sec.matrix.at(i, j)) << '\n';
}

// ------------------------------------------------------- invariance validation

struct InvarianceViolation {
    VertexId x, x2, y, y2;
    Rational lhs, rhs;
};

struct InvarianceReport {
    std::size_t pairs_checked = 0;
    std::size_t isomorphisms_checked = 0;
    std::vector<InvarianceViolation> violations;

    bool ok() const { return violations.empty(); }
};

// Finds window vertices with equal r_A-patterns, enumerates root-preserving
// ball isomorphisms, and checks entry equality along each of them.
inline InvarianceReport validate_invariance(const PatternOperator& a, const Window& q,
                                            std::size_t max_pairs = 64,
                                            std::size_t max_isos_per_pair = 16,
                                            std::size_t max_violations = 16) {
    InvarianceReport report;
    const int r = a.propagation();
    EvalContext cx(a.graph());
    const PatternCensus census = pattern_census(a.graph(), q, r, cx.canon_limits, cx.graph_limits);

    for (const auto& [code, class_info] : census.classes) {
        if (report.pairs_checked >= max_pairs) break;
        if (class_info.count < 2) continue;
        // Pair the class representative with every other member (capped).
        const VertexId x = class_info.representative;
        const auto& bx = cx.get_ball(x, r);
        const auto& c1 = cx.get_canon(x, r);
        for (const auto& x2 : q.verts) {
            if (report.pairs_checked >= max_pairs) break;
            if (x2 == x) continue;
            const auto& c2 = cx.get_canon(x2, r);
            if (!(c2.code == code)) continue;
            ++report.pairs_checked;
            const auto& bx2 = cx.get_ball(x2, r);
            // Base isomorphism v -> label2^{-1}(label1(v)); composing with the
            // automorphisms of the target ball enumerates all isomorphisms.
            std::vector<int> inv2(bx2.size());
            for (std::size_t v = 0; v < bx2.size(); ++v)
                inv2[static_cast<std::size_t>(c2.canon_label[v])] = static_cast<int>(v);
            std::size_t isos = 0;
            for (const auto& sigma : c2.automorphisms) {
                if (isos++ >= max_isos_per_pair) break;
                ++report.isomorphisms_checked;
                for (std::size_t v = 0; v < bx.size(); ++v) {
                    const int base = inv2[static_cast<std::size_t>(c1.canon_label[v])];
                    const int image = sigma[static_cast<std::size_t>(base)];
                    const VertexId y = bx.verts[v];
                    const VertexId y2 = bx2.verts[static_cast<std::size_t>(image)];
                    const Rational lhs = entry(a, x, y, cx);
                    const Rational rhs = entry(a, x2, y2, cx);
                    if (lhs != rhs) {
                        if (report.violations.size() < max_violations)
                            report.violations.push_back({x, x2, y, y2, lhs, rhs});
                    }
                }
            }
        }
    }
    return report;
}

// A(x,y) is bounded by m_A and supported in radius r_A, so every finite
// section obeys ||B_n|| <= m_A (1 + T(r_A, d)).
inline Rational norm_bound(const PatternOperator& a) {
    return a.entry_bound() *
           (Rational(1) + Rational(max_ball_size(a.propagation(), a.graph().degree_bound())));
}

// ------------------------------------------------------------------------ json

inline json operator_to_json(const PatternOperator& a);

namespace detail {

inline json node_to_json(const OpNode& node) {
    using Kind = OpNode::Kind;
    json j;
    switch (node.kind) {
        case Kind::Adjacency: j["kind"] = "adjacency"; break;
        case Kind::Identity: j["kind"] = "identity"; break;
        case Kind::Degree: j["kind"] = "degree"; break;
        case Kind::LetterPotential:
            j["kind"] = "letter_potential";
            j["a"] = to_string(node.letter_a);
            j["b"] = to_string(node.letter_b);
            break;
        case Kind::Diagonal: {
            j["kind"] = "diagonal";
            j["r"] = node.radius;
            json table = json::array();
            for (const auto& [code, value] : node.table)
                table.push_back({{"code", code.hex()}, {"value", to_string(value)}});
            j["table"] = std::move(table);
            break;
        }
        case Kind::OrbitTable: {
            j["kind"] = "orbit";
            j["r"] = node.radius;
            json table = json::array();
            for (const auto& [key, value] : node.orbit_table)
                table.push_back({{"code", key.first.hex()},
                                 {"orbit", key.second},
                                 {"value", to_string(value)}});
            j["table"] = std::move(table);
            break;
        }
        case Kind::Sum: {
            j["kind"] = "sum";
            json terms = json::array();
            for (const auto& kid : node.kids) terms.push_back(node_to_json(*kid));
            j["terms"] = std::move(terms);
            break;
        }
        case Kind::Scale:
            j["kind"] = "scale";
            j["c"] = to_string(node.scalar);
            j["child"] = node_to_json(*node.kids[0]);
            break;
        case Kind::Product:
            j["kind"] = "product";
            j["left"] = node_to_json(*node.kids[0]);
            j["right"] = node_to_json(*node.kids[1]);
            break;
        case Kind::Star:
            j["kind"] = "star";
            j["child"] = node_to_json(*node.kids[0]);
            break;
    }
    return j;
}

}  // namespace detail

inline json operator_to_json(const PatternOperator& a) {
    return detail::node_to_json(*a.node());
}

inline PatternOperator operator_from_json(const InfiniteGraph& g, const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("operator: node must be an object with a 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "adjacency") return adjacency_operator(g);
    if (kind == "identity") return identity_operator(g);
    if (kind == "degree") return degree_operator(g);
    if (kind == "letter_potential")
        return letter_potential(g, parse_rational(j.value("a", std::string("0"))),
                                parse_rational(j.value("b", std::string("0"))));
    if (kind == "diagonal") {
        if (!j.contains("r") || !j.contains("table"))
            throw ConfigError("operator: diagonal requires 'r' and 'table'");
        std::map<PatternCode, Rational> table;
        for (const auto& row : j["table"])
            table[PatternCode::from_hex(row.at("code").get<std::string>())] =
                parse_rational(row.at("value").get<std::string>());
        return pattern_potential(g, j["r"].get<int>(), std::move(table));
    }
    if (kind == "orbit") {
        if (!j.contains("r") || !j.contains("table"))
            throw ConfigError("operator: orbit requires 'r' and 'table'");
        std::map<std::pair<PatternCode, int>, Rational> table;
        for (const auto& row : j["table"])
            table[{PatternCode::from_hex(row.at("code").get<std::string>()),
                   row.at("orbit").get<int>()}] =
                parse_rational(row.at("value").get<std::string>());
        return orbit_operator(g, j["r"].get<int>(), std::move(table));
    }
    if (kind == "sum") {
        if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
            throw ConfigError("operator: sum requires nonempty 'terms'");
        std::optional<PatternOperator> acc;
        for (const auto& term : j["terms"]) {
            PatternOperator t = operator_from_json(g, term);
            acc = acc ? add(*acc, t) : t;
        }
        return *acc;
    }
    if (kind == "scale")
        return scale(parse_rational(j.at("c").get<std::string>()),
                     operator_from_json(g, j.at("child")));
    if (kind == "product") {
        // star(X) * X round-trips back to a gram, keeping the positivity hint.
        const json& left = j.at("left");
        if (left.is_object() && left.value("kind", std::string()) == "star" &&
            left.contains("child") && left.at("child") == j.at("right"))
            return gram(operator_from_json(g, j.at("right")));
        return mul(operator_from_json(g, j.at("left")), operator_from_json(g, j.at("right")));
    }
    if (kind == "star") return star(operator_from_json(g, j.at("child")));
    if (kind == "gram") return gram(operator_from_json(g, j.at("child")));
    throw ConfigError("operator: unknown kind '" + kind + "'");
}

}  // namespace aqs
