// vertex.hpp — coordinate-style vertex ids with a canonical (lexicographic) order.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "aqs/rng.hpp"

namespace aqs {

// Vertices are small integer tuples plus a decoration slot (0 = base vertex,
// 1..k = pendant index). Unused coordinates stay 0 so the default comparison
// is the canonical lexicographic order for every generator.
struct VertexId {
    std::array<std::int32_t, 3> c{0, 0, 0};
    std::int32_t slot = 0;

    friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

inline VertexId vertex(std::int32_t x) { return VertexId{{x, 0, 0}, 0}; }
inline VertexId vertex(std::int32_t x, std::int32_t y) { return VertexId{{x, y, 0}, 0}; }
inline VertexId vertex(std::int32_t x, std::int32_t y, std::int32_t z) {
    return VertexId{{x, y, z}, 0};
}
inline VertexId pendant_vertex(std::int32_t x, std::int32_t slot) {
    return VertexId{{x, 0, 0}, slot};
}

struct VertexIdHash {
    std::size_t operator()(const VertexId& v) const {
        std::uint64_t h = 0x243f6a8885a308d3ULL;
        h = splitmix64(h ^ static_cast<std::uint32_t>(v.c[0]));
        h = splitmix64(h ^ static_cast<std::uint32_t>(v.c[1]));
        h = splitmix64(h ^ static_cast<std::uint32_t>(v.c[2]));
        h = splitmix64(h ^ static_cast<std::uint32_t>(v.slot));
        return static_cast<std::size_t>(h);
    }
};

// Renders the first `dims` coordinates; a nonzero slot is appended as ":s".
inline std::string format_vertex(const VertexId& v, int dims) {
    std::string out;
    for (int i = 0; i < dims; ++i) {
        if (i) out += ',';
        out += std::to_string(v.c[static_cast<std::size_t>(i)]);
    }
    if (v.slot != 0) out += ":" + std::to_string(v.slot);
    return out;
}

}  // namespace aqs
