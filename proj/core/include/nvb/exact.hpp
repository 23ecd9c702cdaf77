#pragma once

#include <nvb/mesh.hpp>

#include <array>
#include <optional>

namespace nvb::exact {

/// A dyadic rational mantissa * 2^exponent with the mantissa odd (or zero).
struct Dyadic
{
    __int128 mantissa = 0;
    int exponent = 0;

    friend bool operator==(const Dyadic &, const Dyadic &) = default;
};

/**
 * Twice the signed area of triangle (a, b, c), computed without rounding.
 *
 * Coordinates are doubles, hence dyadic; the computation scales them to a common integer
 * grid and uses 128-bit products. Returns nullopt if the coordinates span too many binary
 * orders of magnitude for that grid.
 */
std::optional<Dyadic> twice_area(const Vertex & a, const Vertex & b, const Vertex & c);

/// Sign of the orientation determinant; exact where twice_area is, else long double.
int orientation(const Vertex & a, const Vertex & b, const Vertex & c);

/// Checks |T| * 2^gen == |ancestor| exactly. nullopt if not decidable exactly.
std::optional<bool> area_matches_generation(const std::array<Vertex, 3> & t, int gen,
                                            const std::array<Vertex, 3> & ancestor);

} // namespace nvb::exact
