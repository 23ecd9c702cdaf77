#pragma once

#include <nvb/mesh.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace nvb {

/// Unit square split along the diagonal (0,0)-(1,1), which is the reference edge of both
/// triangles.
Mesh square2();

/// L-shape (-1,1)^2 \ [0,1)x(-1,0] as three unit squares, each split by a diagonal through
/// the origin or the corner (1,1); diagonals are reference edges.
Mesh lshape6();

/// Returns the named built-in mesh, or nullopt for an unknown name.
std::optional<Mesh> builtin_mesh(const std::string & name);

enum class RefEdgePolicy
{
    as_given,
    longest_edge,
    random,
};

/**
 * Re-labels reference edges of a generation-0 mesh by cyclic rotation of each triple, which
 * keeps orientation.
 *
 * longest_edge picks the longest edge, ties broken by the smallest opposite vertex id.
 * random picks one of the three rotations from a generator seeded with `seed`.
 */
Mesh assign_reference_edges(const Mesh & mesh, RefEdgePolicy policy, std::uint64_t seed = 0);

} // namespace nvb
