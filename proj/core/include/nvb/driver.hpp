#pragma once

#include <nvb/analysis.hpp>
#include <nvb/marking.hpp>
#include <nvb/mesh.hpp>
#include <nvb/refine.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace nvb {

/// Edges marked inside each marked element for the marked-edge dialects.
enum class EdgeMarking
{
    reference,
    all,
};

struct RunConfig
{
    Dialect dialect = Dialect::refineNVB;
    PatternPolicy policy = PatternPolicy::always_bisec3();
    MarkingStrategy marking = MarkingStrategy::all_elements();
    EdgeMarking edges = EdgeMarking::all;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
};

struct RunResult
{
    std::vector<Mesh> meshes;               // meshes[0] is the initial mesh
    std::vector<std::set<ElemId>> marked;   // marked[l] marked in meshes[l]
    std::vector<MarkingInput> markings;
    std::vector<RefineResult> steps;        // without copies of the refined mesh when not kept
    RefinementTrace trace;
};

/// Runs `config.steps` mark-and-refine steps. Deterministic for a fixed config.
RunResult run_refinement(const Mesh & initial, const RunConfig & config);

/// Marking input for one step: the selected elements plus their reference or all edges.
MarkingInput make_marking(const Mesh & mesh, const std::set<ElemId> & elements, EdgeMarking edges);

/// The fixed graded run used for regression data: lshape6 refined 25 times by Doerfler
/// marking of a synthetic indicator singular at the re-entrant corner (0, 0).
RunConfig lshape_corner_config();

} // namespace nvb
