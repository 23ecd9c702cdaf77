#pragma once

#include <nvb/mesh.hpp>
#include <nvb/refine.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace nvb {

/// Incidence pair addressed as (element, local edge index).
struct PairRef
{
    ElemId elem = 0;
    int local = 0;

    friend bool operator==(const PairRef &, const PairRef &) = default;
};

/// Map between incidence pairs of two meshes; `target[3 * t + i]` is the image of
/// (t, local edge i).
struct CorrMap
{
    std::vector<PairRef> target;

    static CorrMap identity(const Mesh & mesh);
    const PairRef & operator()(ElemId t, int i) const { return target[3 * static_cast<std::size_t>(t) + static_cast<std::size_t>(i)]; }

    /// Distinct elements hit by the three pairs of t.
    std::size_t image_size(ElemId t) const;
};

struct CorrReport
{
    bool ok = true;
    std::string property; // first violated property, empty if ok
    std::string detail;
    std::vector<PairRef> witnesses;
    std::size_t max_corr_size = 0; // max over elements of image_size
    std::size_t red_quads = 0;     // element pairs mapped by the red-son template
};

/**
 * Checks that `corr` makes `a` and `b` corresponding meshes: a bijection of incidence pairs
 * with equal generations and areas within a factor 4 (i); neighboring pairs mapped to
 * neighboring pairs and boundary pairs to boundary pairs (ii); reference edges to reference
 * edges (iii); reference-neighbor pairs to reference-neighbor pairs (iv); compatible
 * divisibility (v) and common ancestry (vi) of neighbors preserved; all images of an
 * element share the image of its reference edge as reference edge, in both directions (vii).
 *
 * Neighbor properties are checked through the unique neighboring pair of each pair; with
 * `exhaustive` they are checked over all pairs of incidence pairs instead (quadratic).
 */
CorrReport verify_corr(const CorrMap & corr, const Mesh & a, const Mesh & b, bool exhaustive = false);

struct CorrStepInfo
{
    std::size_t marked = 0;       // #M
    std::size_t marked_tilde = 0; // #M~ after transfer
    std::size_t elements = 0;
    std::size_t elements_tilde = 0;
    std::size_t red_refined = 0;
    bool closure_matches = true;  // transferred closure equals the closure of the bisec3 step
    CorrReport report;
};

/**
 * Runs a refineNVBred sequence next to a refineNVB3 sequence with transferred markings and
 * maintains the incidence-pair correspondence between them.
 *
 * The meshes differ only on red pairs: two red sons (P,Q,R), (Q,P,S) sharing their reference
 * edge correspond to the bisection grandsons (S,R,P), (R,S,Q) of the same quadrilateral.
 */
class CorrespondenceBuilder
{
public:
    explicit CorrespondenceBuilder(const Mesh & initial);

    /// One step with the given marking. Throws UnsupportedError if the policy selects
    /// bisec5; invalid markings throw std::invalid_argument.
    const CorrStepInfo & step(const MarkingInput & marking, const PatternPolicy & policy, bool exhaustive = false);

    const Mesh & mesh() const { return mesh_; }
    const Mesh & mesh_tilde() const { return tilde_; }
    const CorrMap & corr() const { return corr_; }
    const std::vector<NodeId> & node_map() const { return psi_; }
    const std::vector<CorrStepInfo> & history() const { return history_; }

private:
    Mesh mesh_;
    Mesh tilde_;
    CorrMap corr_;
    std::vector<NodeId> psi_; // node of mesh_ -> node of tilde_ at the same position
    std::vector<CorrStepInfo> history_;
};

} // namespace nvb
