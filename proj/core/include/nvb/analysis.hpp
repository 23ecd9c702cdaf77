#pragma once

#include <nvb/mesh.hpp>
#include <nvb/refine.hpp>

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nvb {

struct CheckResult
{
    std::string name;
    bool passed = true;
    std::string detail;
    std::vector<ElemId> witnesses;
};

struct Prop9Report
{
    std::vector<CheckResult> checks;

    int max_level_jump = 0;
    std::vector<ElemId> level_jump_witness; // the pair realizing max_level_jump
    double c_diam = 0.0;                    // min |T|^(1/2) * 2^(gen/2)
    double c_diam_upper = 0.0;              // max diam(T) * 2^(gen/2)
    std::size_t max_equal_level_chain = 0;
    std::size_t area_identity_undecided = 0;

    bool ok() const;
    const CheckResult * find(const std::string & name) const;
};

/**
 * Area-generation identity (exact), realized diameter constants and the level-jump law over
 * interior edges: at most 2, and at most 1 if `nvb_from_bdd` is set and the initial mesh is
 * BDD. Requesting the sharper bound on a non-BDD initial mesh is reported, not failed.
 */
Prop9Report verify_levels(const Mesh & mesh, const Mesh & initial, bool nvb_from_bdd = false);

/// Neighbor rules for meshes produced by reference-edge bisection: gap and compatibility
/// when N(T) is finer, compatibility of equal-level neighbors with the same or compatible
/// ancestors, incompatible equal-level reference pairs along initial edges, and the longest
/// equal-level reference chain.
Prop9Report verify_neighbor_rules(const Mesh & mesh, const Mesh & initial);

/// Longest sequence T, N(T), N(N(T)), ... of distinct elements all at the level of T.
std::size_t max_equal_level_chain(const Mesh & mesh);

struct CreatedElement
{
    std::array<Vertex, 3> corners;
    int gen = 0;
};

/// Elements created by refineNVB(mesh, {t}), computed along chain(mesh, t).
std::vector<CreatedElement> single_mark_sons(const Mesh & mesh, ElemId t);

struct ChainBoundsReport
{
    int max_gen_overshoot = 0;         // max gen(T') - gen(T)
    std::size_t overshoot_violations = 0; // created T' with gen(T') > gen(T) + 2
    double max_scaled_distance = 0.0;  // max dist(T, T') * 2^(gen(T')/2)
    std::size_t max_chain_length = 0;
    std::size_t max_equal_level_chain = 0;
    std::size_t checked = 0;           // marked elements inspected
    std::vector<ElemId> witness;       // (step, T) of the first overshoot, if any

    bool ok() const { return overshoot_violations == 0; }
};

/// For each mesh meshes[l] and each element marked in markings[l], inspects the elements
/// created by marking that element alone.
ChainBoundsReport verify_chain_bounds(const std::vector<Mesh> & meshes, const std::vector<std::set<ElemId>> & markings);

struct TraceStep
{
    std::size_t marked = 0;
    std::size_t marked_edges = 0;
    int closure_iterations = 0;
    std::size_t refined = 0;
    std::size_t elements_after = 0;
};

struct RefinementTrace
{
    std::size_t initial_elements = 0;
    std::vector<TraceStep> steps; // steps[l] turns T_l into T_(l+1)
};

struct LedgerRow
{
    std::size_t step = 0;
    std::size_t marked = 0;     // #M_l, 0 on the last row
    std::size_t elements = 0;   // #T_l
    std::size_t cum_marked = 0; // sum_{j<l} #M_j
    std::optional<double> rho;  // (#T_l - #T_0) / cum_marked, undefined while cum_marked = 0
    bool lower_bound_holds = true; // cum_marked <= #T_l - #T_0
};

struct ClosureLedger
{
    std::vector<LedgerRow> rows;
    std::optional<double> max_rho;
    bool lower_bound_holds = true;
    std::optional<double> rho_bound;
    bool within_bound = true;
};

ClosureLedger closure_accounting(const RefinementTrace & trace, std::optional<double> rho_bound = std::nullopt);

struct Lemma21Result
{
    double lhs = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// a + b + ab + 1/a + 1/b + 1/(ab) against 2(1 + M + 1/M). Throws std::invalid_argument unless
/// M >= 1 and a, b, ab lie in [1/M, M].
Lemma21Result lemma21_check(double a, double b, double M);

} // namespace nvb
