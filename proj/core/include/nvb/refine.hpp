#pragma once

#include <nvb/mesh.hpp>

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace nvb {

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct MarkingInput
{
    std::set<ElemId> elements;
    std::set<EdgeKey> edges; // each must lie in a marked element
};

/// Marks the given elements with only their reference edges.
MarkingInput mark_reference_edges(const Mesh & mesh, const std::set<ElemId> & elements);

/// Marks the given elements with all three of their edges.
MarkingInput mark_all_edges(const Mesh & mesh, const std::set<ElemId> & elements);

enum class ClosureMode
{
    nvb,  // seed with the reference edges of marked elements
    mnvb, // seed with the marked edges
};

enum class Pattern : std::uint8_t
{
    none,
    bisec1,
    bisec2_left,  // reference edge and edge (v1, v2)
    bisec2_right, // reference edge and edge (v2, v0)
    bisec3,
    bisec5,
    red,
};

std::string to_string(Pattern p);

struct RefinementPlan
{
    std::vector<char> closed;       // per EdgeId of the mesh
    std::vector<Pattern> patterns;  // per ElemId
    std::set<ElemId> marked;        // marked elements the plan was computed for
    int iterations = 0;

    std::set<EdgeKey> closed_edges(const Mesh & mesh) const;
    std::size_t num_closed() const;
};

/**
 * Smallest superset of the seed edges such that an element having a closed edge has its
 * reference edge closed. Elements with three closed edges get the bisec3 placeholder.
 *
 * Throws std::invalid_argument for an edge not in the mesh, a marked edge outside every
 * marked element, or a bad element id.
 */
RefinementPlan close_marks(const Mesh & mesh, const MarkingInput & input, ClosureMode mode);

/// Chooses the pattern of elements with three closed edges.
class PatternPolicy
{
public:
    enum class Kind
    {
        always_bisec3,
        always_red,
        interior_node, // bisec5 for marked elements, bisec3 otherwise
        custom,
    };

    using Rule = std::function<Pattern(const Mesh &, ElemId, bool marked)>;

    static PatternPolicy always_bisec3() { return PatternPolicy(Kind::always_bisec3, {}); }
    static PatternPolicy always_red() { return PatternPolicy(Kind::always_red, {}); }
    static PatternPolicy interior_node() { return PatternPolicy(Kind::interior_node, {}); }
    static PatternPolicy custom(Rule rule) { return PatternPolicy(Kind::custom, std::move(rule)); }

    Kind kind() const { return kind_; }
    std::string name() const;

    /// Throws std::invalid_argument if a custom rule returns something other than bisec3,
    /// bisec5 or red.
    Pattern choose(const Mesh & mesh, ElemId t, bool marked) const;

private:
    PatternPolicy(Kind kind, Rule rule) : kind_(kind), rule_(std::move(rule)) {}

    Kind kind_;
    Rule rule_;
};

/// Overrides the pattern of every fully closed element in place.
void apply_policy(const Mesh & mesh, RefinementPlan & plan, const PatternPolicy & policy);

/// Position of a son inside its father's bisection tree: `bits` read from the most
/// significant of `length` bits, 0 = left son. Red sons have length 0.
struct SonPath
{
    std::uint8_t bits = 0;
    std::uint8_t length = 0;

    std::string str() const;
    friend bool operator==(const SonPath &, const SonPath &) = default;
};

struct RefineResult
{
    Mesh mesh;
    RefinementPlan plan;
    std::set<ElemId> refined;          // old ids of elements that were split
    std::vector<ElemId> parent;        // per new element, the old element it lies in
    std::vector<std::uint8_t> son;     // per new element, son index in its father's template
    std::vector<SonPath> path;         // per new element
    std::vector<NodeId> midpoint;      // per old EdgeId, new node or kNoNode
    std::vector<NodeId> interior_node; // per old ElemId, bisec5 interior node or kNoNode
};

/**
 * Splits every element according to the plan's patterns.
 *
 * Old node ids are kept; midpoints of closed edges are appended in ascending edge order, then
 * bisec5 interior nodes in element order. New elements follow the old element order.
 * Throws std::invalid_argument if the plan does not fit the mesh.
 */
RefineResult split(const Mesh & mesh, const RefinementPlan & plan);
RefineResult split(const Mesh & mesh, RefinementPlan plan, const PatternPolicy & policy);

enum class Dialect
{
    refineNVB,
    refineNVB3,
    refineNVBred,
    refine,
};

std::string to_string(Dialect d);

/**
 * One refinement step: closure, policy override, split.
 *
 * refineNVB uses reference-edge closure and ignores `marking.edges`; refineNVB and refineNVB3
 * use bisec3 for fully closed elements whatever the policy; refineNVBred throws
 * std::invalid_argument if the policy selects bisec5.
 */
RefineResult refine_step(const Mesh & mesh, const MarkingInput & marking, Dialect dialect,
                         const PatternPolicy & policy = PatternPolicy::always_bisec3());

/// Shorthand for refineNVB with the given marked elements.
RefineResult refine_nvb(const Mesh & mesh, const std::set<ElemId> & marked);

/**
 * The same step as refineNVB3 done by two refineNVB calls: first the marked elements, then
 * the sons of marked elements that contain a marked edge of their father.
 */
Mesh refine_nvb3_two_step(const Mesh & mesh, const MarkingInput & marking);

/// Reference-neighbor chain starting at t.
std::vector<ElemId> chain(const Mesh & mesh, ElemId t);

enum class UniformKind
{
    bisec1,
    bisec3,
};

Mesh uniform(const Mesh & mesh, UniformKind kind);

} // namespace nvb
