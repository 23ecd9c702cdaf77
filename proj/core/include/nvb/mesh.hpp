#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nvb {

using NodeId = std::uint32_t;
using ElemId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr ElemId kNoElement = static_cast<ElemId>(-1);

struct Vertex
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vertex &, const Vertex &) = default;
};

/**
 * A triangle given by an ordered vertex triple (v0, v1, v2).
 *
 * The reference edge is always (v0, v1); v2 is the apex opposite to it. Triples are
 * counterclockwise in a valid mesh.
 */
struct Element
{
    std::array<NodeId, 3> v{};
    int gen = 0;
    ElemId ancestor = 0;
    bool red_son = false;

    friend bool operator==(const Element &, const Element &) = default;
};

/// Unordered node pair, stored with `a < b`.
struct EdgeKey
{
    NodeId a = 0;
    NodeId b = 0;

    EdgeKey() = default;
    EdgeKey(NodeId p, NodeId q) : a(p < q ? p : q), b(p < q ? q : p) {}

    bool contains(NodeId n) const { return a == n || b == n; }
    friend auto operator<=>(const EdgeKey &, const EdgeKey &) = default;
};

/// Local edge `i` of an element is (v[i], v[(i+1)%3]); local edge 0 is the reference edge.
inline EdgeKey local_edge(const Element & e, int i)
{
    return EdgeKey(e.v[static_cast<std::size_t>(i)], e.v[static_cast<std::size_t>((i + 1) % 3)]);
}

struct EdgeEntry
{
    EdgeKey key;
    std::array<ElemId, 2> elems{kNoElement, kNoElement};
    std::uint32_t count = 0; // may exceed 2 on non-conforming input; only the first two ids are kept

    bool is_boundary() const { return count == 1; }
    ElemId other(ElemId t) const { return elems[0] == t ? elems[1] : elems[0]; }
    friend bool operator==(const EdgeEntry &, const EdgeEntry &) = default;
};

/**
 * Sorted map from unordered node pairs to their incident elements.
 *
 * Edge ids are positions in ascending key order, so iterating edge ids visits edges in
 * canonical key order.
 */
class EdgeTable
{
public:
    EdgeTable() = default;
    static EdgeTable build(std::span<const Element> elements);

    std::size_t size() const { return entries_.size(); }
    const EdgeEntry & operator[](EdgeId id) const { return entries_[id]; }
    std::span<const EdgeEntry> entries() const { return entries_; }
    std::optional<EdgeId> find(EdgeKey key) const;

    friend bool operator==(const EdgeTable &, const EdgeTable &) = default;

private:
    std::vector<EdgeEntry> entries_;
};

class Mesh
{
public:
    Mesh() = default;

    /// Throws std::invalid_argument if an element references a node that does not exist.
    Mesh(std::vector<Vertex> vertices, std::vector<Element> elements);

    std::size_t num_nodes() const { return vertices_.size(); }
    std::size_t num_elements() const { return elements_.size(); }

    std::span<const Vertex> vertices() const { return vertices_; }
    std::span<const Element> elements() const { return elements_; }
    const Vertex & vertex(NodeId n) const { return vertices_[n]; }
    const Element & element(ElemId t) const { return elements_[t]; }
    const EdgeTable & edge_table() const { return edges_; }

    /// Edge ids of local edges 0, 1, 2 of element t.
    const std::array<EdgeId, 3> & element_edges(ElemId t) const { return element_edges_[t]; }

    /// Element across local edge i of t, if any.
    std::optional<ElemId> neighbor(ElemId t, int i) const;

    std::array<Vertex, 3> corners(ElemId t) const;

    /// Throws std::invalid_argument for an out-of-range element id.
    void check_element(ElemId t) const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Element> elements_;
    EdgeTable edges_;
    std::vector<std::array<EdgeId, 3>> element_edges_;
};

// ---------------------------------------------------------------------------
// Conformity

enum class ViolationKind
{
    duplicate_vertex,
    inverted_element,
    over_shared_edge,
    hanging_node,
};

std::string to_string(ViolationKind kind);

struct Violation
{
    ViolationKind kind;
    std::vector<ElemId> elements;
    std::vector<NodeId> nodes;
    std::string message;
};

struct ConformityReport
{
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::size_t count(ViolationKind kind) const;
};

/// Diagnoses duplicate vertices, non-CCW triples, edges with more than two incident
/// elements and nodes lying in the interior of an element edge. Never throws.
ConformityReport validate_mesh(const Mesh & mesh);

// ---------------------------------------------------------------------------
// Reference-edge structure

std::optional<ElemId> reference_neighbor(const Mesh & mesh, ElemId t);

enum class PairRelation
{
    not_adjacent,
    compatibly_divisible,
    incompatible,
};

std::string to_string(PairRelation r);

/// Local edge index of t1 that is shared with t2, if they share a full edge.
std::optional<int> shared_local_edge(const Mesh & mesh, ElemId t1, ElemId t2);

PairRelation classify_pair(const Mesh & mesh, ElemId t1, ElemId t2);

struct StructureFlags
{
    bool is_bdd = false;
    bool is_weak_bdd = false;
    /// N(N(T)) != T with N(T) nonempty.
    std::set<ElemId> isolated;

    /// Literal reading: elements with a boundary reference edge count as isolated too.
    bool is_weak_bdd_including_boundary = false;
    std::set<ElemId> isolated_including_boundary;
};

StructureFlags structure_flags(const Mesh & mesh);

// ---------------------------------------------------------------------------
// Geometry

struct ElementGeometry
{
    double area = 0.0;
    double diameter = 0.0;
    double shape_regularity = 0.0; // diameter^2 / area
};

ElementGeometry geometry(const Mesh & mesh, ElemId t);

double signed_area(const Vertex & a, const Vertex & b, const Vertex & c);

double total_area(const Mesh & mesh);

// ---------------------------------------------------------------------------
// Sub-meshes and identity

/// Elements whose initial ancestor is in `initial_subset`, with nodes renumbered densely in
/// ascending order of their old ids.
Mesh restrict_mesh(const Mesh & mesh, const std::set<ElemId> & initial_subset);

struct IncidencePair
{
    ElemId elem = 0;
    int local = 0; // local edge index in elem
    EdgeKey edge;
};

/// All (element, edge) incidences, ordered by element then local edge.
std::vector<IncidencePair> incidence_pairs(const Mesh & mesh);

/// True if both meshes contain the same elements (coordinates of the ordered triple and
/// generation), independent of node and element numbering.
bool same_mesh(const Mesh & a, const Mesh & b);

} // namespace nvb
