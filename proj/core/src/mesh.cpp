#include <nvb/exact.hpp>
#include <nvb/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace nvb {

EdgeTable EdgeTable::build(std::span<const Element> elements)
{
    std::vector<std::pair<EdgeKey, ElemId>> incidences;
    incidences.reserve(3 * elements.size());
    for (ElemId t = 0; t < elements.size(); ++t)
        for (int i = 0; i < 3; ++i)
            incidences.emplace_back(local_edge(elements[t], i), t);
    std::sort(incidences.begin(), incidences.end());

    EdgeTable table;
    for (const auto & [key, t] : incidences) {
        if (table.entries_.empty() || table.entries_.back().key != key)
            table.entries_.push_back(EdgeEntry{key, {kNoElement, kNoElement}, 0});
        auto & entry = table.entries_.back();
        if (entry.count < 2)
            entry.elems[entry.count] = t;
        ++entry.count;
    }
    return table;
}

std::optional<EdgeId> EdgeTable::find(EdgeKey key) const
{
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                                     [](const EdgeEntry & e, const EdgeKey & k) { return e.key < k; });
    if (it == entries_.end() || it->key != key)
        return std::nullopt;
    return static_cast<EdgeId>(it - entries_.begin());
}

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Element> elements)
    : vertices_(std::move(vertices)), elements_(std::move(elements))
{
    for (std::size_t t = 0; t < elements_.size(); ++t) {
        for (NodeId n : elements_[t].v) {
            if (n >= vertices_.size()) {
                std::ostringstream msg;
                msg << "element " << t << " references node " << n << " but the mesh has "
                    << vertices_.size() << " nodes";
                throw std::invalid_argument(msg.str());
            }
        }
    }
    edges_ = EdgeTable::build(elements_);
    element_edges_.resize(elements_.size());
    for (ElemId t = 0; t < elements_.size(); ++t)
        for (int i = 0; i < 3; ++i)
            element_edges_[t][static_cast<std::size_t>(i)] = *edges_.find(local_edge(elements_[t], i));
}

std::optional<ElemId> Mesh::neighbor(ElemId t, int i) const
{
    const auto & entry = edges_[element_edges_[t][static_cast<std::size_t>(i)]];
    if (entry.count < 2)
        return std::nullopt;
    return entry.other(t);
}

std::array<Vertex, 3> Mesh::corners(ElemId t) const
{
    const auto & e = elements_[t];
    return {vertices_[e.v[0]], vertices_[e.v[1]], vertices_[e.v[2]]};
}

void Mesh::check_element(ElemId t) const
{
    if (t >= elements_.size()) {
        std::ostringstream msg;
        msg << "element id " << t << " out of range (mesh has " << elements_.size() << " elements)";
        throw std::invalid_argument(msg.str());
    }
}

// ---------------------------------------------------------------------------

std::string to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::duplicate_vertex: return "duplicate_vertex";
    case ViolationKind::inverted_element: return "inverted_element";
    case ViolationKind::over_shared_edge: return "over_shared_edge";
    case ViolationKind::hanging_node: return "hanging_node";
    }
    return "unknown";
}

std::size_t ConformityReport::count(ViolationKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [kind](const Violation & v) { return v.kind == kind; }));
}

namespace {

bool strictly_inside_segment(const Vertex & p, const Vertex & a, const Vertex & b)
{
    if (p == a || p == b)
        return false;
    if (exact::orientation(a, b, p) != 0)
        return false;
    const bool in_x = std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x);
    const bool in_y = std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
    return in_x && in_y;
}

} // namespace

ConformityReport validate_mesh(const Mesh & mesh)
{
    ConformityReport report;
    const auto verts = mesh.vertices();

    std::vector<NodeId> by_position(verts.size());
    for (NodeId n = 0; n < verts.size(); ++n)
        by_position[n] = n;
    auto position_less = [&](NodeId p, NodeId q) {
        return std::tie(verts[p].x, verts[p].y, p) < std::tie(verts[q].x, verts[q].y, q);
    };
    std::sort(by_position.begin(), by_position.end(), position_less);
    for (std::size_t i = 1; i < by_position.size(); ++i) {
        const NodeId p = by_position[i - 1];
        const NodeId q = by_position[i];
        if (verts[p] == verts[q]) {
            std::ostringstream msg;
            msg << "nodes " << p << " and " << q << " coincide";
            report.violations.push_back({ViolationKind::duplicate_vertex, {}, {p, q}, msg.str()});
        }
    }

    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto c = mesh.corners(t);
        if (exact::orientation(c[0], c[1], c[2]) <= 0) {
            std::ostringstream msg;
            msg << "element " << t << " is not counterclockwise";
            report.violations.push_back({ViolationKind::inverted_element, {t}, {}, msg.str()});
        }
    }

    const auto & edges = mesh.edge_table();
    for (EdgeId id = 0; id < edges.size(); ++id) {
        const auto & entry = edges[id];
        if (entry.count > 2) {
            std::ostringstream msg;
            msg << "edge (" << entry.key.a << ", " << entry.key.b << ") is shared by " << entry.count << " elements";
            report.violations.push_back(
                {ViolationKind::over_shared_edge, {entry.elems[0], entry.elems[1]}, {entry.key.a, entry.key.b}, msg.str()});
        }
    }

    // A node strictly inside an edge with a single incident element is a hanging node.
    for (EdgeId id = 0; id < edges.size(); ++id) {
        const auto & entry = edges[id];
        if (entry.count != 1)
            continue;
        const Vertex & a = verts[entry.key.a];
        const Vertex & b = verts[entry.key.b];
        const Vertex lo{std::min(a.x, b.x), -std::numeric_limits<double>::infinity()};
        auto first = std::lower_bound(by_position.begin(), by_position.end(), lo, [&](NodeId n, const Vertex & v) {
            return verts[n].x < v.x;
        });
        const double x_hi = std::max(a.x, b.x);
        for (auto it = first; it != by_position.end() && verts[*it].x <= x_hi; ++it) {
            if (strictly_inside_segment(verts[*it], a, b)) {
                std::ostringstream msg;
                msg << "node " << *it << " hangs on edge (" << entry.key.a << ", " << entry.key.b << ") of element "
                    << entry.elems[0];
                report.violations.push_back(
                    {ViolationKind::hanging_node, {entry.elems[0]}, {*it, entry.key.a, entry.key.b}, msg.str()});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

std::optional<ElemId> reference_neighbor(const Mesh & mesh, ElemId t)
{
    mesh.check_element(t);
    return mesh.neighbor(t, 0);
}

std::string to_string(PairRelation r)
{
    switch (r) {
    case PairRelation::not_adjacent: return "not_adjacent";
    case PairRelation::compatibly_divisible: return "compatibly_divisible";
    case PairRelation::incompatible: return "incompatible";
    }
    return "unknown";
}

std::optional<int> shared_local_edge(const Mesh & mesh, ElemId t1, ElemId t2)
{
    const auto & e1 = mesh.element_edges(t1);
    const auto & e2 = mesh.element_edges(t2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (e1[static_cast<std::size_t>(i)] == e2[static_cast<std::size_t>(j)])
                return i;
    return std::nullopt;
}

PairRelation classify_pair(const Mesh & mesh, ElemId t1, ElemId t2)
{
    mesh.check_element(t1);
    mesh.check_element(t2);
    if (t1 == t2)
        throw std::invalid_argument("classify_pair needs two distinct elements");
    const auto i1 = shared_local_edge(mesh, t1, t2);
    if (!i1)
        return PairRelation::not_adjacent;
    const auto i2 = shared_local_edge(mesh, t2, t1);
    const bool ref1 = *i1 == 0;
    const bool ref2 = *i2 == 0;
    return ref1 == ref2 ? PairRelation::compatibly_divisible : PairRelation::incompatible;
}

StructureFlags structure_flags(const Mesh & mesh)
{
    StructureFlags flags;
    flags.is_bdd = true;
    const auto & edges = mesh.edge_table();
    for (const auto & entry : edges.entries()) {
        if (entry.count != 2)
            continue;
        if (classify_pair(mesh, entry.elems[0], entry.elems[1]) == PairRelation::incompatible)
            flags.is_bdd = false;
    }

    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto n = mesh.neighbor(t, 0);
        if (!n) {
            flags.isolated_including_boundary.insert(t);
            continue;
        }
        if (mesh.neighbor(*n, 0) != std::optional<ElemId>(t)) {
            flags.isolated.insert(t);
            flags.isolated_including_boundary.insert(t);
        }
    }

    flags.is_weak_bdd = true;
    flags.is_weak_bdd_including_boundary = true;
    for (const auto & entry : edges.entries()) {
        if (entry.count != 2)
            continue;
        const ElemId a = entry.elems[0];
        const ElemId b = entry.elems[1];
        if (flags.isolated.contains(a) && flags.isolated.contains(b))
            flags.is_weak_bdd = false;
        if (flags.isolated_including_boundary.contains(a) && flags.isolated_including_boundary.contains(b))
            flags.is_weak_bdd_including_boundary = false;
    }
    return flags;
}

// ---------------------------------------------------------------------------

double signed_area(const Vertex & a, const Vertex & b, const Vertex & c)
{
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

namespace {

double distance(const Vertex & p, const Vertex & q)
{
    return std::hypot(p.x - q.x, p.y - q.y);
}

} // namespace

ElementGeometry geometry(const Mesh & mesh, ElemId t)
{
    mesh.check_element(t);
    const auto c = mesh.corners(t);
    ElementGeometry g;
    g.area = signed_area(c[0], c[1], c[2]);
    g.diameter = std::max({distance(c[0], c[1]), distance(c[1], c[2]), distance(c[2], c[0])});
    g.shape_regularity = g.diameter * g.diameter / g.area;
    return g;
}

double total_area(const Mesh & mesh)
{
    double sum = 0.0;
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto c = mesh.corners(t);
        sum += signed_area(c[0], c[1], c[2]);
    }
    return sum;
}

// ---------------------------------------------------------------------------

Mesh restrict_mesh(const Mesh & mesh, const std::set<ElemId> & initial_subset)
{
    if (initial_subset.empty())
        throw std::invalid_argument("restrict_mesh needs a nonempty set of initial elements");

    std::vector<Element> kept;
    std::vector<char> used(mesh.num_nodes(), 0);
    for (const auto & e : mesh.elements()) {
        if (!initial_subset.contains(e.ancestor))
            continue;
        kept.push_back(e);
        for (NodeId n : e.v)
            used[n] = 1;
    }
    std::vector<NodeId> renumber(mesh.num_nodes(), 0);
    std::vector<Vertex> vertices;
    for (NodeId n = 0; n < mesh.num_nodes(); ++n) {
        if (!used[n])
            continue;
        renumber[n] = static_cast<NodeId>(vertices.size());
        vertices.push_back(mesh.vertex(n));
    }
    for (auto & e : kept)
        for (auto & n : e.v)
            n = renumber[n];
    return Mesh(std::move(vertices), std::move(kept));
}

std::vector<IncidencePair> incidence_pairs(const Mesh & mesh)
{
    std::vector<IncidencePair> pairs;
    pairs.reserve(3 * mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        for (int i = 0; i < 3; ++i)
            pairs.push_back({t, i, local_edge(mesh.element(t), i)});
    return pairs;
}

namespace {

using CanonicalElement = std::tuple<double, double, double, double, double, double, int>;

std::vector<CanonicalElement> canonical(const Mesh & m)
{
    std::vector<CanonicalElement> out;
    out.reserve(m.num_elements());
    for (ElemId t = 0; t < m.num_elements(); ++t) {
        const auto c = m.corners(t);
        out.emplace_back(c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y, m.element(t).gen);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

bool same_mesh(const Mesh & a, const Mesh & b)
{
    return a.num_elements() == b.num_elements() && canonical(a) == canonical(b);
}

} // namespace nvb
