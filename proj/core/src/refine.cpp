#include <nvb/refine.hpp>

#include <algorithm>
#include <stdexcept>

namespace nvb {

MarkingInput mark_reference_edges(const Mesh & mesh, const std::set<ElemId> & elements)
{
    MarkingInput m;
    for (const ElemId t : elements) {
        mesh.check_element(t);
        m.elements.insert(t);
        m.edges.insert(local_edge(mesh.element(t), 0));
    }
    return m;
}

MarkingInput mark_all_edges(const Mesh & mesh, const std::set<ElemId> & elements)
{
    MarkingInput m;
    for (const ElemId t : elements) {
        mesh.check_element(t);
        m.elements.insert(t);
        for (int i = 0; i < 3; ++i)
            m.edges.insert(local_edge(mesh.element(t), i));
    }
    return m;
}

std::string to_string(Pattern p)
{
    switch (p) {
    case Pattern::none:
        return "none";
    case Pattern::bisec1:
        return "bisec1";
    case Pattern::bisec2_left:
        return "bisec2_left";
    case Pattern::bisec2_right:
        return "bisec2_right";
    case Pattern::bisec3:
        return "bisec3";
    case Pattern::bisec5:
        return "bisec5";
    case Pattern::red:
        return "red";
    }
    return "?";
}

std::set<EdgeKey> RefinementPlan::closed_edges(const Mesh & mesh) const
{
    std::set<EdgeKey> out;
    for (EdgeId e = 0; e < closed.size(); ++e)
        if (closed[e])
            out.insert(mesh.edge_table()[e].key);
    return out;
}

std::size_t RefinementPlan::num_closed() const
{
    return static_cast<std::size_t>(std::count(closed.begin(), closed.end(), 1));
}

namespace {

Pattern pattern_from_closed(const Mesh & mesh, const std::vector<char> & closed, ElemId t)
{
    const auto & ed = mesh.element_edges(t);
    const bool c0 = closed[ed[0]] != 0;
    const bool c1 = closed[ed[1]] != 0;
    const bool c2 = closed[ed[2]] != 0;
    if (!c0 && !c1 && !c2)
        return Pattern::none;
    if (!c0)
        throw std::invalid_argument("element " + std::to_string(t) + " has a closed edge but an open reference edge");
    if (c1 && c2)
        return Pattern::bisec3;
    if (c1)
        return Pattern::bisec2_left;
    if (c2)
        return Pattern::bisec2_right;
    return Pattern::bisec1;
}

} // namespace

RefinementPlan close_marks(const Mesh & mesh, const MarkingInput & input, ClosureMode mode)
{
    const auto & table = mesh.edge_table();
    RefinementPlan plan;
    plan.closed.assign(table.size(), 0);
    plan.marked = input.elements;
    for (const ElemId t : input.elements)
        mesh.check_element(t);

    std::vector<EdgeId> frontier;
    auto seed = [&](EdgeId e) {
        if (!plan.closed[e]) {
            plan.closed[e] = 1;
            frontier.push_back(e);
        }
    };
    if (mode == ClosureMode::nvb) {
        for (const ElemId t : input.elements)
            seed(mesh.element_edges(t)[0]);
    }
    else {
        for (const EdgeKey & key : input.edges) {
            const auto id = table.find(key);
            if (!id)
                throw std::invalid_argument("marked edge (" + std::to_string(key.a) + "," + std::to_string(key.b) +
                                            ") is not an edge of the mesh");
            const auto & entry = table[*id];
            bool in_marked = false;
            for (std::uint32_t k = 0; k < std::min<std::uint32_t>(entry.count, 2); ++k)
                in_marked = in_marked || input.elements.count(entry.elems[k]) > 0;
            if (!in_marked)
                throw std::invalid_argument("marked edge (" + std::to_string(key.a) + "," + std::to_string(key.b) +
                                            ") lies in no marked element");
            seed(*id);
        }
    }

    while (!frontier.empty()) {
        std::sort(frontier.begin(), frontier.end());
        std::vector<EdgeId> next;
        for (const EdgeId e : frontier) {
            const auto & entry = table[e];
            for (std::uint32_t k = 0; k < std::min<std::uint32_t>(entry.count, 2); ++k) {
                const EdgeId ref = mesh.element_edges(entry.elems[k])[0];
                if (!plan.closed[ref]) {
                    plan.closed[ref] = 1;
                    next.push_back(ref);
                }
            }
        }
        if (!next.empty())
            ++plan.iterations;
        frontier = std::move(next);
    }

    plan.patterns.resize(mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        plan.patterns[t] = pattern_from_closed(mesh, plan.closed, t);
    return plan;
}

std::string PatternPolicy::name() const
{
    switch (kind_) {
    case Kind::always_bisec3:
        return "bisec3";
    case Kind::always_red:
        return "red";
    case Kind::interior_node:
        return "interior-node";
    case Kind::custom:
        return "custom";
    }
    return "?";
}

Pattern PatternPolicy::choose(const Mesh & mesh, ElemId t, bool marked) const
{
    switch (kind_) {
    case Kind::always_bisec3:
        return Pattern::bisec3;
    case Kind::always_red:
        return Pattern::red;
    case Kind::interior_node:
        return marked ? Pattern::bisec5 : Pattern::bisec3;
    case Kind::custom: {
        const Pattern p = rule_(mesh, t, marked);
        if (p != Pattern::bisec3 && p != Pattern::bisec5 && p != Pattern::red)
            throw std::invalid_argument("pattern rule returned " + to_string(p) + " for a fully marked element");
        return p;
    }
    }
    return Pattern::bisec3;
}

void apply_policy(const Mesh & mesh, RefinementPlan & plan, const PatternPolicy & policy)
{
    for (ElemId t = 0; t < plan.patterns.size(); ++t) {
        const Pattern p = plan.patterns[t];
        if (p == Pattern::bisec3 || p == Pattern::bisec5 || p == Pattern::red)
            plan.patterns[t] = policy.choose(mesh, t, plan.marked.count(t) > 0);
    }
}

std::string SonPath::str() const
{
    std::string s;
    for (int i = length - 1; i >= 0; --i)
        s.push_back(((bits >> i) & 1) ? '1' : '0');
    return s;
}

namespace {

// Local labels: 0, 1, 2 = v0, v1, v2; 3 = mid(v0,v1); 4 = mid(v1,v2); 5 = mid(v2,v0);
// 6 = mid(3,2), the bisec5 interior node.
struct SonTemplate
{
    std::array<std::uint8_t, 3> v;
    std::uint8_t dgen;
    SonPath path;
    bool red_son;
};

using Template = std::vector<SonTemplate>;

const Template & son_template(Pattern p)
{
    static const Template bisec1{{{2, 0, 3}, 1, {0b0, 1}, false}, {{1, 2, 3}, 1, {0b1, 1}, false}};
    static const Template bisec2_left{
        {{2, 0, 3}, 1, {0b0, 1}, false}, {{3, 1, 4}, 2, {0b10, 2}, false}, {{2, 3, 4}, 2, {0b11, 2}, false}};
    static const Template bisec2_right{
        {{3, 2, 5}, 2, {0b00, 2}, false}, {{0, 3, 5}, 2, {0b01, 2}, false}, {{1, 2, 3}, 1, {0b1, 1}, false}};
    static const Template bisec3{{{3, 2, 5}, 2, {0b00, 2}, false},
                                 {{0, 3, 5}, 2, {0b01, 2}, false},
                                 {{3, 1, 4}, 2, {0b10, 2}, false},
                                 {{2, 3, 4}, 2, {0b11, 2}, false}};
    static const Template bisec5{{{5, 3, 6}, 3, {0b000, 3}, false}, {{2, 5, 6}, 3, {0b001, 3}, false},
                                 {{0, 3, 5}, 2, {0b01, 2}, false},  {{3, 1, 4}, 2, {0b10, 2}, false},
                                 {{4, 2, 6}, 3, {0b110, 3}, false}, {{3, 4, 6}, 3, {0b111, 3}, false}};
    static const Template red{{{0, 3, 5}, 2, {0b01, 2}, false},
                              {{3, 1, 4}, 2, {0b10, 2}, false},
                              {{5, 4, 2}, 2, {0, 0}, true},
                              {{4, 5, 3}, 2, {0, 0}, true}};
    static const Template none{};
    switch (p) {
    case Pattern::bisec1:
        return bisec1;
    case Pattern::bisec2_left:
        return bisec2_left;
    case Pattern::bisec2_right:
        return bisec2_right;
    case Pattern::bisec3:
        return bisec3;
    case Pattern::bisec5:
        return bisec5;
    case Pattern::red:
        return red;
    case Pattern::none:
        break;
    }
    return none;
}

Vertex midpoint(const Vertex & a, const Vertex & b)
{
    return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5};
}

bool fits(Pattern p, const std::array<bool, 3> & c)
{
    switch (p) {
    case Pattern::none:
        return !c[0] && !c[1] && !c[2];
    case Pattern::bisec1:
        return c[0] && !c[1] && !c[2];
    case Pattern::bisec2_left:
        return c[0] && c[1] && !c[2];
    case Pattern::bisec2_right:
        return c[0] && !c[1] && c[2];
    case Pattern::bisec3:
    case Pattern::bisec5:
    case Pattern::red:
        return c[0] && c[1] && c[2];
    }
    return false;
}

} // namespace

RefineResult split(const Mesh & mesh, const RefinementPlan & plan)
{
    const auto & table = mesh.edge_table();
    if (plan.closed.size() != table.size() || plan.patterns.size() != mesh.num_elements())
        throw std::invalid_argument("refinement plan does not match the mesh");

    RefineResult res;
    res.plan = plan;
    std::vector<Vertex> vertices(mesh.vertices().begin(), mesh.vertices().end());
    res.midpoint.assign(table.size(), kNoNode);
    for (EdgeId e = 0; e < table.size(); ++e) {
        if (!plan.closed[e])
            continue;
        res.midpoint[e] = static_cast<NodeId>(vertices.size());
        vertices.push_back(midpoint(mesh.vertex(table[e].key.a), mesh.vertex(table[e].key.b)));
    }

    res.interior_node.assign(mesh.num_elements(), kNoNode);
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto & ed = mesh.element_edges(t);
        const std::array<bool, 3> c{plan.closed[ed[0]] != 0, plan.closed[ed[1]] != 0, plan.closed[ed[2]] != 0};
        if (!fits(plan.patterns[t], c))
            throw std::invalid_argument("pattern " + to_string(plan.patterns[t]) + " of element " + std::to_string(t) +
                                        " does not match its closed edges");
        if (plan.patterns[t] == Pattern::bisec5) {
            res.interior_node[t] = static_cast<NodeId>(vertices.size());
            vertices.push_back(midpoint(vertices[res.midpoint[ed[0]]], mesh.vertex(mesh.element(t).v[2])));
        }
    }

    std::vector<Element> elements;
    elements.reserve(mesh.num_elements() * 2);
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const Element & el = mesh.element(t);
        const Pattern p = plan.patterns[t];
        if (p == Pattern::none) {
            elements.push_back(el);
            res.parent.push_back(t);
            res.son.push_back(0);
            res.path.push_back({});
            continue;
        }
        res.refined.insert(t);
        const auto & ed = mesh.element_edges(t);
        const std::array<NodeId, 7> label{el.v[0],
                                          el.v[1],
                                          el.v[2],
                                          res.midpoint[ed[0]],
                                          res.midpoint[ed[1]],
                                          res.midpoint[ed[2]],
                                          res.interior_node[t]};
        const auto & tmpl = son_template(p);
        for (std::size_t s = 0; s < tmpl.size(); ++s) {
            Element son;
            for (int k = 0; k < 3; ++k)
                son.v[static_cast<std::size_t>(k)] = label[tmpl[s].v[static_cast<std::size_t>(k)]];
            son.gen = el.gen + tmpl[s].dgen;
            son.ancestor = el.ancestor;
            son.red_son = tmpl[s].red_son;
            elements.push_back(son);
            res.parent.push_back(t);
            res.son.push_back(static_cast<std::uint8_t>(s));
            res.path.push_back(tmpl[s].path);
        }
    }
    res.mesh = Mesh(std::move(vertices), std::move(elements));
    return res;
}

RefineResult split(const Mesh & mesh, RefinementPlan plan, const PatternPolicy & policy)
{
    apply_policy(mesh, plan, policy);
    return split(mesh, plan);
}

std::string to_string(Dialect d)
{
    switch (d) {
    case Dialect::refineNVB:
        return "refineNVB";
    case Dialect::refineNVB3:
        return "refineNVB3";
    case Dialect::refineNVBred:
        return "refineNVBred";
    case Dialect::refine:
        return "refine";
    }
    return "?";
}

RefineResult refine_step(const Mesh & mesh, const MarkingInput & marking, Dialect dialect,
                         const PatternPolicy & policy)
{
    const ClosureMode mode = dialect == Dialect::refineNVB ? ClosureMode::nvb : ClosureMode::mnvb;
    RefinementPlan plan = close_marks(mesh, marking, mode);
    if (dialect == Dialect::refineNVBred || dialect == Dialect::refine) {
        apply_policy(mesh, plan, policy);
        if (dialect == Dialect::refineNVBred)
            for (ElemId t = 0; t < plan.patterns.size(); ++t)
                if (plan.patterns[t] == Pattern::bisec5)
                    throw std::invalid_argument("refineNVBred does not allow bisec5 (element " + std::to_string(t) +
                                                ")");
    }
    return split(mesh, plan);
}

RefineResult refine_nvb(const Mesh & mesh, const std::set<ElemId> & marked)
{
    MarkingInput m;
    m.elements = marked;
    return refine_step(mesh, m, Dialect::refineNVB);
}

Mesh refine_nvb3_two_step(const Mesh & mesh, const MarkingInput & marking)
{
    const RefineResult half = refine_nvb(mesh, marking.elements);
    std::set<ElemId> marked_half;
    for (ElemId s = 0; s < half.mesh.num_elements(); ++s) {
        const ElemId father = half.parent[s];
        if (!marking.elements.count(father))
            continue;
        const auto & v = half.mesh.element(s).v;
        auto has = [&](NodeId n) { return v[0] == n || v[1] == n || v[2] == n; };
        for (const EdgeKey & e : marking.edges)
            if (has(e.a) && has(e.b)) {
                marked_half.insert(s);
                break;
            }
    }
    return refine_nvb(half.mesh, marked_half).mesh;
}

std::vector<ElemId> chain(const Mesh & mesh, ElemId t)
{
    mesh.check_element(t);
    std::vector<ElemId> out{t};
    std::set<ElemId> seen{t};
    for (auto n = reference_neighbor(mesh, t); n && seen.insert(*n).second; n = reference_neighbor(mesh, *n))
        out.push_back(*n);
    return out;
}

Mesh uniform(const Mesh & mesh, UniformKind kind)
{
    std::set<ElemId> all;
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        all.insert(t);
    if (kind == UniformKind::bisec1)
        return refine_nvb(mesh, all).mesh;
    return refine_step(mesh, mark_all_edges(mesh, all), Dialect::refineNVB3).mesh;
}

} // namespace nvb
