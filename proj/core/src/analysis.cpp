#include <nvb/analysis.hpp>
#include <nvb/distance.hpp>
#include <nvb/exact.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nvb {

bool Prop9Report::ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult & c) { return c.passed; });
}

const CheckResult * Prop9Report::find(const std::string & name) const
{
    for (const auto & c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

Prop9Report verify_levels(const Mesh & mesh, const Mesh & initial, bool nvb_from_bdd)
{
    Prop9Report r;

    CheckResult area{"area_generation_identity", true, {}, {}};
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0.0;
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const Element & e = mesh.element(t);
        if (e.ancestor >= initial.num_elements()) {
            area.passed = false;
            area.witnesses.push_back(t);
            if (area.detail.empty())
                area.detail = "element " + std::to_string(t) + " has no ancestor in the initial mesh";
            continue;
        }
        const auto match = exact::area_matches_generation(mesh.corners(t), e.gen, initial.corners(e.ancestor));
        if (!match) {
            ++r.area_identity_undecided;
            area.passed = false;
        }
        else if (!*match) {
            area.passed = false;
            if (area.witnesses.size() < 8)
                area.witnesses.push_back(t);
            if (area.detail.empty())
                area.detail = "element " + std::to_string(t) + " area differs from ancestor area * 2^-" + std::to_string(e.gen);
        }
        const auto g = geometry(mesh, t);
        const double scale = std::exp2(0.5 * e.gen);
        cmin = std::min(cmin, std::sqrt(g.area) * scale);
        cmax = std::max(cmax, g.diameter * scale);
    }
    if (r.area_identity_undecided > 0 && area.detail.empty())
        area.detail = std::to_string(r.area_identity_undecided) + " elements not decidable in exact arithmetic";
    r.c_diam = mesh.num_elements() ? cmin : 0.0;
    r.c_diam_upper = cmax;
    r.checks.push_back(area);

    CheckResult total{"total_area", true, {}, {}};
    const double a0 = total_area(initial);
    const double a1 = total_area(mesh);
    if (std::abs(a1 - a0) > 1e-12 * std::abs(a0)) {
        total.passed = false;
        total.detail = "total area changed from " + std::to_string(a0) + " to " + std::to_string(a1);
    }
    r.checks.push_back(total);

    for (const auto & entry : mesh.edge_table().entries()) {
        if (entry.count != 2)
            continue;
        const int jump = std::abs(mesh.element(entry.elems[0]).gen - mesh.element(entry.elems[1]).gen);
        if (r.level_jump_witness.empty() || jump > r.max_level_jump) {
            r.max_level_jump = jump;
            r.level_jump_witness = {entry.elems[0], entry.elems[1]};
        }
    }
    CheckResult jump2{"level_jump_le_2", r.max_level_jump <= 2, {}, {}};
    if (!jump2.passed) {
        jump2.detail = "level jump " + std::to_string(r.max_level_jump);
        jump2.witnesses = r.level_jump_witness;
    }
    r.checks.push_back(jump2);

    if (nvb_from_bdd) {
        CheckResult jump1{"level_jump_le_1_bdd", true, {}, {}};
        if (!structure_flags(initial).is_bdd) {
            jump1.detail = "not applicable: initial mesh is not BDD";
        }
        else if (r.max_level_jump > 1) {
            jump1.passed = false;
            jump1.detail = "level jump " + std::to_string(r.max_level_jump) + " on a refineNVB mesh of a BDD initial mesh";
            jump1.witnesses = r.level_jump_witness;
        }
        r.checks.push_back(jump1);
    }
    return r;
}

namespace {

bool on_segment(const Vertex & p, const Vertex & a, const Vertex & b)
{
    if (exact::orientation(a, b, p) != 0)
        return false;
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

void add_witness(CheckResult & c, std::initializer_list<ElemId> ids, const std::string & detail)
{
    if (c.passed)
        c.detail = detail;
    c.passed = false;
    if (c.witnesses.size() < 16)
        c.witnesses.insert(c.witnesses.end(), ids);
}

} // namespace

std::size_t max_equal_level_chain(const Mesh & mesh)
{
    std::size_t best = 0;
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const int g = mesh.element(t).gen;
        std::set<ElemId> seen{t};
        std::size_t len = 1;
        for (auto n = reference_neighbor(mesh, t); n && mesh.element(*n).gen == g && seen.insert(*n).second;
             n = reference_neighbor(mesh, *n))
            ++len;
        best = std::max(best, len);
    }
    return best;
}

Prop9Report verify_neighbor_rules(const Mesh & mesh, const Mesh & initial)
{
    Prop9Report r;
    CheckResult finer{"finer_reference_neighbor", true, {}, {}};
    CheckResult same_ancestor{"equal_level_same_ancestor_compatible", true, {}, {}};
    CheckResult compatible_ancestors{"equal_level_compatible_ancestors", true, {}, {}};
    CheckResult initial_edge{"incompatible_equal_level_on_initial_edge", true, {}, {}};

    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const Element & e = mesh.element(t);
        const auto n = reference_neighbor(mesh, t);
        if (!n)
            continue;
        const Element & en = mesh.element(*n);
        const bool compatible = classify_pair(mesh, t, *n) == PairRelation::compatibly_divisible;
        if (en.gen > e.gen && (!compatible || en.gen != e.gen + 1))
            add_witness(finer, {t, *n},
                        "N(" + std::to_string(t) + ") = " + std::to_string(*n) + " has gen " + std::to_string(en.gen) +
                            " vs " + std::to_string(e.gen) + (compatible ? "" : ", not compatibly divisible"));
        if (en.gen == e.gen && !compatible) {
            if (e.ancestor >= initial.num_elements()) {
                add_witness(initial_edge, {t}, "element " + std::to_string(t) + " has no ancestor in the initial mesh");
                continue;
            }
            const auto anc = initial.corners(e.ancestor);
            const Vertex & p = mesh.vertex(e.v[0]);
            const Vertex & q = mesh.vertex(e.v[1]);
            bool inside = false;
            for (int i = 0; i < 3 && !inside; ++i) {
                const auto & a = anc[static_cast<std::size_t>(i)];
                const auto & b = anc[static_cast<std::size_t>((i + 1) % 3)];
                inside = on_segment(p, a, b) && on_segment(q, a, b);
            }
            if (!inside)
                add_witness(initial_edge, {t, *n},
                            "reference edge of " + std::to_string(t) + " is shared incompatibly at equal level inside an initial element");
        }
    }

    for (const auto & entry : mesh.edge_table().entries()) {
        if (entry.count != 2)
            continue;
        const ElemId t1 = entry.elems[0];
        const ElemId t2 = entry.elems[1];
        const Element & e1 = mesh.element(t1);
        const Element & e2 = mesh.element(t2);
        if (e1.gen != e2.gen)
            continue;
        const bool compatible = classify_pair(mesh, t1, t2) == PairRelation::compatibly_divisible;
        if (compatible)
            continue;
        if (e1.ancestor == e2.ancestor) {
            add_witness(same_ancestor, {t1, t2},
                        "elements " + std::to_string(t1) + " and " + std::to_string(t2) +
                            " share ancestor and level but are not compatibly divisible");
        }
        else if (e1.ancestor < initial.num_elements() && e2.ancestor < initial.num_elements() &&
                 classify_pair(initial, e1.ancestor, e2.ancestor) == PairRelation::compatibly_divisible) {
            add_witness(compatible_ancestors, {t1, t2},
                        "elements " + std::to_string(t1) + " and " + std::to_string(t2) +
                            " have compatibly divisible ancestors and equal level but are not compatibly divisible");
        }
    }

    r.checks = {finer, same_ancestor, compatible_ancestors, initial_edge};
    r.max_equal_level_chain = max_equal_level_chain(mesh);
    return r;
}

namespace {

using Tri = std::array<Vertex, 3>;

Vertex mid(const Vertex & a, const Vertex & b)
{
    return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5};
}

std::array<Tri, 2> bisect(const Tri & t)
{
    const Vertex p = mid(t[0], t[1]);
    return {Tri{t[2], t[0], p}, Tri{t[1], t[2], p}};
}

} // namespace

std::vector<CreatedElement> single_mark_sons(const Mesh & mesh, ElemId t)
{
    const auto c = chain(mesh, t);
    std::set<EdgeId> closed;
    for (const ElemId s : c)
        closed.insert(mesh.element_edges(s)[0]);

    std::set<ElemId> touched;
    for (const EdgeId e : closed) {
        const auto & entry = mesh.edge_table()[e];
        for (std::uint32_t k = 0; k < std::min<std::uint32_t>(entry.count, 2); ++k)
            touched.insert(entry.elems[k]);
    }

    std::vector<CreatedElement> out;
    for (const ElemId s : touched) {
        const auto & ed = mesh.element_edges(s);
        const bool c1 = closed.count(ed[1]) > 0;
        const bool c2 = closed.count(ed[2]) > 0;
        const int g = mesh.element(s).gen;
        const auto sons = bisect(mesh.corners(s));
        // Left son (v2, v0, p) carries edge (v2, v0); right son (v1, v2, p) carries (v1, v2).
        if (c2) {
            for (const auto & gs : bisect(sons[0]))
                out.push_back({gs, g + 2});
        }
        else {
            out.push_back({sons[0], g + 1});
        }
        if (c1) {
            for (const auto & gs : bisect(sons[1]))
                out.push_back({gs, g + 2});
        }
        else {
            out.push_back({sons[1], g + 1});
        }
    }
    return out;
}

ChainBoundsReport verify_chain_bounds(const std::vector<Mesh> & meshes, const std::vector<std::set<ElemId>> & markings)
{
    if (markings.size() > meshes.size())
        throw std::invalid_argument("more markings than meshes");
    ChainBoundsReport r;
    for (std::size_t l = 0; l < markings.size(); ++l) {
        const Mesh & mesh = meshes[l];
        r.max_equal_level_chain = std::max(r.max_equal_level_chain, max_equal_level_chain(mesh));
        for (const ElemId t : markings[l]) {
            mesh.check_element(t);
            ++r.checked;
            r.max_chain_length = std::max(r.max_chain_length, chain(mesh, t).size());
            const int g = mesh.element(t).gen;
            const auto tc = mesh.corners(t);
            for (const auto & son : single_mark_sons(mesh, t)) {
                const int over = son.gen - g;
                r.max_gen_overshoot = std::max(r.max_gen_overshoot, over);
                if (over > 2) {
                    if (r.overshoot_violations == 0)
                        r.witness = {static_cast<ElemId>(l), t};
                    ++r.overshoot_violations;
                }
                const double d = triangle_distance(tc, son.corners) * std::exp2(0.5 * son.gen);
                r.max_scaled_distance = std::max(r.max_scaled_distance, d);
            }
        }
    }
    return r;
}

ClosureLedger closure_accounting(const RefinementTrace & trace, std::optional<double> rho_bound)
{
    ClosureLedger ledger;
    ledger.rho_bound = rho_bound;
    std::size_t cum = 0;
    std::size_t elements = trace.initial_elements;
    for (std::size_t l = 0; l <= trace.steps.size(); ++l) {
        LedgerRow row;
        row.step = l;
        row.marked = l < trace.steps.size() ? trace.steps[l].marked : 0;
        row.elements = elements;
        row.cum_marked = cum;
        const std::size_t growth = elements - trace.initial_elements;
        row.lower_bound_holds = elements >= trace.initial_elements && cum <= growth;
        if (cum > 0) {
            row.rho = static_cast<double>(growth) / static_cast<double>(cum);
            ledger.max_rho = std::max(ledger.max_rho.value_or(0.0), *row.rho);
            if (rho_bound && *row.rho > *rho_bound)
                ledger.within_bound = false;
        }
        ledger.lower_bound_holds = ledger.lower_bound_holds && row.lower_bound_holds;
        ledger.rows.push_back(row);
        if (l < trace.steps.size()) {
            cum += trace.steps[l].marked;
            elements = trace.steps[l].elements_after;
        }
    }
    return ledger;
}

Lemma21Result lemma21_check(double a, double b, double M)
{
    if (!(M >= 1.0) || !std::isfinite(M))
        throw std::invalid_argument("M must be a finite number >= 1");
    const double lo = 1.0 / M;
    const double c = a * b;
    for (const double x : {a, b, c})
        if (!(x >= lo && x <= M))
            throw std::invalid_argument("a, b and ab must lie in [1/M, M]");
    Lemma21Result r;
    r.lhs = a + b + c + 1.0 / a + 1.0 / b + 1.0 / c;
    r.bound = 2.0 * (1.0 + M + 1.0 / M);
    r.holds = r.lhs <= r.bound + 1e-12;
    return r;
}

} // namespace nvb
