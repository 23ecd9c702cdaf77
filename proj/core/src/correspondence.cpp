#include <nvb/correspondence.hpp>
#include <nvb/errors.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace nvb {

CorrMap CorrMap::identity(const Mesh & mesh)
{
    CorrMap c;
    c.target.reserve(3 * mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        for (int i = 0; i < 3; ++i)
            c.target.push_back({t, i});
    return c;
}

std::size_t CorrMap::image_size(ElemId t) const
{
    std::set<ElemId> s;
    for (int i = 0; i < 3; ++i)
        s.insert((*this)(t, i).elem);
    return s.size();
}

namespace {

constexpr std::int64_t kNoMate = -1;

/// Index of the neighboring incidence pair across the same edge, or kNoMate on the boundary.
std::vector<std::int64_t> mates(const Mesh & m)
{
    std::vector<std::int64_t> out(3 * m.num_elements(), kNoMate);
    for (ElemId t = 0; t < m.num_elements(); ++t)
        for (int i = 0; i < 3; ++i) {
            const auto n = m.neighbor(t, i);
            if (!n)
                continue;
            const EdgeId e = m.element_edges(t)[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j)
                if (m.element_edges(*n)[static_cast<std::size_t>(j)] == e)
                    out[3 * t + static_cast<std::size_t>(i)] = 3 * static_cast<std::int64_t>(*n) + j;
        }
    return out;
}

PairRef unpack(std::size_t idx)
{
    return {static_cast<ElemId>(idx / 3), static_cast<int>(idx % 3)};
}

std::size_t pack(const PairRef & p)
{
    return 3 * static_cast<std::size_t>(p.elem) + static_cast<std::size_t>(p.local);
}

EdgeKey pair_edge(const Mesh & m, const PairRef & p)
{
    return local_edge(m.element(p.elem), p.local);
}

/// T and T' intersect exactly in edge E of both, decided from the node sets.
bool neighboring_pairs(const Mesh & m, const PairRef & p, const PairRef & q)
{
    if (p.elem == q.elem)
        return false;
    const EdgeKey e = pair_edge(m, p);
    if (!(e == pair_edge(m, q)))
        return false;
    const auto & a = m.element(p.elem).v;
    const auto & b = m.element(q.elem).v;
    int shared = 0;
    for (const NodeId x : a)
        shared += std::count(b.begin(), b.end(), x) > 0;
    return shared == 2;
}

struct Failure
{
    CorrReport & report;

    bool operator()(const std::string & property, const std::string & detail, std::vector<PairRef> witnesses)
    {
        if (report.ok) {
            report.ok = false;
            report.property = property;
            report.detail = detail;
            report.witnesses = std::move(witnesses);
        }
        return false;
    }
};

std::string pair_str(const PairRef & p)
{
    return "(" + std::to_string(p.elem) + "," + std::to_string(p.local) + ")";
}

} // namespace

CorrReport verify_corr(const CorrMap & corr, const Mesh & a, const Mesh & b, bool exhaustive)
{
    CorrReport r;
    Failure fail{r};
    const std::size_t na = 3 * a.num_elements();
    const std::size_t nb = 3 * b.num_elements();
    if (corr.target.size() != na || na != nb) {
        fail("bijection", "pair counts differ: " + std::to_string(na) + " vs " + std::to_string(nb), {});
        return r;
    }
    std::vector<std::int64_t> inverse(nb, -1);
    for (std::size_t p = 0; p < na; ++p) {
        const PairRef & q = corr.target[p];
        if (q.elem >= b.num_elements() || q.local < 0 || q.local > 2) {
            fail("bijection", "image of " + pair_str(unpack(p)) + " is not a pair of the target mesh", {unpack(p)});
            return r;
        }
        auto & slot = inverse[pack(q)];
        if (slot >= 0) {
            fail("bijection", "pairs " + pair_str(unpack(static_cast<std::size_t>(slot))) + " and " + pair_str(unpack(p)) +
                                  " have the same image",
                 {unpack(static_cast<std::size_t>(slot)), unpack(p)});
            return r;
        }
        slot = static_cast<std::int64_t>(p);
    }

    for (ElemId t = 0; t < a.num_elements(); ++t)
        r.max_corr_size = std::max(r.max_corr_size, corr.image_size(t));

    // (i) generation and area
    for (std::size_t p = 0; p < na; ++p) {
        const PairRef pa = unpack(p);
        const PairRef pb = corr.target[p];
        const Element & ea = a.element(pa.elem);
        const Element & eb = b.element(pb.elem);
        if (ea.gen != eb.gen)
            fail("generation_area", "generation " + std::to_string(ea.gen) + " vs " + std::to_string(eb.gen), {pa, pb});
        const double ratio = geometry(a, pa.elem).area / geometry(b, pb.elem).area;
        if (!(ratio >= 0.25 && ratio <= 4.0))
            fail("generation_area", "area ratio " + std::to_string(ratio), {pa, pb});
    }

    // (iii) reference edges
    for (std::size_t p = 0; p < na; ++p) {
        const PairRef pa = unpack(p);
        const PairRef pb = corr.target[p];
        if ((pa.local == 0) != (pb.local == 0))
            fail("reference_edges", pair_str(pa) + " and its image disagree on being a reference edge", {pa, pb});
    }

    // (vii) images of an element share the image of its reference edge
    for (ElemId t = 0; t < a.num_elements(); ++t) {
        const EdgeKey ref_img = pair_edge(b, corr(t, 0));
        for (int i = 0; i < 3; ++i) {
            const ElemId s = corr(t, i).elem;
            if (!(local_edge(b.element(s), 0) == ref_img))
                fail("reference_images", "image element " + std::to_string(s) + " of " + pair_str({t, i}) +
                                             " does not have the image of the reference edge as reference edge",
                     {{t, i}, corr(t, i)});
        }
    }
    for (ElemId s = 0; s < b.num_elements(); ++s) {
        const EdgeKey ref_pre = pair_edge(a, unpack(static_cast<std::size_t>(inverse[3 * s])));
        for (int i = 0; i < 3; ++i) {
            const PairRef pre = unpack(static_cast<std::size_t>(inverse[3 * s + static_cast<std::size_t>(i)]));
            if (!(local_edge(a.element(pre.elem), 0) == ref_pre))
                fail("reference_images", "preimage element " + std::to_string(pre.elem) + " of (" + std::to_string(s) + "," +
                                             std::to_string(i) + ") does not have the preimage reference edge as reference edge",
                     {pre, {s, i}});
        }
    }

    // (ii), (iv), (v), (vi) on neighboring pairs
    auto check_neighbors = [&](const PairRef & p, const PairRef & q, bool nb_a, bool nb_b) {
        const PairRef pt = corr.target[pack(p)];
        const PairRef qt = corr.target[pack(q)];
        if (nb_a != nb_b) {
            fail("neighbors", pair_str(p) + ", " + pair_str(q) + " neighboring in one mesh only", {p, q, pt, qt});
            return;
        }
        const bool ref_nb_a = nb_a && p.local == 0 && reference_neighbor(a, p.elem) == q.elem;
        const bool ref_nb_b = nb_b && pt.local == 0 && reference_neighbor(b, pt.elem) == qt.elem;
        if (ref_nb_a != ref_nb_b)
            fail("reference_neighbors", pair_str(p) + ", " + pair_str(q) + " reference neighbors in one mesh only", {p, q, pt, qt});
        if (!nb_a)
            return;
        const bool comp_a = classify_pair(a, p.elem, q.elem) == PairRelation::compatibly_divisible;
        const bool comp_b = classify_pair(b, pt.elem, qt.elem) == PairRelation::compatibly_divisible;
        if (comp_a != comp_b)
            fail("compatibility", pair_str(p) + ", " + pair_str(q) + " compatibly divisible in one mesh only", {p, q, pt, qt});
        const bool anc_a = a.element(p.elem).ancestor == a.element(q.elem).ancestor;
        const bool anc_b = b.element(pt.elem).ancestor == b.element(qt.elem).ancestor;
        if (anc_a != anc_b)
            fail("ancestry", pair_str(p) + ", " + pair_str(q) + " share an ancestor in one mesh only", {p, q, pt, qt});
    };

    if (exhaustive) {
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < na; ++j) {
                if (i == j)
                    continue;
                const PairRef p = unpack(i);
                const PairRef q = unpack(j);
                check_neighbors(p, q, neighboring_pairs(a, p, q), neighboring_pairs(b, corr.target[i], corr.target[j]));
            }
    }
    else {
        const auto ma = mates(a);
        const auto mb = mates(b);
        for (std::size_t i = 0; i < na; ++i) {
            const PairRef p = unpack(i);
            const std::size_t it = pack(corr.target[i]);
            if (ma[i] == kNoMate) {
                if (mb[it] != kNoMate)
                    fail("neighbors", "boundary pair " + pair_str(p) + " mapped to an interior pair", {p, corr.target[i]});
                continue;
            }
            const PairRef q = unpack(static_cast<std::size_t>(ma[i]));
            const bool nb_b = mb[it] != kNoMate && static_cast<std::size_t>(mb[it]) == pack(corr.target[pack(q)]);
            check_neighbors(p, q, true, nb_b);
        }
    }
    return r;
}

CorrespondenceBuilder::CorrespondenceBuilder(const Mesh & initial)
    : mesh_(initial), tilde_(initial), corr_(CorrMap::identity(initial)), psi_(initial.num_nodes())
{
    for (NodeId n = 0; n < psi_.size(); ++n)
        psi_[n] = n;
}

const CorrStepInfo & CorrespondenceBuilder::step(const MarkingInput & marking, const PatternPolicy & policy, bool exhaustive)
{
    CorrStepInfo info;
    info.marked = marking.elements.size();

    RefinementPlan plan = close_marks(mesh_, marking, ClosureMode::mnvb);
    apply_policy(mesh_, plan, policy);
    for (ElemId t = 0; t < plan.patterns.size(); ++t) {
        if (plan.patterns[t] == Pattern::bisec5)
            throw UnsupportedError("bisec5 refinement of element " + std::to_string(t) + " has no bisec3 counterpart");
        info.red_refined += plan.patterns[t] == Pattern::red;
    }
    RefineResult res = split(mesh_, plan);

    MarkingInput transferred;
    for (const ElemId t : marking.elements)
        for (int i = 0; i < 3; ++i)
            if (marking.edges.count(local_edge(mesh_.element(t), i))) {
                const PairRef img = corr_(t, i);
                transferred.elements.insert(img.elem);
                transferred.edges.insert(pair_edge(tilde_, img));
            }
    info.marked_tilde = transferred.elements.size();
    RefineResult rt = refine_step(tilde_, transferred, Dialect::refineNVB3);

    auto construction_failure = [&](const std::string & detail) {
        info.report.ok = false;
        info.report.property = "construction";
        info.report.detail = detail;
        history_.push_back(info);
        throw std::logic_error("correspondence construction failed: " + detail);
    };

    // Edge images and closure comparison.
    const auto & table = mesh_.edge_table();
    std::vector<EdgeId> edge_image(table.size());
    std::size_t closed_a = 0;
    for (EdgeId e = 0; e < table.size(); ++e) {
        const ElemId t = table[e].elems[0];
        int local = 0;
        while (mesh_.element_edges(t)[static_cast<std::size_t>(local)] != e)
            ++local;
        const PairRef img = corr_(t, local);
        edge_image[e] = tilde_.element_edges(img.elem)[static_cast<std::size_t>(img.local)];
        closed_a += plan.closed[e] != 0;
        if ((plan.closed[e] != 0) != (rt.plan.closed[edge_image[e]] != 0))
            info.closure_matches = false;
    }
    if (closed_a != rt.plan.num_closed())
        info.closure_matches = false;
    if (!info.closure_matches)
        construction_failure("transferred closure differs from the closure of the bisec3 step");

    std::vector<NodeId> psi(res.mesh.num_nodes(), kNoNode);
    std::copy(psi_.begin(), psi_.end(), psi.begin());
    for (EdgeId e = 0; e < table.size(); ++e)
        if (plan.closed[e])
            psi[res.midpoint[e]] = rt.midpoint[edge_image[e]];
    for (NodeId n = 0; n < psi.size(); ++n)
        if (psi[n] == kNoNode || !(res.mesh.vertex(n) == rt.mesh.vertex(psi[n])))
            construction_failure("node " + std::to_string(n) + " has no counterpart at the same position");

    using Triple = std::array<NodeId, 3>;
    std::map<Triple, ElemId> tilde_index;
    for (ElemId s = 0; s < rt.mesh.num_elements(); ++s)
        tilde_index.emplace(rt.mesh.element(s).v, s);
    std::vector<char> used(rt.mesh.num_elements(), 0);
    auto mapped = [&](const Triple & v) { return Triple{psi[v[0]], psi[v[1]], psi[v[2]]}; };
    auto take = [&](const Triple & key) -> std::optional<ElemId> {
        const auto it = tilde_index.find(key);
        if (it == tilde_index.end() || used[it->second])
            return std::nullopt;
        used[it->second] = 1;
        return it->second;
    };

    CorrMap next;
    next.target.assign(3 * res.mesh.num_elements(), {});
    std::vector<char> done(res.mesh.num_elements(), 0);
    for (ElemId t = 0; t < res.mesh.num_elements(); ++t) {
        if (const auto s = take(mapped(res.mesh.element(t).v))) {
            for (int i = 0; i < 3; ++i)
                next.target[3 * t + static_cast<std::size_t>(i)] = {*s, i};
            done[t] = 1;
        }
    }
    std::size_t quads = 0;
    for (ElemId t = 0; t < res.mesh.num_elements(); ++t) {
        if (done[t])
            continue;
        // t = (P,Q,R) and its reference neighbor (Q,P,S) form a red pair.
        const auto nb = reference_neighbor(res.mesh, t);
        if (!nb || done[*nb])
            construction_failure("element " + std::to_string(t) + " has no counterpart and no red partner");
        const Triple & A = res.mesh.element(t).v;
        const Triple & B = res.mesh.element(*nb).v;
        if (B[0] != A[1] || B[1] != A[0])
            construction_failure("elements " + std::to_string(t) + " and " + std::to_string(*nb) + " do not form a red pair");
        const NodeId P = psi[A[0]], Q = psi[A[1]], R = psi[A[2]], S = psi[B[2]];
        const auto g00 = take({S, R, P});
        const auto g11 = take({R, S, Q});
        if (!g00 || !g11)
            construction_failure("red pair " + std::to_string(t) + ", " + std::to_string(*nb) +
                                 " has no bisection counterpart");
        const ElemId b = *nb;
        next.target[3 * t + 0] = {*g00, 0};
        next.target[3 * t + 1] = {*g11, 2};
        next.target[3 * t + 2] = {*g00, 1};
        next.target[3 * b + 0] = {*g11, 0};
        next.target[3 * b + 1] = {*g00, 2};
        next.target[3 * b + 2] = {*g11, 1};
        done[t] = done[b] = 1;
        ++quads;
    }

    mesh_ = std::move(res.mesh);
    tilde_ = std::move(rt.mesh);
    corr_ = std::move(next);
    psi_ = std::move(psi);
    info.elements = mesh_.num_elements();
    info.elements_tilde = tilde_.num_elements();
    info.report = verify_corr(corr_, mesh_, tilde_, exhaustive);
    info.report.red_quads = quads;
    history_.push_back(info);
    return history_.back();
}

} // namespace nvb
