#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>

namespace oracle {

namespace {

// Smallest k with x * 2^k integral.
int denominator_bits(double x)
{
    int k = 0;
    while (std::ldexp(x, k) != std::floor(std::ldexp(x, k)))
        ++k;
    return k;
}

// Integer coordinates on a common dyadic grid, if they fit comfortably in 64 bits.
std::optional<std::vector<std::array<std::int64_t, 2>>> to_grid(const std::vector<Vertex> & pts)
{
    int k = 0;
    for (const auto & p : pts)
        k = std::max({k, denominator_bits(p.x), denominator_bits(p.y)});
    std::vector<std::array<std::int64_t, 2>> out;
    for (const auto & p : pts) {
        const double x = std::ldexp(p.x, k);
        const double y = std::ldexp(p.y, k);
        if (std::abs(x) > 0x1p60 || std::abs(y) > 0x1p60)
            return std::nullopt;
        out.push_back({static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)});
    }
    return out;
}

__int128 cross(const std::array<std::int64_t, 2> & a, const std::array<std::int64_t, 2> & b, const std::array<std::int64_t, 2> & c)
{
    return static_cast<__int128>(b[0] - a[0]) * (c[1] - a[1]) - static_cast<__int128>(c[0] - a[0]) * (b[1] - a[1]);
}

int orient(const Vertex & a, const Vertex & b, const Vertex & c)
{
    if (auto g = to_grid({a, b, c})) {
        const __int128 v = cross((*g)[0], (*g)[1], (*g)[2]);
        return (v > 0) - (v < 0);
    }
    const long double v = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                          (static_cast<long double>(c.x) - a.x) * (static_cast<long double>(b.y) - a.y);
    return (v > 0) - (v < 0);
}

bool in_closed_triangle(const Vertex & p, const std::array<Vertex, 3> & t)
{
    const int s0 = orient(t[0], t[1], p);
    const int s1 = orient(t[1], t[2], p);
    const int s2 = orient(t[2], t[0], p);
    return (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
}

bool segments_cross_properly(const Vertex & a, const Vertex & b, const Vertex & c, const Vertex & d)
{
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

} // namespace

double shoelace(const std::array<Vertex, 3> & t)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vertex & p = t[static_cast<std::size_t>(i)];
        const Vertex & q = t[static_cast<std::size_t>((i + 1) % 3)];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

std::optional<bool> exact_area_identity(const std::array<Vertex, 3> & t, int gen, const std::array<Vertex, 3> & a)
{
    const auto g = to_grid({t[0], t[1], t[2], a[0], a[1], a[2]});
    if (!g || gen < 0 || gen > 100)
        return std::nullopt;
    __int128 ct = cross((*g)[0], (*g)[1], (*g)[2]);
    __int128 ca = cross((*g)[3], (*g)[4], (*g)[5]);
    ct = ct < 0 ? -ct : ct;
    ca = ca < 0 ? -ca : ca;
    for (int i = 0; i < gen; ++i) {
        if (ca % 2 != 0)
            return false;
        ca /= 2;
    }
    return ct == ca;
}

MinimalClosure brute_force_closure(const Mesh & mesh, const std::set<nvb::EdgeKey> & seed)
{
    std::vector<nvb::EdgeKey> edges;
    for (const auto & e : mesh.elements())
        for (int i = 0; i < 3; ++i)
            edges.emplace_back(e.v[static_cast<std::size_t>(i)], e.v[static_cast<std::size_t>((i + 1) % 3)]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.size() > 20)
        throw std::invalid_argument("too many edges for enumeration");
    auto bit = [&](nvb::EdgeKey k) {
        return std::uint32_t{1} << (std::lower_bound(edges.begin(), edges.end(), k) - edges.begin());
    };

    std::vector<std::pair<std::uint32_t, std::uint32_t>> rules; // (all edges of T, reference edge of T)
    for (const auto & e : mesh.elements()) {
        std::uint32_t all = 0;
        for (int i = 0; i < 3; ++i)
            all |= bit(nvb::EdgeKey(e.v[static_cast<std::size_t>(i)], e.v[static_cast<std::size_t>((i + 1) % 3)]));
        rules.emplace_back(all, bit(nvb::EdgeKey(e.v[0], e.v[1])));
    }
    std::uint32_t seed_mask = 0;
    for (const auto & k : seed)
        seed_mask |= bit(k);

    const std::uint32_t full = edges.size() == 32 ? ~0u : (std::uint32_t{1} << edges.size()) - 1;
    const std::uint32_t free = full & ~seed_mask;
    int best = 64;
    std::uint32_t best_mask = 0;
    int count = 0;
    // All supersets of the seed: iterate over subsets of the free bits.
    for (std::uint32_t sub = free;; sub = (sub - 1) & free) {
        const std::uint32_t m = sub | seed_mask;
        bool closed = true;
        for (const auto & [all, ref] : rules)
            if ((m & all) && !(m & ref)) {
                closed = false;
                break;
            }
        if (closed) {
            const int c = std::popcount(m);
            if (c < best) {
                best = c;
                best_mask = m;
                count = 1;
            } else if (c == best) {
                ++count;
            }
        }
        if (sub == 0)
            break;
    }

    MinimalClosure out;
    out.unique = count == 1;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (best_mask & (std::uint32_t{1} << i))
            out.edges.insert(edges[i]);
    return out;
}

std::vector<int> node_distances(const Mesh & mesh, NodeId j, bool node_chains)
{
    const std::size_t n = mesh.num_elements();
    std::map<std::pair<NodeId, NodeId>, std::vector<ElemId>> by_edge;
    for (ElemId t = 0; t < n; ++t) {
        auto v = mesh.element(t).v;
        std::sort(v.begin(), v.end());
        by_edge[{v[0], v[1]}].push_back(t);
        by_edge[{v[1], v[2]}].push_back(t);
        by_edge[{v[0], v[2]}].push_back(t);
        if (node_chains)
            for (NodeId z : v)
                by_edge[{z, z}].push_back(t);
    }
    std::vector<std::vector<ElemId>> adj(n);
    for (const auto & [key, elems] : by_edge)
        for (ElemId a : elems)
            for (ElemId b : elems)
                if (a != b)
                    adj[a].push_back(b);

    // D(T) = number of elements on the shortest path from the star of z_j to T.
    std::vector<int> d(n, -1);
    std::deque<ElemId> queue;
    for (ElemId t = 0; t < n; ++t) {
        const auto & v = mesh.element(t).v;
        if (v[0] == j || v[1] == j || v[2] == j) {
            d[t] = 1;
            queue.push_back(t);
        }
    }
    while (!queue.empty()) {
        const ElemId t = queue.front();
        queue.pop_front();
        for (ElemId s : adj[t])
            if (d[s] < 0) {
                d[s] = d[t] + 1;
                queue.push_back(s);
            }
    }

    std::vector<int> delta(mesh.num_nodes(), -1);
    for (ElemId t = 0; t < n; ++t)
        for (NodeId k : mesh.element(t).v)
            if (d[t] >= 0 && (delta[k] < 0 || d[t] < delta[k]))
                delta[k] = d[t];
    delta[j] = 0;
    return delta;
}

std::vector<int> brute_force_exponents(const Mesh & mesh, bool node_chains)
{
    std::vector<int> e(mesh.num_nodes());
    for (NodeId j = 0; j < mesh.num_nodes(); ++j) {
        const auto delta = node_distances(mesh, j, node_chains);
        int best = 1 << 30;
        for (ElemId t = 0; t < mesh.num_elements(); ++t) {
            int dt = 1 << 29;
            for (NodeId k : mesh.element(t).v)
                if (delta[k] >= 0)
                    dt = std::min(dt, delta[k]);
            best = std::min(best, 2 * dt - mesh.element(t).gen);
        }
        e[j] = best;
    }
    return e;
}

std::array<std::array<double, 3>, 3> quadrature_mass(const std::array<Vertex, 3> & t)
{
    struct Point
    {
        double l0, l1, l2, w;
    };
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    const Point rule[7] = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225}, {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
                           {a2, b2, b2, w2},                    {b2, a2, b2, w2}, {b2, b2, a2, w2}};
    const double area = std::abs(shoelace(t));
    std::array<std::array<double, 3>, 3> m{};
    for (const auto & p : rule) {
        const double l[3] = {p.l0, p.l1, p.l2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += area * p.w * l[i] * l[j];
    }
    return m;
}

std::vector<ElementKey> canonical(const Mesh & mesh)
{
    std::vector<ElementKey> out;
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto & e = mesh.element(t);
        const auto & a = mesh.vertex(e.v[0]);
        const auto & b = mesh.vertex(e.v[1]);
        const auto & c = mesh.vertex(e.v[2]);
        out.emplace_back(a.x, a.y, b.x, b.y, c.x, c.y, e.gen);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<ElemId, ElemId>> nonconforming_pairs(const Mesh & mesh)
{
    std::vector<std::pair<ElemId, ElemId>> bad;
    const std::size_t n = mesh.num_elements();
    for (ElemId s = 0; s < n; ++s)
        for (ElemId t = s + 1; t < n; ++t) {
            const auto a = mesh.corners(s);
            const auto b = mesh.corners(t);
            bool ok = true;
            // A vertex of one element may touch the other only as a common vertex.
            for (int pass = 0; pass < 2 && ok; ++pass) {
                const auto & p = pass == 0 ? a : b;
                const auto & q = pass == 0 ? b : a;
                for (const Vertex & v : p) {
                    const bool shared = v == q[0] || v == q[1] || v == q[2];
                    if (!shared && in_closed_triangle(v, q))
                        ok = false;
                }
            }
            for (int i = 0; i < 3 && ok; ++i)
                for (int j = 0; j < 3 && ok; ++j)
                    if (segments_cross_properly(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>((i + 1) % 3)],
                                                b[static_cast<std::size_t>(j)], b[static_cast<std::size_t>((j + 1) % 3)]))
                        ok = false;
            // Two shared vertices must span an edge of both; three shared vertices mean a duplicate.
            int shared = 0;
            for (const Vertex & v : a)
                shared += v == b[0] || v == b[1] || v == b[2];
            if (shared == 3)
                ok = false;
            if (!ok)
                bad.emplace_back(s, t);
        }
    return bad;
}

bool strictly_inside(const Vertex & p, const std::array<Vertex, 3> & t)
{
    const int s0 = orient(t[0], t[1], p);
    const int s1 = orient(t[1], t[2], p);
    const int s2 = orient(t[2], t[0], p);
    return (s0 > 0 && s1 > 0 && s2 > 0) || (s0 < 0 && s1 < 0 && s2 < 0);
}

} // namespace oracle
