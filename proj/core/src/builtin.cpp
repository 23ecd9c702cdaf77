#include <nvb/builtin.hpp>

#include <random>
#include <stdexcept>

namespace nvb {

Mesh square2()
{
    std::vector<Vertex> v{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    std::vector<Element> e(2);
    e[0].v = {2, 0, 1};
    e[1].v = {0, 2, 3};
    e[0].ancestor = 0;
    e[1].ancestor = 1;
    return Mesh(std::move(v), std::move(e));
}

Mesh lshape6()
{
    std::vector<Vertex> v{{-1.0, -1.0}, {0.0, -1.0}, {0.0, 0.0}, {1.0, 0.0},
                          {1.0, 1.0},   {0.0, 1.0},  {-1.0, 1.0}, {-1.0, 0.0}};
    const std::array<std::array<NodeId, 3>, 6> triples{{{2, 0, 1}, {0, 2, 7}, {6, 2, 5}, {2, 6, 7}, {4, 2, 3}, {2, 4, 5}}};
    std::vector<Element> e(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
        e[i].v = triples[i];
        e[i].ancestor = static_cast<ElemId>(i);
    }
    return Mesh(std::move(v), std::move(e));
}

std::optional<Mesh> builtin_mesh(const std::string & name)
{
    if (name == "square2")
        return square2();
    if (name == "lshape6")
        return lshape6();
    return std::nullopt;
}

namespace {

double squared_length(const Vertex & a, const Vertex & b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::array<NodeId, 3> rotate(const std::array<NodeId, 3> & v, int r)
{
    return {v[static_cast<std::size_t>(r % 3)], v[static_cast<std::size_t>((r + 1) % 3)],
            v[static_cast<std::size_t>((r + 2) % 3)]};
}

} // namespace

Mesh assign_reference_edges(const Mesh & mesh, RefEdgePolicy policy, std::uint64_t seed)
{
    std::vector<Element> elements(mesh.elements().begin(), mesh.elements().end());
    for (const auto & e : elements)
        if (e.gen != 0)
            throw std::invalid_argument("reference edges can only be assigned on an initial mesh");
    if (policy == RefEdgePolicy::as_given)
        return mesh;

    std::mt19937_64 rng(seed);
    for (auto & e : elements) {
        int best = 0;
        if (policy == RefEdgePolicy::longest_edge) {
            double best_len = -1.0;
            for (int r = 0; r < 3; ++r) {
                const auto t = rotate(e.v, r);
                const double len = squared_length(mesh.vertex(t[0]), mesh.vertex(t[1]));
                if (len > best_len || (len == best_len && t[2] < rotate(e.v, best)[2])) {
                    best_len = len;
                    best = r;
                }
            }
        }
        else {
            best = static_cast<int>(rng() % 3);
        }
        e.v = rotate(e.v, best);
    }
    return Mesh(std::vector<Vertex>(mesh.vertices().begin(), mesh.vertices().end()), std::move(elements));
}

} // namespace nvb
