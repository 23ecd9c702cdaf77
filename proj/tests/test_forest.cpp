#include "corpus.hpp"
#include "oracles.hpp"

#include <nvb/builtin.hpp>
#include <nvb/errors.hpp>
#include <nvb/forest.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace nvb;

namespace {

Mesh nvb_run(const Mesh & initial, std::uint64_t seed, std::size_t steps, double fraction)
{
    RunConfig c;
    c.dialect = Dialect::refineNVB;
    c.marking = MarkingStrategy::random_fraction(fraction);
    c.steps = steps;
    c.seed = seed;
    return run_refinement(initial, c).meshes.back();
}

Vertex centroid(const std::array<Vertex, 3> & t)
{
    return {(t[0].x + t[1].x + t[2].x) / 3, (t[0].y + t[1].y + t[2].y) / 3};
}

// Generation of the element of `m` containing p strictly inside.
int gen_at(const Mesh & m, const Vertex & p)
{
    for (ElemId t = 0; t < m.num_elements(); ++t)
        if (oracle::strictly_inside(p, m.corners(t)))
            return m.element(t).gen;
    return -1;
}

} // namespace

TEST(Forest, LeavesAreTheMeshElements)
{
    const Mesh initial = lshape6();
    const Mesh m = nvb_run(initial, 1, 6, 0.2);
    const auto forest = BisectionForest::build(initial, m);
    EXPECT_EQ(forest.leaves().size(), m.num_elements());
    ASSERT_EQ(forest.paths().size(), m.num_elements());
    for (ElemId t = 0; t < m.num_elements(); ++t)
        EXPECT_EQ(forest.paths()[t].size(), static_cast<std::size_t>(m.element(t).gen));
    EXPECT_GE(forest.nodes().size(), forest.leaves().size());
}

TEST(Overlay, IdempotentAndInitialIsNeutral)
{
    const Mesh initial = square2();
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Mesh b = nvb_run(initial, s, 5, 0.3);
        EXPECT_EQ(oracle::canonical(overlay(initial, b, b)), oracle::canonical(b));
        EXPECT_EQ(oracle::canonical(overlay(initial, initial, b)), oracle::canonical(b));
        EXPECT_EQ(oracle::canonical(overlay(initial, b, initial)), oracle::canonical(b));
    }
}

TEST(Overlay, CoarsestCommonRefinementOnRandomPairs)
{
    for (std::uint64_t s = 0; s < 12; ++s) {
        const Mesh initial = assign_reference_edges(s % 2 ? lshape6() : square2(), RefEdgePolicy::random, s);
        const Mesh a = nvb_run(initial, 100 + s, 5, 0.25);
        const Mesh b = nvb_run(initial, 200 + s, 5, 0.25);
        const Mesh o = overlay(initial, a, b);
        EXPECT_LE(o.num_elements() + initial.num_elements(), a.num_elements() + b.num_elements());
        EXPECT_TRUE(validate_mesh(o).ok());
        const auto ca = oracle::canonical(a);
        const auto cb = oracle::canonical(b);
        for (const auto & key : oracle::canonical(o))
            EXPECT_TRUE(std::binary_search(ca.begin(), ca.end(), key) || std::binary_search(cb.begin(), cb.end(), key));
        for (ElemId t = 0; t < o.num_elements(); ++t) {
            const Vertex c = centroid(o.corners(t));
            EXPECT_GE(o.element(t).gen, gen_at(a, c));
            EXPECT_GE(o.element(t).gen, gen_at(b, c));
        }
    }
}

TEST(Overlay, RejectsRedAndMismatchedInput)
{
    const Mesh initial = square2();
    const Mesh red = refine_step(initial, mark_all_edges(initial, {0, 1}), Dialect::refine,
                                 PatternPolicy::always_red()).mesh;
    EXPECT_THROW(overlay(initial, red, initial), UnsupportedError);
    const Mesh other = nvb_run(lshape6(), 3, 3, 0.3);
    EXPECT_THROW(overlay(initial, other, initial), std::invalid_argument);
}

TEST(Overlay, AcceptsInteriorNodeRefinements)
{
    const Mesh initial = square2();
    const Mesh b5 = refine_step(initial, mark_all_edges(initial, {0}), Dialect::refine,
                                PatternPolicy::interior_node()).mesh;
    const Mesh b = nvb_run(initial, 4, 4, 0.3);
    const Mesh o = overlay(initial, b5, b);
    EXPECT_TRUE(validate_mesh(o).ok());
    EXPECT_LE(o.num_elements() + initial.num_elements(), b5.num_elements() + b.num_elements());
}
