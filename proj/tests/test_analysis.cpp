#include "corpus.hpp"
#include "oracles.hpp"

#include <nvb/analysis.hpp>
#include <nvb/builtin.hpp>
#include <nvb/distance.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

using namespace nvb;

namespace {

// Max generation gap over element pairs sharing two nodes, by direct enumeration.
int brute_force_max_jump(const Mesh & m)
{
    std::map<EdgeKey, std::vector<int>> gens;
    for (const auto & e : m.elements())
        for (int i = 0; i < 3; ++i)
            gens[local_edge(e, i)].push_back(e.gen);
    int best = 0;
    for (const auto & [edge, g] : gens)
        if (g.size() == 2)
            best = std::max(best, std::abs(g[0] - g[1]));
    return best;
}

Mesh with_gen(const Mesh & m, ElemId t, int delta)
{
    std::vector<Vertex> v(m.vertices().begin(), m.vertices().end());
    std::vector<Element> e(m.elements().begin(), m.elements().end());
    e[t].gen += delta;
    return Mesh(std::move(v), std::move(e));
}

RunResult corner_run(const Mesh & initial, int steps)
{
    RunConfig c;
    c.dialect = Dialect::refineNVB;
    c.marking = MarkingStrategy::corner_ball({0, 0}, 1e-9);
    c.steps = static_cast<std::size_t>(steps);
    return run_refinement(initial, c);
}

} // namespace

TEST(VerifyLevels, UniformMeshHasNoJump)
{
    const Mesh m = uniform(uniform(lshape6(), UniformKind::bisec3), UniformKind::bisec3);
    const auto r = verify_levels(m, lshape6(), true);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.max_level_jump, 0);
}

TEST(VerifyLevels, RepeatedCornerMarkingKeepsJumpAtMostTwo)
{
    const Mesh initial = square2();
    const auto run = corner_run(initial, 10);
    for (const Mesh & m : run.meshes) {
        const auto r = verify_levels(m, initial, false);
        EXPECT_TRUE(r.ok());
        EXPECT_LE(r.max_level_jump, 2);
        EXPECT_EQ(r.max_level_jump, brute_force_max_jump(m));
    }
    EXPECT_GT(run.meshes.back().num_elements(), 20u);
}

TEST(VerifyLevels, BddNvbRunsJumpAtMostOne)
{
    for (const Mesh & initial : {square2(), lshape6()}) {
        ASSERT_TRUE(structure_flags(initial).is_bdd);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            RunConfig c;
            c.marking = MarkingStrategy::random_fraction(0.15);
            c.steps = 8;
            c.seed = seed;
            for (const Mesh & m : run_refinement(initial, c).meshes) {
                EXPECT_LE(brute_force_max_jump(m), 1);
                const auto r = verify_levels(m, initial, true);
                ASSERT_NE(r.find("level_jump_le_1_bdd"), nullptr);
                EXPECT_TRUE(r.find("level_jump_le_1_bdd")->passed);
            }
        }
    }
}

TEST(VerifyLevels, SharperBoundOnNonBddInitialIsNotApplicable)
{
    const Mesh initial = assign_reference_edges(lshape6(), RefEdgePolicy::random, 1);
    if (structure_flags(initial).is_bdd)
        GTEST_SKIP() << "random reference edges happened to be BDD";
    const auto r = verify_levels(initial, initial, true);
    const auto * c = r.find("level_jump_le_1_bdd");
    ASSERT_NE(c, nullptr);
    EXPECT_TRUE(c->passed);
    EXPECT_NE(c->detail.find("not applicable"), std::string::npos);
}

TEST(VerifyLevels, CorruptedGenerationIsReported)
{
    const Mesh initial = square2();
    const Mesh m = corner_run(initial, 4).meshes.back();
    const Mesh bad = with_gen(m, 0, 3);
    const auto r = verify_levels(bad, initial, false);
    EXPECT_FALSE(r.ok());
    const auto * area = r.find("area_generation_identity");
    ASSERT_NE(area, nullptr);
    EXPECT_FALSE(area->passed);
    EXPECT_EQ(area->witnesses.front(), 0u);
    EXPECT_EQ(r.max_level_jump, brute_force_max_jump(bad));
    EXPECT_FALSE(r.find("level_jump_le_2")->passed);
    EXPECT_TRUE(std::find(r.level_jump_witness.begin(), r.level_jump_witness.end(), 0u) != r.level_jump_witness.end());
}

TEST(VerifyLevels, DiameterConstants)
{
    const Mesh initial = lshape6();
    const Mesh m = uniform(initial, UniformKind::bisec3);
    const auto r = verify_levels(m, initial);
    // All elements are half-size copies of unit right triangles: |T| = 1/8, diam = sqrt(2)/2, gen 2.
    EXPECT_NEAR(r.c_diam, std::sqrt(0.125) * 2.0, 1e-12);
    EXPECT_NEAR(r.c_diam_upper, std::sqrt(2.0), 1e-12);
}

TEST(VerifyNeighborRules, FreshAndRandomNvbMeshes)
{
    EXPECT_TRUE(verify_neighbor_rules(square2(), square2()).ok());
    for (const auto & spec : corpus::seeded_specs(40, 8)) {
        if (spec.dialect != Dialect::refineNVB)
            continue;
        const auto run = corpus::run(spec);
        for (const Mesh & m : run.meshes) {
            const auto r = verify_neighbor_rules(m, run.meshes.front());
            EXPECT_TRUE(r.ok()) << spec.name;
        }
    }
}

TEST(VerifyNeighborRules, CorruptedGenerationIsReported)
{
    const Mesh initial = square2();
    const Mesh m = corner_run(initial, 4).meshes.back();
    // Raise an element whose reference neighbor exists so the gap rule sees it.
    ElemId victim = 0;
    while (!reference_neighbor(m, victim))
        ++victim;
    const auto r = verify_neighbor_rules(with_gen(m, *reference_neighbor(m, victim), 3), initial);
    EXPECT_FALSE(r.ok());
    bool has_witness = false;
    for (const auto & c : r.checks)
        has_witness |= !c.passed && !c.witnesses.empty();
    EXPECT_TRUE(has_witness);
}

TEST(ChainBounds, SingleMarkSonsMatchRefinement)
{
    for (const auto & spec : corpus::seeded_specs(16, 4)) {
        if (spec.dialect != Dialect::refineNVB)
            continue;
        const Mesh m = corpus::run(spec).meshes.back();
        for (ElemId t = 0; t < m.num_elements(); t += 3) {
            const auto r = refine_nvb(m, {t});
            std::vector<oracle::ElementKey> expected;
            for (ElemId s = 0; s < r.mesh.num_elements(); ++s)
                if (r.refined.contains(r.parent[s])) {
                    const auto c = r.mesh.corners(s);
                    expected.emplace_back(c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y, r.mesh.element(s).gen);
                }
            std::vector<oracle::ElementKey> got;
            for (const auto & ce : single_mark_sons(m, t))
                got.emplace_back(ce.corners[0].x, ce.corners[0].y, ce.corners[1].x, ce.corners[1].y, ce.corners[2].x,
                                 ce.corners[2].y, ce.gen);
            std::sort(expected.begin(), expected.end());
            std::sort(got.begin(), got.end());
            EXPECT_EQ(got, expected);
        }
    }
}

TEST(ChainBounds, SingleBisectionHasZeroDistance)
{
    // Reference edge on the boundary: the chain is the element itself.
    const Mesh m = assign_reference_edges(square2(), RefEdgePolicy::longest_edge);
    const Mesh t = restrict_mesh(m, {0});
    ASSERT_FALSE(reference_neighbor(t, 0).has_value());
    const auto r = verify_chain_bounds({t}, {{0}});
    EXPECT_EQ(r.checked, 1u);
    EXPECT_EQ(r.max_scaled_distance, 0.0);
    EXPECT_EQ(r.max_gen_overshoot, 1);
}

TEST(ChainBounds, OvershootAtMostTwoOnRandomRuns)
{
    int worst = 0;
    for (const auto & spec : corpus::seeded_specs(40, 8)) {
        if (spec.dialect != Dialect::refineNVB)
            continue;
        const auto run = corpus::run(spec);
        const auto r = verify_chain_bounds(run.meshes, run.marked);
        EXPECT_TRUE(r.ok());
        EXPECT_LE(r.max_gen_overshoot, 2);
        worst = std::max(worst, r.max_gen_overshoot);
    }
    EXPECT_GE(worst, 1);
}

TEST(ChainBounds, ScaledDistanceStaysBoundedOnCornerRun)
{
    const auto run = corner_run(square2(), 20);
    double first_half = 0.0, second_half = 0.0;
    for (std::size_t l = 0; l < 20; ++l) {
        const auto r = verify_chain_bounds({run.meshes[l]}, {run.marked[l]});
        (l < 10 ? first_half : second_half) = std::max(l < 10 ? first_half : second_half, r.max_scaled_distance);
    }
    EXPECT_LE(second_half, 2.0 * std::max(first_half, 1.0));
}

TEST(ClosureAccounting, HandBuiltTrace)
{
    RefinementTrace trace;
    trace.initial_elements = 2;
    trace.steps = {{2, 2, 1, 2, 4}, {1, 1, 2, 3, 9}, {3, 3, 1, 5, 20}};
    const auto ledger = closure_accounting(trace, 3.0);
    ASSERT_EQ(ledger.rows.size(), 4u);
    EXPECT_FALSE(ledger.rows[0].rho.has_value());
    EXPECT_EQ(ledger.rows[1].cum_marked, 2u);
    EXPECT_DOUBLE_EQ(*ledger.rows[1].rho, 1.0);
    EXPECT_DOUBLE_EQ(*ledger.rows[2].rho, 7.0 / 3.0);
    EXPECT_DOUBLE_EQ(*ledger.rows[3].rho, 3.0);
    EXPECT_DOUBLE_EQ(*ledger.max_rho, 3.0);
    EXPECT_TRUE(ledger.lower_bound_holds);
    EXPECT_TRUE(ledger.within_bound);
    EXPECT_FALSE(closure_accounting(trace, 2.5).within_bound);
    trace.steps[1].elements_after = 4;
    EXPECT_FALSE(closure_accounting(trace).lower_bound_holds);
}

TEST(ClosureAccounting, UniformMarkingRatioAtMostFour)
{
    for (Dialect d : {Dialect::refineNVB, Dialect::refineNVB3}) {
        RunConfig c;
        c.dialect = d;
        c.steps = 4;
        const auto ledger = closure_accounting(run_refinement(lshape6(), c).trace);
        EXPECT_TRUE(ledger.lower_bound_holds);
        EXPECT_LE(*ledger.max_rho, 4.0);
    }
}

TEST(ClosureAccounting, LowerBoundOnSeededTraces)
{
    for (const auto & spec : corpus::seeded_specs(22, 6)) {
        const auto run = corpus::run(spec);
        std::size_t cum = 0;
        for (std::size_t l = 0; l < run.trace.steps.size(); ++l) {
            cum += run.marked[l].size();
            EXPECT_LE(cum, run.meshes[l + 1].num_elements() - run.meshes[0].num_elements());
        }
        EXPECT_TRUE(closure_accounting(run.trace).lower_bound_holds);
    }
}

TEST(Lemma21Check, AllOnesAndSharpness)
{
    const auto ones = lemma21_check(1, 1, 1);
    EXPECT_DOUBLE_EQ(ones.lhs, 6.0);
    EXPECT_DOUBLE_EQ(ones.bound, 6.0);
    EXPECT_TRUE(ones.holds);
    const double pi = std::numbers::pi;
    const auto sharp = lemma21_check(pi, 1, pi);
    EXPECT_NEAR(sharp.lhs, 2 + 2 * pi + 2 / pi, 1e-12);
    EXPECT_NEAR(sharp.lhs, sharp.bound, 1e-12);
    EXPECT_TRUE(sharp.holds);
}

TEST(Lemma21Check, RejectsInadmissibleInput)
{
    EXPECT_THROW(lemma21_check(1, 1, 0.5), std::invalid_argument);
    EXPECT_THROW(lemma21_check(3, 1, 2), std::invalid_argument);
    EXPECT_THROW(lemma21_check(1.5, 1.5, 2), std::invalid_argument);
}

TEST(Distance, TrianglePrimitives)
{
    EXPECT_DOUBLE_EQ(point_segment_distance({0, 1}, {-1, 0}, {1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(point_segment_distance({3, 4}, {0, 0}, {0, 0}), 5.0);
    EXPECT_DOUBLE_EQ(segment_distance({0, 0}, {1, 1}, {0, 1}, {1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(point_triangle_distance({0.1, 0.1}, {{{0, 0}, {1, 0}, {0, 1}}}), 0.0);
    EXPECT_DOUBLE_EQ(triangle_distance({{{0, 0}, {1, 0}, {0, 1}}}, {{{2, 0}, {3, 0}, {2, 1}}}), 1.0);
}
