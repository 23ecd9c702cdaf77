#include <nvb/driver.hpp>

#include <random>

namespace nvb {

MarkingInput make_marking(const Mesh & mesh, const std::set<ElemId> & elements, EdgeMarking edges)
{
    return edges == EdgeMarking::all ? mark_all_edges(mesh, elements) : mark_reference_edges(mesh, elements);
}

RunResult run_refinement(const Mesh & initial, const RunConfig & config)
{
    RunResult run;
    run.meshes.push_back(initial);
    run.trace.initial_elements = initial.num_elements();
    std::mt19937_64 rng(config.seed);
    for (std::size_t l = 0; l < config.steps; ++l) {
        const Mesh & mesh = run.meshes.back();
        std::set<ElemId> marked = select_elements(mesh, config.marking, rng);
        MarkingInput input = make_marking(mesh, marked, config.edges);
        RefineResult step = refine_step(mesh, input, config.dialect, config.policy);

        TraceStep row;
        row.marked = marked.size();
        row.marked_edges = config.dialect == Dialect::refineNVB ? marked.size() : input.edges.size();
        row.closure_iterations = step.plan.iterations;
        row.refined = step.refined.size();
        row.elements_after = step.mesh.num_elements();
        run.trace.steps.push_back(row);

        run.meshes.push_back(step.mesh);
        run.marked.push_back(std::move(marked));
        run.markings.push_back(std::move(input));
        step.mesh = Mesh();
        run.steps.push_back(std::move(step));
    }
    return run;
}

RunConfig lshape_corner_config()
{
    RunConfig c;
    c.dialect = Dialect::refineNVB;
    c.marking = MarkingStrategy::dorfler_synthetic({0.0, 0.0}, 0.5, 1.0);
    c.steps = 25;
    c.seed = 0;
    return c;
}

} // namespace nvb
