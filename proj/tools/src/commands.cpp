#include <nvb_cli/commands.hpp>

#include <nvb/errors.hpp>
#include <nvb/mesh_io.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace nvb::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Parsing helpers

Mesh load_mesh(const std::string & spec, bool require_conforming)
{
    if (auto m = builtin_mesh(spec))
        return *m;
    const fs::path path(spec);
    if (!fs::is_regular_file(path))
        throw UsageError("unknown mesh '" + spec + "' (expected square2, lshape6 or an .nvbm file)");
    return read_nvbm(path, require_conforming);
}

RefEdgePolicy parse_ref_edges(const std::string & s)
{
    if (s == "as-given")
        return RefEdgePolicy::as_given;
    if (s == "longest-edge")
        return RefEdgePolicy::longest_edge;
    if (s == "random")
        return RefEdgePolicy::random;
    throw UsageError("unknown reference-edge policy '" + s + "'");
}

Dialect parse_dialect(const std::string & s)
{
    for (Dialect d : {Dialect::refineNVB, Dialect::refineNVB3, Dialect::refineNVBred, Dialect::refine})
        if (s == to_string(d))
            return d;
    throw UsageError("unknown dialect '" + s + "'");
}

PatternPolicy parse_policy(const std::string & s)
{
    for (const PatternPolicy & p : {PatternPolicy::always_bisec3(), PatternPolicy::always_red(), PatternPolicy::interior_node()})
        if (s == p.name())
            return p;
    throw UsageError("unknown pattern policy '" + s + "'");
}

EdgeMarking parse_edge_marking(const std::string & s)
{
    if (s == "reference")
        return EdgeMarking::reference;
    if (s == "all")
        return EdgeMarking::all;
    throw UsageError("unknown edge marking '" + s + "'");
}

Format parse_format(const std::string & s)
{
    if (s == "csv")
        return Format::csv;
    if (s == "json")
        return Format::json;
    throw UsageError("unknown format '" + s + "'");
}

ChainAdjacency parse_chains(const std::string & s)
{
    if (s == "edge")
        return ChainAdjacency::edge;
    if (s == "node")
        return ChainAdjacency::node;
    throw UsageError("unknown chain adjacency '" + s + "'");
}

MarkingStrategy MarkingOptions::build() const
{
    if (point.size() != 2)
        throw UsageError("marking point needs two coordinates");
    const Vertex x0{point[0], point[1]};
    try {
        if (kind == "all")
            return MarkingStrategy::all_elements();
        if (kind == "random")
            return MarkingStrategy::random_fraction(fraction);
        if (kind == "corner")
            return MarkingStrategy::corner_ball(x0, radius);
        if (kind == "dorfler")
            return MarkingStrategy::dorfler_synthetic(x0, theta, alpha);
    } catch (const std::invalid_argument & e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown marking strategy '" + kind + "'");
}

namespace {

Mesh initial_mesh(const std::string & spec, const std::string & ref_edges, std::uint64_t seed)
{
    const Mesh mesh = load_mesh(spec);
    const RefEdgePolicy policy = parse_ref_edges(ref_edges);
    return policy == RefEdgePolicy::as_given ? mesh : assign_reference_edges(mesh, policy, seed);
}

std::string stem_of(const std::string & spec)
{
    return builtin_mesh(spec) ? spec : fs::path(spec).stem().string();
}

void ensure_dir(const fs::path & dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path & path, const std::string & text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + path.string());
    out << text;
    if (!out)
        throw UsageError("write failed: " + path.string());
}

std::string read_text(const fs::path & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string step_name(std::size_t l)
{
    std::ostringstream s;
    s << "step_" << std::setw(3) << std::setfill('0') << l << ".nvbm";
    return s.str();
}

Json marking_json(const MarkingOptions & m)
{
    Json j;
    j["kind"] = m.kind;
    j["description"] = m.build().describe();
    if (m.kind == "random")
        j["fraction"] = m.fraction;
    if (m.kind == "corner" || m.kind == "dorfler")
        j["point"] = m.point;
    if (m.kind == "corner")
        j["radius"] = m.radius;
    if (m.kind == "dorfler") {
        j["theta"] = m.theta;
        j["alpha"] = m.alpha;
    }
    return j;
}

std::string optional_number(const std::optional<double> & v)
{
    return v ? format_double(*v) : std::string();
}

} // namespace

// ---------------------------------------------------------------------------
// Reports

Json to_json(const CheckResult & c)
{
    Json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["detail"] = c.detail;
    j["witnesses"] = c.witnesses;
    return j;
}

Json to_json(const Prop9Report & r)
{
    Json j;
    j["ok"] = r.ok();
    j["max_level_jump"] = r.max_level_jump;
    j["level_jump_witness"] = r.level_jump_witness;
    j["c_diam"] = r.c_diam;
    j["c_diam_upper"] = r.c_diam_upper;
    j["max_equal_level_chain"] = r.max_equal_level_chain;
    j["area_identity_undecided"] = r.area_identity_undecided;
    Json checks = Json::array();
    for (const auto & c : r.checks)
        checks.push_back(to_json(c));
    j["checks"] = checks;
    return j;
}

Json to_json(const ClosureLedger & l)
{
    Json j;
    j["lower_bound_holds"] = l.lower_bound_holds;
    j["max_rho"] = l.max_rho ? Json(*l.max_rho) : Json(nullptr);
    j["rho_bound"] = l.rho_bound ? Json(*l.rho_bound) : Json(nullptr);
    j["within_bound"] = l.within_bound;
    Json rows = Json::array();
    for (const auto & r : l.rows)
        rows.push_back({{"step", r.step},
                        {"marked", r.marked},
                        {"elements", r.elements},
                        {"cum_marked", r.cum_marked},
                        {"rho", r.rho ? Json(*r.rho) : Json(nullptr)},
                        {"lower_bound_holds", r.lower_bound_holds}});
    j["rows"] = rows;
    return j;
}

Json to_json(const StabilityReport & r)
{
    Json j;
    j["ok"] = r.ok();
    j["violations"] = r.violations;
    j["c5"] = r.c5;
    j["c6"] = r.c6;
    j["c7"] = r.c7;
    j["c8"] = r.c8;
    j["max_sum_squared_ratios"] = r.max_sum;
    j["min_lambda"] = r.min_lambda;
    j["max_lambda_mismatch"] = r.max_lambda_mismatch;
    j["relaxed_criterion"] = r.relaxed_criterion;
    j["measured_constant"] = r.measured_constant ? Json(*r.measured_constant) : Json(nullptr);
    Json bad = Json::array();
    for (const auto & c : r.elements)
        if (!c.ratio_ok || !c.sum_ok || !c.lambda_ok)
            bad.push_back({{"element", c.elem},
                           {"max_ratio", c.max_ratio},
                           {"sum_squared_ratios", c.sum_squared_ratios},
                           {"lambda_min", c.lambda_min},
                           {"ratio_ok", c.ratio_ok},
                           {"sum_ok", c.sum_ok},
                           {"lambda_ok", c.lambda_ok}});
    j["violating_elements"] = bad;
    return j;
}

Json to_json(const CorrStepInfo & s)
{
    Json w = Json::array();
    for (const auto & p : s.report.witnesses)
        w.push_back({p.elem, p.local});
    return {{"marked", s.marked},
            {"marked_tilde", s.marked_tilde},
            {"elements", s.elements},
            {"elements_tilde", s.elements_tilde},
            {"red_refined", s.red_refined},
            {"closure_matches", s.closure_matches},
            {"ok", s.report.ok},
            {"property", s.report.property},
            {"detail", s.report.detail},
            {"witnesses", w},
            {"max_corr_size", s.report.max_corr_size},
            {"red_quads", s.report.red_quads}};
}

std::string trace_csv(const RefinementTrace & trace)
{
    const ClosureLedger ledger = closure_accounting(trace);
    std::ostringstream out;
    out << "step,marked,marked_edges,closure_iters,refined,elements,rho\n";
    for (std::size_t l = 0; l < trace.steps.size(); ++l) {
        const TraceStep & s = trace.steps[l];
        out << l + 1 << ',' << s.marked << ',' << s.marked_edges << ',' << s.closure_iterations << ',' << s.refined << ','
            << s.elements_after << ',' << optional_number(ledger.rows[l + 1].rho) << '\n';
    }
    return out.str();
}

RefinementTrace parse_trace_csv(std::istream & in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(1, "empty trace");
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string f;
        while (std::getline(h, f, ','))
            header.push_back(f);
    }
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
        col[header[i]] = i;
    for (const char * name : {"marked", "elements"})
        if (!col.count(name))
            throw ParseError(1, std::string("trace header lacks column ") + name);

    RefinementTrace trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::istringstream r(line);
        std::string f;
        while (std::getline(r, f, ','))
            fields.push_back(f);
        if (!line.empty() && line.back() == ',')
            fields.emplace_back();
        if (fields.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields");
        auto get = [&](const char * name) -> std::size_t {
            auto it = col.find(name);
            if (it == col.end())
                return 0;
            try {
                std::size_t pos = 0;
                const unsigned long long v = std::stoull(fields[it->second], &pos);
                if (pos != fields[it->second].size())
                    throw std::invalid_argument(name);
                return static_cast<std::size_t>(v);
            } catch (const std::exception &) {
                throw ParseError(line_no, std::string("bad value in column ") + name);
            }
        };
        TraceStep s;
        s.marked = get("marked");
        s.marked_edges = get("marked_edges");
        s.closure_iterations = static_cast<int>(get("closure_iters"));
        s.refined = get("refined");
        s.elements_after = get("elements");
        trace.steps.push_back(s);
    }
    return trace;
}

std::string ledger_csv(const ClosureLedger & ledger)
{
    std::ostringstream out;
    out << "step,marked,elements,cum_marked,rho\n";
    for (const auto & r : ledger.rows)
        out << r.step << ',' << r.marked << ',' << r.elements << ',' << r.cum_marked << ',' << optional_number(r.rho) << '\n';
    return out.str();
}

std::string weights_csv(const Mesh & mesh, const NodeWeights & w)
{
    std::ostringstream out;
    out << "node,x,y,exponent\n";
    for (NodeId j = 0; j < mesh.num_nodes(); ++j)
        out << j << ',' << format_double(mesh.vertex(j).x) << ',' << format_double(mesh.vertex(j).y) << ',' << w.exponent[j] << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_generate(const GenerateOptions & o, std::ostream & log)
{
    const Mesh mesh = initial_mesh(o.spec, o.ref_edges, o.seed);
    ensure_dir(o.out);
    const fs::path path = o.out / (stem_of(o.spec) + ".nvbm");
    write_text(path, to_nvbm(mesh));
    log << "wrote " << path.string() << " (" << mesh.num_nodes() << " vertices, " << mesh.num_elements() << " elements)\n";
    return kExitOk;
}

int cmd_refine(const RefineOptions & o, std::ostream & log)
{
    RunConfig config;
    config.dialect = parse_dialect(o.dialect);
    config.policy = parse_policy(o.policy);
    config.edges = parse_edge_marking(o.edges);
    config.marking = o.marking.build();
    config.steps = o.steps;
    config.seed = o.seed;
    const Mesh initial = initial_mesh(o.spec, o.ref_edges, o.seed);

    RunResult run;
    try {
        run = run_refinement(initial, config);
    } catch (const std::invalid_argument & e) {
        throw UsageError(e.what());
    }

    ensure_dir(o.out);
    for (std::size_t l = 0; l < run.meshes.size(); ++l)
        write_text(o.out / step_name(l), to_nvbm(run.meshes[l]));
    const std::string trace = trace_csv(run.trace);
    write_text(o.out / "trace.csv", trace);

    const ClosureLedger ledger = closure_accounting(run.trace);
    Json j;
    j["mesh"] = o.spec;
    j["ref_edges"] = o.ref_edges;
    j["dialect"] = to_string(config.dialect);
    j["policy"] = config.policy.name();
    j["edges"] = o.edges;
    j["marking"] = marking_json(o.marking);
    j["steps"] = o.steps;
    j["seed"] = o.seed;
    Json counts = Json::array();
    for (const auto & m : run.meshes)
        counts.push_back(m.num_elements());
    j["elements"] = counts;
    j["max_rho"] = ledger.max_rho ? Json(*ledger.max_rho) : Json(nullptr);
    j["lower_bound_holds"] = ledger.lower_bound_holds;
    write_text(o.out / "run.json", j.dump(2) + "\n");

    if (o.format == Format::json)
        log << j.dump(2) << '\n';
    else
        log << trace;
    return ledger.lower_bound_holds ? kExitOk : kExitViolation;
}

namespace {

struct AnalyzeInputs
{
    std::vector<fs::path> meshes;
    std::optional<fs::path> trace;
    std::optional<std::string> dialect;
};

AnalyzeInputs collect_inputs(const std::vector<std::string> & inputs)
{
    AnalyzeInputs in;
    for (const auto & s : inputs) {
        const fs::path p(s);
        if (fs::is_directory(p)) {
            std::vector<fs::path> steps;
            for (const auto & e : fs::directory_iterator(p)) {
                const std::string name = e.path().filename().string();
                if (e.is_regular_file() && name.rfind("step_", 0) == 0 && e.path().extension() == ".nvbm")
                    steps.push_back(e.path());
            }
            std::sort(steps.begin(), steps.end());
            in.meshes.insert(in.meshes.end(), steps.begin(), steps.end());
            if (fs::is_regular_file(p / "trace.csv"))
                in.trace = p / "trace.csv";
            if (fs::is_regular_file(p / "run.json")) {
                const Json run = Json::parse(read_text(p / "run.json"), nullptr, false);
                if (!run.is_discarded() && run.contains("dialect") && run["dialect"].is_string())
                    in.dialect = run["dialect"].get<std::string>();
            }
        } else if (p.extension() == ".csv") {
            in.trace = p;
        } else if (fs::is_regular_file(p)) {
            in.meshes.push_back(p);
        } else {
            throw UsageError("cannot read " + s);
        }
    }
    return in;
}

bool has_red_sons(const Mesh & mesh)
{
    return std::any_of(mesh.elements().begin(), mesh.elements().end(), [](const Element & e) { return e.red_son; });
}

} // namespace

int cmd_analyze(const AnalyzeOptions & o, std::ostream & log)
{
    const AnalyzeInputs in = collect_inputs(o.inputs);
    if (in.meshes.empty() && !in.trace)
        throw UsageError("nothing to analyze");
    if (o.initial.empty() && in.meshes.size() == 1)
        throw UsageError("a single mesh needs --initial");

    std::vector<Mesh> meshes;
    for (const auto & p : in.meshes)
        meshes.push_back(read_nvbm(p));
    const Mesh initial = o.initial.empty() ? (meshes.empty() ? Mesh() : meshes.front()) : load_mesh(o.initial);
    const bool nvb_bdd = o.nvb_from_bdd.value_or(in.dialect && *in.dialect == to_string(Dialect::refineNVB));

    bool ok = true;
    int max_jump = 0;
    Json reports = Json::array();
    for (std::size_t i = 0; i < meshes.size(); ++i) {
        Prop9Report levels = verify_levels(meshes[i], initial, nvb_bdd);
        if (!has_red_sons(meshes[i])) {
            const Prop9Report rules = verify_neighbor_rules(meshes[i], initial);
            levels.checks.insert(levels.checks.end(), rules.checks.begin(), rules.checks.end());
            levels.max_equal_level_chain = rules.max_equal_level_chain;
        }
        ok = ok && levels.ok();
        max_jump = std::max(max_jump, levels.max_level_jump);
        Json j = to_json(levels);
        j["file"] = in.meshes[i].filename().string();
        j["elements"] = meshes[i].num_elements();
        reports.push_back(std::move(j));
    }

    Json out;
    out["meshes"] = reports;
    out["max_level_jump"] = max_jump;
    out["nvb_from_bdd"] = nvb_bdd;
    ensure_dir(o.out);
    std::string ledger_text;
    if (in.trace) {
        std::ifstream t(*in.trace);
        if (!t)
            throw UsageError("cannot read " + in.trace->string());
        RefinementTrace trace = parse_trace_csv(t);
        trace.initial_elements = meshes.empty() ? initial.num_elements() : meshes.front().num_elements();
        const ClosureLedger ledger = closure_accounting(trace);
        ok = ok && ledger.lower_bound_holds;
        out["ledger"] = to_json(ledger);
        ledger_text = ledger_csv(ledger);
        write_text(o.out / "ledger.csv", ledger_text);
    }
    out["ok"] = ok;
    write_text(o.out / "report.json", out.dump(2) + "\n");

    if (o.format == Format::json)
        log << out.dump(2) << '\n';
    else
        log << ledger_text;
    return ok ? kExitOk : kExitViolation;
}

int cmd_stability(const StabilityOptions & o, std::ostream & log)
{
    if (o.fine_levels < 0)
        throw UsageError("fine levels must be nonnegative");
    const Mesh mesh = load_mesh(o.mesh);
    NodeWeights weights;
    try {
        weights = compute_weights(mesh, parse_chains(o.chains));
    } catch (const std::invalid_argument & e) {
        throw UsageError(e.what());
    }

    StabilityReport report;
    if (o.inject_ratio) {
        if (!(*o.inject_ratio > 0.0) || mesh.num_elements() == 0)
            throw UsageError("injected ratio must be positive");
        std::vector<double> d = weights.values();
        const auto & v = mesh.element(0).v;
        d[v[0]] = *o.inject_ratio * d[v[1]];
        report = check_conditions(mesh, d);
    } else {
        report = check_conditions(mesh, weights);
    }

    Mesh fine = mesh;
    for (int k = 0; k < o.fine_levels; ++k)
        fine = uniform(fine, UniformKind::bisec3);
    if (o.measure)
        report.measured_constant = measure_h1_stability(mesh, fine);

    Json j;
    j["mesh"] = o.mesh;
    j["nodes"] = mesh.num_nodes();
    j["elements"] = mesh.num_elements();
    j["fine_levels"] = o.fine_levels;
    j["fine_elements"] = fine.num_elements();
    j["min_exponent"] = weights.exponent.empty() ? 0 : *std::min_element(weights.exponent.begin(), weights.exponent.end());
    j["max_exponent"] = weights.exponent.empty() ? 0 : *std::max_element(weights.exponent.begin(), weights.exponent.end());
    j["chains"] = o.chains;
    j["injected_ratio"] = o.inject_ratio ? Json(*o.inject_ratio) : Json(nullptr);
    j["report"] = to_json(report);

    ensure_dir(o.out);
    write_text(o.out / "stability.json", j.dump(2) + "\n");
    const std::string wcsv = weights_csv(mesh, weights);
    write_text(o.out / "weights.csv", wcsv);
    if (o.export_matrices) {
        const SparseSystem sys = assemble(mesh);
        auto triplets = [](const Eigen::SparseMatrix<double> & m) {
            std::ostringstream s;
            for (int k = 0; k < m.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
                    s << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
            return s.str();
        };
        write_text(o.out / "mass.txt", triplets(sys.mass));
        write_text(o.out / "stiffness.txt", triplets(sys.stiffness));
    }

    if (o.format == Format::json)
        log << j.dump(2) << '\n';
    else
        log << wcsv;
    return report.ok() ? kExitOk : kExitViolation;
}

int cmd_corr_check(const CorrCheckOptions & o, std::ostream & log)
{
    const PatternPolicy policy = parse_policy(o.policy);
    const MarkingStrategy strategy = o.marking.build();
    const Mesh initial = initial_mesh(o.spec, o.ref_edges, o.seed);

    CorrespondenceBuilder builder(initial);
    std::mt19937_64 rng(o.seed);
    bool ok = true;
    std::string failure;
    for (std::size_t l = 0; l < o.steps && ok; ++l) {
        const std::set<ElemId> marked = select_elements(builder.mesh(), strategy, rng);
        try {
            builder.step(mark_all_edges(builder.mesh(), marked), policy, o.exhaustive);
        } catch (const UnsupportedError & e) {
            throw UsageError(e.what());
        } catch (const std::logic_error & e) {
            failure = e.what();
        }
        const auto & h = builder.history();
        if (!failure.empty() || h.empty() || !h.back().report.ok || !h.back().closure_matches)
            ok = false;
    }

    Json steps = Json::array();
    for (const auto & s : builder.history())
        steps.push_back(to_json(s));
    Json j;
    j["mesh"] = o.spec;
    j["policy"] = policy.name();
    j["marking"] = marking_json(o.marking);
    j["seed"] = o.seed;
    j["exhaustive"] = o.exhaustive;
    j["ok"] = ok;
    j["failure"] = failure;
    j["steps"] = steps;

    ensure_dir(o.out);
    write_text(o.out / "corr.json", j.dump(2) + "\n");
    write_text(o.out / "mesh.nvbm", to_nvbm(builder.mesh()));
    write_text(o.out / "mesh_tilde.nvbm", to_nvbm(builder.mesh_tilde()));

    if (o.format == Format::json) {
        log << j.dump(2) << '\n';
    } else {
        log << "step,marked,marked_tilde,elements,elements_tilde,max_corr_size,ok\n";
        std::size_t l = 1;
        for (const auto & s : builder.history())
            log << l++ << ',' << s.marked << ',' << s.marked_tilde << ',' << s.elements << ',' << s.elements_tilde << ','
                << s.report.max_corr_size << ',' << (s.report.ok ? 1 : 0) << '\n';
    }
    return ok ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

void add_marking_options(CLI::App * cmd, MarkingOptions & m)
{
    cmd->add_option("--marking", m.kind, "all | random | corner | dorfler")->capture_default_str();
    cmd->add_option("--fraction", m.fraction, "random marking probability")->capture_default_str();
    cmd->add_option("--point", m.point, "corner / indicator point x y")->expected(2);
    cmd->add_option("--radius", m.radius, "corner marking radius")->capture_default_str();
    cmd->add_option("--theta", m.theta, "bulk parameter")->capture_default_str();
    cmd->add_option("--alpha", m.alpha, "indicator exponent")->capture_default_str();
}

} // namespace

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
    CLI::App app{"Newest-vertex-bisection refinement and analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string format;
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--format", format, "stdout summary: csv | json");

    GenerateOptions gen;
    auto * g = app.add_subcommand("generate", "write an initial mesh");
    g->add_option("mesh", gen.spec, "square2 | lshape6 | file")->required();
    g->add_option("--ref-edges", gen.ref_edges, "as-given | longest-edge | random")->capture_default_str();

    RefineOptions ref;
    auto * r = app.add_subcommand("refine", "run an adaptive refinement loop");
    r->add_option("mesh", ref.spec, "square2 | lshape6 | file")->required();
    r->add_option("--ref-edges", ref.ref_edges, "as-given | longest-edge | random")->capture_default_str();
    r->add_option("--dialect", ref.dialect, "refineNVB | refineNVB3 | refineNVBred | refine")->capture_default_str();
    r->add_option("--policy", ref.policy, "bisec3 | red | interior-node")->capture_default_str();
    r->add_option("--edges", ref.edges, "marked edges per marked element: reference | all")->capture_default_str();
    r->add_option("--steps", ref.steps, "number of steps")->capture_default_str();
    add_marking_options(r, ref.marking);

    AnalyzeOptions an;
    auto * a = app.add_subcommand("analyze", "check level and closure invariants");
    a->add_option("inputs", an.inputs, "run directories, mesh files or a trace.csv")->required();
    a->add_option("--initial", an.initial, "initial mesh (default: first mesh)");
    auto * bdd = a->add_flag("--nvb-bdd,!--no-nvb-bdd", "apply the sharper level bound of refineNVB on BDD meshes");

    StabilityOptions st;
    auto * s = app.add_subcommand("stability", "weights, element conditions and measured H1 constant");
    s->add_option("mesh", st.mesh, "mesh file or built-in name")->required();
    s->add_option("--fine-levels", st.fine_levels, "uniform refinements of the fine space")->capture_default_str();
    s->add_flag("!--no-measure", st.measure, "skip the measured constant");
    s->add_flag("--export-matrices", st.export_matrices, "write mass/stiffness triplets");
    s->add_option("--chains", st.chains, "element paths of the node distance: edge | node")->capture_default_str();
    s->add_option("--inject-ratio", st.inject_ratio, "debug: force this weight ratio inside element 0");

    CorrCheckOptions cc;
    auto * c = app.add_subcommand("corr-check", "run a red refinement trace with its bisection counterpart");
    c->add_option("mesh", cc.spec, "square2 | lshape6 | file")->required();
    c->add_option("--ref-edges", cc.ref_edges, "as-given | longest-edge | random")->capture_default_str();
    c->add_option("--policy", cc.policy, "red | bisec3")->capture_default_str();
    c->add_option("--steps", cc.steps, "number of steps")->capture_default_str();
    c->add_flag("--exhaustive", cc.exhaustive, "check neighbor properties over all pair combinations");
    add_marking_options(c, cc.marking);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp & e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp & e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError & e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        auto fmt = [&](Format fallback) { return format.empty() ? fallback : parse_format(format); };
        if (*g) {
            gen.seed = seed;
            gen.out = out_dir;
            return cmd_generate(gen, out);
        }
        if (*r) {
            ref.seed = seed;
            ref.out = out_dir;
            ref.format = fmt(Format::csv);
            return cmd_refine(ref, out);
        }
        if (*a) {
            an.out = out_dir;
            an.format = fmt(Format::json);
            if (bdd->count() > 0)
                an.nvb_from_bdd = bdd->as<bool>();
            return cmd_analyze(an, out);
        }
        if (*s) {
            st.out = out_dir;
            st.format = fmt(Format::json);
            return cmd_stability(st, out);
        }
        if (*c) {
            cc.seed = seed;
            cc.out = out_dir;
            cc.format = fmt(Format::json);
            return cmd_corr_check(cc, out);
        }
    } catch (const UsageError & e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError & e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnsupportedError & e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError & e) {
        err << "error: " << e.what() << " (estimate " << e.estimate() << ")\n";
        return kExitViolation;
    } catch (const std::invalid_argument & e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error & e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error & e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace nvb::cli
