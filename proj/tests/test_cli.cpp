#include "oracles.hpp"

#include <nvb/mesh_io.hpp>
#include <nvb_cli/commands.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace nvb;

namespace {

struct CliResult
{
    int code = 0;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "nvb");
    std::vector<const char *> argv;
    for (const auto & a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = nvb::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class TempDir
{
public:
    TempDir()
    {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("nvb_cli_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path & path() const { return path_; }
    std::string str(const std::string & sub = "") const { return (sub.empty() ? path_ : path_ / sub).string(); }

private:
    fs::path path_;
};

std::string slurp(const fs::path & p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path & p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(CliGenerate, BuiltinMeshes)
{
    TempDir dir;
    ASSERT_EQ(invoke({"generate", "square2", "--out", dir.str()}).code, 0);
    const Mesh sq = read_nvbm(dir.path() / "square2.nvbm");
    EXPECT_EQ(sq.num_nodes(), 4u);
    EXPECT_EQ(sq.num_elements(), 2u);
    for (const auto & e : sq.elements())
        EXPECT_EQ(e.gen, 0);
    ASSERT_EQ(invoke({"generate", "lshape6", "--out", dir.str()}).code, 0);
    const Mesh l = read_nvbm(dir.path() / "lshape6.nvbm");
    EXPECT_EQ(l.num_nodes(), 8u);
    EXPECT_EQ(l.num_elements(), 6u);
    EXPECT_TRUE(validate_mesh(l).ok());
    double area = 0.0;
    for (ElemId t = 0; t < l.num_elements(); ++t)
        area += oracle::shoelace(l.corners(t));
    EXPECT_EQ(area, 3.0);
}

TEST(CliGenerate, RandomReferenceEdgesAreDeterministic)
{
    TempDir a, b;
    ASSERT_EQ(invoke({"generate", "square2", "--ref-edges", "random", "--seed", "7", "--out", a.str()}).code, 0);
    ASSERT_EQ(invoke({"generate", "square2", "--ref-edges", "random", "--seed", "7", "--out", b.str()}).code, 0);
    EXPECT_EQ(slurp(a.path() / "square2.nvbm"), slurp(b.path() / "square2.nvbm"));
}

TEST(CliGenerate, UnknownSpecIsUsageError)
{
    TempDir dir;
    const auto r = invoke({"generate", "hexagon", "--out", dir.str()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(invoke({"generate", "square2", "--ref-edges", "shortest", "--out", dir.str()}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"refine"}).code, 2);
}

TEST(CliRefine, UniformSquareCounts)
{
    TempDir dir;
    ASSERT_EQ(invoke({"refine", "square2", "--marking", "all", "--dialect", "refineNVB", "--steps", "2", "--out", dir.str()}).code, 0);
    const auto rows = csv_rows(dir.path() / "trace.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].front(), "step");
    const auto col = std::find(rows[0].begin(), rows[0].end(), "elements") - rows[0].begin();
    EXPECT_EQ(rows[1][static_cast<std::size_t>(col)], "4");
    EXPECT_EQ(rows[2][static_cast<std::size_t>(col)], "8");
    for (int l = 0; l <= 2; ++l) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%03d.nvbm", l);
        const Mesh m = read_nvbm(dir.path() / name);
        EXPECT_EQ(m.num_elements(), 2u << l);
    }
}

TEST(CliRefine, ZeroStepsEchoesInitialMesh)
{
    TempDir dir;
    ASSERT_EQ(invoke({"refine", "lshape6", "--steps", "0", "--out", dir.str()}).code, 0);
    EXPECT_EQ(csv_rows(dir.path() / "trace.csv").size(), 1u);
    EXPECT_EQ(slurp(dir.path() / "step_000.nvbm"), to_nvbm(lshape6()));
    EXPECT_FALSE(fs::exists(dir.path() / "step_001.nvbm"));
}

TEST(CliRefine, CornerRunGrowsMonotonicallyAndIsDeterministic)
{
    TempDir a, b;
    const std::vector<std::string> args{"refine", "lshape6", "--marking", "dorfler", "--point", "0", "0",
                                        "--theta", "0.5", "--steps", "12"};
    auto with_out = [&](const TempDir & d) {
        auto v = args;
        v.push_back("--out");
        v.push_back(d.str());
        return v;
    };
    ASSERT_EQ(invoke(with_out(a)).code, 0);
    ASSERT_EQ(invoke(with_out(b)).code, 0);
    EXPECT_EQ(slurp(a.path() / "trace.csv"), slurp(b.path() / "trace.csv"));
    EXPECT_EQ(slurp(a.path() / "step_012.nvbm"), slurp(b.path() / "step_012.nvbm"));
    const auto rows = csv_rows(a.path() / "trace.csv");
    const auto ecol = static_cast<std::size_t>(std::find(rows[0].begin(), rows[0].end(), "elements") - rows[0].begin());
    const auto rcol = static_cast<std::size_t>(std::find(rows[0].begin(), rows[0].end(), "rho") - rows[0].begin());
    long prev = 6;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const long n = std::stol(rows[i][ecol]);
        EXPECT_GT(n, prev);
        prev = n;
        EXPECT_TRUE(std::isfinite(std::stod(rows[i][rcol])));
    }
    for (int l = 0; l <= 12; ++l) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%03d.nvbm", l);
        EXPECT_TRUE(validate_mesh(read_nvbm(a.path() / name)).ok());
    }
}

TEST(CliRefine, RejectsInteriorNodeOnRedDialect)
{
    TempDir dir;
    EXPECT_EQ(invoke({"refine", "square2", "--dialect", "refineNVBred", "--policy", "interior-node", "--out", dir.str()}).code, 2);
    EXPECT_EQ(invoke({"refine", "square2", "--dialect", "bogus", "--out", dir.str()}).code, 2);
    EXPECT_EQ(invoke({"refine", "/nonexistent.nvbm", "--out", dir.str()}).code, 2);
}

TEST(CliAnalyze, UniformRunPasses)
{
    TempDir dir;
    ASSERT_EQ(invoke({"refine", "lshape6", "--steps", "3", "--out", dir.str("run")}).code, 0);
    const auto r = invoke({"analyze", dir.str("run"), "--out", dir.str("report")});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto report = nvb::cli::Json::parse(slurp(dir.path() / "report" / "report.json"));
    EXPECT_TRUE(report.contains("ok"));
    EXPECT_TRUE(report["ok"].get<bool>());
    EXPECT_TRUE(fs::exists(dir.path() / "report" / "ledger.csv"));
}

TEST(CliAnalyze, TamperedGenerationExitsThree)
{
    TempDir dir;
    ASSERT_EQ(invoke({"refine", "square2", "--marking", "random", "--fraction", "0.3", "--steps", "4", "--out",
                   dir.str("run")}).code,
              0);
    // Raise the generation of the first element of the last mesh by 3.
    const fs::path last = dir.path() / "run" / "step_004.nvbm";
    const Mesh m = read_nvbm(last);
    std::vector<Vertex> v(m.vertices().begin(), m.vertices().end());
    std::vector<Element> e(m.elements().begin(), m.elements().end());
    e[0].gen += 3;
    write_nvbm(last, Mesh(v, e));
    const auto r = invoke({"analyze", dir.str("run"), "--out", dir.str("report")});
    EXPECT_EQ(r.code, 3);
    const auto report = nvb::cli::Json::parse(slurp(dir.path() / "report" / "report.json"));
    EXPECT_FALSE(report["ok"].get<bool>());
    EXPECT_NE(report.dump().find("area_generation_identity"), std::string::npos);
}

TEST(CliAnalyze, ParseFailureExitsTwo)
{
    TempDir dir;
    std::ofstream(dir.path() / "bad.nvbm") << "nvbm 1\n3 1\n0 0\n1 0\n";
    EXPECT_EQ(invoke({"analyze", dir.str("bad.nvbm"), "--initial", "square2", "--out", dir.str("r")}).code, 2);
    EXPECT_EQ(invoke({"analyze", dir.str("missing_dir"), "--out", dir.str("r")}).code, 2);
}

TEST(CliAnalyze, SeededCorpusReportsMaxJump)
{
    TempDir dir;
    int max_jump = 0;
    for (const std::string dialect : {"refineNVB", "refineNVB3", "refineNVBred", "refine"}) {
        const std::string run = dir.str("run_" + dialect);
        ASSERT_EQ(invoke({"refine", "lshape6", "--dialect", dialect, "--policy", "red", "--ref-edges", "random", "--marking",
                       "random", "--fraction", "0.2", "--steps", "8", "--seed", "3", "--out", run})
                      .code,
                  0);
        const auto r = invoke({"analyze", run, "--out", run + "/report"});
        EXPECT_EQ(r.code, 0) << r.err;
        const auto report = nvb::cli::Json::parse(slurp(fs::path(run) / "report" / "report.json"));
        ASSERT_TRUE(report.contains("max_level_jump"));
        max_jump = std::max(max_jump, report["max_level_jump"].get<int>());
    }
    EXPECT_LE(max_jump, 2);
    EXPECT_GE(max_jump, 1);
}

TEST(CliStability, InitialSquareHasUnitWeights)
{
    TempDir dir;
    ASSERT_EQ(invoke({"stability", "square2", "--out", dir.str()}).code, 0);
    const auto j = nvb::cli::Json::parse(slurp(dir.path() / "stability.json"));
    EXPECT_EQ(j["report"]["min_lambda"].get<double>(), 2.0);
    EXPECT_TRUE(j["report"]["measured_constant"].is_number());
    const auto rows = csv_rows(dir.path() / "weights.csv");
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_EQ(rows[i].back(), "0");
}

TEST(CliStability, InjectedRatioExitsThree)
{
    TempDir dir;
    EXPECT_EQ(invoke({"stability", "square2", "--inject-ratio", "3", "--no-measure", "--out", dir.str()}).code, 3);
    EXPECT_EQ(invoke({"stability", "square2", "--inject-ratio", "-1", "--no-measure", "--out", dir.str()}).code, 2);
}

TEST(CliStability, DisconnectedMeshExitsTwo)
{
    TempDir dir;
    std::ofstream(dir.path() / "two.nvbm") << "nvbm 1\n6 2\n0 0\n1 0\n0 1\n5 5\n6 5\n5 6\n0 1 2 0 0 0\n3 4 5 0 1 0\n";
    EXPECT_EQ(invoke({"stability", dir.str("two.nvbm"), "--out", dir.str("r")}).code, 2);
}

TEST(CliStability, ExportsMatrices)
{
    TempDir dir;
    ASSERT_EQ(invoke({"stability", "lshape6", "--no-measure", "--export-matrices", "--out", dir.str()}).code, 0);
    EXPECT_TRUE(fs::exists(dir.path() / "mass.txt"));
    EXPECT_TRUE(fs::exists(dir.path() / "stiffness.txt"));
    EXPECT_EQ(invoke({"stability", "lshape6", "--no-measure", "--chains", "node", "--out", dir.str()}).code, 0);
    EXPECT_EQ(invoke({"stability", "lshape6", "--chains", "diagonal", "--out", dir.str()}).code, 2);
}

TEST(CliCorrCheck, RedTracePasses)
{
    TempDir dir;
    const auto r = invoke({"corr-check", "lshape6", "--marking", "random", "--fraction", "0.3", "--steps", "4", "--out",
                        dir.str(), "--format", "csv"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = nvb::cli::Json::parse(slurp(dir.path() / "corr.json"));
    EXPECT_TRUE(j["ok"].get<bool>());
    EXPECT_TRUE(fs::exists(dir.path() / "mesh_tilde.nvbm"));
    const Mesh a = read_nvbm(dir.path() / "mesh.nvbm");
    const Mesh b = read_nvbm(dir.path() / "mesh_tilde.nvbm");
    EXPECT_EQ(a.num_elements(), b.num_elements());
    EXPECT_NE(r.out.find("max_corr_size"), std::string::npos);
}

TEST(CliCorrCheck, InteriorNodePolicyIsUsageError)
{
    TempDir dir;
    EXPECT_EQ(invoke({"corr-check", "square2", "--policy", "interior-node", "--out", dir.str()}).code, 2);
}

TEST(CliHelp, ExitsZero)
{
    EXPECT_EQ(invoke({"--help"}).code, 0);
}
