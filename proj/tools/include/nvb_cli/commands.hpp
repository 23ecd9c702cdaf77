#pragma once

#include <nvb/analysis.hpp>
#include <nvb/builtin.hpp>
#include <nvb/correspondence.hpp>
#include <nvb/driver.hpp>
#include <nvb/mesh.hpp>
#include <nvb/stability.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitViolation = 3;

using Json = nlohmann::ordered_json;

/// Bad command-line values or unreadable inputs (exit code 2).
class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Format
{
    csv,
    json,
};

/// Built-in name (square2, lshape6) or .nvbm file path.
Mesh load_mesh(const std::string & spec, bool require_conforming = true);

RefEdgePolicy parse_ref_edges(const std::string & s);
Dialect parse_dialect(const std::string & s);
PatternPolicy parse_policy(const std::string & s);
EdgeMarking parse_edge_marking(const std::string & s);
Format parse_format(const std::string & s);
ChainAdjacency parse_chains(const std::string & s);

struct MarkingOptions
{
    std::string kind = "all"; // all | random | corner | dorfler
    double fraction = 0.5;
    std::vector<double> point{0.0, 0.0};
    double radius = 0.0;
    double theta = 0.5;
    double alpha = 1.0;

    MarkingStrategy build() const;
};

struct GenerateOptions
{
    std::string spec;
    std::string ref_edges = "as-given";
    std::uint64_t seed = 0;
    std::filesystem::path out = ".";
};

struct RefineOptions
{
    std::string spec;
    std::string ref_edges = "as-given";
    std::string dialect = "refineNVB";
    std::string policy = "bisec3";
    std::string edges = "all";
    MarkingOptions marking;
    std::size_t steps = 1;
    std::uint64_t seed = 0;
    std::filesystem::path out = ".";
    Format format = Format::csv;
};

struct AnalyzeOptions
{
    std::vector<std::string> inputs; // run directories or mesh files
    std::string initial;             // defaults to the first mesh
    std::optional<bool> nvb_from_bdd; // defaults to the dialect recorded in run.json
    std::filesystem::path out = ".";
    Format format = Format::json;
};

struct StabilityOptions
{
    std::string mesh;
    int fine_levels = 2;
    bool measure = true;
    bool export_matrices = false;
    std::string chains = "edge"; // edge | node
    std::optional<double> inject_ratio; // debug: force this d-ratio inside element 0
    std::filesystem::path out = ".";
    Format format = Format::json;
};

struct CorrCheckOptions
{
    std::string spec;
    std::string ref_edges = "as-given";
    std::string policy = "red";
    MarkingOptions marking;
    std::size_t steps = 1;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    std::filesystem::path out = ".";
    Format format = Format::json;
};

int cmd_generate(const GenerateOptions & o, std::ostream & log);
int cmd_refine(const RefineOptions & o, std::ostream & log);
int cmd_analyze(const AnalyzeOptions & o, std::ostream & log);
int cmd_stability(const StabilityOptions & o, std::ostream & log);
int cmd_corr_check(const CorrCheckOptions & o, std::ostream & log);

Json to_json(const CheckResult & c);
Json to_json(const Prop9Report & r);
Json to_json(const ClosureLedger & l);
Json to_json(const StabilityReport & r);
Json to_json(const CorrStepInfo & s);

std::string trace_csv(const RefinementTrace & trace);
RefinementTrace parse_trace_csv(std::istream & in);
std::string ledger_csv(const ClosureLedger & ledger);
std::string weights_csv(const Mesh & mesh, const NodeWeights & w);

/// Parses and runs a command line; returns the process exit code.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

} // namespace nvb::cli
