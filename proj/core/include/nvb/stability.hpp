#pragma once

#include <nvb/mesh.hpp>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <climits>
#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace nvb {

/// Exact P1 element mass matrix: |T|/12 * (1 + delta_jk). Throws std::invalid_argument for a
/// degenerate triangle.
Eigen::Matrix3d element_mass(const std::array<Vertex, 3> & t);

/// P1 element stiffness matrix |T| * grad(phi_j) . grad(phi_k).
Eigen::Matrix3d element_stiffness(const std::array<Vertex, 3> & t);

/// Elements incident to each node.
std::vector<std::vector<ElemId>> node_stars(const Mesh & mesh);

/// How consecutive elements of a path in the node distance must meet.
enum class ChainAdjacency
{
    edge, // a common edge, the literal definition
    node, // a common node; equals the graph distance along mesh edges
};

/**
 * Element-path distance between nodes: 0 for equal nodes, 1 for nodes of a common element,
 * otherwise the fewest elements in an edge-connected path from the star of one node to an
 * element containing the other. Breadth-first searches are run per source node on demand.
 */
class DeltaOracle
{
public:
    static constexpr int kInfinity = INT_MAX;

    explicit DeltaOracle(const Mesh & mesh, ChainAdjacency adjacency = ChainAdjacency::edge);

    int node_distance(NodeId j, NodeId k);

    /// min over nodes z_k of t of node_distance(j, k).
    int element_distance(NodeId j, ElemId t);

private:
    const std::vector<int> & search(NodeId j);

    const Mesh & mesh_;
    ChainAdjacency adjacency_;
    std::vector<std::vector<ElemId>> stars_;
    std::unordered_map<NodeId, std::vector<int>> cache_; // element distances, star = 1
};

/// Per-node weights d_j = 2^(e_j / 2) stored through the integer exponents e_j.
struct NodeWeights
{
    std::vector<int> exponent;

    double d(NodeId j) const;
    std::vector<double> values() const;
};

/**
 * e_j = min over elements T of 2 delta(z_j, T) - gen(T), evaluated by a multi-source shortest
 * path on the element adjacency graph (on the node graph for ChainAdjacency::node). Throws
 * std::invalid_argument if the element adjacency graph is not connected.
 */
NodeWeights compute_weights(const Mesh & mesh, ChainAdjacency adjacency = ChainAdjacency::edge);

struct ElementCondition
{
    ElemId elem = 0;
    double max_ratio = 1.0;     // max d_i / d_j over the element's nodes
    int max_exponent_gap = 0;   // integer form of max_ratio^2, weights path only
    double sum_squared_ratios = 9.0; // S_T
    double lambda_min = 2.0;    // 5 - sqrt(S_T)
    double lambda_min_eigen = 2.0; // smallest eigenvalue of the 3x3 matrix, solved directly
    double c7 = 0.0;            // tightest constant of the lower quadratic-form estimate
    double c8 = 0.0;            // tightest constant of the upper quadratic-form estimate
    bool ratio_ok = true;       // max_ratio <= 2
    bool sum_ok = true;         // S_T < 25
    bool lambda_ok = true;      // lambda_min > 0
    bool relaxed_ok = true;     // 1 + C^2 + C^-2 < 11 with C = max_ratio
};

struct StabilityReport
{
    std::vector<ElementCondition> elements;
    double c5 = 1.0;               // max ratio over all elements
    double c6 = 1.0;               // max over (T, z in T) of max(d/h, h/d)
    double c7 = 0.0;
    double c8 = 0.0;
    double max_sum = 0.0;
    double min_lambda = 0.0;
    double max_lambda_mismatch = 0.0; // |closed form - eigen-solve|
    bool relaxed_criterion = true;    // 1 + c5^2 + c5^-2 < 11
    std::size_t violations = 0;       // elements failing ratio, sum or lambda
    std::optional<double> measured_constant;

    bool ok() const { return violations == 0; }
};

StabilityReport check_conditions(const Mesh & mesh, const NodeWeights & weights);

/// Same checks for arbitrary positive real weights.
StabilityReport check_conditions(const Mesh & mesh, const std::vector<double> & d);

struct SparseSystem
{
    Eigen::SparseMatrix<double> mass;
    Eigen::SparseMatrix<double> stiffness;
};

SparseSystem assemble(const Mesh & mesh);

struct NestedSystem
{
    SparseSystem coarse;
    SparseSystem fine;
    Eigen::SparseMatrix<double> prolongation; // fine nodes x coarse nodes
    Eigen::SparseMatrix<double> cross;        // coarse x fine, integral of phi_coarse phi_fine
};

/// Throws std::invalid_argument if some fine element does not lie in a coarse element.
NestedSystem assemble_nested(const Mesh & coarse, const Mesh & fine);

/// L2 projection of fine-space functions onto the coarse space with a reusable factorization.
class L2Projector
{
public:
    /// Throws NumericError if the coarse mass matrix cannot be factorized.
    explicit L2Projector(const NestedSystem & system);

    Eigen::VectorXd project(const Eigen::VectorXd & u_fine) const;

    /// Relative residual of the orthogonality relation B u - M c for a projection c.
    double orthogonality_residual(const Eigen::VectorXd & u_fine, const Eigen::VectorXd & c) const;

private:
    const NestedSystem & system_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

Eigen::VectorXd project_l2(const NestedSystem & system, const Eigen::VectorXd & u_fine);

struct PowerIterationOptions
{
    double tolerance = 1e-6; // relative change of the Rayleigh quotient
    int max_iterations = 5000;
};

/**
 * sup over non-constant fine functions u of |grad Pi u| / |grad u|, by power iteration for the
 * largest eigenvalue of (B^T Mc^-1 Kc Mc^-1 B, Kf) with the constant mode removed
 * Mf-orthogonally. Throws NumericError with the last estimate if the iteration does not settle.
 */
double measure_h1_stability(const NestedSystem & system, const PowerIterationOptions & options = {});
double measure_h1_stability(const Mesh & coarse, const Mesh & fine, const PowerIterationOptions & options = {});

} // namespace nvb
