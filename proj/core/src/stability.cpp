#include <nvb/stability.hpp>

#include <nvb/errors.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace nvb {

namespace {

double twice_signed_area(const std::array<Vertex, 3> & t)
{
    return (t[1].x - t[0].x) * (t[2].y - t[0].y) - (t[2].x - t[0].x) * (t[1].y - t[0].y);
}

double checked_area(const std::array<Vertex, 3> & t)
{
    const double a2 = twice_signed_area(t);
    const double scale = std::max({std::hypot(t[1].x - t[0].x, t[1].y - t[0].y), std::hypot(t[2].x - t[1].x, t[2].y - t[1].y),
                                   std::hypot(t[0].x - t[2].x, t[0].y - t[2].y)});
    if (!std::isfinite(a2) || std::abs(a2) <= 1e-14 * scale * scale)
        throw std::invalid_argument("degenerate triangle");
    return 0.5 * std::abs(a2);
}

// Dual graph over full shared edges.
std::vector<std::vector<ElemId>> dual_adjacency(const Mesh & mesh)
{
    std::vector<std::vector<ElemId>> adj(mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        for (int i = 0; i < 3; ++i)
            if (auto n = mesh.neighbor(t, i))
                adj[t].push_back(*n);
    return adj;
}

bool dual_connected(const std::vector<std::vector<ElemId>> & adj)
{
    if (adj.empty())
        return true;
    std::vector<char> seen(adj.size(), 0);
    std::vector<ElemId> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const ElemId t = stack.back();
        stack.pop_back();
        for (ElemId n : adj[t])
            if (!seen[n]) {
                seen[n] = 1;
                ++count;
                stack.push_back(n);
            }
    }
    return count == adj.size();
}

} // namespace

Eigen::Matrix3d element_mass(const std::array<Vertex, 3> & t)
{
    const double area = checked_area(t);
    Eigen::Matrix3d m;
    m.setConstant(area / 12.0);
    m.diagonal().setConstant(area / 6.0);
    return m;
}

Eigen::Matrix3d element_stiffness(const std::array<Vertex, 3> & t)
{
    const double area = checked_area(t);
    // Edge vectors opposite to each vertex, rotated: grad(phi_i) = perp(e_i) / (2 |T|).
    Eigen::Matrix<double, 3, 2> g;
    for (int i = 0; i < 3; ++i) {
        const Vertex & a = t[static_cast<std::size_t>((i + 1) % 3)];
        const Vertex & b = t[static_cast<std::size_t>((i + 2) % 3)];
        g(i, 0) = a.y - b.y;
        g(i, 1) = b.x - a.x;
    }
    return g * g.transpose() / (4.0 * area);
}

std::vector<std::vector<ElemId>> node_stars(const Mesh & mesh)
{
    std::vector<std::vector<ElemId>> stars(mesh.num_nodes());
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        for (NodeId n : mesh.element(t).v)
            stars[n].push_back(t);
    return stars;
}

// ---------------------------------------------------------------------------
// Distances and weights

DeltaOracle::DeltaOracle(const Mesh & mesh, ChainAdjacency adjacency)
    : mesh_(mesh), adjacency_(adjacency), stars_(node_stars(mesh))
{
}

const std::vector<int> & DeltaOracle::search(NodeId j)
{
    if (j >= mesh_.num_nodes())
        throw std::invalid_argument("node " + std::to_string(j) + " out of range");
    auto it = cache_.find(j);
    if (it != cache_.end())
        return it->second;

    std::vector<int> dist(mesh_.num_elements(), kInfinity);
    std::deque<ElemId> queue;
    for (ElemId t : stars_[j]) {
        dist[t] = 1;
        queue.push_back(t);
    }
    while (!queue.empty()) {
        const ElemId t = queue.front();
        queue.pop_front();
        auto visit = [&](ElemId n) {
            if (dist[n] == kInfinity) {
                dist[n] = dist[t] + 1;
                queue.push_back(n);
            }
        };
        if (adjacency_ == ChainAdjacency::edge) {
            for (int i = 0; i < 3; ++i)
                if (auto n = mesh_.neighbor(t, i))
                    visit(*n);
        } else {
            for (NodeId z : mesh_.element(t).v)
                for (ElemId n : stars_[z])
                    visit(n);
        }
    }
    return cache_.emplace(j, std::move(dist)).first->second;
}

int DeltaOracle::node_distance(NodeId j, NodeId k)
{
    if (k >= mesh_.num_nodes())
        throw std::invalid_argument("node " + std::to_string(k) + " out of range");
    if (j == k)
        return 0;
    const auto & dist = search(j);
    int best = kInfinity;
    for (ElemId t : stars_[k])
        best = std::min(best, dist[t]);
    return best;
}

int DeltaOracle::element_distance(NodeId j, ElemId t)
{
    mesh_.check_element(t);
    int best = kInfinity;
    for (NodeId k : mesh_.element(t).v)
        best = std::min(best, node_distance(j, k));
    return best;
}

double NodeWeights::d(NodeId j) const
{
    return std::exp2(0.5 * exponent.at(j));
}

std::vector<double> NodeWeights::values() const
{
    std::vector<double> out(exponent.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = std::exp2(0.5 * exponent[j]);
    return out;
}

namespace {

// delta is the mesh-edge graph distance here, so e_j = min over z of 2 dist(z_j, z) - star_gen(z).
NodeWeights node_chain_weights(const Mesh & mesh, const std::vector<int> & star_gen)
{
    std::vector<std::vector<NodeId>> nbrs(mesh.num_nodes());
    for (const auto & entry : mesh.edge_table().entries()) {
        nbrs[entry.key.a].push_back(entry.key.b);
        nbrs[entry.key.b].push_back(entry.key.a);
    }
    const int unset = std::numeric_limits<int>::max();
    std::vector<int> e(mesh.num_nodes(), unset);
    using Item = std::pair<int, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (NodeId z = 0; z < mesh.num_nodes(); ++z) {
        if (star_gen[z] == std::numeric_limits<int>::min())
            throw std::invalid_argument("node " + std::to_string(z) + " belongs to no element");
        e[z] = -star_gen[z];
        heap.emplace(e[z], z);
    }
    while (!heap.empty()) {
        const auto [value, z] = heap.top();
        heap.pop();
        if (value != e[z])
            continue;
        for (NodeId n : nbrs[z])
            if (value + 2 < e[n]) {
                e[n] = value + 2;
                heap.emplace(e[n], n);
            }
    }
    NodeWeights w;
    w.exponent = std::move(e);
    return w;
}

} // namespace

NodeWeights compute_weights(const Mesh & mesh, ChainAdjacency adjacency)
{
    const auto adj = dual_adjacency(mesh);
    if (!dual_connected(adj))
        throw std::invalid_argument("element adjacency graph is not connected");
    const auto stars = node_stars(mesh);

    // Highest generation in the star of each node.
    std::vector<int> star_gen(mesh.num_nodes(), std::numeric_limits<int>::min());
    for (ElemId t = 0; t < mesh.num_elements(); ++t)
        for (NodeId n : mesh.element(t).v)
            star_gen[n] = std::max(star_gen[n], mesh.element(t).gen);
    if (adjacency == ChainAdjacency::node)
        return node_chain_weights(mesh, star_gen);

    // q(T) = min over T' of -gen(patch of T') + 2 dist(T, T'), the patch being all elements
    // sharing a node with T'.
    std::vector<int> q(mesh.num_elements());
    using Item = std::pair<int, ElemId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        int g = std::numeric_limits<int>::min();
        for (NodeId n : mesh.element(t).v)
            g = std::max(g, star_gen[n]);
        q[t] = -g;
        heap.emplace(q[t], t);
    }
    while (!heap.empty()) {
        const auto [value, t] = heap.top();
        heap.pop();
        if (value != q[t])
            continue;
        for (ElemId n : adj[t])
            if (value + 2 < q[n]) {
                q[n] = value + 2;
                heap.emplace(q[n], n);
            }
    }

    NodeWeights w;
    w.exponent.resize(mesh.num_nodes());
    for (NodeId j = 0; j < mesh.num_nodes(); ++j) {
        if (stars[j].empty())
            throw std::invalid_argument("node " + std::to_string(j) + " belongs to no element");
        int b = std::numeric_limits<int>::max();
        for (ElemId t : stars[j])
            b = std::min(b, q[t]);
        w.exponent[j] = std::min(-star_gen[j], 2 + b);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Element conditions

namespace {

// sq(j, k) = d_j^2 / d_k^2 for local nodes of one element.
using SquaredRatio = std::function<double(int, int)>;

void fill_condition(ElementCondition & c, const Mesh & mesh, ElemId t, const std::array<double, 3> & d, const SquaredRatio & sq,
                    StabilityReport & report)
{
    double s = 0.0;
    double max_sq = 1.0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const double r = sq(j, k);
            s += r;
            max_sq = std::max(max_sq, r);
        }
    c.elem = t;
    c.sum_squared_ratios = s;
    c.max_ratio = std::sqrt(max_sq);
    c.lambda_min = 5.0 - std::sqrt(s);

    Eigen::Matrix3d b;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            b(j, k) = (d[static_cast<std::size_t>(j)] / d[static_cast<std::size_t>(k)] + d[static_cast<std::size_t>(k)] / d[static_cast<std::size_t>(j)]) *
                      (j == k ? 2.0 : 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(b, Eigen::EigenvaluesOnly);
    c.lambda_min_eigen = eig.eigenvalues()(0);

    const auto corners = mesh.corners(t);
    const double h = geometry(mesh, t).diameter;
    const Eigen::Matrix3d m = element_mass(corners);
    Eigen::Vector3d lambda2;
    for (int j = 0; j < 3; ++j) {
        const double l = h / d[static_cast<std::size_t>(j)];
        lambda2(j) = l * l;
        report.c6 = std::max({report.c6, l, 1.0 / l});
    }
    const Eigen::Matrix3d l2m = lambda2.asDiagonal() * m;
    const Eigen::Matrix3d upper = l2m * lambda2.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> g7(upper, m, Eigen::EigenvaluesOnly);
    c.c7 = g7.eigenvalues().maxCoeff();
    const Eigen::Matrix3d sym = 0.5 * (l2m + l2m.transpose());
    if (Eigen::LLT<Eigen::Matrix3d>(sym).info() == Eigen::Success) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> g8(m, sym, Eigen::EigenvaluesOnly);
        c.c8 = g8.eigenvalues().maxCoeff();
    } else {
        c.c8 = std::numeric_limits<double>::infinity();
    }

    c.sum_ok = s < 25.0;
    c.lambda_ok = c.lambda_min > 0.0;
    c.relaxed_ok = 1.0 + max_sq + 1.0 / max_sq < 11.0;

    report.max_sum = std::max(report.max_sum, s);
    report.min_lambda = std::min(report.min_lambda, c.lambda_min);
    report.max_lambda_mismatch = std::max(report.max_lambda_mismatch, std::abs(c.lambda_min - c.lambda_min_eigen));
    report.c5 = std::max(report.c5, c.max_ratio);
    report.c7 = std::max(report.c7, c.c7);
    report.c8 = std::max(report.c8, c.c8);
}

void finish(StabilityReport & report)
{
    for (const auto & c : report.elements)
        if (!c.ratio_ok || !c.sum_ok || !c.lambda_ok)
            ++report.violations;
    report.relaxed_criterion = 1.0 + report.c5 * report.c5 + 1.0 / (report.c5 * report.c5) < 11.0;
}

} // namespace

StabilityReport check_conditions(const Mesh & mesh, const NodeWeights & weights)
{
    if (weights.exponent.size() != mesh.num_nodes())
        throw std::invalid_argument("weights do not match the mesh nodes");
    StabilityReport report;
    report.min_lambda = std::numeric_limits<double>::infinity();
    report.elements.resize(mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto & v = mesh.element(t).v;
        std::array<int, 3> e{};
        std::array<double, 3> d{};
        for (std::size_t i = 0; i < 3; ++i) {
            e[i] = weights.exponent[v[i]];
            d[i] = std::exp2(0.5 * e[i]);
        }
        auto & c = report.elements[t];
        fill_condition(c, mesh, t, d, [&](int j, int k) { return std::exp2(e[static_cast<std::size_t>(j)] - e[static_cast<std::size_t>(k)]); }, report);
        c.max_exponent_gap = *std::max_element(e.begin(), e.end()) - *std::min_element(e.begin(), e.end());
        c.ratio_ok = c.max_exponent_gap <= 2;
    }
    finish(report);
    return report;
}

StabilityReport check_conditions(const Mesh & mesh, const std::vector<double> & weights)
{
    if (weights.size() != mesh.num_nodes())
        throw std::invalid_argument("weights do not match the mesh nodes");
    for (double x : weights)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("weights must be positive and finite");
    StabilityReport report;
    report.min_lambda = std::numeric_limits<double>::infinity();
    report.elements.resize(mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto & v = mesh.element(t).v;
        const std::array<double, 3> d{weights[v[0]], weights[v[1]], weights[v[2]]};
        auto & c = report.elements[t];
        fill_condition(c, mesh, t, d, [&](int j, int k) {
            const double r = d[static_cast<std::size_t>(j)] / d[static_cast<std::size_t>(k)];
            return r * r;
        }, report);
        c.max_exponent_gap = static_cast<int>(std::ceil(2.0 * std::log2(c.max_ratio) - 1e-9));
        c.ratio_ok = c.max_ratio <= 2.0 * (1.0 + 1e-12);
    }
    finish(report);
    return report;
}

// ---------------------------------------------------------------------------
// Assembly

SparseSystem assemble(const Mesh & mesh)
{
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> mt, kt;
    mt.reserve(9 * mesh.num_elements());
    kt.reserve(9 * mesh.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const auto corners = mesh.corners(t);
        const Eigen::Matrix3d m = element_mass(corners);
        const Eigen::Matrix3d k = element_stiffness(corners);
        const auto & v = mesh.element(t).v;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const auto r = static_cast<Eigen::Index>(v[static_cast<std::size_t>(i)]);
                const auto s = static_cast<Eigen::Index>(v[static_cast<std::size_t>(j)]);
                mt.emplace_back(r, s, m(i, j));
                kt.emplace_back(r, s, k(i, j));
            }
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    SparseSystem sys;
    sys.mass.resize(n, n);
    sys.stiffness.resize(n, n);
    sys.mass.setFromTriplets(mt.begin(), mt.end());
    sys.stiffness.setFromTriplets(kt.begin(), kt.end());
    return sys;
}

namespace {

Eigen::Vector3d barycentric(const std::array<Vertex, 3> & t, const Vertex & p)
{
    const double a2 = twice_signed_area(t);
    const double l1 = ((p.x - t[0].x) * (t[2].y - t[0].y) - (t[2].x - t[0].x) * (p.y - t[0].y)) / a2;
    const double l2 = ((t[1].x - t[0].x) * (p.y - t[0].y) - (p.x - t[0].x) * (t[1].y - t[0].y)) / a2;
    return {1.0 - l1 - l2, l1, l2};
}

// Uniform bucket grid over element bounding boxes.
class PointLocator
{
public:
    explicit PointLocator(const Mesh & mesh) : mesh_(mesh)
    {
        for (const Vertex & v : mesh.vertices()) {
            lo_x_ = std::min(lo_x_, v.x);
            lo_y_ = std::min(lo_y_, v.y);
            hi_x_ = std::max(hi_x_, v.x);
            hi_y_ = std::max(hi_y_, v.y);
        }
        n_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(mesh.num_elements()))));
        cells_.resize(n_ * n_);
        for (ElemId t = 0; t < mesh.num_elements(); ++t) {
            const auto c = mesh.corners(t);
            const auto [x0, x1] = std::minmax({c[0].x, c[1].x, c[2].x});
            const auto [y0, y1] = std::minmax({c[0].y, c[1].y, c[2].y});
            for (std::size_t i = cell(x0, lo_x_, hi_x_); i <= cell(x1, lo_x_, hi_x_); ++i)
                for (std::size_t j = cell(y0, lo_y_, hi_y_); j <= cell(y1, lo_y_, hi_y_); ++j)
                    cells_[i * n_ + j].push_back(t);
        }
    }

    /// Element containing p up to `tol` in barycentric coordinates, if any.
    std::optional<ElemId> locate(const Vertex & p, double tol) const
    {
        if (p.x < lo_x_ || p.x > hi_x_ || p.y < lo_y_ || p.y > hi_y_)
            return std::nullopt;
        for (ElemId t : cells_[cell(p.x, lo_x_, hi_x_) * n_ + cell(p.y, lo_y_, hi_y_)])
            if (barycentric(mesh_.corners(t), p).minCoeff() >= -tol)
                return t;
        return std::nullopt;
    }

private:
    std::size_t cell(double x, double lo, double hi) const
    {
        if (hi <= lo)
            return 0;
        const double s = (x - lo) / (hi - lo) * static_cast<double>(n_);
        return std::min(n_ - 1, static_cast<std::size_t>(std::max(0.0, s)));
    }

    const Mesh & mesh_;
    double lo_x_ = std::numeric_limits<double>::infinity(), lo_y_ = lo_x_;
    double hi_x_ = -lo_x_, hi_y_ = -lo_x_;
    std::size_t n_ = 1;
    std::vector<std::vector<ElemId>> cells_;
};

} // namespace

NestedSystem assemble_nested(const Mesh & coarse, const Mesh & fine)
{
    constexpr double kTol = 1e-10;
    const double ac = total_area(coarse);
    const double af = total_area(fine);
    if (std::abs(ac - af) > 1e-12 * std::max(1.0, ac))
        throw std::invalid_argument("meshes cover different areas");

    const PointLocator locator(coarse);
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> pt;
    std::vector<char> done(fine.num_nodes(), 0);
    for (ElemId t = 0; t < fine.num_elements(); ++t) {
        const auto c = fine.corners(t);
        const Vertex centroid{(c[0].x + c[1].x + c[2].x) / 3.0, (c[0].y + c[1].y + c[2].y) / 3.0};
        const auto host = locator.locate(centroid, kTol);
        if (!host)
            throw std::invalid_argument("fine element " + std::to_string(t) + " lies outside the coarse mesh");
        const auto hc = coarse.corners(*host);
        const auto & hv = coarse.element(*host).v;
        for (std::size_t i = 0; i < 3; ++i) {
            const Eigen::Vector3d l = barycentric(hc, c[i]);
            if (l.minCoeff() < -kTol)
                throw std::invalid_argument("fine element " + std::to_string(t) + " is not contained in a coarse element");
            const NodeId n = fine.element(t).v[i];
            if (done[n])
                continue;
            done[n] = 1;
            for (int k = 0; k < 3; ++k)
                if (std::abs(l(k)) > 1e-14)
                    pt.emplace_back(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(hv[static_cast<std::size_t>(k)]), l(k));
        }
    }

    NestedSystem sys;
    sys.coarse = assemble(coarse);
    sys.fine = assemble(fine);
    sys.prolongation.resize(static_cast<Eigen::Index>(fine.num_nodes()), static_cast<Eigen::Index>(coarse.num_nodes()));
    sys.prolongation.setFromTriplets(pt.begin(), pt.end());
    sys.cross = Eigen::SparseMatrix<double>(sys.prolongation.transpose() * sys.fine.mass);
    return sys;
}

// ---------------------------------------------------------------------------
// Projection

namespace {

double ldlt_condition_estimate(const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> & s)
{
    const Eigen::VectorXd d = s.vectorD().cwiseAbs();
    if (d.size() == 0 || d.minCoeff() == 0.0)
        return std::numeric_limits<double>::infinity();
    return d.maxCoeff() / d.minCoeff();
}

} // namespace

L2Projector::L2Projector(const NestedSystem & system) : system_(system)
{
    solver_.compute(system.coarse.mass);
    if (solver_.info() != Eigen::Success || !(solver_.vectorD().minCoeff() > 0.0))
        throw NumericError("coarse mass matrix factorization failed", ldlt_condition_estimate(solver_));
}

Eigen::VectorXd L2Projector::project(const Eigen::VectorXd & u_fine) const
{
    if (u_fine.size() != system_.cross.cols())
        throw std::invalid_argument("fine vector has the wrong size");
    Eigen::VectorXd c = solver_.solve(system_.cross * u_fine);
    if (solver_.info() != Eigen::Success || !c.allFinite())
        throw NumericError("coarse mass solve failed", ldlt_condition_estimate(solver_));
    return c;
}

double L2Projector::orthogonality_residual(const Eigen::VectorXd & u_fine, const Eigen::VectorXd & c) const
{
    const Eigen::VectorXd rhs = system_.cross * u_fine;
    const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
    return (rhs - system_.coarse.mass * c).norm() / scale;
}

Eigen::VectorXd project_l2(const NestedSystem & system, const Eigen::VectorXd & u_fine)
{
    return L2Projector(system).project(u_fine);
}

// ---------------------------------------------------------------------------
// H1 stability

double measure_h1_stability(const NestedSystem & sys, const PowerIterationOptions & options)
{
    const Eigen::Index n = sys.fine.stiffness.rows();
    if (n < 2)
        throw std::invalid_argument("fine space has no non-constant functions");
    const L2Projector projector(sys);

    // Stiffness with node 0 pinned, for solves on the complement of constants.
    Eigen::SparseMatrix<double> pinned = sys.fine.stiffness.bottomRightCorner(n - 1, n - 1);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> kf(pinned);
    if (kf.info() != Eigen::Success)
        throw NumericError("fine stiffness factorization failed", ldlt_condition_estimate(kf));

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd m_ones = sys.fine.mass * ones;
    const double total = ones.dot(m_ones);
    auto remove_constant = [&](Eigen::VectorXd & x) { x.array() -= x.dot(m_ones) / total; };
    auto energy = [&](const Eigen::VectorXd & x) { return x.dot(sys.fine.stiffness * x); };
    // A x = B^T Mc^-1 Kc Mc^-1 B x.
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mc(sys.coarse.mass);
    auto apply_a = [&](const Eigen::VectorXd & x) {
        const Eigen::VectorXd c = projector.project(x);
        const Eigen::VectorXd y = mc.solve(sys.coarse.stiffness * c);
        return Eigen::VectorXd(sys.cross.transpose() * y);
    };

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x(i) = dist(rng);
    remove_constant(x);
    x /= std::sqrt(energy(x));

    double estimate = 0.0;
    for (int it = 0; it < options.max_iterations; ++it) {
        const Eigen::VectorXd y = apply_a(x);
        const double rq = x.dot(y) / energy(x);
        if (!std::isfinite(rq))
            throw NumericError("power iteration diverged", estimate);
        if (it > 0 && std::abs(rq - estimate) <= options.tolerance * std::max(rq, 1e-300)) {
            estimate = std::max(estimate, rq);
            return std::sqrt(estimate);
        }
        estimate = rq;
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        z.tail(n - 1) = kf.solve(y.tail(n - 1));
        remove_constant(z);
        const double e = energy(z);
        if (!(e > 0.0))
            return 0.0; // A vanishes: the projection of every function is constant
        x = z / std::sqrt(e);
    }
    throw NumericError("power iteration did not converge", std::sqrt(std::max(estimate, 0.0)));
}

double measure_h1_stability(const Mesh & coarse, const Mesh & fine, const PowerIterationOptions & options)
{
    return measure_h1_stability(assemble_nested(coarse, fine), options);
}

} // namespace nvb
