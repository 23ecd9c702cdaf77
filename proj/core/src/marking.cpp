#include <nvb/distance.hpp>
#include <nvb/marking.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace nvb {

MarkingStrategy MarkingStrategy::random_fraction(double p)
{
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("random marking fraction must lie in (0, 1]");
    MarkingStrategy s;
    s.kind = Kind::random;
    s.fraction = p;
    return s;
}

MarkingStrategy MarkingStrategy::corner_ball(Vertex x0, double r)
{
    if (!(r >= 0.0))
        throw std::invalid_argument("corner radius must be nonnegative");
    MarkingStrategy s;
    s.kind = Kind::corner;
    s.point = x0;
    s.radius = r;
    return s;
}

MarkingStrategy MarkingStrategy::dorfler_synthetic(Vertex x0, double theta, double alpha)
{
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("bulk parameter theta must lie in (0, 1]");
    if (!(alpha >= 0.0))
        throw std::invalid_argument("indicator exponent alpha must be nonnegative");
    MarkingStrategy s;
    s.kind = Kind::dorfler;
    s.point = x0;
    s.theta = theta;
    s.alpha = alpha;
    return s;
}

std::string MarkingStrategy::describe() const
{
    std::ostringstream out;
    switch (kind) {
    case Kind::all:
        out << "all";
        break;
    case Kind::random:
        out << "random p=" << fraction;
        break;
    case Kind::corner:
        out << "corner x=" << point.x << " y=" << point.y << " r=" << radius;
        break;
    case Kind::dorfler:
        out << "dorfler x=" << point.x << " y=" << point.y << " theta=" << theta << " alpha=" << alpha;
        break;
    }
    return out.str();
}

double synthetic_indicator(const Mesh & mesh, ElemId t, const Vertex & x0, double alpha)
{
    const auto c = mesh.corners(t);
    const Vertex centroid{(c[0].x + c[1].x + c[2].x) / 3.0, (c[0].y + c[1].y + c[2].y) / 3.0};
    const auto g = geometry(mesh, t);
    // The centroid can only meet x0 if x0 is interior to t; keep the indicator finite.
    const double dist = std::max(std::hypot(centroid.x - x0.x, centroid.y - x0.y), 1e-6 * g.diameter);
    return std::sqrt(g.area) * std::pow(dist, -alpha);
}

std::set<ElemId> select_elements(const Mesh & mesh, const MarkingStrategy & strategy, std::mt19937_64 & rng)
{
    std::set<ElemId> out;
    const auto n = static_cast<ElemId>(mesh.num_elements());
    switch (strategy.kind) {
    case MarkingStrategy::Kind::all:
        for (ElemId t = 0; t < n; ++t)
            out.insert(t);
        break;
    case MarkingStrategy::Kind::random: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (ElemId t = 0; t < n; ++t)
            if (u(rng) < strategy.fraction)
                out.insert(t);
        if (out.empty() && n > 0)
            out.insert(static_cast<ElemId>(rng() % n));
        break;
    }
    case MarkingStrategy::Kind::corner:
        for (ElemId t = 0; t < n; ++t)
            if (point_triangle_distance(strategy.point, mesh.corners(t)) <= strategy.radius)
                out.insert(t);
        break;
    case MarkingStrategy::Kind::dorfler: {
        std::vector<double> eta2(n);
        for (ElemId t = 0; t < n; ++t) {
            const double e = synthetic_indicator(mesh, t, strategy.point, strategy.alpha);
            eta2[t] = e * e;
        }
        std::vector<ElemId> order(n);
        std::iota(order.begin(), order.end(), ElemId{0});
        std::stable_sort(order.begin(), order.end(), [&](ElemId a, ElemId b) { return eta2[a] > eta2[b]; });
        const double total = std::accumulate(eta2.begin(), eta2.end(), 0.0);
        double acc = 0.0;
        for (const ElemId t : order) {
            if (acc >= strategy.theta * total && !out.empty())
                break;
            out.insert(t);
            acc += eta2[t];
        }
        break;
    }
    }
    return out;
}

} // namespace nvb
