#pragma once

#include <nvb/mesh.hpp>

#include <random>
#include <set>
#include <string>

namespace nvb {

struct MarkingStrategy
{
    enum class Kind
    {
        all,
        random,  // each element independently with probability `fraction`
        corner,  // elements within `radius` of `point`
        dorfler, // smallest set carrying a `theta` share of sum eta_T^2
    };

    Kind kind = Kind::all;
    double fraction = 0.5;
    Vertex point{0.0, 0.0};
    double radius = 0.0;
    double theta = 0.5;
    double alpha = 1.0;

    static MarkingStrategy all_elements() { return {}; }
    static MarkingStrategy random_fraction(double p);
    static MarkingStrategy corner_ball(Vertex x0, double r);
    static MarkingStrategy dorfler_synthetic(Vertex x0, double theta, double alpha);

    std::string describe() const;
};

/// Synthetic error indicator |T|^(1/2) * dist(centroid(T), x0)^(-alpha).
double synthetic_indicator(const Mesh & mesh, ElemId t, const Vertex & x0, double alpha);

/**
 * Selects marked elements. Random marking draws from `rng` and marks one uniformly chosen
 * element if the draw is empty; Dörfler ties are broken by ascending element id.
 */
std::set<ElemId> select_elements(const Mesh & mesh, const MarkingStrategy & strategy, std::mt19937_64 & rng);

} // namespace nvb
