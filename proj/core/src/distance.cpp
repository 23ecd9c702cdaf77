#include <nvb/distance.hpp>
#include <nvb/exact.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nvb {

double point_segment_distance(const Vertex & p, const Vertex & a, const Vertex & b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double s = 0.0;
    if (len2 > 0.0)
        s = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + s * dx), p.y - (a.y + s * dy));
}

double segment_distance(const Vertex & a, const Vertex & b, const Vertex & c, const Vertex & d)
{
    const int o1 = exact::orientation(a, b, c);
    const int o2 = exact::orientation(a, b, d);
    const int o3 = exact::orientation(c, d, a);
    const int o4 = exact::orientation(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0)
        return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

namespace {

bool contains(const std::array<Vertex, 3> & t, const Vertex & p)
{
    int pos = 0;
    int neg = 0;
    for (int i = 0; i < 3; ++i) {
        const int o = exact::orientation(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)], p);
        pos += o > 0;
        neg += o < 0;
    }
    return pos == 0 || neg == 0;
}

} // namespace

double point_triangle_distance(const Vertex & p, const std::array<Vertex, 3> & t)
{
    if (contains(t, p))
        return 0.0;
    return std::min({point_segment_distance(p, t[0], t[1]), point_segment_distance(p, t[1], t[2]),
                     point_segment_distance(p, t[2], t[0])});
}

double triangle_distance(const std::array<Vertex, 3> & s, const std::array<Vertex, 3> & t)
{
    for (const auto & p : s)
        if (contains(t, p))
            return 0.0;
    for (const auto & p : t)
        if (contains(s, p))
            return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            best = std::min(best, segment_distance(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>((i + 1) % 3)],
                                                   t[static_cast<std::size_t>(j)], t[static_cast<std::size_t>((j + 1) % 3)]));
    return best;
}

} // namespace nvb
