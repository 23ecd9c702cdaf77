#include <nvb/exact.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace nvb::exact {

namespace {

struct Decomposed
{
    std::int64_t mantissa = 0; // 53-bit signed integer
    int exponent = 0;          // value = mantissa * 2^exponent
};

Decomposed decompose(double v)
{
    if (v == 0.0)
        return {0, std::numeric_limits<int>::max()};
    int e = 0;
    const double f = std::frexp(v, &e);
    auto m = static_cast<std::int64_t>(std::ldexp(f, 53));
    e -= 53;
    while ((m & 1) == 0) {
        m /= 2;
        ++e;
    }
    return {m, e};
}

Dyadic normalize(__int128 m, int e)
{
    if (m == 0)
        return {0, 0};
    while ((m & 1) == 0) {
        m >>= 1;
        ++e;
    }
    return {m, e};
}

} // namespace

std::optional<Dyadic> twice_area(const Vertex & a, const Vertex & b, const Vertex & c)
{
    const std::array<double, 6> raw{a.x, a.y, b.x, b.y, c.x, c.y};
    std::array<Decomposed, 6> parts{};
    int emin = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]))
            return std::nullopt;
        parts[i] = decompose(raw[i]);
        emin = std::min(emin, parts[i].exponent);
    }
    if (emin == std::numeric_limits<int>::max())
        return Dyadic{0, 0};

    std::array<__int128, 6> ints{};
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (parts[i].mantissa == 0)
            continue;
        const int shift = parts[i].exponent - emin;
        const auto magnitude = static_cast<std::uint64_t>(parts[i].mantissa < 0 ? -parts[i].mantissa : parts[i].mantissa);
        const int bits = 64 - __builtin_clzll(magnitude) + shift;
        // Grid integers below 2^61 keep every product below 2^124.
        if (bits > 61)
            return std::nullopt;
        ints[i] = static_cast<__int128>(parts[i].mantissa) << shift;
    }
    const __int128 abx = ints[2] - ints[0];
    const __int128 aby = ints[3] - ints[1];
    const __int128 acx = ints[4] - ints[0];
    const __int128 acy = ints[5] - ints[1];
    const __int128 det = abx * acy - aby * acx;
    return normalize(det, 2 * emin);
}

int orientation(const Vertex & a, const Vertex & b, const Vertex & c)
{
    if (const auto d = twice_area(a, b, c))
        return d->mantissa > 0 ? 1 : (d->mantissa < 0 ? -1 : 0);
    const long double det = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                            (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

std::optional<bool> area_matches_generation(const std::array<Vertex, 3> & t, int gen,
                                            const std::array<Vertex, 3> & ancestor)
{
    const auto child = twice_area(t[0], t[1], t[2]);
    const auto root = twice_area(ancestor[0], ancestor[1], ancestor[2]);
    if (!child || !root)
        return std::nullopt;
    return child->mantissa == root->mantissa && child->exponent + gen == root->exponent;
}

} // namespace nvb::exact
