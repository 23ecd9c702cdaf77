#pragma once

#include <nvb/mesh.hpp>

#include <array>

namespace nvb {

double point_segment_distance(const Vertex & p, const Vertex & a, const Vertex & b);

double segment_distance(const Vertex & a, const Vertex & b, const Vertex & c, const Vertex & d);

/// Distance from p to the closed triangle; 0 if p lies in it.
double point_triangle_distance(const Vertex & p, const std::array<Vertex, 3> & t);

/// Distance between closest points of two closed triangles.
double triangle_distance(const std::array<Vertex, 3> & s, const std::array<Vertex, 3> & t);

} // namespace nvb
