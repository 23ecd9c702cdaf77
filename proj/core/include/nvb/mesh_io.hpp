#pragma once

#include <nvb/mesh.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace nvb {

/**
 * Line-oriented ASCII mesh format:
 *
 *     nvbm 1
 *     <nv> <ne>
 *     x y                                  (nv lines, shortest round-trip decimal)
 *     v0 v1 v2 gen ancestor red_son(0|1)   (ne lines, reference edge is (v0, v1))
 */
void write_nvbm(std::ostream & out, const Mesh & mesh);
void write_nvbm(const std::filesystem::path & path, const Mesh & mesh);
std::string to_nvbm(const Mesh & mesh);

/// Throws ParseError with a 1-based line number. With `require_conforming`, any
/// validate_mesh violation is rejected as well.
Mesh read_nvbm(std::istream & in, bool require_conforming = true);
Mesh read_nvbm(const std::filesystem::path & path, bool require_conforming = true);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

} // namespace nvb
