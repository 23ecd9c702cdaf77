#pragma once

#include <nvb/mesh.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nvb {

/// (initial element, bisection path of '0'/'1' from it; '0' selects the left son).
using TreeNode = std::pair<ElemId, std::string>;

/**
 * Bisection trees of a mesh over its initial mesh, recovered geometrically: every element is
 * located by descending from its ancestor, choosing the son that contains it.
 */
class BisectionForest
{
public:
    /// Throws std::invalid_argument if the mesh does not refine `initial` (bad ancestor, an
    /// element outside its ancestor, leaves not tiling a root) and UnsupportedError if an
    /// element cannot be produced by bisections alone, e.g. a red son.
    static BisectionForest build(const Mesh & initial, const Mesh & mesh);

    /// Per element of the mesh, its bisection path from its ancestor.
    const std::vector<std::string> & paths() const { return paths_; }
    const std::set<TreeNode> & leaves() const { return leaves_; }

    /// Leaves plus all their ancestors in the trees.
    std::set<TreeNode> nodes() const;

private:
    std::vector<std::string> paths_;
    std::set<TreeNode> leaves_;
};

/**
 * Coarsest common refinement of two bisection refinements of `initial`, built by refineNVB
 * steps from `initial` marking elements that are interior nodes of the union of both forests.
 */
Mesh overlay(const Mesh & initial, const Mesh & a, const Mesh & b);

} // namespace nvb
