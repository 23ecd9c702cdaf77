#include <nvb/errors.hpp>
#include <nvb/exact.hpp>
#include <nvb/forest.hpp>
#include <nvb/refine.hpp>

#include <algorithm>
#include <stdexcept>

namespace nvb {

namespace {

Vertex mid(const Vertex & a, const Vertex & b)
{
    return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5};
}

bool inside_closed(const std::array<Vertex, 3> & t, const Vertex & p)
{
    for (int i = 0; i < 3; ++i)
        if (exact::orientation(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)], p) < 0)
            return false;
    return true;
}

std::string locate(std::array<Vertex, 3> cur, const std::array<Vertex, 3> & target, int levels, ElemId t)
{
    std::string path;
    for (int level = 0; level < levels; ++level) {
        const Vertex p = mid(cur[0], cur[1]);
        int pos = 0;
        int neg = 0;
        for (const auto & x : target) {
            const int s = exact::orientation(cur[2], p, x);
            pos += s > 0;
            neg += s < 0;
        }
        if (pos > 0 && neg > 0)
            throw UnsupportedError("element " + std::to_string(t) + " is not reachable by bisections");
        // The left son (v2, v0, p) lies on the side of v0.
        const bool left = (pos > 0) == (exact::orientation(cur[2], p, cur[0]) > 0);
        if (left) {
            cur = {cur[2], cur[0], p};
            path.push_back('0');
        }
        else {
            cur = {cur[1], cur[2], p};
            path.push_back('1');
        }
    }
    if (cur != target)
        throw UnsupportedError("element " + std::to_string(t) + " is not reachable by bisections");
    return path;
}

/// Leaves sorted lexicographically tile the root iff repeatedly merging sibling pairs on a
/// stack ends with the empty path alone.
bool tiles_root(const std::vector<std::string> & sorted_paths)
{
    std::vector<std::string> stack;
    for (const auto & p : sorted_paths) {
        stack.push_back(p);
        while (stack.size() >= 2) {
            const auto & b = stack[stack.size() - 1];
            const auto & a = stack[stack.size() - 2];
            if (a.empty() || a.size() != b.size() || a.back() != '0' || b.back() != '1' ||
                a.compare(0, a.size() - 1, b, 0, b.size() - 1) != 0)
                break;
            std::string parent = a.substr(0, a.size() - 1);
            stack.pop_back();
            stack.back() = std::move(parent);
        }
    }
    return stack.size() == 1 && stack.front().empty();
}

} // namespace

BisectionForest BisectionForest::build(const Mesh & initial, const Mesh & mesh)
{
    for (const auto & e : initial.elements())
        if (e.gen != 0)
            throw std::invalid_argument("initial mesh has an element with nonzero generation");
    BisectionForest f;
    f.paths_.resize(mesh.num_elements());
    std::vector<std::vector<std::string>> per_root(initial.num_elements());
    for (ElemId t = 0; t < mesh.num_elements(); ++t) {
        const Element & e = mesh.element(t);
        if (e.ancestor >= initial.num_elements())
            throw std::invalid_argument("element " + std::to_string(t) + " has an ancestor outside the initial mesh");
        const auto root = initial.corners(e.ancestor);
        const auto target = mesh.corners(t);
        for (const auto & x : target)
            if (!inside_closed(root, x))
                throw std::invalid_argument("element " + std::to_string(t) + " does not lie in its ancestor");
        if (e.red_son)
            throw UnsupportedError("element " + std::to_string(t) + " is a red son");
        f.paths_[t] = locate(root, target, e.gen, t);
        per_root[e.ancestor].push_back(f.paths_[t]);
        f.leaves_.insert({e.ancestor, f.paths_[t]});
    }
    for (ElemId r = 0; r < per_root.size(); ++r) {
        auto & ps = per_root[r];
        std::sort(ps.begin(), ps.end());
        if (!tiles_root(ps))
            throw std::invalid_argument("descendants of initial element " + std::to_string(r) + " do not tile it");
    }
    return f;
}

std::set<TreeNode> BisectionForest::nodes() const
{
    std::set<TreeNode> out;
    for (const auto & [root, path] : leaves_)
        for (std::size_t n = 0; n <= path.size(); ++n)
            out.insert({root, path.substr(0, n)});
    return out;
}

Mesh overlay(const Mesh & initial, const Mesh & a, const Mesh & b)
{
    const auto fa = BisectionForest::build(initial, a);
    const auto fb = BisectionForest::build(initial, b);
    std::set<TreeNode> interior;
    for (const auto * f : {&fa, &fb})
        for (const auto & [root, path] : f->leaves())
            for (std::size_t n = 0; n < path.size(); ++n)
                interior.insert({root, path.substr(0, n)});

    Mesh cur = initial;
    std::vector<std::string> paths(initial.num_elements());
    for (;;) {
        std::set<ElemId> marked;
        for (ElemId t = 0; t < cur.num_elements(); ++t)
            if (interior.count({cur.element(t).ancestor, paths[t]}))
                marked.insert(t);
        if (marked.empty())
            break;
        RefineResult res = refine_nvb(cur, marked);
        std::vector<std::string> next(res.mesh.num_elements());
        for (ElemId s = 0; s < res.mesh.num_elements(); ++s)
            next[s] = paths[res.parent[s]] + res.path[s].str();
        cur = std::move(res.mesh);
        paths = std::move(next);
    }
    for (ElemId t = 0; t < cur.num_elements(); ++t)
        if (!fa.leaves().count({cur.element(t).ancestor, paths[t]}) &&
            !fb.leaves().count({cur.element(t).ancestor, paths[t]}))
            throw std::logic_error("overlay closure refined beyond the union of both forests");
    return cur;
}

} // namespace nvb
