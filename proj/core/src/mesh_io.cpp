#include <nvb/errors.hpp>
#include <nvb/mesh_io.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace nvb {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_nvbm(std::ostream & out, const Mesh & mesh)
{
    out << "nvbm 1\n" << mesh.num_nodes() << ' ' << mesh.num_elements() << '\n';
    for (const auto & p : mesh.vertices())
        out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    for (const auto & e : mesh.elements())
        out << e.v[0] << ' ' << e.v[1] << ' ' << e.v[2] << ' ' << e.gen << ' ' << e.ancestor << ' '
            << (e.red_son ? 1 : 0) << '\n';
}

void write_nvbm(const std::filesystem::path & path, const Mesh & mesh)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_nvbm(out, mesh);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::string to_nvbm(const Mesh & mesh)
{
    std::ostringstream out;
    write_nvbm(out, mesh);
    return out.str();
}

namespace {

class LineReader
{
public:
    explicit LineReader(std::istream & in) : in_(in) {}

    std::string next(const char * what)
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                return line;
        }
        throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + what);
    }

    std::size_t line() const { return line_no_; }

private:
    std::istream & in_;
    std::size_t line_no_ = 0;
};

/// Splits on blanks and parses each token with from_chars.
template <typename T>
std::vector<T> parse_fields(const std::string & line, std::size_t expected, std::size_t line_no)
{
    std::vector<T> out;
    const char * p = line.data();
    const char * end = line.data() + line.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t'))
            ++p;
        if (p == end)
            break;
        const char * tok_end = p;
        while (tok_end < end && *tok_end != ' ' && *tok_end != '\t')
            ++tok_end;
        T value{};
        const auto res = std::from_chars(p, tok_end, value);
        if (res.ec != std::errc() || res.ptr != tok_end)
            throw ParseError(line_no, "malformed field '" + std::string(p, tok_end) + "'");
        out.push_back(value);
        p = tok_end;
    }
    if (out.size() != expected)
        throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, found " + std::to_string(out.size()));
    return out;
}

} // namespace

Mesh read_nvbm(std::istream & in, bool require_conforming)
{
    LineReader reader(in);
    {
        const std::string header = reader.next("header");
        if (header != "nvbm 1")
            throw ParseError(reader.line(), "expected header 'nvbm 1'");
    }
    const std::string count_line = reader.next("counts");
    const auto counts = parse_fields<std::size_t>(count_line, 2, reader.line());
    const std::size_t nv = counts[0];
    const std::size_t ne = counts[1];

    std::vector<Vertex> vertices;
    vertices.reserve(nv);
    std::vector<std::size_t> vertex_lines;
    for (std::size_t i = 0; i < nv; ++i) {
        const std::string line = reader.next("vertex");
        const auto xy = parse_fields<double>(line, 2, reader.line());
        if (!std::isfinite(xy[0]) || !std::isfinite(xy[1]))
            throw ParseError(reader.line(), "non-finite coordinate");
        vertices.push_back({xy[0], xy[1]});
        vertex_lines.push_back(reader.line());
    }

    std::vector<Element> elements;
    elements.reserve(ne);
    std::vector<std::size_t> element_lines;
    for (std::size_t i = 0; i < ne; ++i) {
        const std::string line = reader.next("element");
        const auto f = parse_fields<long long>(line, 6, reader.line());
        for (int k = 0; k < 3; ++k)
            if (f[static_cast<std::size_t>(k)] < 0 || static_cast<std::size_t>(f[static_cast<std::size_t>(k)]) >= nv)
                throw ParseError(reader.line(), "node index " + std::to_string(f[static_cast<std::size_t>(k)]) +
                                                    " out of range");
        if (f[3] < 0)
            throw ParseError(reader.line(), "negative generation");
        if (f[4] < 0)
            throw ParseError(reader.line(), "negative ancestor id");
        if (f[5] != 0 && f[5] != 1)
            throw ParseError(reader.line(), "red_son flag must be 0 or 1");
        Element e;
        e.v = {static_cast<NodeId>(f[0]), static_cast<NodeId>(f[1]), static_cast<NodeId>(f[2])};
        e.gen = static_cast<int>(f[3]);
        e.ancestor = static_cast<ElemId>(f[4]);
        e.red_son = f[5] == 1;
        elements.push_back(e);
        element_lines.push_back(reader.line());
    }

    Mesh mesh(std::move(vertices), std::move(elements));
    if (require_conforming) {
        const auto report = validate_mesh(mesh);
        if (!report.ok()) {
            const auto & v = report.violations.front();
            std::size_t line = 0;
            if (!v.elements.empty())
                line = element_lines[v.elements.front()];
            else if (!v.nodes.empty())
                line = vertex_lines[v.nodes.back()];
            std::string msg = "non-conforming mesh: " + v.message;
            if (report.violations.size() > 1)
                msg += " (and " + std::to_string(report.violations.size() - 1) + " more violations)";
            throw ParseError(line, msg);
        }
    }
    return mesh;
}

Mesh read_nvbm(const std::filesystem::path & path, bool require_conforming)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_nvbm(in, require_conforming);
}

} // namespace nvb
