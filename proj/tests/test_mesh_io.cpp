#include "corpus.hpp"
#include "oracles.hpp"

#include <nvb/builtin.hpp>
#include <nvb/errors.hpp>
#include <nvb/mesh_io.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace nvb;

namespace {

std::size_t parse_error_line(const std::string & text)
{
    std::istringstream in(text);
    try {
        read_nvbm(in);
    } catch (const ParseError & e) {
        return e.line();
    }
    return static_cast<std::size_t>(-1);
}

} // namespace

TEST(MeshIo, RoundTripIsExact)
{
    for (const auto & spec : corpus::seeded_specs(11, 5)) {
        const Mesh m = corpus::run(spec).meshes.back();
        std::istringstream in(to_nvbm(m));
        const Mesh back = read_nvbm(in);
        ASSERT_EQ(back.num_nodes(), m.num_nodes());
        ASSERT_EQ(back.num_elements(), m.num_elements());
        for (NodeId n = 0; n < m.num_nodes(); ++n)
            EXPECT_EQ(back.vertex(n), m.vertex(n));
        for (ElemId t = 0; t < m.num_elements(); ++t)
            EXPECT_EQ(back.element(t), m.element(t));
        EXPECT_EQ(to_nvbm(back), to_nvbm(m));
    }
}

TEST(MeshIo, ShortestRoundTripDecimals)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5, 0.0, 1e-300, 123456789.125})
        EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(MeshIo, KnownLayout)
{
    const std::string text = to_nvbm(square2());
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    std::size_t nv = 0, ne = 0;
    in >> magic >> version >> nv >> ne;
    EXPECT_EQ(magic, "nvbm");
    EXPECT_EQ(version, 1);
    EXPECT_EQ(nv, 4u);
    EXPECT_EQ(ne, 2u);
}

TEST(MeshIo, ParseErrorsCarryLineNumbers)
{
    EXPECT_EQ(parse_error_line("mesh 1\n"), 1u);
    EXPECT_EQ(parse_error_line("nvbm 1\nthree 1\n"), 2u);
    EXPECT_EQ(parse_error_line("nvbm 1\n3 1\n0 0\n1 x\n0 1\n0 1 2 0 0 0\n"), 4u);
    EXPECT_EQ(parse_error_line("nvbm 1\n3 1\n0 0\n1 0\n0 1\n0 1 5 0 0 0\n"), 6u);
    EXPECT_EQ(parse_error_line("nvbm 1\n3 1\n0 0\n1 0\n0 1\n0 1 2 0 0 7\n"), 6u);
    EXPECT_EQ(parse_error_line("nvbm 1\n3 2\n0 0\n1 0\n0 1\n0 1 2 0 0 0\n"), 7u);
}

TEST(MeshIo, NonConformingInputRejectedUnlessAllowed)
{
    // Clockwise element on line 6.
    const std::string cw = "nvbm 1\n3 1\n0 0\n1 0\n0 1\n0 2 1 0 0 0\n";
    EXPECT_EQ(parse_error_line(cw), 6u);
    std::istringstream in(cw);
    const Mesh m = read_nvbm(in, false);
    EXPECT_EQ(m.num_elements(), 1u);
    EXPECT_FALSE(validate_mesh(m).ok());
}

TEST(MeshIo, MissingFileThrows)
{
    EXPECT_ANY_THROW(read_nvbm(std::filesystem::path("/nonexistent/mesh.nvbm")));
}
