#include "doctest.h"

#include <fstream>

#include "qrbm/errors.hpp"
#include "qrbm/matrix_io.hpp"
#include "support.hpp"

using namespace qrbm;

namespace {

std::string message_of(std::string_view text)
{
    try {
        parse_matrix(text, "in.csv");
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("parse a small matrix")
{
    const Matrix m = parse_matrix("1,0,1\n0,1,0\n");
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m(0, 2) == 1.0);
    CHECK(m(1, 1) == 1.0);
    CHECK(m(1, 2) == 0.0);

    const Matrix crlf = parse_matrix("0.5, -2\r\n\r\n3e-3,4\r\n");
    CHECK(crlf.rows() == 2);
    CHECK(crlf(0, 1) == -2.0);
    CHECK(crlf(1, 0) == 3e-3);
}

TEST_CASE("parse errors name the line")
{
    CHECK(message_of("1,0\n1,0,1\n").find("in.csv:2") != std::string::npos);
    CHECK(message_of("1,x\n").find("in.csv:1") != std::string::npos);
    CHECK(message_of("1,,0\n").find("in.csv:1") != std::string::npos);
    CHECK_THROWS_AS(parse_matrix(""), ParseError);
    CHECK_THROWS_AS(parse_matrix("\n\n"), ParseError);
}

TEST_CASE("binary files reject other values")
{
    testing::TempDir dir("io");
    write_text("1,0\n0,2\n", dir.path / "q.csv");
    CHECK_THROWS_AS(read_binary_matrix(dir.path / "q.csv"), ParseError);
    write_text("1,0\n0,1\n", dir.path / "ok.csv");
    CHECK(read_binary_matrix(dir.path / "ok.csv") == BinaryMatrix::Identity(2, 2));
    CHECK_THROWS_AS(read_matrix(dir.path / "missing.csv"), IoError);
}

TEST_CASE("round trip is exact")
{
    testing::TempDir dir("io");
    Rng rng = make_rng(1);
    const RbmParams p = testing::random_params(7, 3, rng, 5.0);
    Matrix m = p.W;
    m(0, 0) = 1e-300;
    m(1, 1) = -0.0;
    m(2, 2) = 0.1;
    write_matrix(m, dir.path / "w.csv");
    CHECK(read_matrix(dir.path / "w.csv") == m);

    const BinaryMatrix b = testing::random_binary(9, 4, rng);
    write_matrix(b, dir.path / "b.csv");
    CHECK(read_binary_matrix(dir.path / "b.csv") == b);
    std::ifstream in(dir.path / "b.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line.size() == 7);

    for (double x : {0.1, 1.0 / 3.0, 2.5e-17, 123456789.0, -7.0})
        CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("report round trip")
{
    testing::TempDir dir("io");
    const Report r = {{"oe", "0.25"}, {"permutation", "2,0,1"}, {"mean_acc", "0.9"}};
    write_report(r, dir.path / "report.txt");
    CHECK(read_report(dir.path / "report.txt") == r);
}
