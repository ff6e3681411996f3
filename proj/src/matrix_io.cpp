#include "qrbm/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qrbm/errors.hpp"

namespace qrbm {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Matrix parse_matrix(std::string_view text, std::string_view source)
{
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;

        std::vector<double> row;
        while (true) {
            const auto comma = line.find(',');
            const std::string_view cell = trim(line.substr(0, comma));
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                                 ": malformed cell '" + std::string(cell) + "'");
            row.push_back(v);
            if (comma == std::string_view::npos)
                break;
            line = line.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": row has " +
                             std::to_string(row.size()) + " cells, expected " +
                             std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError(std::string(source) + ": no data rows");

    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Matrix read_matrix(const std::filesystem::path& path)
{
    return parse_matrix(slurp(path), path.string());
}

BinaryMatrix read_binary_matrix(const std::filesystem::path& path)
{
    const Matrix m = read_matrix(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0 && m(i, j) != 1.0)
                throw ParseError(path.string() + ":" + std::to_string(i + 1) +
                                 ": non-binary value " + format_double(m(i, j)) + " in column " +
                                 std::to_string(j + 1));
    return m.cast<std::uint8_t>();
}

std::string format_matrix(const Matrix& m)
{
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0)
                out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& text, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw IoError("failed writing " + path.string());
}

void write_matrix(const Matrix& m, const std::filesystem::path& path)
{
    write_text(format_matrix(m), path);
}

void write_matrix(const BinaryMatrix& m, const std::filesystem::path& path)
{
    write_text(format_matrix(m.cast<double>()), path);
}

void write_report(const Report& report, const std::filesystem::path& path)
{
    std::string text;
    for (const auto& [key, value] : report)
        text += key + "=" + value + "\n";
    write_text(text, path);
}

Report read_report(const std::filesystem::path& path)
{
    Report out;
    std::istringstream in(slurp(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        out.emplace_back(std::string(t.substr(0, eq)), std::string(t.substr(eq + 1)));
    }
    return out;
}

} // namespace qrbm
