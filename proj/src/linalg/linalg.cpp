#include "positlab/linalg.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace positlab {

namespace {

std::string lowercase(std::string s)
{
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

std::vector<std::string> split_ws(const std::string& line)
{
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) {
        out.push_back(tok);
    }
    return out;
}

std::size_t parse_index(const std::string& tok, std::size_t lineno, const char* what)
{
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != tok.size() || tok.empty() || tok[0] == '-' || tok[0] == '+') {
        throw MtxError(lineno, std::string("malformed ") + what + " '" + tok + "'");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

SparseMatrix<BigRational> mtx_read(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw MtxError(0, "empty Matrix Market input");
    }
    ++lineno;
    auto header = split_ws(line);
    if (header.size() != 5 || header[0] != "%%MatrixMarket") {
        throw MtxError(lineno, "expected '%%MatrixMarket matrix coordinate real general|symmetric'");
    }
    for (std::size_t i = 1; i < header.size(); ++i) {
        header[i] = lowercase(header[i]);
    }
    if (header[1] != "matrix") {
        throw MtxUnsupported(lineno, "unsupported object '" + header[1] + "'");
    }
    if (header[2] != "coordinate") {
        throw MtxUnsupported(lineno, "unsupported format '" + header[2] + "' (only coordinate)");
    }
    if (header[3] != "real" && header[3] != "integer") {
        throw MtxUnsupported(lineno, "unsupported field '" + header[3] + "' (only real)");
    }
    bool symmetric = false;
    if (header[4] == "symmetric") {
        symmetric = true;
    } else if (header[4] != "general") {
        throw MtxUnsupported(lineno, "unsupported symmetry '" + header[4] + "'");
    }

    auto next_data_line = [&](std::vector<std::string>& toks) {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!line.empty() && line[0] == '%') {
                continue;
            }
            toks = split_ws(line);
            if (toks.empty()) {
                continue;
            }
            return true;
        }
        return false;
    };

    std::vector<std::string> toks;
    if (!next_data_line(toks)) {
        throw MtxError(lineno, "missing size line");
    }
    if (toks.size() != 3) {
        throw MtxError(lineno, "size line must be 'rows cols nnz'");
    }
    const std::size_t rows = parse_index(toks[0], lineno, "row count");
    const std::size_t cols = parse_index(toks[1], lineno, "column count");
    const std::size_t nnz = parse_index(toks[2], lineno, "entry count");
    if (symmetric && rows != cols) {
        throw MtxError(lineno, "symmetric matrix must be square");
    }

    std::map<std::pair<std::size_t, std::size_t>, BigRational> entries;
    std::size_t seen = 0;
    while (next_data_line(toks)) {
        if (seen == nnz) {
            throw MtxError(lineno, "more entries than the declared " + std::to_string(nnz));
        }
        if (toks.size() != 3) {
            throw MtxError(lineno, "entry must be 'i j value'");
        }
        std::size_t i = parse_index(toks[0], lineno, "row index");
        std::size_t j = parse_index(toks[1], lineno, "column index");
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw MtxError(lineno, "index (" + toks[0] + "," + toks[1] + ") outside " + std::to_string(rows) + "x" +
                                       std::to_string(cols));
        }
        if (symmetric && j > i) {
            throw MtxError(lineno, "entry above the diagonal in a symmetric file");
        }
        BigRational v;
        try {
            v = BigRational::parse(toks[2]);
        } catch (const std::invalid_argument&) {
            throw MtxError(lineno, "malformed value '" + toks[2] + "'");
        }
        // repeated coordinates are summed
        entries[{i - 1, j - 1}] += v;
        if (symmetric && i != j) {
            entries[{j - 1, i - 1}] += v;
        }
        ++seen;
    }
    if (seen != nnz) {
        throw MtxError(lineno, "declared " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
    }

    SparseMatrix<BigRational> m;
    m.rows = rows;
    m.cols = cols;
    m.symmetric = symmetric;
    m.row_ptr.assign(rows + 1, 0);
    for (auto& [ij, v] : entries) {
        ++m.row_ptr[ij.first + 1];
        m.col_idx.push_back(ij.second);
        m.values.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < rows; ++i) {
        m.row_ptr[i + 1] += m.row_ptr[i];
    }
    return m;
}

SparseMatrix<BigRational> mtx_read_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) {
        throw MtxError(0, "cannot open '" + path + "'");
    }
    return mtx_read(f);
}

const char* to_string(CgStatus s)
{
    switch (s) {
    case CgStatus::Converged:
        return "converged";
    case CgStatus::MaxIterations:
        return "maxiter";
    case CgStatus::Diverged:
        return "diverged";
    case CgStatus::Breakdown:
        return "breakdown";
    case CgStatus::Stagnated:
        return "stagnated";
    }
    return "?";
}

void write_history_csv(std::ostream& out, std::span<const double> history)
{
    out << "iteration,error\n";
    char buf[48];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.16e", history[i]);
        out << i << "," << buf << "\n";
    }
}

}  // namespace positlab
