#pragma once

// Dense and sparse linear algebra over the scalar policies of scalar.hpp.

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "positlab/scalar.hpp"

namespace positlab {

template <typename T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;  // row-major
};

/// Compressed sparse row storage with sorted, unique column indices.
///
/// Symmetric matrices are stored with both triangles present; the flag only
/// records that the source held one triangle (and is honoured by mtx_write).
template <typename T>
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    std::vector<T> values;
    bool symmetric = false;

    std::size_t nnz() const { return values.size(); }

    /// Triplets may come in any order; duplicates throw std::invalid_argument.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<std::tuple<std::size_t, std::size_t, T>> entries,
                                      bool symmetric = false)
    {
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
        });
        SparseMatrix m;
        m.rows = rows;
        m.cols = cols;
        m.symmetric = symmetric;
        m.row_ptr.assign(rows + 1, 0);
        for (std::size_t k = 0; k < entries.size(); ++k) {
            auto& [i, j, v] = entries[k];
            if (i >= rows || j >= cols) {
                throw std::invalid_argument("sparse entry (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") outside a " + std::to_string(rows) + "x" + std::to_string(cols) +
                                            " matrix");
            }
            if (k > 0 && std::get<0>(entries[k - 1]) == i && std::get<1>(entries[k - 1]) == j) {
                throw std::invalid_argument("duplicate sparse entry (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
            }
            ++m.row_ptr[i + 1];
            m.col_idx.push_back(j);
            m.values.push_back(std::move(v));
        }
        for (std::size_t i = 0; i < rows; ++i) {
            m.row_ptr[i + 1] += m.row_ptr[i];
        }
        return m;
    }

    /// Index into values of entry (i, j), or nullopt when not stored.
    std::optional<std::size_t> find(std::size_t i, std::size_t j) const
    {
        auto b = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
        auto e = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
        auto it = std::lower_bound(b, e, j);
        if (it == e || *it != j) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - col_idx.begin());
    }

    /// Same structure with every value mapped through f.
    template <typename F>
    auto map(F&& f) const
    {
        using U = std::decay_t<decltype(f(values.front()))>;
        SparseMatrix<U> out;
        out.rows = rows;
        out.cols = cols;
        out.row_ptr = row_ptr;
        out.col_idx = col_idx;
        out.symmetric = symmetric;
        out.values.reserve(values.size());
        for (const T& v : values) {
            out.values.push_back(f(v));
        }
        return out;
    }

    DenseMatrix<T> to_dense(const T& zero) const
    {
        DenseMatrix<T> d(rows, cols, zero);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                d(i, col_idx[k]) = values[k];
            }
        }
        return d;
    }

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

template <typename A>
using Vec = std::vector<typename A::value_type>;

/// Converts an exact matrix to scalar type A.
template <typename A>
SparseMatrix<typename A::value_type> convert(const A& a, const SparseMatrix<BigRational>& m)
{
    return m.map([&](const BigRational& v) { return a.from_rational(v); });
}

template <typename A>
DenseMatrix<typename A::value_type> convert(const A& a, const DenseMatrix<BigRational>& m)
{
    DenseMatrix<typename A::value_type> out(m.rows(), m.cols(), a.zero());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = a.from_rational(m(i, j));
        }
    }
    return out;
}

template <typename T>
SparseMatrix<T> to_sparse(const DenseMatrix<T>& d, const T& zero)
{
    std::vector<std::tuple<std::size_t, std::size_t, T>> e;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            if (!(d(i, j) == zero)) {
                e.emplace_back(i, j, d(i, j));
            }
        }
    }
    return SparseMatrix<T>::from_triplets(d.rows(), d.cols(), std::move(e));
}

// ---------------------------------------------------------------- products

enum class DotMode { Naive, Fused };

inline const char* to_string(DotMode m) { return m == DotMode::Naive ? "naive" : "fused"; }

/// True when the scalar has a quire-style exact accumulator.
template <typename A>
constexpr bool supports_fused(const A&)
{
    return A::has_fused;
}

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

}  // namespace detail

/// Left-to-right accumulation, one rounding per multiply and per add.
template <typename A>
typename A::value_type dot_naive(const A& a, std::span<const typename A::value_type> x,
                                 std::span<const typename A::value_type> y)
{
    detail::require_same_length(x.size(), y.size(), "dot");
    auto acc = a.zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc = a.add(acc, a.mul(x[i], y[i]));
    }
    return acc;
}

/// Exact accumulation and a single rounding when the scalar supports it;
/// otherwise identical to dot_naive.
template <typename A>
typename A::value_type dot_fused(const A& a, std::span<const typename A::value_type> x,
                                 std::span<const typename A::value_type> y)
{
    if constexpr (A::has_fused) {
        detail::require_same_length(x.size(), y.size(), "dot");
        auto q = a.accumulator();
        for (std::size_t i = 0; i < x.size(); ++i) {
            q.add_product(x[i], y[i]);
        }
        return q.extract();
    } else {
        return dot_naive(a, x, y);
    }
}

template <typename A>
typename A::value_type dot(const A& a, std::span<const typename A::value_type> x,
                           std::span<const typename A::value_type> y, DotMode mode)
{
    return mode == DotMode::Fused ? dot_fused(a, x, y) : dot_naive(a, x, y);
}

template <typename A>
Vec<A> gemv_naive(const A& a, const DenseMatrix<typename A::value_type>& m, std::span<const typename A::value_type> x)
{
    detail::require_same_length(m.cols(), x.size(), "gemv");
    Vec<A> y(m.rows(), a.zero());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        y[i] = dot_naive(a, m.row(i), x);
    }
    return y;
}

/// One accumulator per output row; serial reference for gemv_fused.
template <typename A>
Vec<A> gemv_fused_serial(const A& a, const DenseMatrix<typename A::value_type>& m,
                         std::span<const typename A::value_type> x)
{
    detail::require_same_length(m.cols(), x.size(), "gemv");
    Vec<A> y(m.rows(), a.zero());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        y[i] = dot_fused(a, m.row(i), x);
    }
    return y;
}

/// Rows are distributed over OpenMP threads. Each row is rounded once from
/// an exact sum, so the result does not depend on the schedule.
template <typename A>
Vec<A> gemv_fused(const A& a, const DenseMatrix<typename A::value_type>& m, std::span<const typename A::value_type> x)
{
    detail::require_same_length(m.cols(), x.size(), "gemv");
    Vec<A> y(m.rows(), a.zero());
    const auto n = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[i] = dot_fused(a, m.row(static_cast<std::size_t>(i)), x);
    }
    return y;
}

template <typename A>
Vec<A> gemv_naive(const A& a, const SparseMatrix<typename A::value_type>& m, std::span<const typename A::value_type> x)
{
    detail::require_same_length(m.cols, x.size(), "gemv");
    Vec<A> y(m.rows, a.zero());
    for (std::size_t i = 0; i < m.rows; ++i) {
        auto acc = a.zero();
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            acc = a.add(acc, a.mul(m.values[k], x[m.col_idx[k]]));
        }
        y[i] = acc;
    }
    return y;
}

namespace detail {

template <typename A>
typename A::value_type sparse_row_fused(const A& a, const SparseMatrix<typename A::value_type>& m,
                                        std::span<const typename A::value_type> x, std::size_t i)
{
    if constexpr (A::has_fused) {
        auto q = a.accumulator();
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            q.add_product(m.values[k], x[m.col_idx[k]]);
        }
        return q.extract();
    } else {
        auto acc = a.zero();
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            acc = a.add(acc, a.mul(m.values[k], x[m.col_idx[k]]));
        }
        return acc;
    }
}

}  // namespace detail

template <typename A>
Vec<A> gemv_fused_serial(const A& a, const SparseMatrix<typename A::value_type>& m,
                         std::span<const typename A::value_type> x)
{
    detail::require_same_length(m.cols, x.size(), "gemv");
    Vec<A> y(m.rows, a.zero());
    for (std::size_t i = 0; i < m.rows; ++i) {
        y[i] = detail::sparse_row_fused(a, m, x, i);
    }
    return y;
}

template <typename A>
Vec<A> gemv_fused(const A& a, const SparseMatrix<typename A::value_type>& m, std::span<const typename A::value_type> x)
{
    detail::require_same_length(m.cols, x.size(), "gemv");
    Vec<A> y(m.rows, a.zero());
    const auto n = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[i] = detail::sparse_row_fused(a, m, x, static_cast<std::size_t>(i));
    }
    return y;
}

template <typename A, typename M>
Vec<A> gemv(const A& a, const M& m, std::span<const typename A::value_type> x, DotMode mode)
{
    return mode == DotMode::Fused ? gemv_fused(a, m, x) : gemv_naive(a, m, x);
}

/// y + alpha * x elementwise; the fused form rounds each element once.
template <typename A>
Vec<A> axpy(const A& a, const typename A::value_type& alpha, std::span<const typename A::value_type> x,
            std::span<const typename A::value_type> y, DotMode mode)
{
    detail::require_same_length(x.size(), y.size(), "axpy");
    Vec<A> out(x.size(), a.zero());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if constexpr (A::has_fused) {
            if (mode == DotMode::Fused) {
                auto q = a.accumulator();
                q.add(y[i]);
                q.add_product(alpha, x[i]);
                out[i] = q.extract();
                continue;
            }
        }
        out[i] = a.add(y[i], a.mul(alpha, x[i]));
    }
    return out;
}

/// Euclidean norm evaluated in binary64 after conversion.
template <typename A>
double norm2(const A& a, std::span<const typename A::value_type> x)
{
    long double s = 0;
    for (const auto& v : x) {
        long double d = a.to_double(v);
        s += d * d;
    }
    return static_cast<double>(std::sqrt(s));
}

// ----------------------------------------------------------- Matrix Market

/// Malformed Matrix Market input; line() is 1-based (0 when not tied to a line).
class MtxError : public std::runtime_error {
public:
    MtxError(std::size_t line, const std::string& msg)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Valid Matrix Market file of a kind this reader does not handle
/// (complex, pattern, hermitian, skew-symmetric, array).
class MtxUnsupported : public MtxError {
public:
    using MtxError::MtxError;
};

/// Reads `%%MatrixMarket matrix coordinate real {general|symmetric}`
/// (integer fields are accepted as real). Values are parsed exactly.
/// Symmetric input is expanded to both triangles.
SparseMatrix<BigRational> mtx_read(std::istream& in);
SparseMatrix<BigRational> mtx_read_file(const std::string& path);

template <typename A>
SparseMatrix<typename A::value_type> mtx_read(std::istream& in, const A& a)
{
    return convert(a, mtx_read(in));
}

/// Writes coordinate real format. Symmetric matrices are written as their
/// lower triangle. Values are printed with a.format().
template <typename A>
void mtx_write(std::ostream& out, const A& a, const SparseMatrix<typename A::value_type>& m)
{
    out << "%%MatrixMarket matrix coordinate real " << (m.symmetric ? "symmetric" : "general") << "\n";
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            if (!m.symmetric || m.col_idx[k] <= i) {
                ++count;
            }
        }
    }
    out << m.rows << " " << m.cols << " " << count << "\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            if (!m.symmetric || m.col_idx[k] <= i) {
                out << (i + 1) << " " << (m.col_idx[k] + 1) << " " << a.format(m.values[k]) << "\n";
            }
        }
    }
}

// ------------------------------------------------------------------ ILU(0)

class FactorizationError : public std::runtime_error {
public:
    FactorizationError(std::size_t row, const std::string& msg) : std::runtime_error(msg), row_(row) {}
    /// 0-based row of the failing pivot.
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// L and U packed on the sparsity pattern of A: strictly lower entries are L
/// (unit diagonal implied), the rest is U.
template <typename T>
struct Ilu0Factors {
    SparseMatrix<T> lu;
    std::vector<std::size_t> diag;  // index of (i, i) in lu.values
};

template <typename A>
Ilu0Factors<typename A::value_type> ilu0(const A& a, const SparseMatrix<typename A::value_type>& m)
{
    if (m.rows != m.cols) {
        throw std::invalid_argument("ilu0: matrix is " + std::to_string(m.rows) + "x" + std::to_string(m.cols));
    }
    Ilu0Factors<typename A::value_type> f{m, std::vector<std::size_t>(m.rows)};
    auto& lu = f.lu;
    const std::size_t n = m.rows;
    for (std::size_t i = 0; i < n; ++i) {
        auto d = lu.find(i, i);
        if (!d) {
            throw FactorizationError(i, "ilu0: no diagonal entry in row " + std::to_string(i));
        }
        f.diag[i] = *d;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t kk = lu.row_ptr[i]; kk < lu.row_ptr[i + 1] && lu.col_idx[kk] < i; ++kk) {
            const std::size_t k = lu.col_idx[kk];
            lu.values[kk] = a.div(lu.values[kk], lu.values[f.diag[k]]);
            const auto lik = lu.values[kk];
            // a_ij -= l_ik * u_kj for j > k on the pattern of both rows
            std::size_t jj = kk + 1;
            for (std::size_t kj = f.diag[k] + 1; kj < lu.row_ptr[k + 1]; ++kj) {
                const std::size_t j = lu.col_idx[kj];
                while (jj < lu.row_ptr[i + 1] && lu.col_idx[jj] < j) {
                    ++jj;
                }
                if (jj == lu.row_ptr[i + 1]) {
                    break;
                }
                if (lu.col_idx[jj] == j) {
                    lu.values[jj] = a.sub(lu.values[jj], a.mul(lik, lu.values[kj]));
                }
            }
        }
        const auto& piv = lu.values[f.diag[i]];
        if (a.is_zero(piv) || a.is_nan(piv)) {
            throw FactorizationError(i, "ilu0: zero pivot in row " + std::to_string(i));
        }
    }
    return f;
}

/// Solves L U z = r by forward and back substitution.
template <typename A>
Vec<A> precond_apply(const A& a, const Ilu0Factors<typename A::value_type>& f, std::span<const typename A::value_type> r)
{
    const auto& lu = f.lu;
    const std::size_t n = lu.rows;
    detail::require_same_length(n, r.size(), "precond_apply");
    Vec<A> z(r.begin(), r.end());
    for (std::size_t i = 0; i < n; ++i) {
        auto s = z[i];
        for (std::size_t k = lu.row_ptr[i]; k < f.diag[i]; ++k) {
            s = a.sub(s, a.mul(lu.values[k], z[lu.col_idx[k]]));
        }
        z[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        auto s = z[ii];
        for (std::size_t k = f.diag[ii] + 1; k < lu.row_ptr[ii + 1]; ++k) {
            s = a.sub(s, a.mul(lu.values[k], z[lu.col_idx[k]]));
        }
        z[ii] = a.div(s, lu.values[f.diag[ii]]);
    }
    return z;
}

// ---------------------------------------------------------------------- CG

enum class StopMetric {
    Residual,   ///< ||r_k|| / ||b||
    TrueError,  ///< ||x_k - x*|| / ||x*|| against a known solution
};

/// Stagnated: the recurrence residual became exactly zero in the working
/// precision while the stop metric was still above tol.
enum class CgStatus { Converged, MaxIterations, Diverged, Breakdown, Stagnated };

const char* to_string(CgStatus s);

struct CgOptions {
    double tol = 1e-10;
    std::size_t maxiter = 1000;
    DotMode dot = DotMode::Naive;
    StopMetric stop = StopMetric::Residual;
};

template <typename T>
struct CgResult {
    /// Final iterate; the best one seen when the iteration limit is hit.
    std::vector<T> x;
    std::size_t iterations = 0;
    /// Stop metric after iterations 0, 1, ..., iterations.
    std::vector<double> history;
    /// Stop metric of x.
    double metric = NAN;
    CgStatus status = CgStatus::MaxIterations;
    /// Iteration at which a NaN/NaR appeared.
    std::optional<std::size_t> diverged_at;

    bool converged() const { return status == CgStatus::Converged; }
};

namespace detail {

template <typename A>
bool any_nan(const A& a, std::span<const typename A::value_type> v)
{
    for (const auto& e : v) {
        if (a.is_nan(e)) {
            return true;
        }
    }
    return false;
}

template <typename A>
double relative_error(const A& a, std::span<const typename A::value_type> x, std::span<const typename A::value_type> ref,
                      double ref_norm)
{
    long double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double d = a.difference(x[i], ref[i]);
        s += d * d;
    }
    double e = static_cast<double>(std::sqrt(s));
    return ref_norm > 0 ? e / ref_norm : e;
}

}  // namespace detail

/// Preconditioned conjugate gradients (Hestenes-Stiefel recurrences, no
/// restarts). Inner products, the matrix-vector product and the vector
/// updates go through opts.dot; the triangular solves of the preconditioner
/// are plain scalar arithmetic. `exact` is required for StopMetric::TrueError.
template <typename A>
CgResult<typename A::value_type> cg_solve(const A& a, const SparseMatrix<typename A::value_type>& m,
                                          std::span<const typename A::value_type> b,
                                          std::span<const typename A::value_type> x0, const CgOptions& opts,
                                          const Ilu0Factors<typename A::value_type>* precond = nullptr,
                                          std::span<const typename A::value_type> exact = {})
{
    using V = typename A::value_type;
    if (m.rows != m.cols) {
        throw std::invalid_argument("cg_solve: matrix is not square");
    }
    detail::require_same_length(m.rows, b.size(), "cg_solve b");
    detail::require_same_length(m.rows, x0.size(), "cg_solve x0");
    if (!(opts.tol > 0)) {
        throw std::invalid_argument("cg_solve: tol must be positive");
    }
    if (opts.stop == StopMetric::TrueError) {
        detail::require_same_length(m.rows, exact.size(), "cg_solve exact solution");
    }
    const DotMode mode = opts.dot;
    const double b_norm = norm2(a, b);
    const double exact_norm = opts.stop == StopMetric::TrueError ? norm2(a, exact) : 0.0;

    CgResult<V> res;
    res.x.assign(x0.begin(), x0.end());

    auto apply_m = [&](const std::vector<V>& r) {
        return precond ? precond_apply(a, *precond, std::span<const V>(r)) : r;
    };
    // r = b - A x, each element rounded once in fused mode
    std::vector<V> ax = gemv(a, m, std::span<const V>(res.x), mode);
    std::vector<V> r(m.rows, a.zero());
    for (std::size_t i = 0; i < m.rows; ++i) {
        r[i] = a.sub(b[i], ax[i]);
    }
    auto metric = [&]() {
        if (opts.stop == StopMetric::TrueError) {
            return detail::relative_error(a, std::span<const V>(res.x), exact, exact_norm);
        }
        double rn = norm2(a, std::span<const V>(r));
        return b_norm > 0 ? rn / b_norm : rn;
    };

    res.history.push_back(metric());
    res.metric = res.history.back();
    std::vector<V> best_x = res.x;
    double best_metric = res.history.back();
    if (res.history.back() < opts.tol || (opts.stop == StopMetric::Residual && norm2(a, std::span<const V>(r)) == 0)) {
        res.status = CgStatus::Converged;
        return res;
    }
    std::vector<V> z = apply_m(r);
    std::vector<V> p = z;
    V rz = dot(a, std::span<const V>(r), std::span<const V>(z), mode);

    for (std::size_t k = 1; k <= opts.maxiter; ++k) {
        std::vector<V> ap = gemv(a, m, std::span<const V>(p), mode);
        V pap = dot(a, std::span<const V>(p), std::span<const V>(ap), mode);
        if (a.is_nan(pap) || a.is_nan(rz)) {
            res.status = CgStatus::Diverged;
            res.diverged_at = k;
            res.iterations = k - 1;
            return res;
        }
        if (a.is_zero(pap)) {
            res.status = CgStatus::Breakdown;
            res.iterations = k - 1;
            return res;
        }
        V alpha = a.div(rz, pap);
        res.x = axpy(a, alpha, std::span<const V>(p), std::span<const V>(res.x), mode);
        r = axpy(a, a.neg(alpha), std::span<const V>(ap), std::span<const V>(r), mode);
        res.iterations = k;
        if (detail::any_nan(a, std::span<const V>(res.x)) || detail::any_nan(a, std::span<const V>(r))) {
            res.status = CgStatus::Diverged;
            res.diverged_at = k;
            return res;
        }
        res.history.push_back(metric());
        res.metric = res.history.back();
        if (res.history.back() < opts.tol) {
            res.status = CgStatus::Converged;
            return res;
        }
        if (res.history.back() < best_metric) {
            best_metric = res.history.back();
            best_x = res.x;
        }
        if (std::all_of(r.begin(), r.end(), [&](const V& v) { return a.is_zero(v); })) {
            res.status = CgStatus::Stagnated;
            return res;
        }
        z = apply_m(r);
        V rz_next = dot(a, std::span<const V>(r), std::span<const V>(z), mode);
        if (a.is_zero(rz)) {
            res.status = CgStatus::Breakdown;
            return res;
        }
        V beta = a.div(rz_next, rz);
        rz = rz_next;
        p = axpy(a, beta, std::span<const V>(p), std::span<const V>(z), mode);
    }
    res.status = CgStatus::MaxIterations;
    res.x = std::move(best_x);
    res.metric = best_metric;
    return res;
}

/// Error history as CSV: header `iteration,error`, values in %.16e.
void write_history_csv(std::ostream& out, std::span<const double> history);

// ------------------------------------------------------------- dense solve

/// Gaussian elimination with partial pivoting. Throws FactorizationError
/// when the matrix is singular in the scalar's arithmetic.
template <typename A>
Vec<A> lu_solve(const A& a, DenseMatrix<typename A::value_type> m, std::vector<typename A::value_type> b)
{
    const std::size_t n = m.rows();
    if (m.cols() != n || b.size() != n) {
        throw std::invalid_argument("lu_solve: dimension mismatch");
    }
    auto absval = [&](const typename A::value_type& v) { return a.less(v, a.zero()) ? a.neg(v) : v; };
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a.less(absval(m(piv, c)), absval(m(i, c)))) {
                piv = i;
            }
        }
        if (a.is_zero(m(piv, c)) || a.is_nan(m(piv, c))) {
            throw FactorizationError(c, "lu_solve: singular matrix at column " + std::to_string(c));
        }
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(c, j));
            }
            std::swap(b[piv], b[c]);
        }
        for (std::size_t i = c + 1; i < n; ++i) {
            auto l = a.div(m(i, c), m(c, c));
            for (std::size_t j = c + 1; j < n; ++j) {
                m(i, j) = a.sub(m(i, j), a.mul(l, m(c, j)));
            }
            m(i, c) = a.zero();
            b[i] = a.sub(b[i], a.mul(l, b[c]));
        }
    }
    Vec<A> x(n, a.zero());
    for (std::size_t ii = n; ii-- > 0;) {
        auto s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) {
            s = a.sub(s, a.mul(m(ii, j), x[j]));
        }
        x[ii] = a.div(s, m(ii, ii));
    }
    return x;
}

}  // namespace positlab
