#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "positlab/linalg.hpp"
#include "positlab/oracle.hpp"
#include "support.hpp"

using namespace positlab;
using testsupport::P;

namespace {

SparseMatrix<BigRational> read_str(const std::string& s)
{
    std::istringstream is(s);
    return mtx_read(is);
}

SparseMatrix<BigRational> poisson(std::size_t n)
{
    std::vector<std::tuple<std::size_t, std::size_t, BigRational>> e;
    for (std::size_t i = 0; i < n; ++i) {
        e.emplace_back(i, i, BigRational(2));
        if (i > 0) {
            e.emplace_back(i, i - 1, BigRational(-1));
            e.emplace_back(i - 1, i, BigRational(-1));
        }
    }
    return SparseMatrix<BigRational>::from_triplets(n, n, std::move(e), true);
}

// lcm(1..2n-1) / (i+j+1), integer entries
SparseMatrix<BigRational> scaled_hilbert(std::size_t n)
{
    BigInt l(1);
    for (std::size_t k = 1; k < 2 * n; ++k) {
        l = lcm(l, BigInt(k));
    }
    std::vector<std::tuple<std::size_t, std::size_t, BigRational>> e;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            e.emplace_back(i, j, BigRational(l, BigInt(i + j + 1)));
        }
    }
    return SparseMatrix<BigRational>::from_triplets(n, n, std::move(e), true);
}

std::vector<BigRational> times_ones(const SparseMatrix<BigRational>& m)
{
    std::vector<BigRational> ones(m.cols, BigRational(1));
    return gemv_naive(RationalArith{}, m, std::span<const BigRational>(ones));
}

// Full LU without pivoting of a dense rational matrix, packed like ILU(0).
DenseMatrix<BigRational> dense_lu(DenseMatrix<BigRational> a)
{
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) -= a(i, k) * a(k, j);
            }
        }
    }
    return a;
}

}  // namespace

TEST_CASE("scalar names")
{
    CHECK(arith_id(parse_arith("f64")) == "f64");
    CHECK(arith_id(parse_arith("double")) == "f64");
    CHECK(arith_id(parse_arith("f32")) == "f32");
    CHECK(arith_id(parse_arith("rational")) == "rational");
    CHECK(arith_id(parse_arith("posit64_3")) == "posit64_3");
    CHECK(arith_id(parse_arith("posit<16,1>")) == "posit16_1");
    CHECK_THROWS_AS(parse_arith("posit64"), std::invalid_argument);
    CHECK_THROWS_AS(parse_arith("posit1_0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_arith("quad"), std::invalid_argument);
}

TEST_CASE("scalar contract laws")
{
    std::mt19937_64 rng(3);
    auto check_laws = [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        for (int t = 0; t < 200; ++t) {
            typename A::value_type x = a.from_rational(testsupport::random_rational(rng, 20));
            typename A::value_type y = a.from_rational(testsupport::random_rational(rng, 20));
            REQUIRE(a.add(x, a.zero()) == x);
            REQUIRE(a.mul(x, a.one()) == x);
            REQUIRE(a.add(x, y) == a.add(y, x));
            REQUIRE(a.mul(x, y) == a.mul(y, x));
            REQUIRE(a.is_zero(a.sub(x, x)));
        }
    };
    check_laws(Float64Arith{});
    check_laws(Float32Arith{});
    check_laws(PositArith(PositConfig(16, 1)));
    check_laws(PositArith(PositConfig(32, 2)));
    check_laws(RationalArith{});

    // binary32 conversion rounds once from the exact value
    Float32Arith f;
    BigRational x = BigRational(BigInt::pow2(24) + BigInt(1)) + BigRational(1, 1 << 20);
    CHECK(f.from_rational(x) == 16777218.0f);
    CHECK(f.from_rational(BigRational::parse("1e-50")) == 0.0f);
    CHECK(f.from_rational(BigRational::parse("1e-45")) == std::ldexp(1.0f, -149));
}

TEST_CASE("dot products")
{
    Float64Arith f;
    std::vector<double> x{1.0, 1e-20, -1.0};
    std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(dot_naive(f, std::span<const double>(x), std::span<const double>(ones)) == 0.0);
    // no accumulator: fused degrades to naive
    CHECK_FALSE(supports_fused(f));
    CHECK(dot_fused(f, std::span<const double>(x), std::span<const double>(ones)) == 0.0);

    PositArith p(PositConfig(32, 2));
    CHECK(supports_fused(p));
    std::vector<PositPattern> px;
    for (const char* s : {"1", "1e-20", "-1"}) {
        px.push_back(p.from_rational(BigRational::parse(s)));
    }
    std::vector<PositPattern> pones(3, p.one());
    PositPattern fused = dot_fused(p, std::span<const PositPattern>(px), std::span<const PositPattern>(pones));
    CHECK(fused == oracle_round(p.config, BigRational::parse("1e-20")));
    CHECK(BigRational::from_double(p.to_double(fused)).to_general(6) == "9.99896e-21");
    CHECK(p.is_zero(dot_naive(p, std::span<const PositPattern>(px), std::span<const PositPattern>(pones))));

    CHECK_THROWS_AS(dot_naive(f, std::span<const double>(x), std::span<const double>(ones).first(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dot_fused(p, std::span<const PositPattern>(px), std::span<const PositPattern>(pones).first(1)),
                    std::invalid_argument);

    // dot(x, e_i) = x_i
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<PositPattern> e(3, p.zero());
        e[i] = p.one();
        CHECK(dot_fused(p, std::span<const PositPattern>(px), std::span<const PositPattern>(e)) == px[i]);
        CHECK(dot_naive(p, std::span<const PositPattern>(px), std::span<const PositPattern>(e)) == px[i]);
    }
}

TEST_CASE("fused dot matches the oracle on posit<8,0>")
{
    PositArith p(PositConfig(8, 0));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 5000; ++t) {
        std::size_t n = 1 + rng() % 16;
        std::vector<PositPattern> x;
        std::vector<PositPattern> y;
        BigRational exact;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(P(p.config, rng() & 0xFF));
            y.push_back(P(p.config, rng() & 0xFF));
            if (x.back().is_nar()) {
                x.back() = p.zero();
            }
            if (y.back().is_nar()) {
                y.back() = p.zero();
            }
            exact += *value_of(x.back()) * *value_of(y.back());
        }
        REQUIRE(dot_fused(p, std::span<const PositPattern>(x), std::span<const PositPattern>(y)) ==
                oracle_round(p.config, exact));
    }
}

TEST_CASE("fused dot is order independent, naive is not")
{
    PositArith p(PositConfig(16, 1));
    std::vector<PositPattern> x;
    for (const char* s : {"1048576", "1", "-1048576"}) {
        x.push_back(p.from_rational(BigRational::parse(s)));
    }
    std::vector<PositPattern> ones(3, p.one());
    auto naive = [&](const std::vector<PositPattern>& v) {
        return dot_naive(p, std::span<const PositPattern>(v), std::span<const PositPattern>(ones));
    };
    auto fused = [&](const std::vector<PositPattern>& v) {
        return dot_fused(p, std::span<const PositPattern>(v), std::span<const PositPattern>(ones));
    };
    std::vector<PositPattern> reordered{x[0], x[2], x[1]};
    CHECK(naive(x) != naive(reordered));
    CHECK(fused(x) == fused(reordered));
    CHECK(fused(x) == p.one());

    std::mt19937_64 rng(8);
    std::vector<PositPattern> a;
    std::vector<PositPattern> b;
    for (int i = 0; i < 200; ++i) {
        a.push_back(p.from_rational(testsupport::random_rational(rng, 12)));
        b.push_back(p.from_rational(testsupport::random_rational(rng, 12)));
    }
    PositPattern ref = dot_fused(p, std::span<const PositPattern>(a), std::span<const PositPattern>(b));
    std::vector<std::size_t> idx(a.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    for (int s = 0; s < 20; ++s) {
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<PositPattern> sa;
        std::vector<PositPattern> sb;
        for (std::size_t i : idx) {
            sa.push_back(a[i]);
            sb.push_back(b[i]);
        }
        REQUIRE(dot_fused(p, std::span<const PositPattern>(sa), std::span<const PositPattern>(sb)) == ref);
    }
}

TEST_CASE("gemv")
{
    PositArith p(PositConfig(32, 2));
    std::mt19937_64 rng(21);
    const std::size_t n = 7;
    DenseMatrix<PositPattern> eye(n, n, p.zero());
    std::vector<PositPattern> x;
    for (std::size_t i = 0; i < n; ++i) {
        eye(i, i) = p.one();
        x.push_back(p.from_rational(testsupport::random_rational(rng, 30)));
    }
    CHECK(gemv_naive(p, eye, std::span<const PositPattern>(x)) == x);
    CHECK(gemv_fused(p, eye, std::span<const PositPattern>(x)) == x);

    DenseMatrix<PositPattern> m(5, n, p.zero());
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = p.from_rational(testsupport::random_rational(rng, 30));
        }
    }
    auto y = gemv_fused(p, m, std::span<const PositPattern>(x));
    REQUIRE(y.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(y[i] == dot_fused(p, m.row(i), std::span<const PositPattern>(x)));
    }
    CHECK(y == gemv_fused_serial(p, m, std::span<const PositPattern>(x)));
    auto sm = to_sparse(m, p.zero());
    CHECK(gemv_fused(p, sm, std::span<const PositPattern>(x)) == y);
    CHECK(gemv_fused_serial(p, sm, std::span<const PositPattern>(x)) == y);
    CHECK_THROWS_AS(gemv_naive(p, m, std::span<const PositPattern>(x).first(3)), std::invalid_argument);
    CHECK_THROWS_AS(gemv_fused(p, sm, std::span<const PositPattern>(x).first(3)), std::invalid_argument);

    // Hilbert(5) * 1 against the exact row sums
    DenseMatrix<BigRational> h(5, 5, BigRational());
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            h(i, j) = BigRational(BigInt(1), BigInt(i + j + 1));
        }
    }
    std::vector<BigRational> ones(5, BigRational(1));
    auto exact = gemv_naive(RationalArith{}, h, std::span<const BigRational>(ones));
    const char* sums[] = {"137/60", "29/20", "153/140", "743/840", "1879/2520"};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(exact[i] == BigRational::parse(sums[i]));
    }
    auto hp = convert(p, h);
    std::vector<PositPattern> pones(5, p.one());
    auto fused = gemv_fused(p, hp, std::span<const PositPattern>(pones));
    for (std::size_t i = 0; i < 5; ++i) {
        BigRational row_exact;
        for (std::size_t j = 0; j < 5; ++j) {
            row_exact += *value_of(hp(i, j));
        }
        CHECK(fused[i] == oracle_round(p.config, row_exact));
    }
}

TEST_CASE("sparse gemv with matrix from mtx equals per-row exact sums")
{
    auto m = read_str(
        "%%MatrixMarket matrix coordinate real general\n"
        "% comment\n"
        "3 4 6\n"
        "1 1 0.1\n1 4 -2.5e3\n2 2 3\n3 1 1e-20\n3 3 7\n3 4 -7\n");
    PositArith p(PositConfig(16, 1));
    auto mp = convert(p, m);
    std::vector<PositPattern> ones(4, p.one());
    auto y = gemv_fused(p, mp, std::span<const PositPattern>(ones));
    for (std::size_t i = 0; i < 3; ++i) {
        BigRational s;
        for (std::size_t k = mp.row_ptr[i]; k < mp.row_ptr[i + 1]; ++k) {
            s += *value_of(mp.values[k]);
        }
        CHECK(y[i] == oracle_round(p.config, s));
    }
    CHECK(y[2] == p.from_rational(BigRational::parse("1e-20")));
}

TEST_CASE("mtx read")
{
    auto m = read_str(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 3\n"
        "1 1 4\n"
        "2 1 1\n"
        "2 2 3\n");
    CHECK(m.symmetric);
    auto d = m.to_dense(BigRational());
    CHECK(d(0, 0) == BigRational(4));
    CHECK(d(0, 1) == BigRational(1));
    CHECK(d(1, 0) == BigRational(1));
    CHECK(d(1, 1) == BigRational(3));
    CHECK(m.nnz() == 4);

    auto dec = read_str("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 0.1\n");
    CHECK(dec.values[0] == BigRational(1, 10));
    auto integer = read_str("%%MatrixMarket matrix coordinate integer general\n1 2 2\n1 1 5\n1 2 -3\n");
    CHECK(integer.values[1] == BigRational(-3));
    auto dup = read_str("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 0.25\n1 1 0.5\n");
    CHECK(dup.nnz() == 1);
    CHECK(dup.values[0] == BigRational(3, 4));

    auto line_of = [](const std::string& s) -> std::size_t {
        try {
            read_str(s);
        } catch (const MtxError& e) {
            return e.line();
        }
        return 999;
    };
    // nnz mismatch
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n2 2 1\n") == 4);
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 1\n") == 4);
    CHECK(line_of("%%MatrixMarket matrix coordinate real generl\n1 1 1\n1 1 1\n") == 1);
    CHECK(line_of("%%MatrixMarkt matrix coordinate real general\n1 1 1\n1 1 1\n") == 1);
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n%c\n2 x 1\n1 1 1\n") == 3);
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n\n3 1 1\n") == 4);
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n") == 3);
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n") == 3);
    CHECK(line_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n") == 3);
    CHECK(line_of("%%MatrixMarket matrix coordinate real general\n") == 1);

    CHECK_THROWS_AS(read_str("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), MtxUnsupported);
    CHECK_THROWS_AS(read_str("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"), MtxUnsupported);
    CHECK_THROWS_AS(read_str("%%MatrixMarket matrix array real general\n1 1\n1\n"), MtxUnsupported);
    CHECK_THROWS_AS(read_str("%%MatrixMarket matrix coordinate real skew-symmetric\n1 1 0\n"), MtxUnsupported);
    CHECK_THROWS_AS(mtx_read_file("/nonexistent/file.mtx"), MtxError);
}

TEST_CASE("mtx round trip")
{
    std::mt19937_64 rng(12);
    RationalArith r;
    for (int t = 0; t < 20; ++t) {
        std::size_t rows = 1 + rng() % 9;
        std::size_t cols = 1 + rng() % 9;
        bool sym = t % 2 == 0;
        if (sym) {
            cols = rows;
        }
        std::vector<std::tuple<std::size_t, std::size_t, BigRational>> e;
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < (sym ? i + 1 : cols); ++j) {
                if (rng() % 3 == 0) {
                    BigRational v = testsupport::random_rational(rng, 24);
                    e.emplace_back(i, j, v);
                    if (sym && i != j) {
                        e.emplace_back(j, i, v);
                    }
                }
            }
        }
        auto m = SparseMatrix<BigRational>::from_triplets(rows, cols, e, sym);
        std::stringstream ss;
        mtx_write(ss, r, m);
        auto back = mtx_read(ss);
        REQUIRE(back == m);
    }

    // posit values print as exact decimals and read back to the same patterns
    PositArith p(PositConfig(32, 2));
    auto m = convert(p, poisson(6)).map([&](const PositPattern& v) {
        return p.div(v, p.from_rational(BigRational(3)));
    });
    std::stringstream ss;
    mtx_write(ss, p, m);
    CHECK(ss.str().rfind("%%MatrixMarket matrix coordinate real symmetric\n6 6 11\n", 0) == 0);
    CHECK(mtx_read(ss, p) == m);
}

TEST_CASE("ilu0")
{
    RationalArith r;
    // diagonal
    auto diag = SparseMatrix<BigRational>::from_triplets(
        3, 3, {{0, 0, BigRational(2)}, {1, 1, BigRational(4)}, {2, 2, BigRational(-5)}});
    auto fd = ilu0(r, diag);
    CHECK(fd.lu == diag);
    std::vector<BigRational> rhs{BigRational(1), BigRational(2), BigRational(3)};
    auto z = precond_apply(r, fd, std::span<const BigRational>(rhs));
    CHECK(z[0] == BigRational(1, 2));
    CHECK(z[1] == BigRational(1, 2));
    CHECK(z[2] == BigRational(-3, 5));

    // dense SPD: ILU(0) is the full LU
    DenseMatrix<BigRational> a(3, 3, BigRational());
    const int vals[3][3] = {{4, 2, 1}, {2, 5, 3}, {1, 3, 6}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            a(i, j) = BigRational(vals[i][j]);
        }
    }
    auto f3 = ilu0(r, to_sparse(a, BigRational()));
    CHECK(f3.lu.to_dense(BigRational()) == dense_lu(a));
    auto sol = precond_apply(r, f3, std::span<const BigRational>(rhs));
    auto back = gemv_naive(r, a, std::span<const BigRational>(sol));
    CHECK(back == rhs);

    // tridiagonal Poisson: L*U reproduces A on its pattern (and no fill is lost)
    auto pm = poisson(10);
    auto fp = ilu0(r, pm);
    auto lu = fp.lu.to_dense(BigRational());
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 10; ++j) {
            BigRational s;
            for (std::size_t k = 0; k <= std::min(i, j); ++k) {
                s += (k == i ? BigRational(1) : lu(i, k)) * lu(k, j);
            }
            if (pm.find(i, j)) {
                REQUIRE(s == pm.values[*pm.find(i, j)]);
            }
        }
    }

    // zero pivot is reported with its row
    auto bad = SparseMatrix<BigRational>::from_triplets(
        3, 3,
        {{0, 0, BigRational(1)}, {0, 1, BigRational(1)}, {1, 0, BigRational(1)}, {1, 1, BigRational(1)},
         {2, 2, BigRational(1)}});
    try {
        ilu0(r, bad);
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        CHECK(e.row() == 1);
    }
    auto missing = SparseMatrix<BigRational>::from_triplets(2, 2, {{0, 0, BigRational(1)}, {1, 0, BigRational(1)}});
    CHECK_THROWS_AS(ilu0(r, missing), FactorizationError);
    CHECK_THROWS_AS(ilu0(r, SparseMatrix<BigRational>::from_triplets(2, 3, {})), std::invalid_argument);
}

TEST_CASE("cg on the 2x2 example")
{
    auto m = read_str(
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 4\n2 1 1\n2 2 3\n");
    Float64Arith f;
    auto mf = convert(f, m);
    std::vector<double> b{5.0, 4.0};
    std::vector<double> x0{0.0, 0.0};
    CgOptions opts;
    opts.tol = 1e-10;
    auto res = cg_solve(f, mf, std::span<const double>(b), std::span<const double>(x0), opts);
    CHECK(res.converged());
    CHECK(res.iterations <= 2);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.history.size() == res.iterations + 1);

    // b = 0, x0 = 0
    std::vector<double> zero{0.0, 0.0};
    auto z = cg_solve(f, mf, std::span<const double>(zero), std::span<const double>(x0), opts);
    CHECK(z.converged());
    CHECK(z.iterations == 0);
    CHECK(z.x == zero);

    opts.tol = -1;
    CHECK_THROWS_AS(cg_solve(f, mf, std::span<const double>(b), std::span<const double>(x0), opts),
                    std::invalid_argument);
}

TEST_CASE("cg in exact arithmetic terminates in at most n steps")
{
    RationalArith r;
    for (std::size_t n : {3u, 5u, 8u}) {
        for (bool precond : {false, true}) {
            auto h = scaled_hilbert(n);
            auto b = times_ones(h);
            std::vector<BigRational> x0(n);
            std::vector<BigRational> ones(n, BigRational(1));
            CgOptions opts;
            opts.tol = 1e-300;
            opts.maxiter = n;
            opts.stop = StopMetric::TrueError;
            auto fac = ilu0(r, h);
            auto res = cg_solve(r, h, std::span<const BigRational>(b), std::span<const BigRational>(x0), opts,
                                precond ? &fac : nullptr, std::span<const BigRational>(ones));
            CHECK(res.converged());
            CHECK(res.iterations <= n);
            CHECK(res.x == ones);
            CHECK(res.metric == 0.0);
        }
    }
    auto pm = poisson(8);
    auto b = times_ones(pm);
    std::vector<BigRational> x0(8);
    CgOptions opts;
    opts.tol = 1e-300;
    opts.maxiter = 8;
    auto res = cg_solve(r, pm, std::span<const BigRational>(b), std::span<const BigRational>(x0), opts);
    CHECK(res.converged());
    CHECK(res.x == std::vector<BigRational>(8, BigRational(1)));
}

TEST_CASE("cg reports max iterations and divergence")
{
    Float64Arith f;
    auto pm = convert(f, poisson(30));
    std::vector<double> b(30, 1.0);
    std::vector<double> x0(30, 0.0);
    CgOptions opts;
    opts.maxiter = 3;
    auto res = cg_solve(f, pm, std::span<const double>(b), std::span<const double>(x0), opts);
    CHECK(res.status == CgStatus::MaxIterations);
    CHECK_FALSE(res.converged());
    CHECK(res.iterations == 3);
    CHECK(res.history.size() == 4);
    CHECK(std::string(to_string(res.status)) == "maxiter");

    // overflow to infinity in binary32
    Float32Arith g;
    auto big = SparseMatrix<float>::from_triplets(2, 2, {{0, 0, 1e30f}, {1, 1, 1e-30f}, {0, 1, 1e30f}, {1, 0, 1e30f}});
    std::vector<float> bf{1e30f, 1e30f};
    std::vector<float> x0f{0.0f, 0.0f};
    auto d = cg_solve(g, big, std::span<const float>(bf), std::span<const float>(x0f), opts);
    CHECK(d.status == CgStatus::Diverged);
    REQUIRE(d.diverged_at.has_value());
    CHECK(*d.diverged_at == 1);
}

TEST_CASE("preconditioned cg in posit<64,3>")
{
    PositArith p(PositConfig(64, 3));
    for (auto& [name, exact] : {std::pair{std::string("hilbert8"), scaled_hilbert(8)}, std::pair{std::string("poisson50"), poisson(50)}}) {
        CAPTURE(name);
        auto m = convert(p, exact);
        std::vector<PositPattern> b;
        for (const auto& v : times_ones(exact)) {
            b.push_back(p.from_rational(v));
        }
        std::vector<PositPattern> x0(m.rows, p.zero());
        std::vector<PositPattern> ones(m.rows, p.one());
        auto fac = ilu0(p, m);
        CgOptions opts;
        opts.tol = 1e-8;
        opts.maxiter = 200;
        opts.stop = StopMetric::TrueError;
        double final[2];
        for (DotMode mode : {DotMode::Naive, DotMode::Fused}) {
            opts.dot = mode;
            auto res = cg_solve(p, m, std::span<const PositPattern>(b), std::span<const PositPattern>(x0), opts, &fac,
                                std::span<const PositPattern>(ones));
            MESSAGE(name << " " << std::string(to_string(mode)) << ": " << res.iterations << " iterations, error "
                         << res.metric);
            CHECK(res.converged());
            final[mode == DotMode::Fused] = res.metric;
        }
        CHECK(final[1] <= final[0]);
    }
}

TEST_CASE("lu solve")
{
    RationalArith r;
    DenseMatrix<BigRational> a(3, 3, BigRational());
    const int vals[3][3] = {{0, 2, 1}, {2, 5, 3}, {1, 3, 6}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            a(i, j) = BigRational(vals[i][j]);
        }
    }
    std::vector<BigRational> x{BigRational(1, 3), BigRational(-2), BigRational(7)};
    auto b = gemv_naive(r, a, std::span<const BigRational>(x));
    CHECK(lu_solve(r, a, b) == x);
    DenseMatrix<BigRational> sing(2, 2, BigRational(1));
    CHECK_THROWS_AS(lu_solve(r, sing, {BigRational(1), BigRational(1)}), FactorizationError);
}

TEST_CASE("hilbert(8) preconditioned cg: binary64 and posit<32,2> naive vs fused")
{
    auto exact = scaled_hilbert(8);
    auto rhs = times_ones(exact);
    CgOptions opts;
    opts.tol = 1e-12;
    opts.maxiter = 60;
    opts.stop = StopMetric::TrueError;

    Float64Arith f;
    auto mf = convert(f, exact);
    std::vector<double> bf;
    for (const auto& v : rhs) {
        bf.push_back(f.from_rational(v));
    }
    std::vector<double> x0f(8, 0.0);
    std::vector<double> onesf(8, 1.0);
    auto facf = ilu0(f, mf);
    auto rf = cg_solve(f, mf, std::span<const double>(bf), std::span<const double>(x0f), opts, &facf,
                       std::span<const double>(onesf));
    CHECK(rf.history.size() == rf.iterations + 1);

    PositArith p(PositConfig(32, 2));
    auto mp = convert(p, exact);
    std::vector<PositPattern> bp;
    for (const auto& v : rhs) {
        bp.push_back(p.from_rational(v));
    }
    std::vector<PositPattern> x0p(8, p.zero());
    std::vector<PositPattern> onesp(8, p.one());
    auto fac = ilu0(p, mp);
    double final[2];
    for (DotMode mode : {DotMode::Naive, DotMode::Fused}) {
        opts.dot = mode;
        auto rp = cg_solve(p, mp, std::span<const PositPattern>(bp), std::span<const PositPattern>(x0p), opts, &fac,
                           std::span<const PositPattern>(onesp));
        CHECK(rp.history.size() == rp.iterations + 1);
        final[mode == DotMode::Fused] = rp.metric;
        MESSAGE("posit<32,2> " << std::string(to_string(mode)) << ": " << rp.iterations << " iterations, error "
                               << final[mode == DotMode::Fused]);
    }
    MESSAGE("f64 naive: " << rf.iterations << " iterations, error " << rf.metric);
    CHECK(final[1] <= final[0]);
}
