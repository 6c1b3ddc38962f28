// Throughput of the posit kernels and serial vs OpenMP timings of the
// parallel kernels. Prints one line per measurement.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "positlab/experiments.hpp"
#include "positlab/fastposit.hpp"
#include "positlab/linalg.hpp"
#include "positlab/validation.hpp"

using namespace positlab;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double seconds(F&& f)
{
    auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<PositPattern> random_patterns(PositConfig c, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<PositPattern> out;
    out.reserve(n);
    const std::uint64_t mask = c.nbits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << c.nbits) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(PositPattern::from_bits(c, rng() & mask));
    }
    return out;
}

/// Millions of add+mul operations per second over the operand pairs.
template <typename Add, typename Mul>
double mpops(const std::vector<PositPattern>& xs, const std::vector<PositPattern>& ys, Add add, Mul mul,
             std::uint64_t& sink)
{
    double t = seconds([&] {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sink += add(xs[i], ys[i]).pattern.low64();
            sink += mul(xs[i], ys[i]).pattern.low64();
        }
    });
    return 2.0 * static_cast<double>(xs.size()) / t / 1e6;
}

void bench_throughput()
{
    std::uint64_t sink = 0;
    const PositConfig configs[] = {PositConfig(8, 0), PositConfig(16, 1), PositConfig(32, 2), PositConfig(64, 3)};
    for (PositConfig c : configs) {
        auto xs = random_patterns(c, 1'000'000, 1);
        auto ys = random_patterns(c, 1'000'000, 2);
        double fast = mpops(xs, ys, fast_add, fast_mul, sink);
        std::vector<PositPattern> gx(xs.begin(), xs.begin() + 100'000);
        std::vector<PositPattern> gy(ys.begin(), ys.begin() + 100'000);
        double generic = mpops(gx, gy, positlab::add, positlab::mul, sink);
        std::printf("throughput %-12s fast %8.2f MPOPS  generic %6.2f MPOPS  ratio %6.1f\n", c.to_string().c_str(),
                    fast, generic, fast / generic);
    }

    std::mt19937_64 rng(3);
    std::vector<std::uint32_t> a(4'000'000);
    std::vector<std::uint32_t> b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<std::uint32_t>(rng());
        b[i] = static_cast<std::uint32_t>(rng());
    }
    using P32 = fast::Posit<32, 2>;
    double t = seconds([&] {
        for (std::size_t i = 0; i < a.size(); ++i) {
            sink += P32::add(a[i], b[i]);
            sink += P32::mul(a[i], b[i]);
        }
    });
    std::printf("throughput posit<32,2>  raw kernel %8.2f MPOPS\n", 2.0 * static_cast<double>(a.size()) / t / 1e6);
    std::printf("(checksum %llu)\n", static_cast<unsigned long long>(sink));
}

void bench_parallel()
{
    std::printf("threads %d\n", omp_get_max_threads());

    PositArith p(PositConfig(32, 2));
    const std::size_t n = 300;
    DenseMatrix<PositPattern> m(n, n, p.zero());
    auto vals = random_patterns(PositConfig(32, 2), n * n + n, 4);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = vals[i * n + j].is_nar() ? p.one() : vals[i * n + j];
        }
    }
    std::vector<PositPattern> x(vals.end() - n, vals.end());
    for (auto& v : x) {
        v = v.is_nar() ? p.one() : v;
    }
    std::vector<PositPattern> r1;
    std::vector<PositPattern> r2;
    double ts = seconds([&] { r1 = gemv_fused_serial(p, m, std::span<const PositPattern>(x)); });
    double tp = seconds([&] { r2 = gemv_fused(p, m, std::span<const PositPattern>(x)); });
    std::printf("gemv_fused %zux%zu posit<32,2>  serial %.3f s  parallel %.3f s  identical %s\n", n, n, ts, tp,
                r1 == r2 ? "yes" : "no");

    auto fn = op_function(BinaryOp::Mul);
    ValidationReport s;
    ValidationReport q;
    ts = seconds([&] { s = exhaustive_check_serial(PositConfig(8, 0), BinaryOp::Mul, fn); });
    tp = seconds([&] { q = exhaustive_check(PositConfig(8, 0), BinaryOp::Mul, fn); });
    std::printf("exhaustive posit<8,0> mul  serial %.3f s  parallel %.3f s  identical %s\n", ts, tp,
                s.to_string(false) == q.to_string(false) ? "yes" : "no");

    std::vector<AnyArith> scalars{PositArith(PositConfig(16, 1)), PositArith(PositConfig(18, 1)),
                                  PositArith(PositConfig(24, 1)), PositArith(PositConfig(32, 2))};
    LorenzParams lp;
    LorenzReport ls;
    LorenzReport lq;
    ts = seconds([&] { ls = run_lorenz_experiment(scalars, lp, 1.0, PositArith(PositConfig(64, 3)), false); });
    tp = seconds([&] { lq = run_lorenz_experiment(scalars, lp, 1.0, PositArith(PositConfig(64, 3)), true); });
    bool same = ls.divergence.size() == lq.divergence.size();
    for (std::size_t i = 0; same && i < ls.divergence.size(); ++i) {
        same = ls.divergence[i].step == lq.divergence[i].step;
    }
    std::printf("lorenz 4 configs x %zu steps  serial %.3f s  parallel %.3f s  identical %s\n", lp.steps, ts, tp,
                same ? "yes" : "no");
}

}  // namespace

int main()
{
    bench_throughput();
    bench_parallel();
    return 0;
}
