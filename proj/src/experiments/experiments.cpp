#include "positlab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace positlab {

namespace {

std::string sci(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

template <typename A>
HilbertRow solve_hilbert(const A& a, const DenseMatrix<BigRational>& h, bool scaled)
{
    const std::size_t n = h.rows();
    HilbertRow row;
    row.scalar = arith_id(AnyArith(a));
    row.n = n;
    row.scaled = scaled;
    std::vector<BigRational> ones(n, BigRational(1));
    auto rhs = gemv_naive(RationalArith{}, h, std::span<const BigRational>(ones));
    Vec<A> b;
    for (const auto& v : rhs) {
        b.push_back(a.from_rational(v));
    }
    try {
        auto x = lu_solve(a, convert(a, h), std::move(b));
        BigRational err2;
        for (const auto& v : x) {
            if (a.is_nan(v)) {
                return row;
            }
            BigRational d = a.to_rational(v) - BigRational(1);
            err2 += d * d;
        }
        row.relative_error = std::sqrt(err2.to_double() / static_cast<double>(n));
        row.solved = true;
    } catch (const FactorizationError&) {
    }
    return row;
}

}  // namespace

DenseMatrix<BigRational> hilbert(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("hilbert: n must be at least 1");
    }
    DenseMatrix<BigRational> h(n, n, BigRational());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            h(i, j) = BigRational(BigInt(1), BigInt(i + j + 1));
        }
    }
    return h;
}

ScaledHilbert hilbert_scaled(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("hilbert_scaled: n must be at least 1");
    }
    ScaledHilbert s{BigInt(1), DenseMatrix<BigInt>(n, n, BigInt())};
    for (std::size_t k = 2; k < 2 * n; ++k) {
        s.scale = lcm(s.scale, BigInt(k));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            auto [q, r] = divmod(s.scale, BigInt(i + j + 1));
            if (!r.is_zero()) {
                throw std::logic_error("hilbert_scaled: non-integer entry");
            }
            s.matrix(i, j) = q;
        }
    }
    return s;
}

DenseMatrix<BigInt> hilbert_inverse(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("hilbert_inverse: n must be at least 1");
    }
    DenseMatrix<BigInt> inv(n, n, BigInt());
    const BigInt nn(n);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            BigInt c = binomial(BigInt(i + j - 2), BigInt(i - 1));
            BigInt v = BigInt(i + j - 1) * binomial(nn + BigInt(i - 1), nn - BigInt(j)) *
                       binomial(nn + BigInt(j - 1), nn - BigInt(i)) * c * c;
            inv(i - 1, j - 1) = (i + j) % 2 ? -v : v;
        }
    }
    return inv;
}

std::vector<HilbertRow> run_hilbert_experiment(std::size_t n, const std::vector<AnyArith>& scalars)
{
    DenseMatrix<BigRational> h = hilbert(n);
    ScaledHilbert s = hilbert_scaled(n);
    DenseMatrix<BigRational> hs(n, n, BigRational());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            hs(i, j) = BigRational(s.matrix(i, j));
        }
    }
    std::vector<HilbertRow> rows;
    for (const auto& scalar : scalars) {
        for (bool scaled : {true, false}) {
            rows.push_back(std::visit([&](const auto& a) { return solve_hilbert(a, scaled ? hs : h, scaled); }, scalar));
        }
    }
    return rows;
}

void write_hilbert_csv(std::ostream& out, std::span<const HilbertRow> rows)
{
    out << "scalar,n,scaled,relative_error\n";
    for (const auto& r : rows) {
        out << r.scalar << "," << r.n << "," << (r.scaled ? "yes" : "no") << ","
            << (r.solved ? sci(r.relative_error) : "nan") << "\n";
    }
}

void LorenzParams::validate() const
{
    if (dt.sign() <= 0) {
        throw std::invalid_argument("lorenz: dt must be positive");
    }
    if (steps < 1) {
        throw std::invalid_argument("lorenz: steps must be at least 1");
    }
}

Trajectory rk4_integrate(const AnyArith& a, const LorenzParams& p)
{
    auto tr = std::visit([&](const auto& s) { return rk4_integrate(s, p); }, a);
    tr.scalar = arith_id(a);
    return tr;
}

std::optional<std::size_t> divergence_time(const Trajectory& traj, const Trajectory& reference, double epsilon)
{
    if (traj.steps != reference.steps || traj.dt != reference.dt) {
        throw std::invalid_argument("divergence_time: trajectories differ in dt or step count");
    }
    if (!(epsilon > 0)) {
        throw std::invalid_argument("divergence_time: epsilon must be positive");
    }
    const std::size_t common = std::min(traj.samples.size(), reference.samples.size());
    for (std::size_t k = 0; k < common; ++k) {
        const auto& a = traj.samples[k];
        const auto& b = reference.samples[k];
        double dx = a.x - b.x;
        double dy = a.y - b.y;
        double dz = a.z - b.z;
        double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (!(d <= epsilon)) {
            return k;
        }
    }
    if (traj.samples.size() != reference.samples.size()) {
        return common;
    }
    return std::nullopt;
}

LorenzReport run_lorenz_experiment(const std::vector<AnyArith>& scalars, const LorenzParams& params, double epsilon,
                                   const AnyArith& reference, bool parallel)
{
    params.validate();
    LorenzReport rep;
    rep.runs.resize(scalars.size());
    const auto total = static_cast<std::ptrdiff_t>(scalars.size() + 1);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        if (i == 0) {
            rep.reference = rk4_integrate(reference, params);
        } else {
            rep.runs[static_cast<std::size_t>(i - 1)] = rk4_integrate(scalars[static_cast<std::size_t>(i - 1)], params);
        }
    }
    const double dt = params.dt.to_double();
    for (const auto& run : rep.runs) {
        DivergenceRow row{run.scalar, divergence_time(run, rep.reference, epsilon), std::nullopt};
        if (row.step) {
            row.time = static_cast<double>(*row.step) * dt;
        }
        rep.divergence.push_back(row);
    }
    return rep;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    out << "t,x,y,z\n";
    for (const auto& s : traj.samples) {
        out << sci(s.t) << "," << sci(s.x) << "," << sci(s.y) << "," << sci(s.z) << "\n";
    }
}

void write_divergence_csv(std::ostream& out, std::span<const DivergenceRow> rows)
{
    out << "config,divergence_step,divergence_time\n";
    for (const auto& r : rows) {
        out << r.config << "," << (r.step ? std::to_string(*r.step) : "none") << ","
            << (r.time ? sci(*r.time) : "none") << "\n";
    }
}

}  // namespace positlab
