#pragma once

// Hilbert matrices with exact inverses, and the Lorenz precision sweep.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "positlab/linalg.hpp"
#include "positlab/scalar.hpp"

namespace positlab {

// ----------------------------------------------------------------- Hilbert

/// H_ij = 1/(i+j+1) (0-based), exact.
DenseMatrix<BigRational> hilbert(std::size_t n);

struct ScaledHilbert {
    BigInt scale;                  ///< lcm(1, ..., 2n-1)
    DenseMatrix<BigInt> matrix;    ///< scale * H, integer entries
};

ScaledHilbert hilbert_scaled(std::size_t n);

/// Exact inverse from the binomial closed form.
DenseMatrix<BigInt> hilbert_inverse(std::size_t n);

struct HilbertRow {
    std::string scalar;
    std::size_t n = 0;
    bool scaled = false;
    /// ||x - 1|| / ||1|| for the solve of H x = H 1, computed exactly from the result
    double relative_error = 0;
    bool solved = false;  ///< false when elimination hit a zero or NaR pivot
};

/// Solves H x = H*1 (right side exact, then rounded) by Gaussian elimination
/// in each scalar, once with the scaled integer matrix and once with the
/// rounded unit fractions.
std::vector<HilbertRow> run_hilbert_experiment(std::size_t n, const std::vector<AnyArith>& scalars);

/// CSV: `scalar,n,scaled,relative_error` (error in %.16e, "nan" if unsolved).
void write_hilbert_csv(std::ostream& out, std::span<const HilbertRow> rows);

// ------------------------------------------------------------------ Lorenz

struct LorenzParams {
    BigRational sigma{10};
    BigRational rho{28};
    BigRational beta = BigRational(8, 3);
    BigRational dt = BigRational(1, 64);
    std::size_t steps = 10000;
    BigRational x0{10};
    BigRational y0{1};
    BigRational z0{1};

    /// Throws std::invalid_argument unless dt > 0 and steps >= 1.
    void validate() const;
};

/// Classical Runge-Kutta step with every operation in the scalar, laid out
/// as in odeint's runge_kutta4: stages y + (dt a) k and the update
/// y + (dt/6) k1 + (dt/3) k2 + (dt/3) k3 + (dt/6) k4, summed left to right.
/// `half`, `third` and `sixth` are the converted constants.
template <typename A, typename F>
Vec<A> rk4_step(const A& a, F&& rhs, const Vec<A>& y, const typename A::value_type& h,
                const typename A::value_type& half, const typename A::value_type& third,
                const typename A::value_type& sixth)
{
    const std::size_t n = y.size();
    auto shifted = [&](const Vec<A>& k, const typename A::value_type& c) {
        Vec<A> out(n, a.zero());
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = a.add(y[i], a.mul(c, k[i]));
        }
        return out;
    };
    const auto h2 = a.mul(h, half);
    Vec<A> k1 = rhs(y);
    Vec<A> k2 = rhs(shifted(k1, h2));
    Vec<A> k3 = rhs(shifted(k2, h2));
    Vec<A> k4 = rhs(shifted(k3, h));
    const auto h6 = a.mul(h, sixth);
    const auto h3 = a.mul(h, third);
    Vec<A> out(n, a.zero());
    for (std::size_t i = 0; i < n; ++i) {
        auto s = a.add(y[i], a.mul(h6, k1[i]));
        s = a.add(s, a.mul(h3, k2[i]));
        s = a.add(s, a.mul(h3, k3[i]));
        out[i] = a.add(s, a.mul(h6, k4[i]));
    }
    return out;
}

template <typename A>
struct LorenzConstants {
    typename A::value_type sigma, rho, beta, dt, half, third, sixth;

    LorenzConstants(const A& a, const LorenzParams& p)
        : sigma(a.from_rational(p.sigma)),
          rho(a.from_rational(p.rho)),
          beta(a.from_rational(p.beta)),
          dt(a.from_rational(p.dt)),
          half(a.from_rational(BigRational(1, 2))),
          third(a.from_rational(BigRational(1, 3))),
          sixth(a.from_rational(BigRational(1, 6)))
    {
    }
};

/// (sigma (y - x), x (rho - z) - y, x y - beta z)
template <typename A>
Vec<A> lorenz_rhs(const A& a, const Vec<A>& s, const LorenzConstants<A>& c)
{
    return {a.mul(c.sigma, a.sub(s[1], s[0])), a.sub(a.mul(s[0], a.sub(c.rho, s[2])), s[1]),
            a.sub(a.mul(s[0], s[1]), a.mul(c.beta, s[2]))};
}

struct TrajectorySample {
    double t = 0;
    double x = 0, y = 0, z = 0;
};

/// States converted to binary64 after the run. samples[k] is the state after
/// k steps; a NaN/NaR state ends the trajectory early with diverged set.
struct Trajectory {
    std::string scalar;
    BigRational dt;
    std::size_t steps = 0;  ///< requested steps
    std::vector<TrajectorySample> samples;
    bool diverged = false;
};

template <typename A>
Trajectory rk4_integrate(const A& a, const LorenzParams& p)
{
    p.validate();
    LorenzConstants<A> c(a, p);
    Trajectory tr;
    tr.scalar = a.name();
    tr.dt = p.dt;
    tr.steps = p.steps;
    tr.samples.reserve(p.steps + 1);
    Vec<A> s{a.from_rational(p.x0), a.from_rational(p.y0), a.from_rational(p.z0)};
    auto rhs = [&](const Vec<A>& v) { return lorenz_rhs(a, v, c); };
    const double dt = p.dt.to_double();
    for (std::size_t k = 0;; ++k) {
        if (a.is_nan(s[0]) || a.is_nan(s[1]) || a.is_nan(s[2])) {
            tr.diverged = true;
            break;
        }
        tr.samples.push_back({static_cast<double>(k) * dt, a.to_double(s[0]), a.to_double(s[1]), a.to_double(s[2])});
        if (k == p.steps) {
            break;
        }
        s = rk4_step(a, rhs, s, c.dt, c.half, c.third, c.sixth);
    }
    return tr;
}

Trajectory rk4_integrate(const AnyArith& a, const LorenzParams& p);

/// First step at which the binary64 distance between the states exceeds
/// epsilon; nullopt when it never does. A trajectory that ended early counts
/// as infinitely far from the point where it stops. Throws
/// std::invalid_argument when dt or the step count differ, or epsilon <= 0.
std::optional<std::size_t> divergence_time(const Trajectory& traj, const Trajectory& reference, double epsilon);

struct DivergenceRow {
    std::string config;
    std::optional<std::size_t> step;
    std::optional<double> time;
};

struct LorenzReport {
    Trajectory reference;
    std::vector<Trajectory> runs;
    std::vector<DivergenceRow> divergence;
};

/// Integrates the reference scalar and every listed scalar; the runs are
/// distributed over OpenMP threads unless `parallel` is false. The result
/// does not depend on the thread count.
LorenzReport run_lorenz_experiment(const std::vector<AnyArith>& scalars, const LorenzParams& params,
                                   double epsilon = 1.0, const AnyArith& reference = PositArith(PositConfig(64, 3)),
                                   bool parallel = true);

/// CSV `t,x,y,z` with %.16e fields, one row per stored step.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// CSV `config,divergence_step,divergence_time`; "none" when not diverged.
void write_divergence_csv(std::ostream& out, std::span<const DivergenceRow> rows);

}  // namespace positlab
