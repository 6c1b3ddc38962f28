#include "positlab/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "positlab/experiments.hpp"
#include "positlab/linalg.hpp"
#include "positlab/oracle.hpp"
#include "positlab/validation.hpp"

namespace positlab {

namespace {

/// Malformed argument values detected after parsing; exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PositConfig config_arg(const std::string& text)
{
    try {
        return PositConfig::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

AnyArith scalar_arg(const std::string& text)
{
    try {
        if (text.find(',') != std::string::npos && !text.starts_with("posit<")) {
            return PositArith(PositConfig::parse(text));
        }
        return parse_arith(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

BigRational rational_arg(const std::string& text)
{
    try {
        return BigRational::parse(text);
    } catch (const std::invalid_argument&) {
        throw UsageError("malformed number '" + text + "'");
    }
}

std::vector<BigRational> rational_list(const std::string& text)
{
    std::vector<BigRational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(rational_arg(item));
    }
    return out;
}

/// Shortest decimal that reads back as the same binary64.
std::string shortest(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string sci17(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string decimal(const BigRational& v)
{
    auto d = v.to_decimal_exact();
    return d ? *d : v.to_string();
}

std::string power(const BigInt& base, std::int64_t exp) { return base.to_string() + "^" + std::to_string(exp); }

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    body(f);
}

// ------------------------------------------------------------ subcommands

int cmd_inspect(const std::string& config_text, const std::string& bits, std::ostream& out)
{
    PositConfig c = config_arg(config_text);
    PositPattern p;
    try {
        p = PositPattern::parse(c, bits);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (p.is_zero()) {
        out << "zero\n";
        return 0;
    }
    if (p.is_nar()) {
        out << "NaR\n";
        return 0;
    }
    PositFields f = decode_fields(p);
    BigRational v = *value_of(p);
    out << f.to_string() << "  k=" << f.k << " e=" << f.e.to_string() << " value=" << v.to_string()
        << " ≈ " << v.to_general(6) << "\n";
    out << "pattern=" << p.hex() << "\n";
    out << "fraction=" << f.fraction_value.to_string() << " (" << f.fraction_bits << " bits)\n";
    out << "decimal=" << decimal(v) << "\n";
    out << "binary64=" << shortest(to_host_float(p).value) << "\n";
    return 0;
}

int cmd_convert(const std::string& config_text, const std::string& value_text, std::ostream& out)
{
    PositConfig c = config_arg(config_text);
    BigRational x = rational_arg(value_text);
    PositPattern p = encode(c, x);
    BigRational v = *value_of(p);
    BigRational error = v - x;
    const char* direction = error.is_zero() ? "exact" : (error.sign() > 0 ? "up" : "down");
    out << "pattern=" << p.hex() << "\n";
    out << "value=" << v.to_string() << " ≈ " << v.to_general(6) << "\n";
    out << "decimal=" << decimal(v) << "\n";
    out << "direction=" << direction << "\n";
    out << "error=" << error.to_string() << "\n";
    return 0;
}

int cmd_env(const std::string& config_text, std::ostream& out)
{
    PositConfig c = config_arg(config_text);
    ConfigExtrema x = config_extrema(c);
    const auto k = static_cast<std::int64_t>(c.nbits) - 2;
    out << "config=" << c.to_string() << "\n";
    out << "useed=" << x.useed.to_string() << "\n";
    out << "minpos=" << power(x.useed, -k) << " = " << x.minpos.to_string() << " ≈ " << x.minpos.to_general(6)
        << "\n";
    out << "maxpos=" << power(x.useed, k) << " = " << x.maxpos.to_string() << " ≈ " << x.maxpos.to_general(6)
        << "\n";
    out << "dynamic_range=useed^" << x.dynamic_range_exponent << " = 2^"
        << static_cast<std::uint64_t>(x.dynamic_range_exponent) * x.useed_log2 << "\n";
    return 0;
}

struct ValidateArgs {
    std::string config;
    std::string op = "add";
    std::string mode = "exhaustive";
    std::string path = "generic";
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    bool no_timing = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out)
{
    PositConfig c = config_arg(a.config);
    ArithPath path;
    std::vector<BinaryOp> ops;
    try {
        path = parse_path(a.path);
        if (a.op == "all") {
            ops = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div};
        } else {
            ops = {parse_op(a.op)};
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (path == ArithPath::Fast && !has_fast_path(c)) {
        throw UsageError("no fast path for " + c.to_string());
    }
    std::vector<ValidationReport> reports;
    try {
        if (a.mode == "exhaustive") {
            for (BinaryOp op : ops) {
                reports.push_back(exhaustive_check(c, op, path));
            }
        } else if (a.mode == "random") {
            for (BinaryOp op : ops) {
                reports.push_back(randomized_check(c, op, a.trials, a.seed, path));
            }
        } else if (a.mode == "embed") {
            reports.push_back(embedding_check(c));
        } else if (a.mode == "convert") {
            reports.push_back(conversion_check(c));
        } else {
            throw UsageError("unknown mode '" + a.mode + "' (expected exhaustive, random, embed or convert)");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    bool pass = true;
    for (const auto& r : reports) {
        r.write(out, !a.no_timing);
        pass = pass && r.pass();
    }
    return pass ? 0 : 1;
}

struct LorenzArgs {
    std::vector<std::string> configs;
    std::string reference = "64,3";
    std::size_t steps = 10000;
    std::string dt = "1/64";
    double epsilon = 1.0;
    std::string out_dir;
};

int cmd_lorenz(const LorenzArgs& a, std::ostream& out)
{
    std::vector<AnyArith> scalars;
    for (const auto& s : a.configs) {
        scalars.push_back(scalar_arg(s));
    }
    LorenzParams p;
    p.steps = a.steps;
    p.dt = rational_arg(a.dt);
    if (!(a.epsilon > 0)) {
        throw UsageError("--epsilon must be positive");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    LorenzReport rep = run_lorenz_experiment(scalars, p, a.epsilon, scalar_arg(a.reference));
    if (!a.out_dir.empty()) {
        std::filesystem::path dir(a.out_dir);
        std::filesystem::create_directories(dir);
        auto save = [&](const Trajectory& t) {
            write_file(dir / ("trajectory_" + t.scalar + ".csv"), [&](std::ostream& f) { write_trajectory_csv(f, t); });
        };
        save(rep.reference);
        for (const auto& t : rep.runs) {
            save(t);
        }
        write_file(dir / "divergence.csv", [&](std::ostream& f) { write_divergence_csv(f, rep.divergence); });
    }
    write_divergence_csv(out, rep.divergence);
    return 0;
}

int cmd_hilbert(std::size_t n, const std::vector<std::string>& scalar_names, bool show_inverse, std::ostream& out)
{
    if (n < 1) {
        throw UsageError("--n must be at least 1");
    }
    if (show_inverse) {
        ScaledHilbert s = hilbert_scaled(n);
        DenseMatrix<BigInt> inv = hilbert_inverse(n);
        out << "scale=" << s.scale.to_string() << "\n";
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                out << (j ? "," : "") << inv(i, j).to_string();
            }
            out << "\n";
        }
        return 0;
    }
    std::vector<AnyArith> scalars;
    for (const auto& s : scalar_names) {
        scalars.push_back(scalar_arg(s));
    }
    auto rows = run_hilbert_experiment(n, scalars);
    write_hilbert_csv(out, rows);
    return 0;
}

int cmd_dotdemo(const std::string& config_text, const std::string& xs, const std::string& ys, std::ostream& out)
{
    PositConfig c = config_arg(config_text);
    std::vector<BigRational> x = rational_list(xs);
    std::vector<BigRational> y = rational_list(ys);
    if (x.size() != y.size() || x.empty()) {
        throw UsageError("--x and --y must be non-empty lists of equal length");
    }
    Float64Arith f;
    std::vector<double> fx;
    std::vector<double> fy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        fx.push_back(f.from_rational(x[i]));
        fy.push_back(f.from_rational(y[i]));
    }
    double naive64 = dot_naive(f, std::span<const double>(fx), std::span<const double>(fy));

    PositArith p(c);
    std::vector<PositPattern> px;
    std::vector<PositPattern> py;
    for (std::size_t i = 0; i < x.size(); ++i) {
        px.push_back(p.from_rational(x[i]));
        py.push_back(p.from_rational(y[i]));
    }
    PositPattern naive = dot_naive(p, std::span<const PositPattern>(px), std::span<const PositPattern>(py));
    PositPattern fused = dot_fused(p, std::span<const PositPattern>(px), std::span<const PositPattern>(py));
    BigRational exact;
    for (std::size_t i = 0; i < x.size(); ++i) {
        exact += x[i] * y[i];
    }
    auto show = [](const PositPattern& r) { return r.is_nar() ? std::string("NaR") : value_of(r)->to_general(6); };
    out << "scalar,mode,result,pattern\n";
    out << "binary64,naive," << BigRational::from_double(naive64).to_general(6) << ",-\n";
    out << c.to_string() << ",naive," << show(naive) << "," << naive.hex() << "\n";
    out << c.to_string() << ",fused," << show(fused) << "," << fused.hex() << "\n";
    out << "exact,-," << exact.to_general(6) << ",-\n";
    return 0;
}

SparseMatrix<BigRational> load_matrix(const std::string& source)
{
    auto sized = [&](std::string_view prefix) -> std::optional<std::size_t> {
        if (!source.starts_with(prefix)) {
            return std::nullopt;
        }
        std::size_t n = 0;
        auto rest = std::string_view(source).substr(prefix.size());
        auto r = std::from_chars(rest.data(), rest.data() + rest.size(), n);
        if (rest.empty() || r.ec != std::errc() || r.ptr != rest.data() + rest.size() || n == 0) {
            throw UsageError("malformed matrix '" + source + "'");
        }
        return n;
    };
    if (auto n = sized("hilbert:")) {
        ScaledHilbert s = hilbert_scaled(*n);
        std::vector<std::tuple<std::size_t, std::size_t, BigRational>> e;
        for (std::size_t i = 0; i < *n; ++i) {
            for (std::size_t j = 0; j < *n; ++j) {
                e.emplace_back(i, j, BigRational(s.matrix(i, j)));
            }
        }
        return SparseMatrix<BigRational>::from_triplets(*n, *n, std::move(e), true);
    }
    if (auto n = sized("poisson:")) {
        std::vector<std::tuple<std::size_t, std::size_t, BigRational>> e;
        for (std::size_t i = 0; i < *n; ++i) {
            e.emplace_back(i, i, BigRational(2));
            if (i > 0) {
                e.emplace_back(i, i - 1, BigRational(-1));
                e.emplace_back(i - 1, i, BigRational(-1));
            }
        }
        return SparseMatrix<BigRational>::from_triplets(*n, *n, std::move(e), true);
    }
    return mtx_read_file(source);
}

struct CgArgs {
    std::string matrix;
    std::string scalar = "f64";
    std::string dot = "naive";
    std::string precond = "ilu0";
    std::string stop = "error";
    double tol = 1e-8;
    std::size_t maxiter = 1000;
    std::string out_dir;
};

template <typename A>
int run_cg(const A& a, const SparseMatrix<BigRational>& exact, const CgArgs& args, CgOptions opts, std::ostream& out,
           std::ostream& err)
{
    using V = typename A::value_type;
    auto m = convert(a, exact);
    std::vector<BigRational> ones_exact(exact.cols, BigRational(1));
    auto rhs = gemv_naive(RationalArith{}, exact, std::span<const BigRational>(ones_exact));
    std::vector<V> b;
    for (const auto& v : rhs) {
        b.push_back(a.from_rational(v));
    }
    std::vector<V> x0(m.rows, a.zero());
    std::vector<V> ones(m.rows, a.one());
    std::optional<Ilu0Factors<V>> fac;
    if (args.precond == "ilu0") {
        fac = ilu0(a, m);
    }
    auto res = cg_solve(a, m, std::span<const V>(b), std::span<const V>(x0), opts, fac ? &*fac : nullptr,
                        std::span<const V>(ones));
    std::ostringstream summary;
    summary << "matrix=" << args.matrix << " n=" << m.rows << " nnz=" << m.nnz() << " scalar=" << arith_id(AnyArith(a))
            << " dot=" << to_string(opts.dot) << " precond=" << args.precond << " status=" << to_string(res.status)
            << " iterations=" << res.iterations << " error=" << sci17(res.metric);
    if (res.diverged_at) {
        summary << " diverged_at=" << *res.diverged_at;
    }
    if (!args.out_dir.empty()) {
        std::filesystem::path dir(args.out_dir);
        std::filesystem::create_directories(dir);
        std::string name = "history_" + arith_id(AnyArith(a)) + "_" + to_string(opts.dot) + ".csv";
        write_file(dir / name, [&](std::ostream& f) { write_history_csv(f, res.history); });
        out << summary.str() << "\n";
    } else {
        write_history_csv(out, res.history);
        err << summary.str() << "\n";
    }
    return res.converged() ? 0 : 1;
}

int cmd_cgsolve(const CgArgs& args, std::ostream& out, std::ostream& err)
{
    AnyArith scalar = scalar_arg(args.scalar);
    CgOptions opts;
    opts.tol = args.tol;
    opts.maxiter = args.maxiter;
    if (!(args.tol > 0)) {
        throw UsageError("--tol must be positive");
    }
    if (args.dot == "naive") {
        opts.dot = DotMode::Naive;
    } else if (args.dot == "fused") {
        opts.dot = DotMode::Fused;
    } else {
        throw UsageError("unknown dot mode '" + args.dot + "' (expected naive or fused)");
    }
    if (args.stop == "error") {
        opts.stop = StopMetric::TrueError;
    } else if (args.stop == "residual") {
        opts.stop = StopMetric::Residual;
    } else {
        throw UsageError("unknown stop metric '" + args.stop + "' (expected error or residual)");
    }
    if (args.precond != "ilu0" && args.precond != "none") {
        throw UsageError("unknown preconditioner '" + args.precond + "' (expected ilu0 or none)");
    }
    SparseMatrix<BigRational> exact;
    try {
        exact = load_matrix(args.matrix);
    } catch (const MtxError& e) {
        throw UsageError(args.matrix + ": " + e.what());
    }
    if (exact.rows != exact.cols) {
        throw UsageError(args.matrix + ": matrix is not square");
    }
    return std::visit([&](const auto& a) { return run_cg(a, exact, args, opts, out, err); }, scalar);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Posit arithmetic toolkit: pattern inspection, validation and numerical experiments", "positlab"};
    app.require_subcommand(1);

    std::string config;
    std::string bits;
    auto* inspect = app.add_subcommand("inspect", "Field breakdown and exact value of a bit pattern");
    inspect->add_option("--config", config, "posit configuration N,E")->required();
    inspect->add_option("--bits", bits, "pattern as 0x... or 0b...")->required();

    std::string value;
    auto* convert_cmd = app.add_subcommand("convert", "Round a decimal or p/q value to the nearest posit");
    convert_cmd->add_option("--config", config, "posit configuration N,E")->required();
    convert_cmd->add_option("--value", value, "decimal or p/q")->required();

    auto* env = app.add_subcommand("env", "useed, minpos, maxpos and dynamic range of a configuration");
    env->add_option("--config", config, "posit configuration N,E")->required();

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Compare arithmetic against the rational oracle");
    validate->add_option("--config", va.config, "posit configuration N,E")->required();
    validate->add_option("--op", va.op, "add, sub, mul, div or all")->capture_default_str();
    validate->add_option("--mode", va.mode, "exhaustive, random, embed or convert")->capture_default_str();
    validate->add_option("--path", va.path, "generic, fast or auto")->capture_default_str();
    validate->add_option("--trials", va.trials, "random pairs (random mode)")->capture_default_str();
    validate->add_option("--seed", va.seed, "random seed (random mode)")->capture_default_str();
    validate->add_flag("--no-timing", va.no_timing, "omit the seconds field");

    LorenzArgs la;
    auto* lorenz = app.add_subcommand("lorenz", "RK4 Lorenz runs and divergence from the reference");
    lorenz->add_option("--configs", la.configs, "posit configs N,E or scalar names");
    lorenz->add_option("--reference", la.reference, "reference scalar")->capture_default_str();
    lorenz->add_option("--steps", la.steps, "number of steps")->capture_default_str();
    lorenz->add_option("--dt", la.dt, "step size (decimal or p/q)")->capture_default_str();
    lorenz->add_option("--epsilon", la.epsilon, "divergence threshold")->capture_default_str();
    lorenz->add_option("--out", la.out_dir, "directory for trajectory and divergence CSVs");

    std::size_t hn = 8;
    std::vector<std::string> hscalars{"f64", "posit32_2", "posit64_3", "rational"};
    bool show_inverse = false;
    auto* hilbert_cmd = app.add_subcommand("hilbert", "Solve H x = H 1 in several scalars");
    hilbert_cmd->add_option("--n", hn, "dimension")->capture_default_str();
    hilbert_cmd->add_option("--scalars", hscalars, "scalars to compare");
    hilbert_cmd->add_flag("--inverse", show_inverse, "print the exact inverse instead");

    std::string xs = "1,1e-20,-1";
    std::string ys = "1,1,1";
    std::string dconfig = "32,2";
    auto* dotdemo = app.add_subcommand("dotdemo", "Naive binary64 dot product against the fused posit dot product");
    dotdemo->add_option("--config", dconfig, "posit configuration N,E")->capture_default_str();
    dotdemo->add_option("--x", xs, "comma separated values")->capture_default_str();
    dotdemo->add_option("--y", ys, "comma separated values")->capture_default_str();

    CgArgs ca;
    auto* cgsolve = app.add_subcommand("cgsolve", "Preconditioned CG on A x = A 1 from x = 0");
    cgsolve->add_option("--matrix", ca.matrix, "FILE.mtx, hilbert:N or poisson:N")->required();
    cgsolve->add_option("--scalar", ca.scalar, "f64, f32, rational, positN_E")->capture_default_str();
    cgsolve->add_option("--dot", ca.dot, "naive or fused")->capture_default_str();
    cgsolve->add_option("--precond", ca.precond, "ilu0 or none")->capture_default_str();
    cgsolve->add_option("--stop", ca.stop, "error (against x = 1) or residual")->capture_default_str();
    cgsolve->add_option("--tol", ca.tol, "stopping tolerance")->capture_default_str();
    cgsolve->add_option("--maxiter", ca.maxiter, "iteration limit")->capture_default_str();
    cgsolve->add_option("--out", ca.out_dir, "directory for the history CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*inspect) {
            return cmd_inspect(config, bits, out);
        }
        if (*convert_cmd) {
            return cmd_convert(config, value, out);
        }
        if (*env) {
            return cmd_env(config, out);
        }
        if (*validate) {
            return cmd_validate(va, out);
        }
        if (*lorenz) {
            return cmd_lorenz(la, out);
        }
        if (*hilbert_cmd) {
            return cmd_hilbert(hn, hscalars, show_inverse, out);
        }
        if (*dotdemo) {
            return cmd_dotdemo(dconfig, xs, ys, out);
        }
        if (*cgsolve) {
            return cmd_cgsolve(ca, out, err);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace positlab
