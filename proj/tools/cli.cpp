#include "cli.hpp"

#include <spectrafw/certify.hpp>
#include <spectrafw/instance_io.hpp>
#include <spectrafw/sketch.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace spectrafw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char *kVersion = "0.1.0";

namespace {

std::string fmt(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_to_json(const SolverConfig &cfg) {
    json j;
    j["algorithm"] = to_string(cfg.algorithm);
    j["k"] = cfg.k;
    j["eta"] = cfg.eta;
    j["beta"] = cfg.beta ? json(*cfg.beta) : json(nullptr);
    j["max_iters"] = cfg.max_iters;
    j["time_limit_s"] = std::isfinite(cfg.time_limit_s) ? json(cfg.time_limit_s) : json(nullptr);
    j["gap_tol"] = cfg.gap_tol ? json(*cfg.gap_tol) : json(nullptr);
    j["subproblem"] = to_string(cfg.subproblem);
    j["sub_tol"] = cfg.sub_tol;
    j["sub_max_iters"] = cfg.sub_max_iters;
    j["lanczos_tol"] = cfg.lanczos_tol;
    j["use_sketch"] = cfg.use_sketch;
    j["sketch_rank"] = cfg.sketch_rank;
    j["seed"] = cfg.seed;
    return j;
}

fs::path manifest_path(const fs::path &csv) {
    fs::path p = csv;
    p.replace_extension(".manifest.json");
    return p;
}

void write_manifest(const fs::path &csv, const json &configs, const std::string &instance,
                    std::uint64_t seed) {
    json man = {{"config", configs},
                {"instance", instance},
                {"seed", seed},
                {"start_timestamp", timestamp()},
                {"library_version", kVersion}};
    std::ofstream out(manifest_path(csv), std::ios::trunc);
    if (!out)
        throw InputError("cannot write " + manifest_path(csv).string());
    out << man.dump(2) << "\n";
}

std::ofstream open_output(const fs::path &p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::trunc | std::ios::binary);
    if (!out)
        throw InputError("cannot write " + p.string());
    return out;
}

// row-major float64, the layout of the instance arrays
void save_matrix(const fs::path &p, const Matrix &m) {
    std::ofstream out = open_output(p);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            out.write(reinterpret_cast<const char *>(&v), sizeof v);
        }
}

Matrix load_matrix(const fs::path &p, Index n) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw InputError("cannot read iterate " + p.string());
    std::error_code ec;
    if (fs::file_size(p, ec) != static_cast<std::uintmax_t>(n * n * 8) || ec)
        throw InputError("iterate " + p.string() + " is not an n x n float64 array");
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            double v;
            in.read(reinterpret_cast<char *>(&v), sizeof v);
            m(i, j) = v;
        }
    return m;
}

// Dense iterate of a run; sketched runs give the symmetrized reconstruction.
SymMatrix final_matrix(const IterateState &st) {
    if (st.is_dense())
        return st.dense();
    return symmetrize(sketch_reconstruct(st.sketch()).dense());
}

class CsvSink final : public RunSink {
  public:
    explicit CsvSink(std::ostream &out) : out_(out) { out_ << kCsvHeader << "\n"; }
    void on_row(const IterationRow &row) override { out_ << csv_row(row) << "\n"; }

  private:
    std::ostream &out_;
};

struct SolverFlags {
    std::string algo;
    Index k = 0;
    double eta = 0, beta = 0, time_limit = 0, gap_tol = 0, sub_tol = 0, lanczos_tol = 0;
    Index max_iters = 0, sub_max_iters = 0, sketch_rank = 0;
    std::string subproblem, config, preset;
    bool sketch = false;
    std::uint64_t seed = 0;
    std::vector<CLI::Option *> opts;
    CLI::Option *o_algo = nullptr, *o_k = nullptr, *o_eta = nullptr, *o_beta = nullptr,
                *o_time = nullptr, *o_gap = nullptr, *o_sub_tol = nullptr, *o_lz = nullptr,
                *o_iters = nullptr, *o_sub_iters = nullptr, *o_srank = nullptr,
                *o_sub = nullptr, *o_config = nullptr, *o_preset = nullptr, *o_sketch = nullptr,
                *o_seed = nullptr;

    void add_to(CLI::App *app, bool with_algo) {
        if (with_algo)
            o_algo = app->add_option("--algo", algo, "fw | gblockfw | specfw | pgd | apgd");
        o_k = app->add_option("--k", k, "eigenvector count");
        o_eta = app->add_option("--eta", eta, "G-BlockFW step size");
        o_beta = app->add_option("--beta", beta, "unit-trace smoothness constant");
        o_iters = app->add_option("--max-iters", max_iters);
        o_time = app->add_option("--time-limit", time_limit, "seconds");
        o_gap = app->add_option("--gap-tol", gap_tol);
        o_sub = app->add_option("--subproblem", subproblem, "exact | g_model | f_model");
        o_sub_tol = app->add_option("--sub-tol", sub_tol);
        o_sub_iters = app->add_option("--sub-max-iters", sub_max_iters);
        o_lz = app->add_option("--lanczos-tol", lanczos_tol);
        o_sketch = app->add_flag("--sketch", sketch, "stream the iterate into a sketch");
        o_srank = app->add_option("--sketch-rank", sketch_rank);
        o_seed = app->add_option("--seed", seed);
        o_config = app->add_option("--config", config, "JSON file with SolverConfig fields");
        o_preset = app->add_option("--preset", preset, "qs: eta = 0.4, beta = 2.5 n^2");
    }

    static bool given(const CLI::Option *o) { return o && o->count() > 0; }

    SolverConfig build(Index n, Algorithm fallback_algo) const {
        SolverConfig cfg;
        cfg.algorithm = given(o_algo) ? parse_algorithm(algo) : fallback_algo;
        if (given(o_preset)) {
            if (preset != "qs")
                throw ConfigError("unknown preset '" + preset + "' (qs)");
            const SolverConfig p = quadratic_sensing_preset(cfg.algorithm, n, cfg.k);
            cfg.eta = p.eta;
            cfg.beta = p.beta;
        }
        if (given(o_config)) {
            std::ifstream in(config);
            if (!in)
                throw ConfigError("cannot read config file " + config);
            std::stringstream ss;
            ss << in.rdbuf();
            apply_config_json(cfg, ss.str());
        }
        if (given(o_algo))
            cfg.algorithm = parse_algorithm(algo);
        if (given(o_k))
            cfg.k = k;
        if (given(o_eta))
            cfg.eta = eta;
        if (given(o_beta))
            cfg.beta = beta;
        if (given(o_iters))
            cfg.max_iters = max_iters;
        if (given(o_time))
            cfg.time_limit_s = time_limit;
        if (given(o_gap))
            cfg.gap_tol = gap_tol;
        if (given(o_sub))
            cfg.subproblem = parse_subproblem(subproblem);
        if (given(o_sub_tol))
            cfg.sub_tol = sub_tol;
        if (given(o_sub_iters))
            cfg.sub_max_iters = sub_max_iters;
        if (given(o_lz))
            cfg.lanczos_tol = lanczos_tol;
        if (given(o_sketch))
            cfg.use_sketch = sketch;
        if (given(o_srank))
            cfg.sketch_rank = sketch_rank;
        if (given(o_seed))
            cfg.seed = seed;
        cfg.validate();
        return cfg;
    }
};

void print_run_report(std::ostream &out, const ProblemInstance &inst, const RunRecord &rec) {
    const IterationRow &last = rec.rows.back();
    out << "algorithm=" << to_string(rec.algorithm) << "\n"
        << "stop_reason=" << to_string(rec.stop_reason) << "\n"
        << "iterations=" << last.iter << "\n"
        << "final_objective=" << fmt(rec.final_objective) << "\n"
        << "final_fw_gap=" << fmt(last.fw_gap) << "\n"
        << "gap_tol=" << fmt(rec.gap_tol_used) << "\n"
        << "beta_used=" << fmt(rec.beta_used) << "\n"
        << "fallback_steps=" << rec.fallback_steps << "\n"
        << "dense_eig_fallbacks=" << rec.dense_eig_fallbacks << "\n";
    if (!rec.beta_converged)
        out << "warning=smoothness power iteration did not converge; beta is an upper bound\n";
    if (inst.truth()) {
        const double err = recovery_error(final_matrix(rec.final_state), inst.tau(),
                                          inst.truth()->u_nat);
        out << "recovery_error=" << fmt(err) << "\n";
    }
}

int cmd_gen(const fs::path &dir, Index n, Index r_nat, double noise_c, double tau,
            std::uint64_t seed, const std::string &linear_diag, std::ostream &out) {
    if (!linear_diag.empty()) {
        std::vector<double> d;
        std::stringstream ss(linear_diag);
        std::string tok;
        while (std::getline(ss, tok, ','))
            d.push_back(std::stod(tok));
        if (d.empty())
            throw InputError("--linear-diag needs at least one value");
        const Index nn = static_cast<Index>(d.size());
        SymMatrix c = Eigen::Map<const Vector>(d.data(), nn).asDiagonal();
        ProblemInstance inst(std::make_shared<LeastSquaresLoss>(Vector(0)),
                             std::make_shared<QuadraticSensingMap>(Matrix(0, nn)), c, tau);
        save_instance(inst, dir);
        out << "wrote " << dir.string() << ": linear objective n=" << nn << " tau=" << fmt(tau)
            << "\n";
        return kExitOk;
    }
    if (n < 1)
        throw InputError("--n is required and must be positive");
    const ProblemInstance inst = generate_quadratic_sensing(n, r_nat, noise_c, tau, seed);
    save_instance(inst, dir);
    out << "wrote " << dir.string() << ": n=" << n << " m=" << inst.m() << " r_nat=" << r_nat
        << " tau=" << fmt(tau) << " noise_c=" << fmt(noise_c) << " seed=" << seed << "\n";
    return kExitOk;
}

int cmd_solve(const std::string &instance, const SolverFlags &flags, const std::string &csv,
              const std::string &save_iterate, std::ostream &out) {
    const ProblemInstance inst = load_instance(instance);
    const SolverConfig cfg = flags.build(inst.n(), Algorithm::specfw);
    RunRecord rec;
    if (!csv.empty()) {
        std::ofstream f = open_output(csv);
        CsvSink sink(f);
        rec = solve(inst, cfg, &sink);
        write_manifest(csv, config_to_json(cfg), instance, cfg.seed);
    } else {
        std::ostringstream buf;
        CsvSink sink(buf);
        rec = solve(inst, cfg, &sink);
        out << buf.str();
    }
    print_run_report(out, inst, rec);
    if (!save_iterate.empty())
        save_matrix(save_iterate, final_matrix(rec.final_state));
    return kExitOk;
}

struct CompareSpec {
    SolverConfig cfg;
    std::string label;
};

std::vector<CompareSpec> parse_algo_list(const std::string &list, const SolverConfig &base) {
    std::vector<CompareSpec> specs;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        CompareSpec s{base, item};
        const auto colon = item.find(':');
        s.cfg.algorithm = parse_algorithm(item.substr(0, colon));
        if (colon != std::string::npos) {
            const std::string kv = item.substr(colon + 1);
            if (kv.rfind("k=", 0) != 0)
                throw ConfigError("algorithm spec '" + item + "': expected name or name:k=<int>");
            s.cfg.k = std::stol(kv.substr(2));
        }
        s.cfg.validate();
        specs.push_back(s);
    }
    if (specs.empty())
        throw ConfigError("--algos needs at least one algorithm");
    return specs;
}

int cmd_compare(const std::string &instance, const std::string &algos, const SolverFlags &flags,
                const std::string &csv, std::ostream &out) {
    const ProblemInstance inst = load_instance(instance);
    const SolverConfig base = flags.build(inst.n(), Algorithm::specfw);
    const std::vector<CompareSpec> specs = parse_algo_list(algos, base);

    std::vector<RunRecord> recs(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
            try {
                recs[i] = solve(inst, specs[i].cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers =
        std::max(1u, std::min<unsigned>(thread_budget(), static_cast<unsigned>(specs.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);

    double f_star = std::numeric_limits<double>::infinity();
    for (const auto &r : recs)
        for (const auto &row : r.rows)
            f_star = std::min(f_star, row.objective);
    const double scale = std::max(1.0, std::abs(f_star));

    std::ostringstream buf;
    buf << "algorithm," << kCsvHeader << ",rel_objective\n";
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (const auto &row : recs[i].rows)
            buf << specs[i].label << "," << csv_row(row) << ","
                << fmt((row.objective - f_star) / scale) << "\n";
    if (!csv.empty()) {
        std::ofstream f = open_output(csv);
        f << buf.str();
        json cfgs = json::array();
        for (const auto &s : specs)
            cfgs.push_back(config_to_json(s.cfg));
        write_manifest(csv, cfgs, instance, base.seed);
    } else {
        out << buf.str();
    }
    out << "f_star=" << fmt(f_star) << "\n";
    for (std::size_t i = 0; i < specs.size(); ++i)
        out << specs[i].label << ": final_rel_objective="
            << fmt((recs[i].final_objective - f_star) / scale)
            << " iterations=" << recs[i].rows.back().iter
            << " stop_reason=" << to_string(recs[i].stop_reason) << "\n";
    return kExitOk;
}

struct CertifyResult {
    KktCertificate cert;
    std::optional<GrowthConstant> growth;
    std::string growth_error;
    std::optional<double> recovery;
};

CertifyResult certify_one(const ProblemInstance &inst, const SymMatrix &x, double rank_tol,
                          std::uint64_t seed) {
    CertifyResult res;
    res.cert = kkt_certificate(inst, x, rank_tol);
    try {
        res.growth = growth_constant(inst, res.cert, x, seed);
    } catch (const PreconditionError &e) {
        res.growth_error = e.what();
    }
    if (inst.truth())
        res.recovery = recovery_error(x, inst.tau(), inst.truth()->u_nat);
    return res;
}

void print_certificate(std::ostream &out, const CertifyResult &r, const std::string &prefix) {
    const KktCertificate &c = r.cert;
    out << prefix << "s_star=" << fmt(c.s_star) << "\n"
        << prefix << "rank_x=" << c.rank_x << "\n"
        << prefix << "rank_z=" << c.rank_z << "\n"
        << prefix << "eigengap=" << fmt(c.eigengap) << "\n"
        << prefix << "comp_residual=" << fmt(c.comp_residual) << "\n"
        << prefix << "strict_comp=" << (c.strict_comp ? "true" : "false") << "\n";
    if (r.growth) {
        out << prefix << "gamma=" << fmt(r.growth->gamma) << "\n"
            << prefix << "gamma_case=" << to_string(r.growth->which) << "\n";
        if (r.growth->which == GrowthCase::strongly_convex_g)
            out << prefix << "sigma_max=" << fmt(r.growth->sigma_max) << "\n"
                << prefix << "sigma_min_v=" << fmt(r.growth->sigma_min_v) << "\n";
    } else {
        out << prefix << "gamma=nan\n" << prefix << "gamma_note=" << r.growth_error << "\n";
    }
    if (r.recovery)
        out << prefix << "recovery_error=" << fmt(*r.recovery) << "\n";
}

SolverConfig certify_solver_config(const SolverFlags &flags, Index n) {
    SolverConfig cfg = flags.build(n, Algorithm::specfw);
    if (!SolverFlags::given(flags.o_k))
        cfg.k = std::min<Index>(4, n);
    cfg.use_sketch = false;
    return cfg;
}

int cmd_certify(const std::string &instance, const std::string &iterate, bool solve_first,
                Index seeds, Index n, Index r_nat, double noise_c, double tau, double rank_tol,
                const SolverFlags &flags, std::ostream &out) {
    if (seeds > 0) {
        if (n < 1)
            throw InputError("--seeds needs --n");
        double sum_gap = 0, sum_err = 0;
        Index rank3 = 0;
        for (Index s = 0; s < seeds; ++s) {
            const ProblemInstance inst =
                generate_quadratic_sensing(n, r_nat, noise_c, tau, static_cast<std::uint64_t>(s));
            const RunRecord rec = solve(inst, certify_solver_config(flags, n));
            const CertifyResult r =
                certify_one(inst, rec.final_state.dense(), rank_tol, static_cast<std::uint64_t>(s));
            out << "seed=" << s << " rank_x=" << r.cert.rank_x
                << " eigengap=" << fmt(r.cert.eigengap)
                << " recovery_error=" << fmt(r.recovery.value_or(NAN))
                << " comp_residual=" << fmt(r.cert.comp_residual) << "\n";
            sum_gap += r.cert.eigengap;
            sum_err += r.recovery.value_or(NAN);
            rank3 += r.cert.rank_x == r_nat;
        }
        out << "mean_eigengap=" << fmt(sum_gap / seeds) << "\n"
            << "mean_recovery_error=" << fmt(sum_err / seeds) << "\n"
            << "seeds_with_rank_r_nat=" << rank3 << "/" << seeds << "\n";
        return kExitOk;
    }
    if (instance.empty())
        throw InputError("certify needs --instance or --seeds with --n");
    const ProblemInstance inst = load_instance(instance);
    SymMatrix x;
    if (solve_first) {
        x = solve(inst, certify_solver_config(flags, inst.n())).final_state.dense();
    } else if (!iterate.empty()) {
        x = load_matrix(iterate, inst.n());
    } else {
        x = initial_state(inst).dense();
    }
    print_certificate(out, certify_one(inst, x, rank_tol, flags.seed), "");
    return kExitOk;
}

int cmd_sketch_demo(Index n, Index r, Index steps, std::uint64_t seed, std::ostream &out) {
    if (n < 1 || r < 1 || r > n)
        throw InputError("sketch-demo needs 1 <= r <= n");
    if (steps < 0)
        throw InputError("--steps must be >= 0");
    Rng rng(seed);
    SketchState sk = sketch_init(n, r, seed);
    const Matrix basis = thin_qr(standard_normal(n, r, rng)).q;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SymMatrix shadow = SymMatrix::Zero(n, n);
    for (Index t = 0; t < steps; ++t) {
        const Matrix g = standard_normal(r, r, rng);
        const SymMatrix s = g * g.transpose() / static_cast<double>(r);
        const double eta = unif(rng);
        sketch_update(sk, basis, s, eta);
        shadow = eta * shadow + basis * s * basis.transpose();
    }
    const LowRankFactors f = sketch_reconstruct(sk);
    const Matrix xhat = f.dense();
    const double den = shadow.norm();
    const double rel = den > 0 ? (xhat - shadow).norm() / den : (xhat.norm() > 0 ? 1.0 : 0.0);
    const double lmin = sym_eig_full(symmetrize(xhat)).values.minCoeff();
    out << "n=" << n << "\nr=" << r << "\nsteps=" << steps << "\n"
        << "relative_error=" << fmt(rel) << "\n"
        << "lambda_min_xhat=" << fmt(lmin) << "\n"
        << "ill_conditioned=" << (f.ill_conditioned ? "true" : "false") << "\n";
    return kExitOk;
}

} // namespace

std::string csv_row(const IterationRow &row) {
    std::string s = std::to_string(row.iter);
    s += ',' + fmt(row.wall_time_s);
    s += ',' + fmt(row.objective);
    s += ',' + fmt(row.fw_gap);
    s += ',' + fmt(row.eta_hat);
    s += ',' + std::to_string(row.update_rank);
    s += ',' + fmt(row.eigengap_est);
    return s;
}

void apply_config_json(SolverConfig &cfg, const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string &key = it.key();
        const json &v = it.value();
        try {
            if (key == "algorithm")
                cfg.algorithm = parse_algorithm(v.get<std::string>());
            else if (key == "k")
                cfg.k = v.get<Index>();
            else if (key == "eta")
                cfg.eta = v.get<double>();
            else if (key == "beta")
                cfg.beta = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "max_iters")
                cfg.max_iters = v.get<Index>();
            else if (key == "time_limit_s")
                cfg.time_limit_s =
                    v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
            else if (key == "gap_tol")
                cfg.gap_tol = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "subproblem")
                cfg.subproblem = parse_subproblem(v.get<std::string>());
            else if (key == "sub_tol")
                cfg.sub_tol = v.get<double>();
            else if (key == "sub_max_iters")
                cfg.sub_max_iters = v.get<Index>();
            else if (key == "lanczos_tol")
                cfg.lanczos_tol = v.get<double>();
            else if (key == "use_sketch")
                cfg.use_sketch = v.get<bool>();
            else if (key == "sketch_rank")
                cfg.sketch_rank = v.get<Index>();
            else if (key == "seed")
                cfg.seed = v.get<std::uint64_t>();
            else
                throw ConfigError("unknown config key '" + key + "'");
        } catch (const json::exception &) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }
}

unsigned thread_budget() {
    if (const char *env = std::getenv("SPECTRAFW_THREADS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Frank-Wolfe type solvers over the spectrahedron"};
    app.require_subcommand(1);

    std::string instance, csv, save_iterate, iterate, linear_diag, algos = "fw,specfw,gblockfw";
    std::string out_dir;
    Index n = 0, r_nat = 3, seeds = 0, steps = 50, r = 3;
    double noise_c = 0.5, tau = 0.5, rank_tol = 1e-6;
    std::uint64_t seed = 0;
    bool solve_first = false;

    auto *gen = app.add_subcommand("gen", "generate a quadratic-sensing instance");
    gen->add_option("--out", out_dir, "instance directory")->required();
    gen->add_option("--n", n);
    gen->add_option("--r-nat", r_nat);
    gen->add_option("--noise-c", noise_c);
    gen->add_option("--tau", tau);
    gen->add_option("--seed", seed);
    gen->add_option("--linear-diag", linear_diag, "comma list: f(X) = <diag(list), X>, m = 0");

    SolverFlags solve_flags, compare_flags, certify_flags;
    auto *sol = app.add_subcommand("solve", "run one solver");
    sol->add_option("--instance", instance)->required();
    sol->add_option("--csv", csv, "per-iteration CSV (stdout when omitted)");
    sol->add_option("--save-iterate", save_iterate, "final X as row-major float64");
    solve_flags.add_to(sol, true);

    auto *cmp = app.add_subcommand("compare", "run several solvers on one instance");
    cmp->add_option("--instance", instance)->required();
    cmp->add_option("--algos", algos, "comma list of name or name:k=<int>");
    cmp->add_option("--csv", csv);
    compare_flags.add_to(cmp, false);

    auto *cert = app.add_subcommand("certify", "strict complementarity and growth report");
    cert->add_option("--instance", instance);
    cert->add_option("--iterate", iterate, "row-major float64 n x n matrix");
    cert->add_flag("--solve-first", solve_first);
    cert->add_option("--seeds", seeds, "generate and solve this many seeds (needs --n)");
    cert->add_option("--n", n);
    cert->add_option("--r-nat", r_nat);
    cert->add_option("--noise-c", noise_c);
    cert->add_option("--tau", tau);
    cert->add_option("--rank-tol", rank_tol);
    certify_flags.add_to(cert, true);

    auto *demo = app.add_subcommand("sketch-demo", "stream low-rank updates through a sketch");
    demo->add_option("--n", n)->default_val(200);
    demo->add_option("--r", r);
    demo->add_option("--steps", steps);
    demo->add_option("--seed", seed);

    std::vector<char *> argv;
    std::vector<std::string> storage = args;
    if (storage.empty())
        storage.push_back("spectrafw");
    for (auto &s : storage)
        argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed())
            return cmd_gen(out_dir, n, r_nat, noise_c, tau, seed, linear_diag, out);
        if (sol->parsed())
            return cmd_solve(instance, solve_flags, csv, save_iterate, out);
        if (cmp->parsed())
            return cmd_compare(instance, algos, compare_flags, csv, out);
        if (cert->parsed())
            return cmd_certify(instance, iterate, solve_first, seeds, n, r_nat, noise_c, tau,
                               rank_tol, certify_flags, out);
        if (demo->parsed())
            return cmd_sketch_demo(n, r, steps, seed, out);
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConvergenceError &e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const PreconditionError &e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

} // namespace spectrafw::cli
