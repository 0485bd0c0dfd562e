#include "kirchhoff/cli.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kirchhoff/report_io.hpp"
#include "kirchhoff/scaling_map.hpp"

namespace kirchhoff::cli {

using nlohmann::json;
namespace fs = std::filesystem;

ShootingOptions<double> RunConfig::shooting() const {
    ShootingOptions<double> opt;
    opt.tol = tol;
    opt.grid_intervals = grid;
    opt.decay_threshold = decay_threshold;
    opt.r_max = r_max;
    return opt;
}

json RunConfig::to_json() const {
    return {{"tol", tol},
            {"grid_intervals", grid},
            {"decay_threshold", decay_threshold},
            {"r_max", r_max},
            {"eps_eq", eps_eq},
            {"seed", seed},
            {"gates",
             {{"scaling_identity", gates.scaling_identity},
              {"root_identity", gates.root_identity},
              {"action_definition", gates.action_definition},
              {"action_closed_forms", gates.action_closed_forms},
              {"pohozaev_kirchhoff", gates.pohozaev_kirchhoff},
              {"pde", gates.pde},
              {"nonnegativity", gates.nonnegativity}}}};
}

void SweepRange::validate(const std::string& name) const {
    if (steps < 1) throw Error(ErrorCode::HypothesisError, name + "-steps must be >= 1");
    if (!(lo > 0) || !(hi > 0)) throw Error(ErrorCode::HypothesisError, name + " range must be positive");
    if (hi < lo) throw Error(ErrorCode::HypothesisError, name + " range needs lo <= hi");
}

std::vector<double> SweepRange::values() const {
    std::vector<double> out;
    out.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const double f = steps == 1 ? 0.0 : double(i) / (steps - 1);
        out.push_back(log ? lo * std::pow(hi / lo, f) : (1 - f) * lo + f * hi);
    }
    // endpoints exactly as given
    if (steps > 1) out.back() = hi;
    return out;
}

SweepRow evaluate_sweep_row(const Profile& ground, double a, double b, VerifyLevel level, const RunConfig& cfg) {
    SweepRow row;
    row.N = ground.N;
    row.a = a;
    row.b = b;
    row.K = ground.K;
    try {
        const KirchhoffProblem<double> problem{ground.N, a, b};
        ScalingTolerances<double> stol;
        stol.eps_eq = cfg.eps_eq;
        const auto roots = solve_scaling(problem, ground.K, stol);
        row.regime = to_string(roots.regime);
        row.a_max = roots.a_max;
        if (!roots.roots.empty()) row.t1 = roots.roots.front();
        if (roots.roots.size() > 1) row.t2 = roots.roots[1];
        if (row.t1) {
            row.I = action_closed_form(ground.K, *row.t1, problem);
            if (level != VerifyLevel::None) {
                const auto u = scale_profile(ground, *row.t1);
                row.pohozaev_res = kirchhoff_pohozaev_residual(u, ground.model, problem);
                if (level == VerifyLevel::Full) row.pde_res = pde_residual(u, ground.model, problem);
            }
        }
    } catch (const std::exception&) {
        row.regime = "ERROR";
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Profile& ground, const RunConfig& cfg) {
    const auto as = spec.a.values();
    const auto bs = spec.b.values();
    std::vector<std::pair<double, double>> points;
    for (double a : as)
        for (double b : bs) points.emplace_back(a, b);

    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            rows[i] = evaluate_sweep_row(ground, points[i].first, points[i].second, spec.level, cfg);
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

std::string format_row(const SweepRow& row) {
    auto opt = [](const std::optional<double>& x) { return x ? io::format_double(*x) : std::string(); };
    std::ostringstream s;
    s << row.N << ',' << io::format_double(row.a) << ',' << io::format_double(row.b) << ','
      << io::format_double(row.K) << ',' << row.regime << ',' << opt(row.t1) << ',' << opt(row.t2) << ','
      << opt(row.a_max) << ',' << opt(row.I) << ',' << opt(row.pohozaev_res) << ',' << opt(row.pde_res);
    return s.str();
}

namespace {

struct ModelArgs {
    int N = 3;
    double m = 1;
    double p = 3;
    PowerModel model() const { return {m, p}; }
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    RunConfig cfg;
    ModelArgs model;
    std::string out_dir = ".";
};

json report_header(const Context& ctx, const std::string& command) {
    return {{"spec_version", io::kSchemaVersion},
            {"command", command},
            {"config", ctx.cfg.to_json()},
            {"model", io::to_json(ctx.model.model())}};
}

/// Maps library errors onto the documented exit codes.
int guarded(Context& ctx, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        ctx.err << "error: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::NoBracket:
            case ErrorCode::ShootingFailed:
            case ErrorCode::IntegrationBlowup: return kShootingFailure;
            case ErrorCode::InvalidModel:
            case ErrorCode::DimensionError:
            case ErrorCode::HypothesisError: return kHypothesisRejected;
            default: return kGateFailure;
        }
    } catch (const std::exception& e) {
        ctx.err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

Profile compute_state(const Context& ctx, int nodes) {
    const auto model = ctx.model.model();
    require_valid(model, ctx.model.N);
    return shoot_state(model, ctx.model.N, nodes, ctx.cfg.shooting());
}

void add_model_options(CLI::App* sub, ModelArgs& args) {
    sub->add_option("--N", args.N, "space dimension (>= 3)")->required()->envname("KIRCHHOFF_N");
    sub->add_option("--m", args.m, "linear decay rate m of g(s) = -m s + |s|^{p-1} s")
        ->capture_default_str()
        ->envname("KIRCHHOFF_M");
    sub->add_option("--p", args.p, "power p of g")->capture_default_str()->envname("KIRCHHOFF_P");
}

void add_config_options(CLI::App* sub, Context& ctx) {
    auto& c = ctx.cfg;
    sub->add_option("--tol", c.tol, "integrator local error tolerance")->capture_default_str()->envname("KIRCHHOFF_TOL");
    sub->add_option("--grid", c.grid, "uniform resampling intervals (even)")
        ->capture_default_str()
        ->envname("KIRCHHOFF_GRID");
    sub->add_option("--decay-threshold", c.decay_threshold, "decay test threshold relative to xi")
        ->capture_default_str()
        ->envname("KIRCHHOFF_DECAY_THRESHOLD");
    sub->add_option("--r-max", c.r_max, "integration horizon (0 selects 50/sqrt(m))")
        ->capture_default_str()
        ->envname("KIRCHHOFF_R_MAX");
    sub->add_option("--eps-eq", c.eps_eq, "relative band around a_max counted as a double root")
        ->capture_default_str()
        ->envname("KIRCHHOFF_EPS_EQ");
    sub->add_option("--pde-tol", c.gates.pde, "PDE residual gate")->capture_default_str()->envname("KIRCHHOFF_PDE_TOL");
    sub->add_option("--pohozaev-tol", c.gates.pohozaev_kirchhoff, "Kirchhoff Pohozaev residual gate")
        ->capture_default_str()
        ->envname("KIRCHHOFF_POHOZAEV_TOL");
    sub->add_option("--action-tol", c.gates.action_definition, "definition vs closed-form action gate")
        ->capture_default_str()
        ->envname("KIRCHHOFF_ACTION_TOL");
    sub->add_option("--seed", c.seed, "seed for randomized checks")->capture_default_str()->envname("KIRCHHOFF_SEED");
    sub->add_option("--out-dir", ctx.out_dir, "directory for artifacts")
        ->capture_default_str()
        ->envname("KIRCHHOFF_OUT_DIR");
}

void print_profile_summary(std::ostream& out, const Profile& profile) {
    out << "xi = " << io::format_double(profile.xi) << '\n'
        << "nodes = " << profile.nodes << '\n'
        << "K = " << io::format_double(profile.K) << '\n'
        << "GInt = " << io::format_double(profile.GInt) << '\n'
        << "pohozaev_residual = " << io::format_double(check_pohozaev_scalar(profile)) << '\n';
}

int cmd_ground_state(Context& ctx, int nodes, const std::string& stem) {
    return guarded(ctx, [&] {
        const auto profile = compute_state(ctx, nodes);
        json doc = report_header(ctx, "ground-state");
        doc.update(io::to_json(profile));
        const fs::path dir(ctx.out_dir);
        io::write_profile_csv(dir / (stem + ".csv"), profile);
        io::write_json(dir / (stem + ".json"), doc);
        print_profile_summary(ctx.out, profile);
        return kOk;
    });
}

std::vector<std::string> branch_names(Regime regime) {
    switch (regime) {
        case Regime::UniqueN3:
        case Regime::UniqueN4: return {"unique"};
        case Regime::DoubleRoot: return {"double"};
        case Regime::TwoRoots: return {"lower", "upper"};
        default: return {};
    }
}

int cmd_kirchhoff(Context& ctx, double a, double b, const std::string& branch, const std::string& stem,
                  bool export_profiles) {
    return guarded(ctx, [&] {
        const auto ground = compute_state(ctx, 0);
        const KirchhoffProblem<double> problem{ctx.model.N, a, b};
        problem.validate();
        ScalingTolerances<double> stol;
        stol.eps_eq = ctx.cfg.eps_eq;
        const auto existence = existence_report(problem, ground.K, stol);
        const auto roots = solve_scaling(problem, ground.K, stol);
        if (roots.roots.empty()) {
            json doc = report_header(ctx, "kirchhoff");
            doc["existence"] = io::to_json(existence);
            ctx.out << doc.dump(2) << '\n';
            ctx.err << existence.note << '\n';
            return kNoSolution;
        }

        const auto names = branch_names(roots.regime);
        bool all_pass = true;
        for (std::size_t i = 0; i < roots.roots.size(); ++i) {
            if (branch != "all" && names.size() > 1 && names[i] != branch) continue;
            const auto u = build_kirchhoff_solution(ground, roots.roots[i], problem);
            const auto rep = verify_solution(u, problem, ctx.cfg.gates);
            all_pass = all_pass && rep.passes();

            json doc = report_header(ctx, "kirchhoff");
            doc["branch"] = names[i];
            doc["problem"] = io::to_json(problem, ground.K, roots);
            doc["existence"] = io::to_json(existence);
            doc["ground_state"] = io::to_json(ground);
            doc.update(io::to_json(rep));
            const fs::path dir(ctx.out_dir);
            io::write_json(dir / (stem + "_" + names[i] + ".json"), doc);
            if (export_profiles) io::write_profile_csv(dir / (stem + "_" + names[i] + ".csv"), u);

            ctx.out << names[i] << ": t = " << io::format_double(rep.t) << ", I = " << io::format_double(rep.I_func)
                    << ", pohozaev = " << io::format_double(rep.pohozaev_residual_kirchhoff)
                    << ", pde = " << io::format_double(rep.pde_residual_sup) << ", "
                    << (rep.passes() ? "PASS" : "FAIL") << '\n';
        }
        return all_pass ? kOk : kGateFailure;
    });
}

int cmd_threshold(Context& ctx, std::optional<double> a, double b, const std::string& stem) {
    return guarded(ctx, [&] {
        const int N = ctx.model.N;
        const auto ground = compute_state(ctx, 0);
        const double K = ground.K;
        json doc = report_header(ctx, "threshold");
        doc["N"] = N;
        doc["b"] = b;
        doc["K"] = K;
        doc["bK"] = b * K;
        if (N == 3) {
            ctx.out << "N = 3: exists for all a,b > 0\n";
            doc["verdict"] = "exists for all a,b > 0";
        } else if (N == 4) {
            const bool exists = b * K < 1;
            ctx.out << "N = 4: bK = " << io::format_double(b * K) << " (threshold 1), b_critical = "
                    << io::format_double(1 / K) << '\n'
                    << (exists ? "exists for all a > 0" : "no solution for any a > 0") << '\n';
            doc["b_critical"] = 1 / K;
            doc["exists"] = exists;
            doc["verdict"] = exists ? "exists: bK < 1" : "no solution: bK >= 1";
        } else {
            const double a_max = threshold_a_max(N, b, K);
            const double t_star = std::pow((N - 4) * b * K / (2 * a_max), 1.0 / (N - 2));
            ctx.out << "N = " << N << ": a_max = " << io::format_double(a_max)
                    << ", t_star = " << io::format_double(t_star) << '\n';
            doc["a_max"] = a_max;
            doc["t_star"] = t_star;
            doc["verdict"] = "exists iff a <= a_max";
        }
        if (a) {
            const KirchhoffProblem<double> problem{N, *a, b};
            ScalingTolerances<double> stol;
            stol.eps_eq = ctx.cfg.eps_eq;
            const auto rep = existence_report(problem, K, stol);
            doc["a"] = *a;
            doc["existence"] = io::to_json(rep);
            ctx.out << "a = " << io::format_double(*a) << ": " << rep.note << '\n';
        }
        io::write_json(fs::path(ctx.out_dir) / (stem + ".json"), doc);
        return kOk;
    });
}

int cmd_sweep(Context& ctx, SweepSpec spec, const std::string& level) {
    return guarded(ctx, [&] {
        spec.a.validate("a");
        spec.b.validate("b");
        spec.N = ctx.model.N;
        spec.model = ctx.model.model();
        spec.level = level == "full" ? VerifyLevel::Full : level == "pohozaev" ? VerifyLevel::Pohozaev : VerifyLevel::None;
        const auto ground = compute_state(ctx, 0);
        const auto rows = run_sweep(spec, ground, ctx.cfg);

        std::ostringstream csv;
        csv << kSweepHeader << '\n';
        std::size_t failures = 0;
        for (const auto& row : rows) {
            csv << format_row(row) << '\n';
            if (row.regime == "ERROR") ++failures;
        }
        const fs::path path = fs::path(ctx.out_dir) / spec.output;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + path.string());
        f << csv.str();
        ctx.out << rows.size() << " rows written to " << path.string() << '\n';
        return !rows.empty() && failures == rows.size() ? kGateFailure : kOk;
    });
}

int cmd_verify(Context& ctx, double a, double b, int trials, const std::string& stem) {
    return guarded(ctx, [&] {
        const int N = ctx.model.N;
        const auto ground = compute_state(ctx, 0);
        const KirchhoffProblem<double> problem{N, a, b};
        problem.validate();
        ScalingTolerances<double> stol;
        stol.eps_eq = ctx.cfg.eps_eq;

        json doc = report_header(ctx, "verify");
        doc["problem"] = {{"N", N}, {"a", a}, {"b", b}};
        doc["ground_state"] = io::to_json(ground);
        json checks = json::array();
        bool all_pass = true;
        auto record = [&](const std::string& name, bool pass, json detail) {
            ctx.out << (pass ? "[PASS] " : "[FAIL] ") << name << '\n';
            checks.push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
            all_pass = all_pass && pass;
        };

        const double poh = check_pohozaev_scalar(ground);
        record("scalar pohozaev (ground state)", poh < 1e-6, {{"residual", poh}});

        const auto roots = solve_scaling(problem, ground.K, stol);
        const auto names = branch_names(roots.regime);
        for (std::size_t i = 0; i < roots.roots.size(); ++i) {
            const auto u = build_kirchhoff_solution(ground, roots.roots[i], problem);
            const auto rep = verify_solution(u, problem, ctx.cfg.gates);
            record("kirchhoff solution (" + names[i] + ")", rep.passes(), io::to_json(rep));
            const auto v = recover_scalar_field(u, problem);
            const double rt_poh = check_pohozaev_scalar(v);
            const double rt_pde = scalar_pde_residual(v);
            record("round trip (" + names[i] + ")", rt_poh < 1e-4 && rt_pde < 1e-4,
                   {{"pohozaev_residual", rt_poh}, {"pde_residual", rt_pde}});
        }

        if (N == 3 || N == 4) {
            const auto excited = compute_state(ctx, 1);
            if (N == 4 && !(b * excited.K < 1)) {
                ctx.out << "[SKIP] solution ordering: b*K1 >= 1 at N = 4\n";
            } else {
                const auto cmp = compare_solutions(problem, ground.K, excited.K);
                record("solution ordering (ground vs 1-node)", cmp.holds(), io::to_json(cmp));
            }
        } else {
            const auto nn = nonnegativity_sample(problem, ground.model, ground.K, trials, ctx.cfg.seed,
                                                 ctx.cfg.gates.nonnegativity);
            if (nn.above_threshold) {
                record("action nonnegative above a_max", nn.pass, io::to_json(nn));
            } else {
                ctx.out << "[SKIP] nonnegativity: a <= a_max (min sampled action "
                        << io::format_double(nn.min_action) << ")\n";
            }
        }

        doc["checks"] = checks;
        doc["pass"] = all_pass;
        io::write_json(fs::path(ctx.out_dir) / (stem + ".json"), doc);
        return all_pass ? kOk : kGateFailure;
    });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radial ground states and Kirchhoff-equation solutions by scaling"};
    app.require_subcommand(1);
    Context ctx{out, err, {}, {}, "."};

    int nodes = 0;
    std::string gs_stem = "profile";
    auto* gs = app.add_subcommand("ground-state", "shoot a radial solution of -Delta v = g(v)");
    add_model_options(gs, ctx.model);
    add_config_options(gs, ctx);
    gs->add_option("--nodes", nodes, "number of sign changes (0 = ground state)")->capture_default_str();
    gs->add_option("--stem", gs_stem, "artifact file stem")->capture_default_str();

    double a = 1, b = 1;
    std::string branch = "all";
    std::string k_stem = "kirchhoff";
    bool export_profiles = false;
    auto* kc = app.add_subcommand("kirchhoff", "build and verify Kirchhoff solutions u = v(t .)");
    add_model_options(kc, ctx.model);
    add_config_options(kc, ctx);
    kc->add_option("--a", a, "coefficient a > 0")->required()->envname("KIRCHHOFF_A");
    kc->add_option("--b", b, "coefficient b > 0")->required()->envname("KIRCHHOFF_B");
    kc->add_option("--branch", branch, "branch for two-root regimes")
        ->check(CLI::IsMember({"lower", "upper", "all"}))
        ->capture_default_str();
    kc->add_option("--stem", k_stem, "artifact file stem")->capture_default_str();
    kc->add_flag("--export-profiles", export_profiles, "also write scaled profiles as CSV");

    std::optional<double> th_a;
    double th_b = 1;
    std::string th_stem = "threshold";
    auto* th = app.add_subcommand("threshold", "existence threshold for the Kirchhoff problem");
    add_model_options(th, ctx.model);
    add_config_options(th, ctx);
    th->add_option("--b", th_b, "coefficient b > 0")->required()->envname("KIRCHHOFF_B");
    th->add_option("--a", th_a, "optional coefficient a to classify");
    th->add_option("--stem", th_stem, "artifact file stem")->capture_default_str();

    SweepSpec spec;
    spec.output = "sweep.csv";
    std::string a_scale = "linear", b_scale = "linear", level = "none";
    auto* sw = app.add_subcommand("sweep", "phase diagram over an (a, b) grid");
    add_model_options(sw, ctx.model);
    add_config_options(sw, ctx);
    sw->add_option("--a-lo", spec.a.lo)->required();
    sw->add_option("--a-hi", spec.a.hi)->required();
    sw->add_option("--a-steps", spec.a.steps)->capture_default_str();
    sw->add_option("--a-scale", a_scale)->check(CLI::IsMember({"linear", "log"}))->capture_default_str();
    sw->add_option("--b-lo", spec.b.lo)->required();
    sw->add_option("--b-hi", spec.b.hi)->required();
    sw->add_option("--b-steps", spec.b.steps)->capture_default_str();
    sw->add_option("--b-scale", b_scale)->check(CLI::IsMember({"linear", "log"}))->capture_default_str();
    sw->add_option("--output", spec.output, "CSV path, relative to --out-dir")->capture_default_str();
    sw->add_option("--verify", level, "verification level")
        ->check(CLI::IsMember({"none", "pohozaev", "full"}))
        ->capture_default_str();
    sw->add_option("--jobs", ctx.cfg.jobs, "worker threads")->capture_default_str()->envname("KIRCHHOFF_JOBS");

    double v_a = 1, v_b = 1;
    int trials = 500;
    std::string v_stem = "verify";
    auto* vf = app.add_subcommand("verify", "run the verification suite for one (a, b)");
    add_model_options(vf, ctx.model);
    add_config_options(vf, ctx);
    vf->add_option("--a", v_a, "coefficient a > 0")->required()->envname("KIRCHHOFF_A");
    vf->add_option("--b", v_b, "coefficient b > 0")->required()->envname("KIRCHHOFF_B");
    vf->add_option("--trials", trials, "random trial functions for the nonnegativity check")->capture_default_str();
    vf->add_option("--stem", v_stem, "artifact file stem")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (gs->parsed()) return cmd_ground_state(ctx, nodes, gs_stem);
    if (kc->parsed()) return cmd_kirchhoff(ctx, a, b, branch, k_stem, export_profiles);
    if (th->parsed()) return cmd_threshold(ctx, th_a, th_b, th_stem);
    if (sw->parsed()) {
        spec.a.log = a_scale == "log";
        spec.b.log = b_scale == "log";
        return cmd_sweep(ctx, spec, level);
    }
    if (vf->parsed()) return cmd_verify(ctx, v_a, v_b, trials, v_stem);
    return kUsage;
}

}  // namespace kirchhoff::cli
