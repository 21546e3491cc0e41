#include "degenflux/app.hpp"

#include "degenflux/error.hpp"
#include "degenflux/parallel.hpp"
#include "degenflux/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace degenflux::app {

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / name);
    if (!out) throw DomainError("cannot write " + (dir / name).string());
    return out;
}

std::string time_tag(double t) {
    std::ostringstream s;
    s << t;
    return s.str();
}

}  // namespace

int cmd_forward(const ExperimentConfig& config, std::ostream& log) {
    const ForwardModel model(config.problem);
    const std::size_t nx = config.forward.nx;
    const auto& times = config.forward.times;
    std::vector<ComponentPair> values(nx * times.size());
    parallel_for(values.size(), [&](std::size_t i) {
        const double x = static_cast<double>(i % nx) / static_cast<double>(nx - 1);
        values[i] = model.state(x, times[i / nx]);
    });

    auto out = open_output(config.output_dir, "forward.csv");
    out << "x,t,u,v\n" << std::setprecision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = static_cast<double>(i % nx) / static_cast<double>(nx - 1);
        out << x << ',' << times[i / nx] << ',' << values[i].u << ',' << values[i].v << '\n';
    }
    log << "wrote " << values.size() << " rows to " << (config.output_dir / "forward.csv").string() << '\n';
    return kExitOk;
}

int cmd_measure(const ExperimentConfig& config, std::ostream& log) {
    const auto times = config.times();
    const Measurement m =
        measure(config.problem, times, config.measurement.sides, config.measurement.noise_percent, config.measurement.seed);
    auto out = open_output(config.output_dir, "measurement.csv");
    write_csv(out, m);
    log << "wrote " << m.samples.size() << " samples to " << (config.output_dir / "measurement.csv").string() << '\n';
    return kExitOk;
}

int cmd_scan_stability(const ExperimentConfig& config, std::ostream& log) {
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    for (const double t : config.scan.times) {
        const ScanResult scan = stability_scan(config.problem, config.scan.tau, config.scan.gamma, t, config.scan.grid);
        auto csv = open_output(config.output_dir, "scan_t" + time_tag(t) + ".csv");
        write_scan_csv(csv, scan);
        const bool unstable = scan.vanishes(config.scan.threshold);
        summary.push_back({{"min", scan.min},
                           {"argmin", scan.argmin},
                           {"t", t},
                           {"theta", config.problem.exponent.theta()},
                           {"alpha", config.problem.alpha},
                           {"beta", config.problem.beta},
                           {"max", scan.max},
                           {"verdict", unstable ? "UNSTABLE" : "STABLE"}});
        log << "t=" << t << " min D=" << scan.min << " at a=" << scan.argmin << " max D=" << scan.max << " -> "
            << (unstable ? "UNSTABLE" : "STABLE") << '\n';
    }
    auto out = open_output(config.output_dir, "scan_summary.json");
    out << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_reconstruct(const ExperimentConfig& config, std::ostream& log) {
    if (config.inverse.init.empty()) throw DomainError("config: inverse.init is required for reconstruct");
    const ObjectiveSpec spec = objective_spec(config);
    const auto r = reconstruct(spec, config.inverse.box, config.inverse.init, config.inverse.options);
    auto json = open_output(config.output_dir, "result.json");
    write_result_json(json, spec.kind, r, true);
    auto trace = open_output(config.output_dir, "trace.csv");
    write_trace_csv(trace, r);

    log << std::setprecision(16) << "kind " << kind_name(spec.kind) << " params";
    for (double p : r.params) log << ' ' << p;
    log << std::setprecision(3) << " cost " << r.cost << " iterations " << r.iterations << " status "
        << status_name(r) << '\n';
    return kExitOk;
}

int cmd_noise_study(const ExperimentConfig& config, std::ostream& log) {
    if (config.inverse.init.empty()) throw DomainError("config: inverse.init is required for noise-study");
    const auto times = config.times();
    const auto rows = noise_study(config.inverse.kind, config.problem, times, config.inverse.box, config.inverse.init,
                                  config.noise.percents, config.noise.seeds, config.inverse.options);
    auto out = open_output(config.output_dir, "noise_study.csv");
    write_noise_csv(out, rows);
    for (const auto& row : rows)
        log << std::setprecision(6) << "noise " << row.percent << "% seed " << row.seed << " a_c "
            << std::setprecision(16) << row.a_c << '\n';
    return kExitOk;
}

namespace {

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

// Every zero inside its interlacing bounds and |J(j)| small.
Check zero_bounds(Fault fault) {
    double worst = 0.0;
    for (const double nu : {0.0, 0.25, 0.5, 1.0, 5.0 / 3.0, 3.0}) {
        auto table = bessel::cached_zeros(nu, 50);
        std::vector<double> z(table->zeros().begin(), table->zeros().end());
        if (fault == Fault::ZeroTable) z[9] += 0.5;
        for (std::size_t n = 1; n <= z.size(); ++n) {
            const double lo = bessel::ZeroTable::lower_bound(nu, n);
            const double hi = bessel::ZeroTable::upper_bound(nu, n);
            // At nu = 1/2 the bounds coincide at n pi; allow rounding.
            const double slack = 1e-12 * z[n - 1];
            if (z[n - 1] < lo - slack || z[n - 1] > hi + slack)
                return {"zero-bounds", false,
                        "nu=" + std::to_string(nu) + " n=" + std::to_string(n) + " outside [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]"};
            worst = std::max(worst, std::fabs(bessel::j(bessel::BesselOrder(nu), z[n - 1])));
        }
    }
    return {"zero-bounds", worst <= 1e-12, "max |J(j)| = " + sci(worst)};
}

Check orthonormality() {
    const auto rule = gauss_legendre(200);
    double worst = 0.0;
    for (const double theta : {1.0, 1.5, 1.9}) {
        const SpectralBasis b = build_basis(Side::Right, 0.4, theta, 5);
        const double k = b.exponent().k();
        for (std::size_t n = 0; n < 5; ++n) {
            for (std::size_t m = 0; m <= n; ++m) {
                // y = r^{1/k} turns y^{1-theta} dy into r dr / k.
                double sum = 0.0;
                for (std::size_t i = 0; i < rule.order(); ++i) {
                    const double r = 0.5 * (rule.nodes[i] + 1.0);
                    const double y = std::pow(r, 1.0 / k);
                    const double g = b.kernel(n, y) * b.kernel(m, y);
                    sum += 0.5 * rule.weights[i] * g * std::pow(r, 1.0 / k - 1.0) / k;
                }
                const double norm = 2.0 * k / (b.jprime()[n] * b.jprime()[m]);
                worst = std::max(worst, std::fabs(std::fabs(sum * norm) - (n == m ? 1.0 : 0.0)));
            }
        }
    }
    return {"orthonormality", worst <= 2e-6, "max deviation " + sci(worst)};
}

Check modal_identity() {
    const auto rule = gauss_legendre(kDefaultQuadratureOrder);
    double worst = 0.0;
    for (const double theta : {1.0, 1.3, 1.5}) {
        const SpectralBasis b = build_basis(Side::Right, 0.3, theta);
        const auto c = modal_coefficients(InitialData::constant(1.0, 0.0), b, rule);
        const double nu = b.exponent().nu();
        for (std::size_t n = 0; n < b.modes(); ++n) {
            const double expect = -std::pow(b.zero(n), nu + 1.0) * b.jprime()[n];
            worst = std::max(worst, std::fabs(c.u[n] / expect - 1.0));
        }
    }
    return {"modal-identity", worst <= 1e-8, "max relative error " + sci(worst)};
}

Check sensitivity() {
    ProblemConfig c;
    c.exponent = DegeneracyExponent(1.3);
    c.a = 0.4;
    c.alpha = 1.0;
    c.beta = 0.5;
    c.initial = InitialData::constant(0.0, 1.0);
    const double analytic = flux_sensitivity(c, 1.5);
    const double h = 1e-5;
    ProblemConfig lo = c;
    ProblemConfig hi = c;
    lo.a -= h;
    hi.a += h;
    const ComponentPair fl = flux(lo, Boundary::Right, 1.5);
    const ComponentPair fh = flux(hi, Boundary::Right, 1.5);
    const double fd = std::hypot(fh.u - fl.u, fh.v - fl.v) / (2.0 * h);
    const double rel = std::fabs(analytic / fd - 1.0);
    return {"flux-sensitivity", rel <= 1e-4, "relative gap " + sci(rel)};
}

Check point_reconstruction() {
    ProblemConfig c;
    c.exponent = DegeneracyExponent(1.5);
    c.a = 0.5;
    c.alpha = 1.0;
    c.beta = 1.0;
    c.initial = InitialData::constant(1.0, 1.0);
    const double t[] = {1.99};
    const ObjectiveSpec spec{ObjectiveKind::PointJ, measure(c, t, observed_sides(ObjectiveKind::PointJ), 0.0, 1), c};
    const double init[] = {0.1};
    const auto r = reconstruct(spec, default_box(ObjectiveKind::PointJ), init);
    const double err = std::fabs(r.params[0] - 0.5);
    return {"point-reconstruction", err <= 1e-6, "|a_c - 0.5| = " + sci(err)};
}

}  // namespace

int cmd_selftest(Fault fault, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Check> checks;
    for (auto fn : {+[](Fault f) { return zero_bounds(f); }, +[](Fault) { return orthonormality(); },
                    +[](Fault) { return modal_identity(); }, +[](Fault) { return sensitivity(); },
                    +[](Fault) { return point_reconstruction(); }}) {
        try {
            checks.push_back(fn(fault));
        } catch (const std::exception& e) {
            checks.push_back({"exception", false, e.what()});
        }
    }
    bool ok = true;
    for (const auto& c : checks) {
        log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.pass;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << (ok ? "selftest passed" : "selftest FAILED") << " in " << std::setprecision(3) << secs << " s\n";
    return ok ? kExitOk : kExitNumerical;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Degenerate diffusion toolkit: forward series, stability scans, degeneracy-point reconstruction"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool inject = false;
    std::vector<CLI::Option*> seed_options;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "experiment config (INI)");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        seed_options.push_back(sub->add_option("--seed", seed, "noise seed (overrides the config)"));
        sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    };
    auto* forward = cli.add_subcommand("forward", "write u(x,t), v(x,t) slices as CSV");
    auto* meas = cli.add_subcommand("measure", "write boundary-flux samples as CSV");
    auto* scan = cli.add_subcommand("scan-stability", "scan the flux sensitivity D(a,t) over [tau, gamma]");
    auto* recon = cli.add_subcommand("reconstruct", "recover a (and data) from boundary fluxes");
    auto* noise = cli.add_subcommand("noise-study", "reconstruct against noisy targets");
    auto* self = cli.add_subcommand("selftest", "run the built-in property checks");
    for (auto* sub : {forward, meas, scan, recon, noise}) add_common(sub, true);
    add_common(self, false);
    self->add_flag("--inject-fault", inject, "perturb a zero table (negative control)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    set_thread_count(threads);
    try {
        if (self->parsed()) return cmd_selftest(inject ? Fault::ZeroTable : Fault::None, out);

        ExperimentConfig config = load_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (std::any_of(seed_options.begin(), seed_options.end(), [](CLI::Option* o) { return o->count() > 0; })) {
            config.measurement.seed = seed;
            config.noise.seeds = {seed};
        }
        if (forward->parsed()) return cmd_forward(config, out);
        if (meas->parsed()) return cmd_measure(config, out);
        if (scan->parsed()) return cmd_scan_stability(config, out);
        if (recon->parsed()) return cmd_reconstruct(config, out);
        if (noise->parsed()) return cmd_noise_study(config, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace degenflux::app
