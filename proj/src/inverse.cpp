#include "degenflux/inverse.hpp"

#include "degenflux/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace degenflux {

std::string_view kind_name(ObjectiveKind kind) noexcept {
    switch (kind) {
        case ObjectiveKind::PointJ: return "J";
        case ObjectiveKind::DistributedI: return "I";
        case ObjectiveKind::DistributedG: return "G";
        case ObjectiveKind::TwoSidedH: return "H";
        case ObjectiveKind::OneSidedM: return "M";
        case ObjectiveKind::FixedLeftK: return "K";
    }
    return "?";
}

ObjectiveKind parse_kind(std::string_view name) {
    for (auto k : {ObjectiveKind::PointJ, ObjectiveKind::DistributedI, ObjectiveKind::DistributedG,
                   ObjectiveKind::TwoSidedH, ObjectiveKind::OneSidedM, ObjectiveKind::FixedLeftK})
        if (kind_name(k) == name) return k;
    throw DomainError("unknown objective kind '" + std::string(name) + "' (expected J, I, G, H, M or K)");
}

std::size_t parameter_count(ObjectiveKind kind) noexcept {
    switch (kind) {
        case ObjectiveKind::PointJ:
        case ObjectiveKind::DistributedI: return 1;
        case ObjectiveKind::FixedLeftK: return 2;
        default: return 3;
    }
}

std::vector<Boundary> observed_sides(ObjectiveKind kind) {
    if (kind == ObjectiveKind::TwoSidedH) return {Boundary::Left, Boundary::Right};
    return {Boundary::Right};
}

ProblemConfig apply_parameters(ObjectiveKind kind, const ProblemConfig& fixed, std::span<const double> params) {
    if (params.size() != parameter_count(kind)) throw DomainError("parameter vector has the wrong length");
    ProblemConfig c = fixed;
    c.a = params[0];
    const ComponentPair left = fixed.initial.value(Side::Left, 0.0);
    const ComponentPair right = fixed.initial.value(Side::Right, 1.0);
    switch (kind) {
        case ObjectiveKind::PointJ:
        case ObjectiveKind::DistributedI: break;
        case ObjectiveKind::DistributedG: c.initial = InitialData::constant(params[1], params[2]); break;
        case ObjectiveKind::TwoSidedH:
        case ObjectiveKind::OneSidedM:
            c.initial = InitialData::piecewise(params[1], params[2], left.v, right.v);
            break;
        case ObjectiveKind::FixedLeftK: c.initial = InitialData::piecewise(left.u, params[1], left.v, right.v); break;
    }
    return c;
}

std::vector<double> extract_parameters(ObjectiveKind kind, const ProblemConfig& config) {
    const ComponentPair left = config.initial.value(Side::Left, 0.0);
    const ComponentPair right = config.initial.value(Side::Right, 1.0);
    switch (kind) {
        case ObjectiveKind::PointJ:
        case ObjectiveKind::DistributedI: return {config.a};
        case ObjectiveKind::DistributedG: return {config.a, right.u, right.v};
        case ObjectiveKind::TwoSidedH:
        case ObjectiveKind::OneSidedM: return {config.a, left.u, right.u};
        case ObjectiveKind::FixedLeftK: return {config.a, right.u};
    }
    return {};
}

namespace {

std::vector<double> trapezoid_weights(const std::vector<FluxSample>& s) {
    std::vector<double> w(s.size(), 0.0);
    if (s.size() == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double h = 0.5 * (s[i + 1].t - s[i].t);
        w[i] += h;
        w[i + 1] += h;
    }
    return w;
}

}  // namespace

double objective_eval(const ObjectiveSpec& spec, std::span<const double> params) {
    const ForwardModel model(apply_parameters(spec.kind, spec.fixed, params));
    const bool both = spec.kind != ObjectiveKind::DistributedI;
    double total = 0.0;
    for (const Boundary side : observed_sides(spec.kind)) {
        const auto samples = spec.target.on(side);
        if (samples.empty()) throw DomainError("target has no samples on a side the objective observes");
        const auto w = spec.kind == ObjectiveKind::PointJ ? std::vector<double>(samples.size(), 1.0)
                                                          : trapezoid_weights(samples);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const ComponentPair f = model.flux(side, samples[i].t);
            const double eu = samples[i].du - f.u;
            const double ev = both ? samples[i].dv - f.v : 0.0;
            total += w[i] * (eu * eu + ev * ev);
        }
    }
    return 0.5 * total;
}

void AdmissibleBox::validate(std::size_t dimension) const {
    if (lower.size() != dimension || upper.size() != dimension) throw DomainError("box dimension mismatch");
    for (std::size_t i = 0; i < dimension; ++i)
        if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw DomainError("box bounds must be finite with lower < upper");
    if (!(lower[0] > 0.0 && upper[0] < 1.0)) throw DomainError("box bounds for a must lie strictly inside (0, 1)");
}

bool AdmissibleBox::contains(std::span<const double> x) const {
    if (x.size() != lower.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    return true;
}

AdmissibleBox default_box(ObjectiveKind kind, double margin, double data_lo, double data_hi) {
    const std::size_t n = parameter_count(kind);
    AdmissibleBox box{std::vector<double>(n, data_lo), std::vector<double>(n, data_hi)};
    box.lower[0] = margin;
    box.upper[0] = 1.0 - margin;
    box.validate(n);
    return box;
}

std::string status_name(const ReconstructionResult& r) {
    switch (r.status) {
        case Status::Converged: return "Converged";
        case Status::IterationCap: return "IterationCap";
        case Status::FlatDirection: {
            std::ostringstream s;
            s << "FlatDirection(";
            for (std::size_t i = 0; i < r.flat.size(); ++i) s << (i ? "," : "") << r.flat[i];
            s << ')';
            return s.str();
        }
    }
    return "?";
}

namespace {

using Point = std::vector<double>;

class Search {
public:
    Search(const ObjectiveSpec& spec, const AdmissibleBox& box) : spec_(spec), box_(box) {}

    Point clamp(Point x) const {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box_.lower[i], box_.upper[i]);
        return x;
    }

    // Failing evaluations count as +inf so the optimizer steers away.
    double operator()(const Point& x) {
        ++evaluations;
        double f;
        try {
            f = objective_eval(spec_, x);
        } catch (const NumericalError&) {
            f = std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
        offer(x, f);
        return f;
    }

    // Lower cost wins; exact ties go to the smaller a.
    static bool better(double fa, const Point& a, double fb, const Point& b) {
        return fa < fb || (fa == fb && a[0] < b[0]);
    }

    void offer(const Point& x, double f) {
        if (best.empty() || better(f, x, best_cost, best)) {
            best = x;
            best_cost = f;
        }
    }

    void record(std::size_t iteration) {
        if (trace.empty() || best_cost < trace.back().cost) trace.push_back({iteration, best, best_cost});
    }

    const AdmissibleBox& box() const { return box_; }

    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    Point best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> trace;

private:
    const ObjectiveSpec& spec_;
    const AdmissibleBox& box_;
};

double spread(const std::vector<Point>& simplex) {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        for (std::size_t j = 0; j < simplex[0].size(); ++j) d = std::max(d, std::fabs(simplex[i][j] - simplex[0][j]));
    return d;
}

// One bounded Nelder-Mead run; points are clamped into the box. Returns true
// when the simplex collapsed below xtol before the budget ran out.
bool nelder_mead(Search& s, const Point& start, double step_fraction, const ReconstructOptions& o) {
    const std::size_t n = start.size();
    const std::size_t budget = s.evaluations + o.max_evaluations;
    std::vector<Point> x(n + 1, start);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = step_fraction * s.box().width(i);
        x[i + 1][i] += start[i] + h <= s.box().upper[i] ? h : -h;
        x[i + 1] = s.clamp(x[i + 1]);
    }
    for (std::size_t i = 0; i <= n; ++i) f[i] = s(x[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t p, std::size_t q) { return Search::better(f[p], x[p], f[q], x[q]); });
        std::vector<Point> xs(n + 1);
        std::vector<double> fs(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            xs[i] = x[order[i]];
            fs[i] = f[order[i]];
        }
        x.swap(xs);
        f.swap(fs);
    };

    auto along = [&](const Point& c, const Point& from, double coef) {
        Point p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + coef * (from[j] - c[j]);
        return s.clamp(p);
    };

    while (true) {
        sort();
        s.record(s.iterations);
        if (spread(x) <= o.xtol) return true;
        if (s.evaluations >= budget) return false;
        ++s.iterations;

        Point c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c[j] += x[i][j] / static_cast<double>(n);

        const Point xr = along(c, x[n], -1.0);
        const double fr = s(xr);
        if (fr < f[0]) {
            const Point xe = along(c, x[n], -2.0);
            const double fe = s(xe);
            if (fe < fr) {
                x[n] = xe;
                f[n] = fe;
            } else {
                x[n] = xr;
                f[n] = fr;
            }
            continue;
        }
        if (fr < f[n - 1]) {
            x[n] = xr;
            f[n] = fr;
            continue;
        }
        const bool outside = fr < f[n];
        const Point xc = outside ? along(c, xr, 0.5) : along(c, x[n], 0.5);
        const double fc = s(xc);
        if (outside ? fc <= fr : fc < f[n]) {
            x[n] = xc;
            f[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            x[i] = along(x[0], x[i], 0.5);
            f[i] = s(x[i]);
        }
    }
}

// Central differences with the stencil shifted inside the box at the bounds.
Point gradient(Search& s, const Point& x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-7 * s.box().width(i);
        double lo = x[i] - h;
        double hi = x[i] + h;
        if (lo < s.box().lower[i]) {
            lo = s.box().lower[i];
            hi = lo + 2.0 * h;
        } else if (hi > s.box().upper[i]) {
            hi = s.box().upper[i];
            lo = hi - 2.0 * h;
        }
        Point a = x;
        Point b = x;
        a[i] = lo;
        b[i] = hi;
        g[i] = (s(b) - s(a)) / (hi - lo);
    }
    return g;
}

// Projected quasi-Newton: BFGS on the free coordinates, Armijo backtracking
// along the projected path.
bool projected_bfgs(Search& s, const Point& start, const ReconstructOptions& o) {
    const std::size_t n = start.size();
    const std::size_t budget = s.evaluations + o.max_evaluations;
    Point x = start;
    double fx = s(x);
    Point g = gradient(s, x);
    std::vector<double> hmat(n * n, 0.0);
    auto reset = [&] {
        std::fill(hmat.begin(), hmat.end(), 0.0);
        double gmax = 0.0;
        for (double gi : g) gmax = std::max(gmax, std::fabs(gi));
        for (std::size_t i = 0; i < n; ++i)
            hmat[i * n + i] = gmax > 0.0 ? 0.1 * s.box().width(i) / gmax : 1.0;
    };
    reset();

    while (true) {
        s.record(s.iterations);
        if (s.evaluations >= budget) return false;
        ++s.iterations;

        std::vector<bool> active(n, false);
        for (std::size_t i = 0; i < n; ++i)
            active[i] = (x[i] <= s.box().lower[i] && g[i] > 0.0) || (x[i] >= s.box().upper[i] && g[i] < 0.0);

        Point d(n, 0.0);
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (!active[j]) d[i] -= hmat[i * n + j] * g[j];
            slope += d[i] * g[i];
        }
        if (slope == 0.0) return true;
        if (slope > 0.0) {
            reset();
            continue;
        }

        double step = 1.0;
        Point xn;
        double fn = fx;
        bool accepted = false;
        for (int k = 0; k < 40 && s.evaluations < budget; ++k, step *= 0.5) {
            Point trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * d[i];
            trial = s.clamp(trial);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (trial[i] - x[i]);
            fn = s(trial);
            if (fn <= fx + 1e-4 * decrease) {
                xn = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) return true;  // no descent left at gradient resolution

        double moved = 0.0;
        Point sv(n);
        for (std::size_t i = 0; i < n; ++i) {
            sv[i] = xn[i] - x[i];
            moved = std::max(moved, std::fabs(sv[i]));
        }
        const Point gn = gradient(s, xn);
        Point yv(n);
        for (std::size_t i = 0; i < n; ++i) yv[i] = gn[i] - g[i];
        x = std::move(xn);
        fx = fn;
        g = gn;
        if (moved <= o.xtol) return true;

        const double sy = std::inner_product(sv.begin(), sv.end(), yv.begin(), 0.0);
        if (sy <= 1e-300) {
            reset();
            continue;
        }
        // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
        const double rho = 1.0 / sy;
        Point hy(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) hy[i] += hmat[i * n + j] * yv[j];
        const double yhy = std::inner_product(yv.begin(), yv.end(), hy.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                hmat[i * n + j] += -rho * (hy[i] * sv[j] + sv[i] * hy[j]) + (rho * rho * yhy + rho) * sv[i] * sv[j];
    }
}

// Second difference of the cost along each coordinate; the half-width of the
// quadratic's confidence region is sqrt(2 max(cost, 1e-12) / curvature).
void classify_flat(Search& s, ReconstructionResult& r, double fraction) {
    const std::size_t n = r.params.size();
    const double level = std::max(r.cost, 1e-12);
    r.half_width.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const double h = 1e-3 * s.box().width(i);
        double centre = std::clamp(r.params[i], s.box().lower[i] + h, s.box().upper[i] - h);
        Point lo = r.params;
        Point mid = r.params;
        Point hi = r.params;
        lo[i] = centre - h;
        mid[i] = centre;
        hi[i] = centre + h;
        const double curvature = (s(hi) - 2.0 * s(mid) + s(lo)) / (h * h);
        if (curvature > 0.0) r.half_width[i] = std::sqrt(2.0 * level / curvature);
        if (!(r.half_width[i] <= fraction * s.box().width(i))) r.flat.push_back(i);
    }
}

}  // namespace

ReconstructionResult reconstruct(const ObjectiveSpec& spec, const AdmissibleBox& box, std::span<const double> init,
                                 const ReconstructOptions& options) {
    const std::size_t n = parameter_count(spec.kind);
    box.validate(n);
    if (init.size() != n) throw DomainError("initial guess has the wrong length");
    if (!box.contains(init)) throw DomainError("initial guess lies outside the admissible box");
    if (options.max_evaluations == 0 || options.restarts < 0) throw DomainError("invalid optimizer options");

    Search s(spec, box);
    const Point start(init.begin(), init.end());
    bool converged = false;
    for (int run = 0; run <= options.restarts; ++run) {
        const Point from = run == 0 ? start : s.best;
        const double fraction = run == 0 ? 0.1 : 0.01;
        converged = options.optimizer == Optimizer::NelderMead ? nelder_mead(s, from, fraction, options)
                                                               : projected_bfgs(s, from, options);
    }

    ReconstructionResult r;
    r.params = s.best;
    r.cost = s.best_cost;
    r.iterations = s.iterations;
    r.trace = s.trace;
    r.status = converged ? Status::Converged : Status::IterationCap;
    classify_flat(s, r, options.flat_fraction);
    if (!r.flat.empty()) r.status = Status::FlatDirection;
    // the probes above may have found a marginally lower cost
    r.params = s.best;
    r.cost = s.best_cost;
    r.evaluations = s.evaluations;
    return r;
}

void write_result_json(std::ostream& out, ObjectiveKind kind, const ReconstructionResult& r, bool with_trace) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(kind_name(kind));
    j["params"] = r.params;
    j["cost"] = r.cost;
    j["iterations"] = r.iterations;
    j["evaluations"] = r.evaluations;
    j["status"] = status_name(r);
    j["flat"] = r.flat;
    if (with_trace) {
        auto& t = j["trace"] = nlohmann::ordered_json::array();
        for (const auto& e : r.trace) t.push_back({{"iteration", e.iteration}, {"params", e.params}, {"cost", e.cost}});
    }
    out << j.dump(2) << '\n';
}

void write_trace_csv(std::ostream& out, const ReconstructionResult& r) {
    out << "iteration,cost";
    for (std::size_t i = 0; i < r.params.size(); ++i) out << ",p" << i;
    out << '\n' << std::setprecision(17);
    for (const auto& e : r.trace) {
        out << e.iteration << ',' << e.cost;
        for (double p : e.params) out << ',' << p;
        out << '\n';
    }
}

std::vector<NoiseRow> noise_study(ObjectiveKind kind, const ProblemConfig& truth, std::span<const double> times,
                                  const AdmissibleBox& box, std::span<const double> init,
                                  std::span<const double> percents, std::span<const std::uint64_t> seeds,
                                  const ReconstructOptions& options) {
    if (seeds.empty()) throw DomainError("noise study needs at least one seed");
    const auto sides = observed_sides(kind);
    std::vector<NoiseRow> rows;
    for (const double p : percents) {
        for (const std::uint64_t seed : seeds) {
            ObjectiveSpec spec{kind, measure(truth, times, sides, p, seed), truth};
            const auto r = reconstruct(spec, box, init, options);
            rows.push_back({p, seed, r.cost, r.iterations, r.params[0]});
        }
    }
    return rows;
}

void write_noise_csv(std::ostream& out, std::span<const NoiseRow> rows) {
    bool many = false;
    for (const auto& r : rows) many = many || r.seed != rows.front().seed;
    out << "percent,cost,iterations,a_c" << (many ? ",seed" : "") << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.percent << ',' << r.cost << ',' << r.iterations << ',' << r.a_c;
        if (many) out << ',' << r.seed;
        out << '\n';
    }
}

}  // namespace degenflux
