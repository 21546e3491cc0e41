#include "degenflux/app.hpp"

#include "degenflux/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace degenflux::app {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"problem", {"theta", "a", "alpha", "beta"}},
        {"initial", {"kind", "u", "v", "u_left", "u_right", "v_left", "v_right", "file"}},
        {"series", {"modes", "tol", "quadrature"}},
        {"measurement", {"sides", "t_star", "t1", "t2", "samples", "noise_percent", "seed", "target"}},
        {"inverse",
         {"kind", "init", "lower", "upper", "margin", "optimizer", "restarts", "max_evaluations", "xtol"}},
        {"scan", {"tau", "gamma", "times", "grid", "threshold"}},
        {"forward", {"nx", "times"}},
        {"noise", {"percents", "seeds"}},
        {"output", {"dir"}},
    };
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw DomainError("config: " + key + ": " + why);
}

double to_double(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
        bad(key, "expected a number, got '" + t + "'");
    return v;
}

std::uint64_t to_unsigned(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        bad(key, "expected a nonnegative integer, got '" + t + "'");
    return v;
}

std::vector<std::string> split(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(trim(text.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split(text)) out.push_back(to_double(key, item));
    return out;
}

// Lookup helper over one parsed section.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    std::optional<std::string> raw(const std::string& key) const {
        if (!tree_) return std::nullopt;
        const auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }
    std::string full(const std::string& key) const { return name_ + "." + key; }

    double number(const std::string& key, double fallback) const {
        const auto v = raw(key);
        return v ? to_double(full(key), *v) : fallback;
    }
    std::optional<double> maybe_number(const std::string& key) const {
        const auto v = raw(key);
        if (!v) return std::nullopt;
        return to_double(full(key), *v);
    }
    std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        const auto v = raw(key);
        return v ? to_unsigned(full(key), *v) : fallback;
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        const auto v = raw(key);
        return v ? to_doubles(full(key), *v) : fallback;
    }
    std::string text(const std::string& key, std::string fallback) const { return raw(key).value_or(fallback); }

private:
    const pt::ptree* tree_;
    std::string name_;
};

InitialData read_tabulated(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: initial.file: cannot open " + path.string());
    std::vector<double> x, u, v;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line);
        if (cols.size() != 3) throw DomainError("initial data file: row " + std::to_string(row) + " needs x,u,v");
        if (row == 1 && cols[0] == "x") continue;
        const std::string key = "initial data file row " + std::to_string(row);
        x.push_back(to_double(key, cols[0]));
        u.push_back(to_double(key, cols[1]));
        v.push_back(to_double(key, cols[2]));
    }
    return InitialData::tabulated(std::move(x), std::move(u), std::move(v));
}

std::vector<Boundary> read_sides(const std::string& key, const std::string& text) {
    std::vector<Boundary> out;
    for (const auto& s : split(text)) {
        Boundary b;
        if (s == "0") {
            b = Boundary::Left;
        } else if (s == "1") {
            b = Boundary::Right;
        } else {
            bad(key, "sides are 0 and/or 1, got '" + s + "'");
        }
        if (std::find(out.begin(), out.end(), b) != out.end()) bad(key, "side listed twice");
        out.push_back(b);
    }
    return out;
}

}  // namespace

std::vector<double> ExperimentConfig::times() const {
    if (measurement.t_star) return {*measurement.t_star};
    return sample_times(measurement.t1, measurement.t2, measurement.samples);
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw DomainError(std::string("config: ") + e.what());
    }

    for (const auto& [name, section] : tree) {
        const auto it = schema().find(name);
        if (it == schema().end()) throw DomainError("config: unknown section [" + name + "]");
        if (section.empty() && !section.data().empty())
            throw DomainError("config: key '" + name + "' outside any section");
        for (const auto& [key, value] : section)
            if (!it->second.count(key)) throw DomainError("config: unknown key " + name + "." + key);
    }
    auto section = [&](const std::string& name) {
        const auto child = tree.get_child_optional(name);
        return Section(child ? &*child : nullptr, name);
    };
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    ExperimentConfig c;

    const Section problem = section("problem");
    const double theta = problem.number("theta", 1.5);
    if (!(theta >= 1.0 && theta < 2.0)) bad("problem.theta", "must lie in [1, 2)");
    c.problem.exponent = DegeneracyExponent(theta);
    c.problem.a = problem.number("a", 0.5);
    c.problem.alpha = problem.number("alpha", 0.0);
    c.problem.beta = problem.number("beta", 0.0);
    if (!(c.problem.a > 0.0 && c.problem.a < 1.0)) bad("problem.a", "must lie in (0, 1)");

    const Section initial = section("initial");
    const std::string kind = initial.text("kind", "constant");
    if (kind == "constant") {
        c.problem.initial = InitialData::constant(initial.number("u", 0.0), initial.number("v", 0.0));
    } else if (kind == "piecewise") {
        c.problem.initial = InitialData::piecewise(initial.number("u_left", 0.0), initial.number("u_right", 0.0),
                                                   initial.number("v_left", 0.0), initial.number("v_right", 0.0));
    } else if (kind == "tabulated") {
        const auto file = initial.raw("file");
        if (!file) bad("initial.file", "required for tabulated data");
        c.problem.initial = read_tabulated(resolve(*file));
    } else {
        bad("initial.kind", "expected constant, piecewise or tabulated");
    }

    const Section series = section("series");
    c.problem.modes = series.count("modes", kDefaultModes);
    c.problem.series_tol = series.number("tol", c.problem.series_tol);
    c.problem.quadrature_order = series.count("quadrature", kDefaultQuadratureOrder);
    if (c.problem.modes < 1 || c.problem.modes > 400) bad("series.modes", "must lie in [1, 400]");
    if (!(c.problem.series_tol > 0.0)) bad("series.tol", "must be > 0");
    if (c.problem.quadrature_order < 1 || c.problem.quadrature_order > kMaxQuadratureOrder)
        bad("series.quadrature", "must lie in [1, 512]");

    const Section meas = section("measurement");
    if (const auto s = meas.raw("sides")) c.measurement.sides = read_sides("measurement.sides", *s);
    c.measurement.t_star = meas.maybe_number("t_star");
    c.measurement.t1 = meas.number("t1", c.measurement.t1);
    c.measurement.t2 = meas.number("t2", c.measurement.t2);
    c.measurement.samples = meas.count("samples", c.measurement.samples);
    c.measurement.noise_percent = meas.number("noise_percent", 0.0);
    c.measurement.seed = meas.count("seed", c.measurement.seed);
    if (const auto t = meas.raw("target")) c.measurement.target = resolve(*t);
    if (c.measurement.t_star && !(*c.measurement.t_star >= kMinTime)) bad("measurement.t_star", "must be >= 1e-3");
    if (!(c.measurement.t2 > c.measurement.t1) || c.measurement.t1 < 0.0)
        bad("measurement.t2", "need 0 <= t1 < t2");
    if (c.measurement.samples < 2) bad("measurement.samples", "must be >= 2");
    if (!(c.measurement.noise_percent >= 0.0)) bad("measurement.noise_percent", "must be >= 0");

    const Section inv = section("inverse");
    c.inverse.kind = parse_kind(inv.text("kind", "J"));
    const std::size_t n = parameter_count(c.inverse.kind);
    c.inverse.init = inv.numbers("init", {});
    if (!c.inverse.init.empty() && c.inverse.init.size() != n)
        bad("inverse.init", "expects " + std::to_string(n) + " values for kind " + std::string(kind_name(c.inverse.kind)));
    const double margin = inv.number("margin", kBoxMargin);
    if (!(margin > 0.0 && margin < 0.5)) bad("inverse.margin", "must lie in (0, 0.5)");
    c.inverse.box = default_box(c.inverse.kind, margin);
    if (const auto lo = inv.raw("lower")) c.inverse.box.lower = to_doubles("inverse.lower", *lo);
    if (const auto hi = inv.raw("upper")) c.inverse.box.upper = to_doubles("inverse.upper", *hi);
    try {
        c.inverse.box.validate(n);
    } catch (const DomainError& e) {
        bad("inverse.lower/upper", e.what());
    }
    const std::string opt = inv.text("optimizer", "nelder-mead");
    if (opt == "nelder-mead") {
        c.inverse.options.optimizer = Optimizer::NelderMead;
    } else if (opt == "bfgs") {
        c.inverse.options.optimizer = Optimizer::ProjectedBfgs;
    } else {
        bad("inverse.optimizer", "expected nelder-mead or bfgs");
    }
    c.inverse.options.restarts = static_cast<int>(inv.count("restarts", 3));
    c.inverse.options.max_evaluations = inv.count("max_evaluations", 400);
    c.inverse.options.xtol = inv.number("xtol", 1e-12);
    if (c.inverse.options.max_evaluations < 1) bad("inverse.max_evaluations", "must be >= 1");
    if (!(c.inverse.options.xtol > 0.0)) bad("inverse.xtol", "must be > 0");
    if (!c.inverse.init.empty() && !c.inverse.box.contains(c.inverse.init))
        bad("inverse.init", "lies outside the admissible box");

    const Section scan = section("scan");
    c.scan.tau = scan.number("tau", c.scan.tau);
    c.scan.gamma = scan.number("gamma", c.scan.gamma);
    c.scan.times = scan.numbers("times", c.scan.times);
    c.scan.grid = scan.count("grid", c.scan.grid);
    c.scan.threshold = scan.number("threshold", c.scan.threshold);
    if (!(c.scan.tau > 0.0 && c.scan.tau < c.scan.gamma && c.scan.gamma < 1.0))
        bad("scan.tau", "need 0 < tau < gamma < 1");
    if (c.scan.grid < 2) bad("scan.grid", "must be >= 2");
    for (double t : c.scan.times)
        if (!(t >= kMinTime)) bad("scan.times", "every time must be >= 1e-3");

    const Section fwd = section("forward");
    c.forward.nx = fwd.count("nx", c.forward.nx);
    c.forward.times = fwd.numbers("times", c.forward.times);
    if (c.forward.nx < 2) bad("forward.nx", "must be >= 2");
    for (double t : c.forward.times)
        if (!(t >= kMinTime)) bad("forward.times", "every time must be >= 1e-3");

    const Section noise = section("noise");
    c.noise.percents = noise.numbers("percents", c.noise.percents);
    if (const auto s = noise.raw("seeds")) {
        c.noise.seeds.clear();
        for (const auto& item : split(*s)) c.noise.seeds.push_back(to_unsigned("noise.seeds", item));
    }
    for (double p : c.noise.percents)
        if (!(p >= 0.0)) bad("noise.percents", "must be >= 0");
    if (c.noise.seeds.empty()) bad("noise.seeds", "needs at least one seed");

    c.output_dir = section("output").text("dir", ".");  // relative to the working directory
    c.problem.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config " + path.string());
    return parse_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

Measurement read_measurement(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open measurement " + path.string());
    Measurement m;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        if (row == 1) {
            if (line != "t,side,du,dv") throw DomainError("measurement: header must be t,side,du,dv");
            continue;
        }
        const auto cols = split(line);
        const std::string key = "measurement row " + std::to_string(row);
        if (cols.size() != 4) throw DomainError(key + ": expected 4 columns");
        const auto side = read_sides(key, cols[1]);
        m.samples.push_back({to_double(key, cols[0]), side.front(), to_double(key, cols[2]), to_double(key, cols[3])});
    }
    for (const Boundary side : {Boundary::Left, Boundary::Right}) {
        const auto s = m.on(side);
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i].t > s[i - 1].t)) throw DomainError("measurement: times must increase within each side");
    }
    return m;
}

ObjectiveSpec objective_spec(const ExperimentConfig& config) {
    ObjectiveSpec spec;
    spec.kind = config.inverse.kind;
    spec.fixed = config.problem;
    if (config.measurement.target) {
        spec.target = read_measurement(*config.measurement.target);
    } else {
        const auto times = config.times();
        const auto sides = observed_sides(spec.kind);
        spec.target = measure(config.problem, times, sides, config.measurement.noise_percent, config.measurement.seed);
    }
    return spec;
}

}  // namespace degenflux::app
