#include "degenflux/forward.hpp"

#include "degenflux/error.hpp"
#include "degenflux/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace degenflux {

void ProblemConfig::validate() const {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("degeneracy point a must lie in (0, 1)");
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw DomainError("alpha and beta must be finite");
    if (modes == 0) throw DomainError("modes must be >= 1");
    if (!(series_tol > 0.0)) throw DomainError("series tolerance must be > 0");
    if (quadrature_order == 0 || quadrature_order > kMaxQuadratureOrder)
        throw DomainError("quadrature order must be in [1, 512]");
}

const char* boundary_label(Boundary b) noexcept { return b == Boundary::Left ? "0" : "1"; }

Matrix2 rotation(double beta, double t) {
    const double c = std::cos(beta * t);
    const double s = std::sin(beta * t);
    return {c, -s, s, c};
}

std::vector<FluxSample> Measurement::on(Boundary side) const {
    std::vector<FluxSample> out;
    for (const auto& s : samples)
        if (s.side == side) out.push_back(s);
    return out;
}

namespace {

// Stops after `kQuietTerms` consecutive terms below tol * |partial|.
constexpr int kQuietTerms = 3;

class SeriesSum {
public:
    explicit SeriesSum(double tol) : tol_(tol) {}

    // Returns false once the truncation criterion is met.
    bool add(double du, double dv) {
        u_ += du;
        v_ += dv;
        const double term = std::hypot(du, dv);
        quiet_ = term <= tol_ * std::hypot(u_, v_) ? quiet_ + 1 : 0;
        return quiet_ < kQuietTerms;
    }

    ComponentPair value() const noexcept { return {u_, v_}; }

private:
    double tol_;
    double u_ = 0.0;
    double v_ = 0.0;
    int quiet_ = 0;
};

SpectralBasis make_basis(Side side, const ProblemConfig& c) {
    return SpectralBasis(side, c.a, c.exponent, bessel::cached_zeros(c.exponent.nu(), c.modes));
}

std::shared_ptr<const QuadratureRule> cached_rule(std::size_t order) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot) slot = std::make_shared<const QuadratureRule>(gauss_legendre(order));
    return slot;
}

}  // namespace

ForwardModel::ForwardModel(ProblemConfig config)
    : config_((config.validate(), std::move(config))),
      left_(make_basis(Side::Left, config_)),
      right_(make_basis(Side::Right, config_)) {
    const auto rule = cached_rule(config_.quadrature_order);
    left_coeffs_ = modal_coefficients(config_.initial, left_, *rule);
    right_coeffs_ = modal_coefficients(config_.initial, right_, *rule);
    left_derivs_ = modal_coefficient_derivatives(config_.initial, left_, *rule);
    right_derivs_ = modal_coefficient_derivatives(config_.initial, right_, *rule);
}

void ForwardModel::require_time(double t) const {
    if (!(t >= kMinTime)) {
        std::ostringstream msg;
        msg << "time " << t << " is below t_min = " << kMinTime;
        throw DomainError(msg.str());
    }
}

ComponentPair ForwardModel::state(double x, double t) const {
    require_time(t);
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("state: x must lie in [0, 1]");
    const Side side = x < config_.a ? Side::Left : Side::Right;
    const SpectralBasis& b = basis(side);
    const ModalCoefficients& c = coefficients(side);
    const double y = b.mapped(x);

    SeriesSum sum(config_.series_tol);
    const auto lambda = b.eigenvalues();
    const auto h = b.h_consts();
    for (std::size_t n = 0; n < b.modes(); ++n) {
        const double w = 2.0 / h[n] * std::exp(-lambda[n] * t) * b.kernel(n, y);
        if (!sum.add(w * c.u[n], w * c.v[n])) break;
    }
    const ComponentPair p = rotation(config_.beta, t).apply(sum.value());
    const double growth = std::exp(config_.alpha * t);
    return {growth * p.u, growth * p.v};
}

ComponentPair ForwardModel::flux(Boundary side, double t) const {
    require_time(t);
    const Side s = side == Boundary::Left ? Side::Left : Side::Right;
    const SpectralBasis& b = basis(s);
    const ModalCoefficients& c = coefficients(s);
    const double sign = side == Boundary::Left ? -1.0 : 1.0;
    const double scale = sign * 2.0 * config_.exponent.k() / b.length();

    SeriesSum sum(config_.series_tol);
    const auto lambda = b.eigenvalues();
    const auto d = b.d_consts();
    for (std::size_t n = 0; n < b.modes(); ++n) {
        const double w = scale * std::exp(-lambda[n] * t) / d[n];
        if (!sum.add(w * c.u[n], w * c.v[n])) break;
    }
    const ComponentPair p = rotation(config_.beta, t).apply(sum.value());
    const double growth = std::exp(config_.alpha * t);
    return {growth * p.u, growth * p.v};
}

ComponentPair ForwardModel::flux_derivative(Boundary side, double t) const {
    require_time(t);
    const Side s = side == Boundary::Left ? Side::Left : Side::Right;
    const SpectralBasis& b = basis(s);
    const ModalCoefficients& c = coefficients(s);
    const ModalCoefficients& dc = s == Side::Left ? left_derivs_ : right_derivs_;
    const double k = config_.exponent.k();
    const double len = b.length();
    // d/da of e^{-lambda t}/L: lambda and L move in opposite senses on the two sides.
    const double orient = side == Boundary::Left ? -1.0 : 1.0;
    const double scale = orient * 2.0 * k / len;

    SeriesSum sum(config_.series_tol);
    const auto lambda = b.eigenvalues();
    const auto d = b.d_consts();
    for (std::size_t n = 0; n < b.modes(); ++n) {
        const double decay = std::exp(-lambda[n] * t);
        const double shift = orient * (1.0 - 2.0 * k * lambda[n] * t) / len;
        const double w = scale / d[n];
        const double fu = decay * (dc.u[n] + shift * c.u[n]);
        const double fv = decay * (dc.v[n] + shift * c.v[n]);
        if (!sum.add(w * fu, w * fv)) break;
    }
    const ComponentPair p = rotation(config_.beta, t).apply(sum.value());
    const double growth = std::exp(config_.alpha * t);
    return {growth * p.u, growth * p.v};
}

ComponentPair solve_state(const ProblemConfig& config, double x, double t) {
    return ForwardModel(config).state(x, t);
}

ComponentPair flux(const ProblemConfig& config, Boundary side, double t) {
    return ForwardModel(config).flux(side, t);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1) from the counter (seed, index).
double uniform(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double gaussian(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform(seed, 2 * index);
    const double u2 = uniform(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Measurement measure(const ProblemConfig& config, std::span<const double> times, std::span<const Boundary> sides,
                    double noise_percent, std::uint64_t seed) {
    if (!(noise_percent >= 0.0)) throw DomainError("noise percent must be >= 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= kMinTime)) throw DomainError("measurement times must be >= t_min");
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("measurement times must be strictly increasing");
    }
    const ForwardModel model(config);

    Measurement m;
    m.noise_percent = noise_percent;
    m.seed = seed;
    m.samples.resize(times.size() * sides.size());
    parallel_for(m.samples.size(), [&](std::size_t i) {
        const Boundary side = sides[i / times.size()];
        const double t = times[i % times.size()];
        const ComponentPair f = model.flux(side, t);
        m.samples[i] = {t, side, f.u, f.v};
    });

    if (noise_percent > 0.0) {
        const double p = noise_percent / 100.0;
        for (std::size_t i = 0; i < m.samples.size(); ++i) {
            m.samples[i].du *= 1.0 + p * gaussian(seed, 2 * i);
            m.samples[i].dv *= 1.0 + p * gaussian(seed, 2 * i + 1);
        }
    }
    return m;
}

void write_csv(std::ostream& out, const Measurement& m) {
    out << "t,side,du,dv\n";
    out << std::setprecision(17);
    for (const auto& s : m.samples) out << s.t << ',' << boundary_label(s.side) << ',' << s.du << ',' << s.dv << '\n';
}

std::vector<double> sample_times(double t1, double t2, std::size_t n) {
    if (n == 0 || !(t2 >= t1)) throw DomainError("sample_times: need n >= 1 and t2 >= t1");
    std::vector<double> out;
    if (n == 1) {
        if (t1 >= kMinTime) out.push_back(t1);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t1 + (t2 - t1) * static_cast<double>(i) / static_cast<double>(n - 1);
        if (t >= kMinTime) out.push_back(t);
    }
    return out;
}

}  // namespace degenflux
