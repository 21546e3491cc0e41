#include "degenflux/quadrature.hpp"

#include "degenflux/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace degenflux {

QuadratureRule gauss_legendre(std::size_t order) {
    if (order < 1 || order > kMaxQuadratureOrder) throw DomainError("gauss_legendre: order must be in [1, 512]");
    const std::size_t n = order;
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t m = 2; m <= n; ++m) {
                const double md = static_cast<double>(m);
                const double p2 = ((2.0 * md - 1.0) * x * p1 - (md - 1.0) * p0) / md;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) <= 1e-16) break;
        }
        // recompute derivative at the converged node for the weight
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t m = 2; m <= n; ++m) {
            const double md = static_cast<double>(m);
            const double p2 = ((2.0 * md - 1.0) * x * p1 - (md - 1.0) * p0) / md;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : nd * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

InitialData InitialData::constant(double u, double v) { return InitialData(Constant{u, v}); }

InitialData InitialData::piecewise(double u_left, double u_right, double v_left, double v_right) {
    return InitialData(PiecewiseConstant{u_left, u_right, v_left, v_right});
}

InitialData InitialData::tabulated(std::vector<double> x, std::vector<double> u, std::vector<double> v) {
    if (x.size() < 2 || u.size() != x.size() || v.size() != x.size())
        throw DomainError("tabulated initial data: need >= 2 points and matching column lengths");
    if (!std::is_sorted(x.begin(), x.end(), std::less_equal<>{}) ||
        std::adjacent_find(x.begin(), x.end()) != x.end())
        throw DomainError("tabulated initial data: grid must be strictly increasing");
    if (x.front() > 0.0 || x.back() < 1.0) throw DomainError("tabulated initial data: grid must cover [0, 1]");
    return InitialData(Tabulated{std::move(x), std::move(u), std::move(v)});
}

namespace {

std::size_t segment(const InitialData::Tabulated& t, double x) {
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(t.x.begin(), it));
    return std::clamp<std::size_t>(idx, 1, t.x.size() - 1) - 1;
}

}  // namespace

ComponentPair InitialData::value(Side side, double x) const {
    return std::visit(
        [&](const auto& d) -> ComponentPair {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {d.u, d.v};
            } else if constexpr (std::is_same_v<T, PiecewiseConstant>) {
                return side == Side::Left ? ComponentPair{d.u_left, d.v_left} : ComponentPair{d.u_right, d.v_right};
            } else {
                const std::size_t i = segment(d, x);
                const double w = (x - d.x[i]) / (d.x[i + 1] - d.x[i]);
                return {d.u[i] + w * (d.u[i + 1] - d.u[i]), d.v[i] + w * (d.v[i + 1] - d.v[i])};
            }
        },
        data_);
}

ComponentPair InitialData::slope(Side, double x) const {
    if (const auto* t = std::get_if<Tabulated>(&data_)) {
        const std::size_t i = segment(*t, x);
        const double dx = t->x[i + 1] - t->x[i];
        return {(t->u[i + 1] - t->u[i]) / dx, (t->v[i + 1] - t->v[i]) / dx};
    }
    return {0.0, 0.0};
}

ComponentPair InitialData::sup_value() const {
    return std::visit(
        [](const auto& d) -> ComponentPair {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {std::fabs(d.u), std::fabs(d.v)};
            } else if constexpr (std::is_same_v<T, PiecewiseConstant>) {
                return {std::max(std::fabs(d.u_left), std::fabs(d.u_right)),
                        std::max(std::fabs(d.v_left), std::fabs(d.v_right))};
            } else {
                ComponentPair m;
                for (std::size_t i = 0; i < d.x.size(); ++i) {
                    m.u = std::max(m.u, std::fabs(d.u[i]));
                    m.v = std::max(m.v, std::fabs(d.v[i]));
                }
                return m;
            }
        },
        data_);
}

ComponentPair InitialData::sup_slope() const {
    ComponentPair m;
    if (const auto* t = std::get_if<Tabulated>(&data_)) {
        for (std::size_t i = 0; i + 1 < t->x.size(); ++i) {
            const double dx = t->x[i + 1] - t->x[i];
            m.u = std::max(m.u, std::fabs((t->u[i + 1] - t->u[i]) / dx));
            m.v = std::max(m.v, std::fabs((t->v[i + 1] - t->v[i]) / dx));
        }
    }
    return m;
}

std::shared_ptr<const ModalKernel> modal_kernel(const SpectralBasis& basis, const QuadratureRule& rule) {
    static std::mutex mutex;
    static std::map<std::tuple<std::uint64_t, std::size_t, std::size_t>, std::shared_ptr<const ModalKernel>> cache;

    const double nu = basis.exponent().nu();
    const auto key = std::make_tuple(std::bit_cast<std::uint64_t>(nu), basis.modes(), rule.order());
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    const double inv_k = 1.0 / basis.exponent().k();
    const bessel::BesselOrder order(nu);
    auto kernel = std::make_shared<ModalKernel>();
    kernel->modes.resize(basis.modes());
    for (std::size_t n = 0; n < basis.modes(); ++n) {
        const double jn = basis.zero(n);
        auto& mode = kernel->modes[n];
        mode.sigma.resize(rule.order());
        mode.weight.resize(rule.order());
        for (std::size_t i = 0; i < rule.order(); ++i) {
            const double r = 0.5 * (rule.nodes[i] + 1.0);  // s / j_n
            const double s = r * jn;
            mode.sigma[i] = std::pow(r, inv_k);
            mode.weight[i] = 0.5 * jn * rule.weights[i] * std::pow(s, nu + 1.0) * bessel::j(order, s);
        }
    }
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(kernel)).first->second;
}

namespace {

double position(const SpectralBasis& basis, double sigma) {
    const double a = basis.a();
    return basis.side() == Side::Right ? a + (1.0 - a) * sigma : a - a * sigma;
}

}  // namespace

ModalCoefficients modal_coefficients(const InitialData& data, const SpectralBasis& basis,
                                     const QuadratureRule& rule) {
    const auto kernel = modal_kernel(basis, rule);
    ModalCoefficients out;
    out.u.assign(basis.modes(), 0.0);
    out.v.assign(basis.modes(), 0.0);

    // Constant pieces reduce to the same weighted sum, skip the per-node lookup.
    const bool constant = !std::holds_alternative<InitialData::Tabulated>(data.variant());
    const ComponentPair c = constant ? data.value(basis.side(), basis.a()) : ComponentPair{};

    for (std::size_t n = 0; n < basis.modes(); ++n) {
        const auto& mode = kernel->modes[n];
        double su = 0.0;
        double sv = 0.0;
        if (constant) {
            double s = 0.0;
            for (const double w : mode.weight) s += w;
            su = c.u * s;
            sv = c.v * s;
        } else {
            for (std::size_t i = 0; i < mode.weight.size(); ++i) {
                const ComponentPair val = data.value(basis.side(), position(basis, mode.sigma[i]));
                su += mode.weight[i] * val.u;
                sv += mode.weight[i] * val.v;
            }
        }
        out.u[n] = su;
        out.v[n] = sv;
    }
    return out;
}

ModalCoefficients modal_coefficient_derivatives(const InitialData& data, const SpectralBasis& basis,
                                                const QuadratureRule& rule) {
    ModalCoefficients out;
    out.u.assign(basis.modes(), 0.0);
    out.v.assign(basis.modes(), 0.0);
    if (!std::holds_alternative<InitialData::Tabulated>(data.variant())) return out;

    const auto kernel = modal_kernel(basis, rule);
    for (std::size_t n = 0; n < basis.modes(); ++n) {
        const auto& mode = kernel->modes[n];
        double su = 0.0;
        double sv = 0.0;
        for (std::size_t i = 0; i < mode.weight.size(); ++i) {
            const ComponentPair d = data.slope(basis.side(), position(basis, mode.sigma[i]));
            const double w = mode.weight[i] * (1.0 - mode.sigma[i]);
            su += w * d.u;
            sv += w * d.v;
        }
        out.u[n] = su;
        out.v[n] = sv;
    }
    return out;
}

}  // namespace degenflux
