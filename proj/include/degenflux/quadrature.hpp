#pragma once

#include "degenflux/spectral.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace degenflux {

/// The (u, v) = (Re, Im) pair that every observable in this library carries.
struct ComponentPair {
    double u = 0.0;
    double v = 0.0;
};

/// Gauss-Legendre rule on (-1, 1). Nodes ascending and symmetric.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t order() const noexcept { return nodes.size(); }
};

inline constexpr std::size_t kMaxQuadratureOrder = 512;
inline constexpr std::size_t kDefaultQuadratureOrder = 200;

/// Nodes by Newton iteration on P_order, 1 <= order <= 512.
QuadratureRule gauss_legendre(std::size_t order);

/// Initial data (u0, v0).
///
/// PiecewiseConstant is split at whatever degeneracy point it is paired
/// with, so evaluation asks for the side rather than comparing x with a.
class InitialData {
public:
    struct Constant {
        double u;
        double v;
    };
    struct PiecewiseConstant {
        double u_left;
        double u_right;
        double v_left;
        double v_right;
    };
    struct Tabulated {
        std::vector<double> x;
        std::vector<double> u;
        std::vector<double> v;
    };

    InitialData() : data_(Constant{0.0, 0.0}) {}
    static InitialData constant(double u, double v);
    static InitialData piecewise(double u_left, double u_right, double v_left, double v_right);
    /// Grid strictly increasing and covering [0, 1]; linear interpolation.
    static InitialData tabulated(std::vector<double> x, std::vector<double> u, std::vector<double> v);

    ComponentPair value(Side side, double x) const;
    /// Derivative in x; zero on constant pieces, piecewise slope for tables.
    ComponentPair slope(Side side, double x) const;

    /// sup|u0|, sup|v0| and the a.e. sup of |u0'|, |v0'|.
    ComponentPair sup_value() const;
    ComponentPair sup_slope() const;

    const auto& variant() const noexcept { return data_; }

private:
    explicit InitialData(std::variant<Constant, PiecewiseConstant, Tabulated> d) : data_(std::move(d)) {}
    std::variant<Constant, PiecewiseConstant, Tabulated> data_;
};

/// U^0_n, V^0_n for n = 0..modes-1.
struct ModalCoefficients {
    std::vector<double> u;
    std::vector<double> v;
};

/// U^0_n = int_0^{j_n} u0(x(s)) s^{1/(2k)} J_nu(s) ds with
/// x(s) = a + (1-a)(s/j_n)^{1/k} (right) or a - a(s/j_n)^{1/k} (left);
/// V^0_n likewise with v0.
ModalCoefficients modal_coefficients(const InitialData& data, const SpectralBasis& basis,
                                     const QuadratureRule& rule);

/// d/da of U^0_n, V^0_n: the same integrals with u0'(x(s)) (1 - (s/j_n)^{1/k}).
/// The split of PiecewiseConstant data moves with a.
ModalCoefficients modal_coefficient_derivatives(const InitialData& data, const SpectralBasis& basis,
                                                const QuadratureRule& rule);

/// Rule-dependent part of the modal integrals, independent of a and of the
/// data: for each mode, mapped positions sigma_i = (s_i/j_n)^{1/k} and weights
/// (j_n/2) w_i s_i^{nu+1} J_nu(s_i). Cached per (nu, modes, order).
struct ModalKernel {
    struct Mode {
        std::vector<double> sigma;
        std::vector<double> weight;
    };
    std::vector<Mode> modes;
};

std::shared_ptr<const ModalKernel> modal_kernel(const SpectralBasis& basis, const QuadratureRule& rule);

}  // namespace degenflux
