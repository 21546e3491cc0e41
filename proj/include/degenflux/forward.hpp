#pragma once

#include "degenflux/quadrature.hpp"
#include "degenflux/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace degenflux {

/// Full forward problem w_t = (|x-a|^theta w_x)_x + (alpha + i beta) w on
/// (0,1), Dirichlet at both ends, w(0) = u0 + i v0.
struct ProblemConfig {
    DegeneracyExponent exponent{1.5};
    double a = 0.5;
    double alpha = 0.0;
    double beta = 0.0;
    InitialData initial;
    std::size_t modes = kDefaultModes;
    double series_tol = 1e-16;
    std::size_t quadrature_order = kDefaultQuadratureOrder;

    /// Throws DomainError on out-of-range fields.
    void validate() const;
};

/// Series are not evaluated below this time: with 40 modes the truncated tail
/// would no longer be negligible.
inline constexpr double kMinTime = 1e-3;

/// Boundary where a flux is observed: Left is x = 0, Right is x = 1.
enum class Boundary { Left, Right };

const char* boundary_label(Boundary b) noexcept;  // "0" / "1"

struct Matrix2 {
    double m00, m01, m10, m11;

    ComponentPair apply(ComponentPair p) const noexcept {
        return {m00 * p.u + m01 * p.v, m10 * p.u + m11 * p.v};
    }
};

/// R(beta t) = [[cos, -sin], [sin, cos]].
Matrix2 rotation(double beta, double t);

struct FluxSample {
    double t;
    Boundary side;
    double du;
    double dv;
};

/// Samples grouped by side, each group strictly increasing in t.
struct Measurement {
    std::vector<FluxSample> samples;
    double noise_percent = 0.0;
    std::uint64_t seed = 0;

    std::vector<FluxSample> on(Boundary side) const;
};

/// Evaluator with the bases and modal coefficients of both sub-problems
/// precomputed. Immutable after construction.
class ForwardModel {
public:
    explicit ForwardModel(ProblemConfig config);

    const ProblemConfig& config() const noexcept { return config_; }
    const SpectralBasis& basis(Side side) const noexcept { return side == Side::Left ? left_ : right_; }
    const ModalCoefficients& coefficients(Side side) const noexcept {
        return side == Side::Left ? left_coeffs_ : right_coeffs_;
    }

    /// (u, v)(x, t) for x in [0, 1]; x = a takes the right-side limit.
    ComponentPair state(double x, double t) const;

    /// (du/dx, dv/dx) at the boundary.
    ComponentPair flux(Boundary side, double t) const;

    /// d/da of flux(side, t), initial-data split moving with a.
    ComponentPair flux_derivative(Boundary side, double t) const;

private:
    void require_time(double t) const;

    ProblemConfig config_;
    SpectralBasis left_;
    SpectralBasis right_;
    ModalCoefficients left_coeffs_;
    ModalCoefficients right_coeffs_;
    ModalCoefficients left_derivs_;
    ModalCoefficients right_derivs_;
};

ComponentPair solve_state(const ProblemConfig& config, double x, double t);
ComponentPair flux(const ProblemConfig& config, Boundary side, double t);

/// Samples the flux at every (side, t). With p > 0 each component y becomes
/// y (1 + p/100 xi), xi standard normal from a counter-based generator keyed
/// by seed, so the result depends only on the arguments.
Measurement measure(const ProblemConfig& config, std::span<const double> times, std::span<const Boundary> sides,
                    double noise_percent, std::uint64_t seed);

/// Standard normal draw number `index` of the stream `seed`.
double gaussian(std::uint64_t seed, std::uint64_t index);

/// CSV `t,side,du,dv`, 17 significant digits.
void write_csv(std::ostream& out, const Measurement& m);

/// n uniform samples on [t1, t2] with samples below kMinTime dropped.
std::vector<double> sample_times(double t1, double t2, std::size_t n);

}  // namespace degenflux
