#include "degenflux/spectral.hpp"

#include "degenflux/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace degenflux {

DegeneracyExponent::DegeneracyExponent(double theta) : theta_(theta) {
    if (!(theta >= 1.0 && theta < 2.0)) throw DomainError("degeneracy exponent theta must lie in [1, 2)");
    nu_ = (theta - 1.0) / (2.0 - theta);
    k_ = (2.0 - theta) / 2.0;
}

SpectralBasis::SpectralBasis(Side side, double a, DegeneracyExponent exponent,
                             std::shared_ptr<const bessel::ZeroTable> zeros)
    : side_(side), a_(a), exponent_(exponent), zeros_(std::move(zeros)) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("degeneracy point a must lie in (0, 1)");
    const double k = exponent_.k();
    const double nu = exponent_.nu();
    const double inv2k = 1.0 / (2.0 * k);
    const double scale = std::pow(length(), 2.0 * k);
    const bessel::BesselOrder order(nu);

    const std::size_t n_modes = zeros_->size();
    eigenvalues_.reserve(n_modes);
    jprime_.reserve(n_modes);
    d_.reserve(n_modes);
    h_.reserve(n_modes);
    for (const double jn : zeros_->zeros()) {
        const double jp = bessel::j_prime(order, jn);
        eigenvalues_.push_back(k * k * jn * jn / scale);
        jprime_.push_back(jp);
        d_.push_back(jp * std::pow(jn, inv2k));
        h_.push_back(jp * jp * std::pow(jn, 1.0 + inv2k));
    }
}

bool SpectralBasis::contains(double x) const noexcept {
    return side_ == Side::Right ? (x >= a_ && x <= 1.0) : (x >= 0.0 && x <= a_);
}

double SpectralBasis::mapped(double x) const noexcept {
    const double y = (side_ == Side::Right ? x - a_ : a_ - x) / length();
    return std::clamp(y, 0.0, 1.0);
}

double SpectralBasis::kernel(std::size_t n, double y) const {
    const double nu = exponent_.nu();
    const double jn = zero(n);
    if (y == 0.0) return std::exp(nu * std::log(0.5 * jn) - bessel::log_gamma(nu + 1.0));
    const double theta = exponent_.theta();
    return std::pow(y, 0.5 * (1.0 - theta)) * bessel::j(bessel::BesselOrder(nu), jn * std::pow(y, exponent_.k()));
}

SpectralBasis build_basis(Side side, double a, double theta, std::size_t modes) {
    if (modes == 0) throw DomainError("build_basis: modes must be >= 1");
    if (!(a > 0.0 && a < 1.0)) throw DomainError("degeneracy point a must lie in (0, 1)");
    const DegeneracyExponent exponent(theta);
    return SpectralBasis(side, a, exponent, bessel::cached_zeros(exponent.nu(), modes));
}

double eigenfunction(const SpectralBasis& basis, std::size_t n, double x) {
    if (n >= basis.modes()) throw DomainError("eigenfunction: mode index out of range");
    if (!basis.contains(x)) throw DomainError("eigenfunction: x outside the basis interval");
    const double norm = std::sqrt(2.0 * basis.exponent().k() / basis.length()) / std::fabs(basis.jprime()[n]);
    return norm * basis.kernel(n, basis.mapped(x));
}

}  // namespace degenflux
