#include "degenflux/bessel.hpp"

#include "degenflux/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace degenflux::bessel {

namespace {

constexpr double kSeriesSwitch = 12.0;
constexpr int kSeriesMaxTerms = 60;

void require_argument(double z) {
    if (!(z >= 0.0)) throw DomainError("bessel: argument must be >= 0");
    if (z > kMaxArgument) throw NumericalError("bessel: argument beyond supported range");
}

double asymptotic_threshold(double nu) { return std::max(30.0, 0.5 * nu * nu); }

// Ascending series, long double accumulation with Kahan compensation.
double series(double nu, double z) {
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const long double half = static_cast<long double>(z) / 2.0L;
    const long double log_lead =
        static_cast<long double>(nu) * std::log(half) - static_cast<long double>(log_gamma(nu + 1.0));
    if (log_lead < -11000.0L) return 0.0;
    long double term = std::exp(log_lead);
    const long double q = -half * half;
    long double sum = term;
    long double comp = 0.0L;
    for (int k = 1; k < kSeriesMaxTerms; ++k) {
        term *= q / (static_cast<long double>(k) * (static_cast<long double>(k) + nu));
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::fabs(term) < 1e-21L * std::fabs(sum)) break;
    }
    return static_cast<double>(sum);
}

// Hankel expansion J = sqrt(2/(pi z)) (P cos chi - Q sin chi).
double hankel(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * z);
        const double mag = std::fabs(term);
        if (mag > last && k > 2) break;  // asymptotic series started to diverge
        last = mag;
        // k odd feeds Q with sign (-1)^((k-1)/2); k even feeds P with sign (-1)^(k/2)
        if (k % 2 == 1) {
            q += ((k - 1) / 2) % 2 == 0 ? term : -term;
        } else {
            p += (k / 2) % 2 == 0 ? term : -term;
        }
        if (mag < 1e-17) break;
    }
    const double chi = z - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Miller backward recurrence for J_nu, J_{nu+1}; normalised with
// (z/2)^nu = sum_k (nu+2k) Gamma(nu+k)/k! J_{nu+2k}(z).
JPair miller(double nu, double z) {
    const int tail = 30 + static_cast<int>(std::ceil(8.0 * std::cbrt(z)));
    int top = static_cast<int>(std::ceil(std::max(z - nu, 0.0))) + tail;
    top += top % 2;

    // c_k / Gamma(nu+1), c_0 = 1, c_k = (nu+2k) g_k with g_1 = 1, g_k = g_{k-1}(nu+k-1)/k
    std::vector<double> weight(static_cast<std::size_t>(top / 2 + 1));
    weight[0] = 1.0;
    double g = 1.0;
    for (int k = 1; k <= top / 2; ++k) {
        if (k > 1) g *= (nu + k - 1.0) / k;
        weight[static_cast<std::size_t>(k)] = (nu + 2.0 * k) * g;
    }

    double f_next = 0.0;
    double f = 1e-30;
    double norm = (top % 2 == 0) ? weight[static_cast<std::size_t>(top / 2)] * f : 0.0;
    for (int m = top; m >= 1; --m) {
        const double f_prev = 2.0 * (nu + m) / z * f - f_next;
        f_next = f;
        f = f_prev;
        const int idx = m - 1;
        if (idx % 2 == 0) norm += weight[static_cast<std::size_t>(idx / 2)] * f;
        if (std::fabs(f) > 1e100) {
            f *= 1e-100;
            f_next *= 1e-100;
            norm *= 1e-100;
        }
    }
    const double scale = std::exp(nu * std::log(0.5 * z) - log_gamma(nu + 1.0)) / norm;
    return {f * scale, f_next * scale};
}

double evaluate(double nu, double z) {
    if (z <= kSeriesSwitch) return series(nu, z);
    if (z >= asymptotic_threshold(nu)) return hankel(nu, z);
    return miller(nu, z).j_nu;
}

double mcmahon(double nu, std::size_t n) {
    const double beta = (static_cast<double>(n) + 0.5 * nu - 0.25) * std::numbers::pi;
    return beta - (4.0 * nu * nu - 1.0) / (8.0 * beta);
}

double refine_zero(double nu, std::size_t n, double lo, double hi, double f_lo) {
    constexpr int kMaxIter = 30;
    constexpr int kMaxNonContracting = 5;

    double x = mcmahon(nu, n);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double prev_step = hi - lo;
    int non_contracting = 0;
    for (int it = 0; it < kMaxIter; ++it) {
        const JPair jp = j_pair(BesselOrder(nu), x);
        const double f = jp.j_nu;
        if (f == 0.0) return x;
        if ((f > 0.0) == (f_lo > 0.0)) {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        const double fp = nu / x * f - jp.j_nu1;
        double step = f / fp;
        double next = x - step;
        // Converged Newton steps can land on a bracket end after rounding.
        if (std::fabs(step) <= 1e-14 * std::max(1.0, x)) return std::clamp(next, lo, hi);
        if (!(next > lo && next < hi) || std::fabs(step) > 0.5 * std::fabs(prev_step)) ++non_contracting;
        if (!(next > lo && next < hi) || non_contracting >= kMaxNonContracting) {
            next = 0.5 * (lo + hi);
            step = x - next;
            non_contracting = 0;
        }
        if (std::fabs(step) <= 1e-14 * std::max(1.0, x)) return next;
        prev_step = step;
        x = next;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "bessel_zeros: no convergence for nu=" << nu << ", n=" << n << ", last bracket [" << lo << ", "
        << hi << "]";
    throw NumericalError(msg.str());
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
    if (!std::isfinite(nu) || nu < 0.0) throw DomainError("bessel: order must be finite and >= 0");
    if (nu > kMaxOrder) throw NumericalError("bessel: order beyond supported range");
}

double gamma(double x) {
    if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
    if (x > 171.0) throw NumericalError("gamma: overflow");
    return std::tgamma(x);
}

// log(tgamma) rather than lgamma, which writes the global signgam.
double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (x < 170.0) return std::log(std::tgamma(x));
    // Stirling with two correction terms is exact to double precision here.
    const double inv = 1.0 / x;
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + inv / 12.0 -
           inv * inv * inv / 360.0;
}

double j(BesselOrder nu, double z) {
    require_argument(z);
    return evaluate(nu.value(), z);
}

JPair j_pair(BesselOrder nu, double z) {
    require_argument(z);
    const double v = nu.value();
    if (z > kSeriesSwitch && z < asymptotic_threshold(v) && z < asymptotic_threshold(v + 1.0)) return miller(v, z);
    return {evaluate(v, z), evaluate(v + 1.0, z)};
}

double j_prime(BesselOrder nu, double z) {
    require_argument(z);
    const double v = nu.value();
    if (z == 0.0) {
        if (v == 1.0) return 0.5;
        if (v > 1.0) return 0.0;
        throw DomainError("bessel_j_prime: undefined at z = 0 for this order");
    }
    const JPair jp = j_pair(nu, z);
    return v / z * jp.j_nu - jp.j_nu1;
}

ZeroTable::ZeroTable(double nu, std::vector<double> zeros) : nu_(nu), zeros_(std::move(zeros)) {}

double ZeroTable::lower_bound(double nu, std::size_t n) {
    const double nn = static_cast<double>(n);
    return nu <= 0.5 ? std::numbers::pi * (nn + 0.5 * nu - 0.25) : std::numbers::pi * (nn + 0.25 * nu - 0.125);
}

double ZeroTable::upper_bound(double nu, std::size_t n) {
    const double nn = static_cast<double>(n);
    return nu <= 0.5 ? std::numbers::pi * (nn + 0.25 * nu - 0.125) : std::numbers::pi * (nn + 0.5 * nu - 0.25);
}

ZeroTable zeros(BesselOrder order, std::size_t count) {
    if (count == 0) throw DomainError("bessel_zeros: count must be >= 1");
    const double nu = order.value();
    // Consecutive zeros of J_nu (nu >= 0) are more than 2.4 apart, so a unit
    // scan step isolates each one.
    constexpr double kScanStep = 1.0;

    std::vector<double> out;
    out.reserve(count);
    double start = std::max(0.5 * ZeroTable::lower_bound(nu, 1), ZeroTable::lower_bound(nu, 1) - 0.25);
    for (std::size_t n = 1; n <= count; ++n) {
        double lo = start;
        double f_lo = j(order, lo);
        double hi = lo + kScanStep;
        double f_hi = j(order, hi);
        int guard = 0;
        while ((f_hi > 0.0) == (f_lo > 0.0) && f_hi != 0.0) {
            lo = hi;
            f_lo = f_hi;
            hi += kScanStep;
            f_hi = j(order, hi);
            if (++guard > 1000) throw NumericalError("bessel_zeros: sign-change scan failed");
        }
        const double z = f_hi == 0.0 ? hi : refine_zero(nu, n, lo, hi, f_lo);
        out.push_back(z);
        start = z + 0.5;
    }
    return ZeroTable(nu, std::move(out));
}

std::shared_ptr<const ZeroTable> cached_zeros(double nu, std::size_t count) {
    static std::mutex mutex;
    static std::map<std::pair<std::uint64_t, std::size_t>, std::shared_ptr<const ZeroTable>> cache;

    const auto key = std::make_pair(std::bit_cast<std::uint64_t>(nu), count);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<const ZeroTable>(zeros(BesselOrder(nu), count));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace degenflux::bessel
