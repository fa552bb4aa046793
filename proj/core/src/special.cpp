#include "mimo/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "mimo/errors.hpp"

namespace mimo {
namespace {

constexpr double max_arg = 1e4;

// Power series. Terms peak near 6e6 at x = 18, long double keeps ~1e-12.
void sici_series(double xd, double& si, double& ci) {
    const long double x = xd;
    const long double x2 = x * x;
    long double term = x;  // x^(2k+1)/(2k+1)!
    long double s = x;
    long double c = 0.0L;
    long double even = 1.0L;  // x^(2k)/(2k)!
    const long double eps = std::numeric_limits<long double>::epsilon();
    for (int k = 1; k < 200; ++k) {
        even = -even * x2 / ((2.0L * k - 1.0L) * (2.0L * k));
        const long double dc = even / (2.0L * k);
        c += dc;
        term = -term * x2 / ((2.0L * k) * (2.0L * k + 1.0L));
        const long double ds = term / (2.0L * k + 1.0L);
        s += ds;
        if (std::fabs(ds) < eps * std::fabs(s) && std::fabs(dc) < eps * (1.0L + std::fabs(c)))
            break;
    }
    si = static_cast<double>(s);
    ci = static_cast<double>(euler_gamma + std::log(x) + c);
}

// Lentz continued fraction for E1(ix); Ci = -Re, Si = pi/2 + Im after the phase rotation.
void sici_cf(double x, double& si, double& ci) {
    using cd = std::complex<double>;
    const double tiny = 1e-300;
    const double eps = 1e-16;
    cd b(1.0, x);
    cd c(1.0 / tiny, 0.0);
    cd d = 1.0 / b;
    cd h = d;
    int i = 2;
    for (; i < 100000; ++i) {
        const double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const cd del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
    }
    if (i >= 100000) throw NumericFailure("sici continued fraction did not converge");
    h *= cd(std::cos(x), -std::sin(x));
    ci = -h.real();
    si = pi / 2.0 + h.imag();
}

}  // namespace

void sici(double x, double& si, double& ci) {
    detail::check_finite(x, "x");
    if (x <= 0.0 || x > max_arg) throw InvalidArgument("sici: x must lie in (0, 1e4]");
    if (x <= sici_crossover)
        sici_series(x, si, ci);
    else
        sici_cf(x, si, ci);
}

double sine_integral(double x) {
    detail::check_finite(x, "x");
    if (x < 0.0 || x > max_arg) throw InvalidArgument("sine_integral: x must lie in [0, 1e4]");
    if (x == 0.0) return 0.0;
    double si, ci;
    sici(x, si, ci);
    return si;
}

double cosine_integral(double x) {
    detail::check_finite(x, "x");
    if (x <= 0.0 || x > max_arg) throw InvalidArgument("cosine_integral: x must lie in (0, 1e4]");
    double si, ci;
    sici(x, si, ci);
    return ci;
}

double erfc(double x) {
    detail::check_finite(x, "x");
    return std::erfc(x);
}

double ln_gamma(double x) {
    detail::check_finite(x, "x");
    if (x <= 0.0) throw InvalidArgument("ln_gamma: x must be positive");
    return boost::math::lgamma(x);
}

double sample_lognormal_shadowing(double sigma_dB, Rng& rng) {
    if (!(sigma_dB >= 0.0)) throw InvalidArgument("sigma_dB must be non-negative");
    if (sigma_dB == 0.0) return 1.0;
    std::normal_distribution<double> n(0.0, sigma_dB);
    return std::pow(10.0, n(rng) / 10.0);
}

double sample_lognormal_shadowing(double sigma_dB, std::uint64_t seed) {
    Rng rng = make_rng(seed, Stream::shadowing);
    return sample_lognormal_shadowing(sigma_dB, rng);
}

}  // namespace mimo
