#pragma once

#include <cstdint>

#include "mimo/rng.hpp"

namespace mimo {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
inline constexpr double pi = 3.14159265358979323846264338327950288;

// Branch point between the power series and the continued fraction.
inline constexpr double sici_crossover = 18.0;

// Si(x) for 0 <= x <= 1e4.
double sine_integral(double x);

// Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt for 0 < x <= 1e4.
double cosine_integral(double x);

// Both at once; cheaper than two calls.
void sici(double x, double& si, double& ci);

double erfc(double x);

double ln_gamma(double x);

// 10^(X/10), X ~ N(0, sigma_dB^2).
double sample_lognormal_shadowing(double sigma_dB, Rng& rng);
double sample_lognormal_shadowing(double sigma_dB, std::uint64_t seed);

}  // namespace mimo
