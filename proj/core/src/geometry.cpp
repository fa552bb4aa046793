#include "mimo/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mimo/errors.hpp"
#include "mimo/rng.hpp"
#include "mimo/special.hpp"

namespace mimo {

// Produced by mimo-calibrate (seed 0, 1000 layouts, M = 100).
const double zeta_bpp_reference = 0.36263608652973361;

namespace {

constexpr double two_pi = 2.0 * pi;

double wrap_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

struct ZetaGrid {
    std::vector<double> x, y;
    std::vector<double> mean_slope;  // d/drho of Wbar / M, times 1/rho
};

// Radial derivative of (1/pi) * int_{|q|<=1} exp(-|p-q|^2/s^2) dq at |p| = rho.
double mean_field_slope(double rho) {
    const double s2 = zeta_kernel_width * zeta_kernel_width;
    auto f = [&](double r) {
        const double z = 2.0 * rho * r / s2;
        const double e = std::exp(-(rho * rho + r * r) / s2);
        return r * e * (-2.0 * rho / s2 * boost::math::cyl_bessel_i(0, z)
                        + 2.0 * r / s2 * boost::math::cyl_bessel_i(1, z));
    };
    return 2.0 * boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, 1.0);
}

const ZetaGrid& zeta_grid_points() {
    static const ZetaGrid grid = [] {
        ZetaGrid g;
        for (int a = 0; a < zeta_grid; ++a) {
            for (int b = 0; b < zeta_grid; ++b) {
                const double x = (a + 0.5) / zeta_grid * 2.0 - 1.0;
                const double y = (b + 0.5) / zeta_grid * 2.0 - 1.0;
                const double rho = std::hypot(x, y);
                if (rho > 1.0) continue;
                g.x.push_back(x);
                g.y.push_back(y);
                g.mean_slope.push_back(rho > 0.0 ? mean_field_slope(rho) / rho : 0.0);
            }
        }
        return g;
    }();
    return grid;
}

double statistic_xy(const std::vector<double>& px, const std::vector<double>& py) {
    const ZetaGrid& g = zeta_grid_points();
    const double s2 = zeta_kernel_width * zeta_kernel_width;
    const double M = static_cast<double>(px.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
        double gx = 0.0, gy = 0.0;
        for (std::size_t i = 0; i < px.size(); ++i) {
            const double dx = g.x[k] - px[i];
            const double dy = g.y[k] - py[i];
            const double e = std::exp(-(dx * dx + dy * dy) / s2);
            gx -= 2.0 * dx / s2 * e;
            gy -= 2.0 * dy / s2 * e;
        }
        gx -= M * g.mean_slope[k] * g.x[k];
        gy -= M * g.mean_slope[k] * g.y[k];
        acc += std::hypot(gx, gy);
    }
    return acc / static_cast<double>(g.x.size()) / std::sqrt(M);
}

bool has_coincident(const AntennaLayout& l) {
    return l.size() >= 2 && min_spacing(l) <= 1e-12 * l.radius;
}

}  // namespace

void normalize(AntennaLayout& layout) {
    for (auto& p : layout.positions) p.psi = wrap_angle(p.psi);
    std::stable_sort(layout.positions.begin(), layout.positions.end(),
                     [](const AntennaPosition& a, const AntennaPosition& b) {
                         if (a.d != b.d) return a.d < b.d;
                         return a.psi < b.psi;
                     });
}

void validate(const AntennaLayout& layout) {
    if (!(layout.radius > 0.0)) throw InvalidArgument("layout radius must be positive");
    if (layout.size() < 2) throw InvalidArgument("layout needs at least two antennas");
    double prev = 0.0;
    for (const auto& p : layout.positions) {
        if (!(p.d >= 0.0) || p.d > layout.radius * (1.0 + 1e-12))
            throw InvalidArgument("antenna outside the disk");
        if (!(p.psi >= 0.0) || !(p.psi < two_pi)) throw InvalidArgument("psi outside [0, 2pi)");
        if (p.d < prev) throw InvalidArgument("layout not sorted by distance");
        prev = p.d;
    }
}

double min_spacing(const AntennaLayout& layout) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < layout.size(); ++i)
        for (std::size_t j = i + 1; j < layout.size(); ++j)
            best = std::min(best, pairwise_distance(layout, i, j));
    return best;
}

double pairwise_distance(double d_i, double d_j, double delta_psi) {
    const double r2 = d_i * d_i + d_j * d_j - 2.0 * d_i * d_j * std::cos(delta_psi);
    return std::sqrt(std::max(r2, 0.0));
}

double pairwise_distance(const AntennaLayout& layout, std::size_t i, std::size_t j) {
    if (i >= layout.size() || j >= layout.size())
        throw InvalidArgument("pairwise_distance: index out of range");
    if (i == j) return 0.0;
    const auto& a = layout.positions[i];
    const auto& b = layout.positions[j];
    // Cartesian form avoids the cancellation of the cosine law for close pairs.
    const double dx = a.d * std::cos(a.psi) - b.d * std::cos(b.psi);
    const double dy = a.d * std::sin(a.psi) - b.d * std::sin(b.psi);
    return std::hypot(dx, dy);
}

AntennaLayout sample_bpp(std::size_t M, double R, std::uint64_t seed, bool score) {
    if (M < 2) throw InvalidArgument("sample_bpp: M must be at least 2");
    detail::check_positive(R, "R");
    Rng rng = make_rng(seed, Stream::layout);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AntennaLayout l;
    l.radius = R;
    l.seed = seed;
    do {
        l.positions.clear();
        for (std::size_t i = 0; i < M; ++i) {
            const double r = R * std::sqrt(u(rng));
            const double a = two_pi * u(rng);
            l.positions.push_back({r, a});
        }
        normalize(l);
    } while (has_coincident(l));
    if (score) l.zeta = irregularity(l);
    return l;
}

AntennaLayout make_regular(std::size_t M, double R) {
    if (M < 2) throw InvalidArgument("make_regular: M must be at least 2");
    detail::check_positive(R, "R");
    AntennaLayout l;
    l.radius = R;
    if (M <= 7) {
        for (std::size_t m = 0; m < M; ++m)
            l.positions.push_back({0.75 * R, two_pi * static_cast<double>(m) / M});
    } else {
        const std::size_t rings =
            std::max<std::size_t>(1, std::lround(std::sqrt((M - 1) / pi)));
        std::vector<double> b(rings + 1);
        const double rho0 = std::sqrt(1.0 / static_cast<double>(M));
        for (std::size_t k = 0; k <= rings; ++k)
            b[k] = rho0 + (1.0 - rho0) * static_cast<double>(k) / rings;
        std::vector<double> share(rings);
        double total = 0.0;
        for (std::size_t k = 0; k < rings; ++k) {
            share[k] = b[k + 1] * b[k + 1] - b[k] * b[k];
            total += share[k];
        }
        // largest remainder rounding of the M-1 ring slots
        std::vector<std::size_t> count(rings);
        std::vector<std::pair<double, std::size_t>> rem;
        std::size_t used = 0;
        for (std::size_t k = 0; k < rings; ++k) {
            const double exact = static_cast<double>(M - 1) * share[k] / total;
            count[k] = static_cast<std::size_t>(std::floor(exact));
            used += count[k];
            rem.push_back({exact - std::floor(exact), k});
        }
        std::stable_sort(rem.begin(), rem.end(),
                         [](const auto& a, const auto& c) { return a.first > c.first; });
        for (std::size_t r = 0; used < M - 1; ++r, ++used) ++count[rem[r].second];

        l.positions.push_back({0.0, 0.0});
        for (std::size_t k = 0; k < rings; ++k) {
            const double rk = std::sqrt(0.5 * (b[k] * b[k] + b[k + 1] * b[k + 1]));
            const double offset = (k % 2 == 1) ? 0.5 : 0.0;
            for (std::size_t m = 0; m < count[k]; ++m)
                l.positions.push_back(
                    {rk * R, wrap_angle(two_pi * (static_cast<double>(m) + offset) / count[k])});
        }
    }
    normalize(l);
    l.zeta = irregularity(l);
    return l;
}

AntennaLayout make_with_target_zeta(std::size_t M, double R, double zeta_target, double tol,
                                    std::uint64_t seed) {
    if (!(zeta_target >= 0.0)) throw InvalidArgument("zeta_target must be non-negative");
    detail::check_positive(tol, "tol");
    AntennaLayout base = make_regular(M, R);
    if (std::fabs(base.zeta - zeta_target) <= tol) return base;

    Rng rng = make_rng(seed, Stream::jitter);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    constexpr int steps = 25;
    constexpr int draws = 20;
    double best = base.zeta;
    for (int s = 0; s < steps; ++s) {
        // geometric ladder 0.01 R .. 2 R
        const double amp = 0.01 * std::pow(200.0, static_cast<double>(s) / (steps - 1)) * R;
        for (int t = 0; t < draws; ++t) {
            AntennaLayout l;
            l.radius = R;
            l.seed = seed;
            for (const auto& p : base.positions) {
                const double x0 = p.d * std::cos(p.psi), y0 = p.d * std::sin(p.psi);
                double x, y;
                do {
                    const double r = amp * std::sqrt(u(rng));
                    const double a = two_pi * u(rng);
                    x = x0 + r * std::cos(a);
                    y = y0 + r * std::sin(a);
                } while (x * x + y * y > R * R);
                l.positions.push_back({std::hypot(x, y), std::atan2(y, x)});
            }
            normalize(l);
            if (min_spacing(l) < 1e-6 * R) continue;
            l.zeta = irregularity(l);
            if (std::fabs(l.zeta - zeta_target) < std::fabs(best - zeta_target)) best = l.zeta;
            if (std::fabs(l.zeta - zeta_target) <= tol) return l;
        }
    }
    throw ConvergenceFailure("make_with_target_zeta: target not reached", best);
}

double distance_pdf(std::size_t M, std::size_t i, double R, double d) {
    if (M < 1 || i < 1 || i > M) throw InvalidArgument("distance_pdf: need 1 <= i <= M");
    detail::check_positive(R, "R");
    if (d < 0.0 || d > R) return 0.0;
    const double u = d / R;
    if (u == 0.0) return 0.0;  // 2i-1 >= 1
    const double one_minus = 1.0 - u * u;
    if (one_minus == 0.0) return (i == M) ? 2.0 * static_cast<double>(M) / R : 0.0;
    const double Md = static_cast<double>(M), id = static_cast<double>(i);
    const double logf = std::log(2.0) + ln_gamma(Md + 1.0) - ln_gamma(id) - ln_gamma(Md - id + 1.0)
                        + (Md - id) * std::log(one_minus) + (2.0 * id - 1.0) * std::log(u)
                        - std::log(R);
    return std::exp(logf);
}

double distance_cdf(std::size_t M, std::size_t i, double R, double d) {
    if (M < 1 || i < 1 || i > M) throw InvalidArgument("distance_cdf: need 1 <= i <= M");
    detail::check_positive(R, "R");
    if (d <= 0.0) return 0.0;
    if (d >= R) return 1.0;
    const double u = (d / R) * (d / R);
    return boost::math::ibeta(static_cast<double>(i), static_cast<double>(M - i + 1), u);
}

double irregularity_statistic(const AntennaLayout& layout) {
    validate(layout);
    const std::size_t M = layout.size();
    const double R = layout.radius;
    const double dmax = layout.positions.back().d;

    // Canonical frames: each outermost antenna on the +x axis, both handednesses.
    std::vector<std::size_t> anchors;
    for (std::size_t i = 0; i < M; ++i)
        if (layout.positions[i].d >= dmax * (1.0 - 1e-12)) anchors.push_back(i);

    std::vector<double> px(M), py(M);
    double acc = 0.0;
    for (std::size_t a : anchors) {
        const double psi0 = layout.positions[a].psi;
        for (int sgn : {1, -1}) {
            for (std::size_t i = 0; i < M; ++i) {
                const double ang = sgn * (layout.positions[i].psi - psi0);
                px[i] = layout.positions[i].d / R * std::cos(ang);
                py[i] = layout.positions[i].d / R * std::sin(ang);
            }
            acc += statistic_xy(px, py);
        }
    }
    return acc / (2.0 * static_cast<double>(anchors.size()));
}

double irregularity(const AntennaLayout& layout) {
    return 1.5 * irregularity_statistic(layout) / zeta_bpp_reference;
}

void write_layout_csv(std::ostream& os, const AntennaLayout& layout) {
    fmt::print(os, "# R={:.17g} M={} zeta={:.17g} seed={}\n", layout.radius, layout.size(),
               layout.zeta, layout.seed);
    os << "index,d_m,psi_rad\n";
    for (std::size_t i = 0; i < layout.size(); ++i)
        fmt::print(os, "{},{:.17g},{:.17g}\n", i + 1, layout.positions[i].d,
                   layout.positions[i].psi);
}

AntennaLayout read_layout_csv(std::istream& is) {
    AntennaLayout l;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string kv;
            while (ss >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "R") l.radius = std::stod(v);
                else if (k == "zeta") l.zeta = std::stod(v);
                else if (k == "seed") l.seed = std::stoull(v);
            }
            continue;
        }
        if (!header) {
            if (line != "index,d_m,psi_rad") throw InvalidArgument("layout csv: bad header");
            header = true;
            continue;
        }
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw InvalidArgument("layout csv: malformed row");
        l.positions.push_back({std::stod(b), std::stod(c)});
    }
    validate(l);
    return l;
}

}  // namespace mimo
