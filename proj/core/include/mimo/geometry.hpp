#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mimo {

struct AntennaPosition {
    double d = 0.0;    // distance from the disk centre, metres
    double psi = 0.0;  // polar angle in [0, 2pi)
};

// Antennas on the projection disk, sorted by ascending d.
struct AntennaLayout {
    double radius = 0.0;
    std::vector<AntennaPosition> positions;
    double zeta = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return positions.size(); }
};

// Kernel width of the weight field, in units of R.
inline constexpr double zeta_kernel_width = 1.3;
// Evaluation grid is zeta_grid x zeta_grid cells over [-1,1]^2, disk cells only.
inline constexpr int zeta_grid = 64;
// Mean of irregularity_statistic over BPP layouts at M = 100 (1000 samples).
extern const double zeta_bpp_reference;

// score = false skips the zeta evaluation (left at 0), for bulk sampling.
AntennaLayout sample_bpp(std::size_t M, double R, std::uint64_t seed, bool score = true);
AntennaLayout make_regular(std::size_t M, double R);
AntennaLayout make_with_target_zeta(std::size_t M, double R, double zeta_target, double tol,
                                    std::uint64_t seed);

// 0-based indices.
double pairwise_distance(const AntennaLayout& layout, std::size_t i, std::size_t j);
double pairwise_distance(double d_i, double d_j, double delta_psi);

// Order-statistic density of the i-th smallest radius (1 <= i <= M).
double distance_pdf(std::size_t M, std::size_t i, double R, double d);
double distance_cdf(std::size_t M, std::size_t i, double R, double d);

// Mean |grad(W - Wbar)| / sqrt(M), before calibration.
double irregularity_statistic(const AntennaLayout& layout);
double irregularity(const AntennaLayout& layout);

// Sorts by d and wraps psi into [0, 2pi); used by every generator.
void normalize(AntennaLayout& layout);
void validate(const AntennaLayout& layout);
double min_spacing(const AntennaLayout& layout);

void write_layout_csv(std::ostream& os, const AntennaLayout& layout);
AntennaLayout read_layout_csv(std::istream& is);

}  // namespace mimo
