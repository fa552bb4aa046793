#include "mimo/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mimo/coupling.hpp"
#include "mimo/errors.hpp"
#include "mimo/geometry.hpp"
#include "mimo/rng.hpp"

namespace mimo {

unsigned thread_count() {
    if (const char* env = std::getenv("MIMO_SIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min(v, 1024L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!first) first = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

Scenario make_scenario(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& A,
                       const SystemParams& link, std::string digest) {
    if (C.rows() != C.cols() || C.cols() != A.rows())
        throw InvalidArgument("make_scenario: dimension mismatch");
    link.check();
    Scenario s;
    s.CA = C * A;
    s.link = link;
    s.digest = std::move(digest);
    return s;
}

Eigen::VectorXd zf_snr(const Eigen::MatrixXcd& G, double snr_ut) {
    detail::check_positive(snr_ut, "SNR_UT");
    const auto K = G.cols();
    if (K < 1 || G.rows() < K) throw SingularMatrix("zf_snr: G needs at least K rows", INFINITY);
    const Eigen::MatrixXcd gram = G.adjoint() * G;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (!(rcond > 1e-13)) throw SingularMatrix("zf_snr: G^H G is rank deficient", rcond > 0 ? 1.0 / rcond : INFINITY);
    const Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(K, K));
    Eigen::VectorXd snr(K);
    for (Eigen::Index k = 0; k < K; ++k) snr(k) = snr_ut / inv(k, k).real();
    return snr;
}

double mrc_snr(const Eigen::MatrixXcd& G, std::size_t k, double snr_ut) {
    detail::check_positive(snr_ut, "SNR_UT");
    if (k >= static_cast<std::size_t>(G.cols())) throw InvalidArgument("mrc_snr: user index out of range");
    const auto col = G.col(static_cast<Eigen::Index>(k));
    const double a = col.squaredNorm();
    double interference = 0.0;
    for (Eigen::Index i = 0; i < G.cols(); ++i)
        if (i != static_cast<Eigen::Index>(k)) interference += std::norm(col.dot(G.col(i)));
    const double den = snr_ut * interference + a;
    if (!(den > 0.0)) throw NumericFailure("mrc_snr: zero interference-plus-noise power");
    return snr_ut * a * a / den;
}

namespace {

// Trial results, trials x width, row t written only by trial t.
struct TrialTable {
    std::size_t width = 0;
    std::vector<double> data;
    double* row(std::size_t t) { return data.data() + t * width; }
};

using TrialFn = std::function<void(const Eigen::MatrixXcd& H, double* out)>;

TrialTable run_trials(std::size_t P, std::size_t K, const McOptions& opt,
                      std::size_t width, const TrialFn& fn) {
    if (opt.trials < 1) throw InvalidArgument("trials must be at least 1");
    TrialTable table;
    table.width = width;
    table.data.assign(opt.trials * width, 0.0);
    parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
        Rng rng = make_rng(opt.seed, Stream::small_scale, t);
        for (int attempt = 0;; ++attempt) {
            const Eigen::MatrixXcd H = draw_small_scale(P, K, rng);
            try {
                fn(H, table.row(t));
                return;
            } catch (const SingularMatrix&) {
                if (attempt >= max_resamples)
                    throw NumericFailure(fmt::format(
                        "trial {}: channel rank deficient after {} resamples", t, max_resamples));
            }
        }
    });
    return table;
}

MetricEstimate summarise(const TrialTable& table, std::size_t col, const Scenario& s,
                         const McOptions& opt) {
    const std::size_t n = opt.trials;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = table.data[t * table.width + col];
    const double mean = pairwise_sum(x.data(), n) / static_cast<double>(n);
    for (double& v : x) v = (v - mean) * (v - mean);
    const double var = n > 1 ? pairwise_sum(x.data(), n) / static_cast<double>(n - 1) : 0.0;
    MetricEstimate e;
    e.value = mean;
    e.std_error = std::sqrt(var / static_cast<double>(n));
    e.trials = n;
    e.seed = opt.seed;
    e.config_digest = s.digest;
    if (!std::isfinite(e.value)) throw NumericFailure("Monte Carlo estimate is not finite");
    return e;
}

void dump(const TrialTable& table, const std::vector<std::string>& names, const McOptions& opt) {
    if (!opt.raw) return;
    std::ostream& os = *opt.raw;
    os << "trial,metric,value\n";
    for (std::size_t t = 0; t < opt.trials; ++t)
        for (std::size_t c = 0; c < table.width; ++c)
            fmt::print(os, "{},{},{:.17g}\n", t + 1, names[c], table.data[t * table.width + c]);
}

Eigen::MatrixXcd compose(const Scenario& s, const Eigen::MatrixXcd& H) {
    return (s.CA * H) * s.link.beta.cwiseSqrt().asDiagonal();
}

double ser_term(const Modulation& m, double snr) {
    return 0.5 * m.omega * std::erfc(std::sqrt(m.varpi * snr));
}

// Eigenvalues of W = (CA H)^H (CA H), all strictly positive or SingularMatrix.
Eigen::VectorXd w_eigenvalues(const Scenario& s, const Eigen::MatrixXcd& H) {
    const Eigen::MatrixXcd F = s.CA * H;
    const Eigen::MatrixXcd W = F.adjoint() * F;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericFailure("eigensolver failed on H^H Phi H");
    const Eigen::VectorXd ev = es.eigenvalues();
    if (!(ev(0) > 1e-13 * ev(ev.size() - 1)))
        throw SingularMatrix("H^H Phi H is rank deficient", INFINITY);
    return ev;
}

}  // namespace

RateEstimate mc_rate(const Scenario& s, const McOptions& opt) {
    s.link.check();
    const std::size_t K = s.K();
    const TrialTable table = run_trials(s.P(), K, opt, K + 1, [&](const Eigen::MatrixXcd& H, double* out) {
        const Eigen::VectorXd snr = zf_snr(compose(s, H), s.link.snr_ut);
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            out[k + 1] = std::log2(1.0 + snr(static_cast<Eigen::Index>(k)));
            sum += out[k + 1];
        }
        out[0] = sum;
    });
    std::vector<std::string> names{"rate_sum"};
    for (std::size_t k = 0; k < K; ++k) names.push_back(fmt::format("rate_ut{}", k + 1));
    dump(table, names, opt);
    RateEstimate r;
    r.sum = summarise(table, 0, s, opt);
    for (std::size_t k = 0; k < K; ++k) r.per_user.push_back(summarise(table, k + 1, s, opt));
    return r;
}

MetricEstimate mc_ser(const Scenario& s, const McOptions& opt) {
    s.link.check();
    const std::size_t K = s.K();
    const TrialTable table = run_trials(s.P(), K, opt, 1, [&](const Eigen::MatrixXcd& H, double* out) {
        const Eigen::VectorXd snr = zf_snr(compose(s, H), s.link.snr_ut);
        double v = 0.0;
        for (std::size_t k = 0; k < K; ++k) v += ser_term(s.link.modulation_for(k), snr(static_cast<Eigen::Index>(k)));
        out[0] = v / static_cast<double>(K);
    });
    dump(table, {"ser"}, opt);
    return summarise(table, 0, s, opt);
}

MetricEstimate mc_outage(const Scenario& s, const McOptions& opt) {
    s.link.check();
    const std::size_t K = s.K();
    const double th = s.link.snr_th;
    const TrialTable table = run_trials(s.P(), K, opt, 1, [&](const Eigen::MatrixXcd& H, double* out) {
        const Eigen::VectorXd snr = zf_snr(compose(s, H), s.link.snr_ut);
        out[0] = static_cast<double>((snr.array() <= th).count()) / static_cast<double>(K);
    });
    dump(table, {"outage"}, opt);
    return summarise(table, 0, s, opt);
}

MetricEstimate mc_ser_eigen(const Scenario& s, const McOptions& opt) {
    s.link.check();
    const std::size_t K = s.K();
    const TrialTable table = run_trials(s.P(), K, opt, 1, [&](const Eigen::MatrixXcd& H, double* out) {
        const Eigen::VectorXd ev = w_eigenvalues(s, H);
        double v = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            for (Eigen::Index j = 0; j < ev.size(); ++j)
                v += ser_term(s.link.modulation_for(k),
                              s.link.snr_ut * s.link.beta(static_cast<Eigen::Index>(k)) * ev(j));
        out[0] = v / static_cast<double>(K * K);
    });
    dump(table, {"ser_eigen"}, opt);
    return summarise(table, 0, s, opt);
}

MetricEstimate mc_outage_eigen(const Scenario& s, const McOptions& opt) {
    s.link.check();
    const std::size_t K = s.K();
    const TrialTable table = run_trials(s.P(), K, opt, 1, [&](const Eigen::MatrixXcd& H, double* out) {
        const Eigen::VectorXd ev = w_eigenvalues(s, H);
        double v = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            for (Eigen::Index j = 0; j < ev.size(); ++j)
                v += (s.link.snr_ut * s.link.beta(static_cast<Eigen::Index>(k)) * ev(j) <= s.link.snr_th);
        out[0] = v / static_cast<double>(K * K);
    });
    dump(table, {"outage_eigen"}, opt);
    return summarise(table, 0, s, opt);
}

MetricEstimate mc_gain(const Scenario& s, const Scenario& s_min, const McOptions& opt) {
    s.link.check();
    if (s.P() != s_min.P()) throw InvalidArgument("mc_gain: scenarios need the same number of directions");
    const double scale = s.link.snr_ut * s.link.beta(0);
    const TrialTable table = run_trials(s.P(), 1, opt, 1, [&](const Eigen::MatrixXcd& h, double* out) {
        out[0] = scale * ((s.CA * h).squaredNorm() - (s_min.CA * h).squaredNorm());
    });
    dump(table, {"gain"}, opt);
    return summarise(table, 0, s, opt);
}

DetectorSnrs sample_detector_snrs(const Scenario& s, const McOptions& opt) {
    s.link.check();
    const std::size_t K = s.K();
    const TrialTable table = run_trials(s.P(), K, opt, 2 * K, [&](const Eigen::MatrixXcd& H, double* out) {
        const Eigen::MatrixXcd G = compose(s, H);
        const Eigen::VectorXd zf = zf_snr(G, s.link.snr_ut);
        for (std::size_t k = 0; k < K; ++k) {
            out[k] = zf(static_cast<Eigen::Index>(k));
            out[K + k] = mrc_snr(G, k, s.link.snr_ut);
        }
    });
    DetectorSnrs d;
    d.zf.resize(static_cast<Eigen::Index>(opt.trials), static_cast<Eigen::Index>(K));
    d.mrc.resize(static_cast<Eigen::Index>(opt.trials), static_cast<Eigen::Index>(K));
    for (std::size_t t = 0; t < opt.trials; ++t)
        for (std::size_t k = 0; k < K; ++k) {
            d.zf(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = table.data[t * 2 * K + k];
            d.mrc(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = table.data[t * 2 * K + K + k];
        }
    return d;
}

EigenSample eigen_histogram(std::size_t M, double R, std::size_t layouts, std::uint64_t seed,
                            const HistogramOptions& opt) {
    if (layouts < 1) throw InvalidArgument("eigen_histogram: need at least one layout");
    EigenSample out;
    out.spectra.resize(layouts);
    out.traces.resize(layouts);
    parallel_for(layouts, opt.threads, [&](std::size_t l) {
        const AntennaLayout layout = sample_bpp(M, R, derive_seed(seed, Stream::layout, l), false);
        const IncidentDirections dirs = draw_directions(opt.P, derive_seed(seed, Stream::directions, l), opt.law);
        const Eigen::MatrixXcd A = steering_matrix(layout, dirs, opt.coupling.wavelength);
        const Eigen::MatrixXcd C = coupling_matrix(impedance_matrix(layout, opt.coupling), opt.coupling);
        const CorrelationSpectrum cs = correlation(C, A);
        out.spectra[l] = cs.tau;
        out.traces[l] = cs.Psi.trace().real();
    });
    return out;
}

Histogram bin_values(const std::vector<double>& values, std::size_t bins) {
    if (bins < 1) throw InvalidArgument("bin_values: need at least one bin");
    if (values.empty()) throw InvalidArgument("bin_values: no values");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = (*hi_it > lo) ? *hi_it : lo + 1.0;
    Histogram h;
    h.counts.assign(bins, 0);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins));
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

}  // namespace mimo
