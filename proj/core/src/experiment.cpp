#include "mimo/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "mimo/errors.hpp"
#include "mimo/rng.hpp"

namespace mimo {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_double(const std::string& text, const char* what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty() || !std::isfinite(v))
        throw InvalidArgument(fmt::format("{}: cannot parse '{}' as a number", what, text));
    return v;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw InvalidArgument(fmt::format("{}: cannot parse '{}' as a non-negative integer", what, text));
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

constexpr std::size_t default_points = 19;

std::vector<double> span(double lo, double hi, double step, const char* what) {
    if (!(step > 0.0) || hi < lo) throw InvalidArgument(fmt::format("{}: bad range", what));
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
}

std::string fmt_num(double v) {
    if (!std::isfinite(v)) throw NumericFailure("non-finite value in CSV output");
    return fmt::format("{:.12g}", v);
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += f(v[i]);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- Length and lists

Length Length::parse(const std::string& text) {
    std::string t = trim(text);
    Length l;
    for (const char* suffix : {"\xCE\xBB", "lambda", "lam"}) {
        const std::string s(suffix);
        if (t.size() > s.size() && t.compare(t.size() - s.size(), s.size(), s) == 0) {
            l.wavelengths = true;
            t = t.substr(0, t.size() - s.size());
            break;
        }
    }
    l.value = parse_double(t, "length");
    return l;
}

std::string Length::str() const {
    return wavelengths ? fmt::format("{:.12g}lam", value) : fmt::format("{:.12g}", value);
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
    std::vector<std::size_t> out;
    if (text.find(':') != std::string::npos) {
        const auto p = split(text, ':');
        if (p.size() < 2 || p.size() > 3) throw InvalidArgument("count range must be a:b or a:b:step");
        const auto lo = parse_u64(p[0], "range start");
        const auto hi = parse_u64(p[1], "range end");
        const auto step = p.size() == 3 ? parse_u64(p[2], "range step") : 1;
        if (step == 0 || hi < lo) throw InvalidArgument("bad count range");
        for (auto v = lo; v <= hi; v += step) out.push_back(static_cast<std::size_t>(v));
        return out;
    }
    for (const auto& s : split(text, ',')) out.push_back(static_cast<std::size_t>(parse_u64(s, "count")));
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

std::vector<double> parse_real_list(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        const auto p = split(text, ':');
        if (p.size() < 2 || p.size() > 3) throw InvalidArgument("range must be a:b or a:b:step");
        const double lo = parse_double(p[0], "range start");
        const double hi = parse_double(p[1], "range end");
        const double step = p.size() == 3 ? parse_double(p[2], "range step")
                                          : (hi - lo) / static_cast<double>(default_points - 1);
        return span(lo, hi, step, "range");
    }
    std::vector<double> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_double(s, "value"));
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

std::vector<Length> parse_length_list(const std::string& text) {
    std::vector<Length> out;
    if (text.find(':') != std::string::npos) {
        const auto p = split(text, ':');
        if (p.size() < 2 || p.size() > 3) throw InvalidArgument("range must be a:b or a:b:step");
        const Length lo = Length::parse(p[0]);
        Length hi = Length::parse(p[1]);
        // a unit on either end applies to the whole range
        const bool lam = lo.wavelengths || hi.wavelengths;
        Length step{(hi.value - lo.value) / static_cast<double>(default_points - 1), lam};
        if (p.size() == 3) step = Length::parse(p[2]);
        for (double v : span(lo.value, hi.value, step.value, "length range")) out.push_back({v, lam});
        return out;
    }
    for (const auto& s : split(text, ',')) out.push_back(Length::parse(s));
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

// ---------------------------------------------------------------- config

double db_to_linear(double dB) { return std::pow(10.0, dB / 10.0); }

double ExperimentConfig::wavelength() const { return speed_of_light / carrier_frequency; }

CouplingParams ExperimentConfig::coupling() const {
    CouplingParams p = CouplingParams::at_frequency(carrier_frequency);
    p.dipole_length = dipole_l.metres(p.wavelength);
    p.Z0 = Z0;
    p.ZL = ZL;
    return p;
}

LargeScaleParams ExperimentConfig::large_scale() const {
    LargeScaleParams p;
    p.l_resist = l_resist;
    p.l_min = l_min;
    p.l_max = l_max;
    p.exponent = pathloss_v;
    p.sigma_dB = sigma_shadow_dB;
    return p;
}

void ExperimentConfig::check() const {
    detail::check_positive(carrier_frequency, "carrier_frequency");
    if (P < 1) throw InvalidArgument("P must be at least 1");
    if (K < 1) throw InvalidArgument("K must be at least 1");
    detail::check_positive(Z0, "Z0");
    detail::check_positive(ZL, "ZL");
    detail::check_positive(dipole_l.value, "dipole_l");
    if (sigma_shadow_dB < 0.0) throw InvalidArgument("sigma_shadow_dB must be non-negative");
    detail::check_positive(l_resist, "l_resist");
    if (!(l_min >= l_resist) || !(l_max >= l_min))
        throw InvalidArgument("need l_resist <= l_min <= l_max");
    detail::check_positive(pathloss_v, "pathloss_v");
    if (M_min < 1) throw InvalidArgument("M_min must be at least 1");
    detail::check_positive(R_min.value, "R_min");
    if (trials < 1) throw InvalidArgument("trials must be at least 1");
    for (auto m : M)
        if (m < 1) throw InvalidArgument("M values must be positive");
    for (const auto& r : R) detail::check_positive(r.value, "R");
    for (double z : zeta)
        if (z < 0.0) throw InvalidArgument("zeta values must be non-negative");
    if (bins < 1) throw InvalidArgument("bins must be at least 1");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value) {
    const std::string key = lower(trim(key_in));
    const std::string v = trim(value);
    if (key == "carrier_frequency") cfg.carrier_frequency = parse_double(v, "carrier_frequency");
    else if (key == "p") cfg.P = static_cast<std::size_t>(parse_u64(v, "P"));
    else if (key == "k") cfg.K = static_cast<std::size_t>(parse_u64(v, "K"));
    else if (key == "snr_ut_db") cfg.snr_ut_dB = parse_double(v, "SNR_UT_dB");
    else if (key == "z0") cfg.Z0 = parse_double(v, "Z0");
    else if (key == "zl") cfg.ZL = parse_double(v, "ZL");
    else if (key == "dipole_l") cfg.dipole_l = Length::parse(v);
    else if (key == "sigma_shadow_db") cfg.sigma_shadow_dB = parse_double(v, "sigma_shadow_dB");
    else if (key == "l_resist") cfg.l_resist = parse_double(v, "l_resist");
    else if (key == "l_min") cfg.l_min = parse_double(v, "l_min");
    else if (key == "l_max") cfg.l_max = parse_double(v, "l_max");
    else if (key == "l_range") {
        const auto p = split(v, ':');
        if (p.size() != 2) throw InvalidArgument("l_range must be min:max");
        cfg.l_min = parse_double(p[0], "l_range");
        cfg.l_max = parse_double(p[1], "l_range");
    } else if (key == "pathloss_v") cfg.pathloss_v = parse_double(v, "pathloss_v");
    else if (key == "snr_th_db") cfg.snr_th_dB = parse_double(v, "SNR_th_dB");
    else if (key == "m_min") cfg.M_min = static_cast<std::size_t>(parse_u64(v, "M_min"));
    else if (key == "r_min") cfg.R_min = Length::parse(v);
    else if (key == "seed") cfg.seed = parse_u64(v, "seed");
    else if (key == "trials") cfg.trials = static_cast<std::size_t>(parse_u64(v, "trials"));
    else if (key == "m") cfg.M = parse_count_list(v);
    else if (key == "r") cfg.R = parse_length_list(v);
    else if (key == "zeta") cfg.zeta = parse_real_list(v);
    else if (key == "snr_db" || key == "snr") cfg.snr_dB = parse_real_list(v);
    else if (key == "layouts") cfg.layouts = static_cast<std::size_t>(parse_u64(v, "layouts"));
    else if (key == "bins") cfg.bins = static_cast<std::size_t>(parse_u64(v, "bins"));
    else if (key == "elevation") {
        if (lower(v) == "uniform") cfg.elevation = ElevationLaw::uniform;
        else if (lower(v) == "cosine") cfg.elevation = ElevationLaw::cosine;
        else throw InvalidArgument("elevation must be uniform or cosine");
    } else
        throw InvalidArgument(fmt::format("unknown config key '{}'", key_in));
}

void load_ini(ExperimentConfig& cfg, std::istream& is) {
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(fmt::format("config line {}: expected key = value", no));
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(fmt::format("config line {}: {}", no, e.what()));
        }
    }
}

ExperimentConfig load_ini_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument(fmt::format("cannot open config file '{}'", path));
    ExperimentConfig cfg;
    load_ini(cfg, in);
    return cfg;
}

std::string canonical_text(const ExperimentConfig& c) {
    std::map<std::string, std::string> kv;
    kv["carrier_frequency"] = fmt_num(c.carrier_frequency);
    kv["p"] = std::to_string(c.P);
    kv["k"] = std::to_string(c.K);
    kv["snr_ut_db"] = fmt_num(c.snr_ut_dB);
    kv["z0"] = fmt_num(c.Z0);
    kv["zl"] = fmt_num(c.ZL);
    kv["dipole_l"] = c.dipole_l.str();
    kv["sigma_shadow_db"] = fmt_num(c.sigma_shadow_dB);
    kv["l_resist"] = fmt_num(c.l_resist);
    kv["l_min"] = fmt_num(c.l_min);
    kv["l_max"] = fmt_num(c.l_max);
    kv["pathloss_v"] = fmt_num(c.pathloss_v);
    kv["snr_th_db"] = fmt_num(c.snr_th_dB);
    kv["m_min"] = std::to_string(c.M_min);
    kv["r_min"] = c.R_min.str();
    kv["seed"] = std::to_string(c.seed);
    kv["trials"] = std::to_string(c.trials);
    kv["m"] = join<std::size_t>(c.M, [](const std::size_t& m) { return std::to_string(m); });
    kv["r"] = join<Length>(c.R, [](const Length& l) { return l.str(); });
    kv["zeta"] = join<double>(c.zeta, [](const double& z) { return fmt_num(z); });
    kv["snr_db"] = join<double>(c.snr_dB, [](const double& z) { return fmt_num(z); });
    kv["layouts"] = std::to_string(c.layouts);
    kv["bins"] = std::to_string(c.bins);
    kv["elevation"] = c.elevation == ElevationLaw::uniform ? "uniform" : "cosine";
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string config_digest(const ExperimentConfig& cfg) {
    // FNV-1a, 64 bit
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical_text(cfg)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------- points

AntennaLayout layout_for(std::size_t M, double R, std::optional<double> zeta, std::uint64_t seed) {
    if (!zeta || *zeta == bpp_zeta) return sample_bpp(M, R, seed);
    if (*zeta == 0.0) return make_regular(M, R);
    return make_with_target_zeta(M, R, *zeta, 0.05 * std::max(1.0, *zeta), seed);
}

IncidentDirections shared_directions(const ExperimentConfig& cfg) {
    return draw_directions(cfg.P, cfg.seed, cfg.elevation);
}

Eigen::VectorXd shared_beta(const ExperimentConfig& cfg) {
    return draw_large_scale(cfg.K, cfg.large_scale(), cfg.seed);
}

PointSetup setup_point(const ExperimentConfig& cfg, const AntennaLayout& layout, bool coupling) {
    cfg.check();
    PointSetup p;
    p.layout = layout;
    const CouplingParams cp = cfg.coupling();
    p.A = steering_matrix(layout, shared_directions(cfg), cp.wavelength);
    const auto M = static_cast<Eigen::Index>(layout.size());
    p.C = coupling ? coupling_matrix(impedance_matrix(layout, cp), cp)
                   : Eigen::MatrixXcd::Identity(M, M).eval();
    p.corr = correlation(p.C, p.A);
    p.spectrum = prepare_spectrum(p.corr.tau);
    p.link.snr_ut = db_to_linear(cfg.snr_ut_dB);
    p.link.snr_th = db_to_linear(cfg.snr_th_dB);
    p.link.beta = shared_beta(cfg);
    return p;
}

Scenario scenario_for(const PointSetup& p, const ExperimentConfig& cfg) {
    return make_scenario(p.C, p.A, p.link, config_digest(cfg));
}

McOptions mc_options(const ExperimentConfig& cfg, unsigned threads) {
    McOptions o;
    o.trials = cfg.trials;
    o.seed = cfg.seed;
    o.threads = threads;
    return o;
}

RatePoint rate_point(const ExperimentConfig& cfg, const AntennaLayout& layout, bool coupling,
                     unsigned threads) {
    const PointSetup p = setup_point(cfg, layout, coupling);
    RatePoint r;
    r.M = layout.size();
    r.M_eff = p.spectrum.tau.size();
    r.R_lambda = layout.radius / cfg.wavelength();
    r.zeta = layout.zeta;
    r.lower_bound = rate_lower_bound(p.link, p.spectrum.tau).sum();
    r.mc = mc_rate(scenario_for(p, cfg), mc_options(cfg, threads)).sum;
    r.asymptotic = asymptotic_rate(p.link, p.A, p.C);
    return r;
}

GainPoint gain_point(const ExperimentConfig& cfg, const AntennaLayout& layout,
                     const AntennaLayout& reference, unsigned threads) {
    const PointSetup p = setup_point(cfg, layout);
    const PointSetup q = setup_point(cfg, reference);
    GainPoint g;
    g.M = layout.size();
    g.R_lambda = layout.radius / cfg.wavelength();
    g.zeta = layout.zeta;
    g.closed_form = ergodic_gain(p.spectrum.tau, q.spectrum.tau, p.link.snr_ut, p.link.beta(0));
    g.mc = mc_gain(scenario_for(p, cfg), scenario_for(q, cfg), mc_options(cfg, threads));
    return g;
}

std::vector<SerPoint> ser_points(const ExperimentConfig& cfg, const PointSetup& setup,
                                 const std::vector<double>& snr_dB, unsigned threads) {
    const EigenDensity f = EigenDensity::multi(setup.spectrum.tau, setup.link.K());
    const double trace = channel_trace(setup.A, setup.C);
    std::vector<SerPoint> out(snr_dB.size());
    for (std::size_t i = 0; i < snr_dB.size(); ++i) {
        ExperimentConfig c = cfg;
        c.snr_ut_dB = snr_dB[i];
        PointSetup p = setup;
        p.link.snr_ut = db_to_linear(snr_dB[i]);
        const Scenario s = scenario_for(p, c);
        SerPoint& r = out[i];
        r.snr_dB = snr_dB[i];
        r.closed_form = ser_closed_form(p.link, f);
        r.terms = ser_closed_terms(p.link, f);
        r.mc = mc_ser(s, mc_options(c, threads));
        r.mc_eigen = mc_ser_eigen(s, mc_options(c, threads));
        r.asymptotic = asymptotic_ser(p.link, trace);
    }
    return out;
}

std::vector<OutagePoint> outage_points(const ExperimentConfig& cfg, const PointSetup& setup,
                                       const std::vector<double>& snr_dB, unsigned threads) {
    const EigenDensity f = EigenDensity::multi(setup.spectrum.tau, setup.link.K());
    std::vector<OutagePoint> out(snr_dB.size());
    for (std::size_t i = 0; i < snr_dB.size(); ++i) {
        ExperimentConfig c = cfg;
        c.snr_ut_dB = snr_dB[i];
        PointSetup p = setup;
        p.link.snr_ut = db_to_linear(snr_dB[i]);
        const Scenario s = scenario_for(p, c);
        OutagePoint& r = out[i];
        r.snr_dB = snr_dB[i];
        r.closed_form = outage_closed_form(p.link, f, OutageExponent::corrected);
        r.exp3 = outage_closed_form(p.link, f, OutageExponent::minus_three);
        r.quadrature = outage_quadrature(p.link, f);
        r.mc = mc_outage(s, mc_options(c, threads));
        r.mc_eigen = mc_outage_eigen(s, mc_options(c, threads));
    }
    return out;
}

std::vector<EtaPoint> eta_points(const ExperimentConfig& cfg, std::size_t M,
                                 const std::vector<Length>& R, const std::vector<double>& zeta,
                                 std::size_t layouts) {
    cfg.check();
    if (layouts < 1) throw InvalidArgument("eta: need at least one layout per point");
    const double lambda = cfg.wavelength();
    const CouplingParams cp = cfg.coupling();
    const IncidentDirections dirs = shared_directions(cfg);
    const std::size_t nR = R.size();
    const std::size_t tasks = zeta.size() * nR * layouts;
    std::vector<double> eta(tasks, 0.0);
    parallel_for(tasks, 0, [&](std::size_t t) {
        const std::size_t zi = t / (nR * layouts);
        const std::size_t ri = (t / layouts) % nR;
        const std::size_t l = t % layouts;
        if (zeta[zi] == 0.0 && l > 0) return;  // the regular grid is deterministic
        const double Rm = R[ri].metres(lambda);
        const AntennaLayout layout = layout_for(M, Rm, zeta[zi], derive_seed(cfg.seed, Stream::layout, t));
        const Eigen::MatrixXcd A = steering_matrix(layout, dirs, lambda);
        const Eigen::MatrixXcd C = coupling_matrix(impedance_matrix(layout, cp), cp);
        const Eigen::MatrixXcd CA = C * A;
        eta[t] = matrix_correlation_coefficient(CA * CA.adjoint());
    });
    std::vector<EtaPoint> out;
    for (std::size_t zi = 0; zi < zeta.size(); ++zi)
        for (std::size_t ri = 0; ri < nR; ++ri) {
            const std::size_t n = zeta[zi] == 0.0 ? 1 : layouts;
            const double* x = eta.data() + (zi * nR + ri) * layouts;
            EtaPoint e;
            e.R_lambda = R[ri].metres(lambda) / lambda;
            e.zeta = zeta[zi];
            e.layouts = n;
            e.mean = pairwise_sum(x, n) / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t l = 0; l < n; ++l) ss += (x[l] - e.mean) * (x[l] - e.mean);
            e.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
            out.push_back(e);
        }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw InvalidArgument("fit_line: need at least 3 points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_line: x values are all equal");
    LineFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        sse += r * r;
    }
    f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
    f.t = f.slope_se > 0.0 ? f.slope / f.slope_se : (f.slope < 0 ? -INFINITY : INFINITY);
    return f;
}

double t_critical_95(std::size_t dof) {
    if (dof < 1) throw InvalidArgument("t_critical_95: dof must be positive");
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, 0.025));
}

std::vector<double> crossings(const std::vector<double>& x, const std::vector<double>& a,
                              const std::vector<double>& b) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double d0 = a[i] - b[i];
        const double d1 = a[i + 1] - b[i + 1];
        if (d0 == 0.0) out.push_back(x[i]);
        else if (d0 * d1 < 0.0) out.push_back(x[i] + (x[i + 1] - x[i]) * d0 / (d0 - d1));
    }
    return out;
}

// ---------------------------------------------------------------- sweeps

namespace {

std::vector<std::size_t> or_default(const std::vector<std::size_t>& v, std::vector<std::size_t> d) {
    return v.empty() ? d : v;
}
std::vector<Length> or_default(const std::vector<Length>& v, std::vector<Length> d) {
    return v.empty() ? d : v;
}
std::vector<double> or_default(const std::vector<double>& v, std::vector<double> d) {
    return v.empty() ? d : v;
}

std::vector<Length> lambda_span(double lo, double hi, double step) {
    std::vector<Length> out;
    for (double v : span(lo, hi, step, "R")) out.push_back({v, true});
    return out;
}

SweepResult sweep_eigen_hist(const ExperimentConfig& cfg) {
    const std::size_t M = or_default(cfg.M, {2}).front();
    const Length R = or_default(cfg.R, {{1.0, true}}).front();
    const std::size_t layouts = cfg.layouts ? cfg.layouts : 10000;
    if (layouts < 100) throw InvalidArgument("eigen-hist needs at least 100 layouts");
    HistogramOptions ho;
    ho.P = cfg.P;
    ho.coupling = cfg.coupling();
    ho.law = cfg.elevation;
    const EigenSample s = eigen_histogram(M, R.metres(cfg.wavelength()), layouts, cfg.seed, ho);
    SweepResult out;
    out.csv = "tau_index,bin_lo,bin_hi,count,density\n";
    for (std::size_t i = 0; i < M; ++i) {
        std::vector<double> v;
        for (const auto& sp : s.spectra) v.push_back(sp(static_cast<Eigen::Index>(i)));
        const Histogram h = bin_values(v, cfg.bins);
        for (std::size_t b = 0; b < cfg.bins; ++b) {
            const double w = h.edges[b + 1] - h.edges[b];
            out.csv += fmt::format("{},{},{},{},{}\n", i + 1, fmt_num(h.edges[b]), fmt_num(h.edges[b + 1]),
                                   h.counts[b], fmt_num(static_cast<double>(h.counts[b]) / (static_cast<double>(layouts) * w)));
        }
        out.summary.push_back(fmt::format("tau_{} mean = {:.4f} over {} layouts", i + 1,
                                          pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size()), layouts));
    }
    return out;
}

SweepResult sweep_eta(const ExperimentConfig& cfg) {
    const std::size_t M = or_default(cfg.M, {100}).front();
    const auto R = or_default(cfg.R, lambda_span(0.5, 5.0, 0.25));
    const auto zeta = or_default(cfg.zeta, {0.0, bpp_zeta});
    const std::size_t layouts = cfg.layouts ? cfg.layouts : 20;
    const auto pts = eta_points(cfg, M, R, zeta, layouts);
    SweepResult out;
    out.csv = "R_lambda,zeta,eta_mean,eta_se,layouts\n";
    for (const auto& e : pts)
        out.csv += fmt::format("{},{},{},{},{}\n", fmt_num(e.R_lambda), fmt_num(e.zeta), fmt_num(e.mean),
                               fmt_num(e.std_error), e.layouts);
    std::vector<std::vector<double>> curves(zeta.size());
    std::vector<double> x;
    for (std::size_t i = 0; i < R.size(); ++i) x.push_back(pts[i].R_lambda);
    for (std::size_t z = 0; z < zeta.size(); ++z) {
        for (std::size_t i = 0; i < R.size(); ++i) curves[z].push_back(pts[z * R.size() + i].mean);
        if (R.size() >= 3) {
            const LineFit f = fit_line(x, curves[z]);
            out.summary.push_back(fmt::format("zeta {}: slope {:.4g} per R/lambda, t = {:.2f}", zeta[z], f.slope, f.t));
        }
    }
    if (zeta.size() >= 2) {
        const auto cx = crossings(x, curves[0], curves[1]);
        std::string s = fmt::format("crossings of zeta {} and zeta {}:", zeta[0], zeta[1]);
        if (cx.empty()) s += " none";
        for (double c : cx) s += fmt::format(" R/lambda = {:.3f}", c);
        out.summary.push_back(s);
    }
    return out;
}

SweepResult sweep_gain(const ExperimentConfig& cfg) {
    const auto Ms = or_default(cfg.M, {4, 8, 16, 32, 64});
    const auto Rs = or_default(cfg.R, {{1.0, true}, {2.0, true}, {3.0, true}});
    const double lambda = cfg.wavelength();
    const AntennaLayout ref = sample_bpp(cfg.M_min, cfg.R_min.metres(lambda), derive_seed(cfg.seed, Stream::layout, 0));
    const std::size_t n = Ms.size() * Rs.size();
    std::vector<GainPoint> pts(n);
    parallel_for(n, 0, [&](std::size_t i) {
        const AntennaLayout l = sample_bpp(Ms[i / Rs.size()], Rs[i % Rs.size()].metres(lambda),
                                           derive_seed(cfg.seed, Stream::layout, i + 1));
        pts[i] = gain_point(cfg, l, ref, 1);
    });
    SweepResult out;
    out.csv = "M,R_lambda,zeta,gain_cf,gain_mc,gain_mc_se\n";
    std::size_t positive = 0;
    for (const auto& g : pts) {
        out.csv += fmt::format("{},{},{},{},{},{}\n", g.M, fmt_num(g.R_lambda), fmt_num(g.zeta),
                               fmt_num(g.closed_form), fmt_num(g.mc.value), fmt_num(g.mc.std_error));
        positive += g.closed_form > 0.0;
    }
    out.summary.push_back(fmt::format("reference M_min = {}, R_min = {:.3f} lambda; gain positive at {}/{} points",
                                      cfg.M_min, cfg.R_min.metres(lambda) / lambda, positive, n));
    return out;
}

std::vector<RatePoint> rate_sweep_points(const ExperimentConfig& cfg, const std::vector<std::size_t>& Ms,
                                         const std::vector<Length>& Rs, const std::vector<double>& zeta,
                                         bool coupling) {
    const double lambda = cfg.wavelength();
    std::vector<std::optional<double>> zs;
    if (zeta.empty()) zs.push_back(std::nullopt);
    for (double z : zeta) zs.push_back(z);
    const std::size_t n = Ms.size() * Rs.size() * zs.size();
    std::vector<RatePoint> pts(n);
    parallel_for(n, 0, [&](std::size_t i) {
        const std::size_t mi = i % Ms.size();
        const std::size_t ri = (i / Ms.size()) % Rs.size();
        const std::size_t zi = i / (Ms.size() * Rs.size());
        const AntennaLayout l = layout_for(Ms[mi], Rs[ri].metres(lambda), zs[zi],
                                           derive_seed(cfg.seed, Stream::layout, i));
        pts[i] = rate_point(cfg, l, coupling, 1);
    });
    return pts;
}

std::string max_summary(const std::vector<RatePoint>& pts, std::size_t from, std::size_t count) {
    std::size_t best = from;
    for (std::size_t i = from; i < from + count; ++i)
        if (pts[i].lower_bound > pts[best].lower_bound) best = i;
    const bool interior = best != from && best != from + count - 1;
    return fmt::format("R = {:.3f} lambda: bound peaks at M = {} ({:.3f} bits/s/Hz){}", pts[from].R_lambda,
                       pts[best].M, pts[best].lower_bound, interior ? ", interior maximum" : "");
}

SweepResult sweep_rate(const ExperimentConfig& cfg) {
    const auto Ms = or_default(cfg.M, parse_count_list("20:400:20"));
    const auto Rs = or_default(cfg.R, {{1.0, true}});
    const auto pts = rate_sweep_points(cfg, Ms, Rs, cfg.zeta, true);
    SweepResult out;
    out.csv = "M,R,zeta,rate_lb,rate_mc,rate_mc_se,rate_asym\n";
    for (const auto& r : pts)
        out.csv += fmt::format("{},{},{},{},{},{},{}\n", r.M, fmt_num(r.R_lambda * cfg.wavelength()), fmt_num(r.zeta),
                               fmt_num(r.lower_bound), fmt_num(r.mc.value), fmt_num(r.mc.std_error),
                               fmt_num(r.asymptotic));
    for (std::size_t from = 0; from < pts.size(); from += Ms.size())
        out.summary.push_back(max_summary(pts, from, Ms.size()));
    return out;
}

SweepResult sweep_rate_coupling(const ExperimentConfig& cfg) {
    const auto Ms = or_default(cfg.M, parse_count_list("20:200:20"));
    const auto Rs = or_default(cfg.R, {{1.0, true}});
    const auto on = rate_sweep_points(cfg, Ms, Rs, cfg.zeta, true);
    const auto off = rate_sweep_points(cfg, Ms, Rs, cfg.zeta, false);
    SweepResult out;
    out.csv = "M,R_lambda,zeta,coupling,rate_lb,rate_mc,rate_mc_se\n";
    double loss = 0.0;
    for (std::size_t i = 0; i < on.size(); ++i) {
        for (const auto* r : {&on[i], &off[i]})
            out.csv += fmt::format("{},{},{},{},{},{},{}\n", r->M, fmt_num(r->R_lambda), fmt_num(r->zeta),
                                   r == &on[i] ? "on" : "off", fmt_num(r->lower_bound), fmt_num(r->mc.value),
                                   fmt_num(r->mc.std_error));
        loss += off[i].mc.value - on[i].mc.value;
    }
    out.summary.push_back(fmt::format("mean MC sum-rate change from coupling: {:.4f} bits/s/Hz",
                                      -loss / static_cast<double>(on.size())));
    return out;
}

PointSetup single_point(const ExperimentConfig& cfg, std::size_t M_default) {
    const std::size_t M = or_default(cfg.M, {M_default}).front();
    const Length R = or_default(cfg.R, {{1.0, true}}).front();
    std::optional<double> z;
    if (!cfg.zeta.empty()) z = cfg.zeta.front();
    const AntennaLayout l = layout_for(M, R.metres(cfg.wavelength()), z, derive_seed(cfg.seed, Stream::layout, 0));
    return setup_point(cfg, l);
}

SweepResult sweep_ser(const ExperimentConfig& cfg) {
    const PointSetup p = single_point(cfg, 20);
    const auto snr = or_default(cfg.snr_dB, parse_real_list("0:15:1"));
    const auto pts = ser_points(cfg, p, snr);
    SweepResult out;
    out.csv = "snr_dB,M,K,R_lambda,ser_cf,ser_terms,ser_mc,ser_mc_se,ser_mc_eigen,ser_mc_eigen_se,ser_asym\n";
    double worst = 0.0;
    for (const auto& r : pts) {
        out.csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", fmt_num(r.snr_dB), p.layout.size(), p.link.K(),
                               fmt_num(p.layout.radius / cfg.wavelength()), fmt_num(r.closed_form), fmt_num(r.terms),
                               fmt_num(r.mc.value), fmt_num(r.mc.std_error), fmt_num(r.mc_eigen.value),
                               fmt_num(r.mc_eigen.std_error), fmt_num(r.asymptotic));
        if (r.mc.std_error > 0) worst = std::max(worst, std::fabs(r.closed_form - r.mc.value) / r.mc.std_error);
    }
    out.summary.push_back(fmt::format("largest |closed form - ZF MC| = {:.2f} SE", worst));
    return out;
}

SweepResult sweep_outage(const ExperimentConfig& cfg) {
    const PointSetup p = single_point(cfg, 20);
    const auto snr = or_default(cfg.snr_dB, parse_real_list("0:15:1"));
    const auto pts = outage_points(cfg, p, snr);
    SweepResult out;
    out.csv = "snr_dB,M,K,R_lambda,snr_th_dB,outage_cf,outage_exp3,outage_quad,outage_mc,outage_mc_se,"
              "outage_mc_eigen,outage_mc_eigen_se\n";
    double dev = 0.0, dev_exp3 = 0.0;
    for (const auto& r : pts) {
        out.csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", fmt_num(r.snr_dB), p.layout.size(), p.link.K(),
                               fmt_num(p.layout.radius / cfg.wavelength()), fmt_num(cfg.snr_th_dB),
                               fmt_num(r.closed_form), fmt_num(r.exp3), fmt_num(r.quadrature), fmt_num(r.mc.value),
                               fmt_num(r.mc.std_error), fmt_num(r.mc_eigen.value), fmt_num(r.mc_eigen.std_error));
        dev = std::max(dev, std::fabs(r.closed_form - r.quadrature));
        dev_exp3 = std::max(dev_exp3, std::fabs(r.exp3 - r.quadrature));
    }
    out.summary.push_back(fmt::format("closed terms vs quadrature: corrected exponent {:.2e}, exponent -3 {:.2e}",
                                      dev, dev_exp3));
    return out;
}

}  // namespace

SweepResult run_sweep(const std::string& name, const ExperimentConfig& cfg) {
    cfg.check();
    SweepResult r;
    if (name == "eigen-hist") r = sweep_eigen_hist(cfg);
    else if (name == "eta") r = sweep_eta(cfg);
    else if (name == "gain") r = sweep_gain(cfg);
    else if (name == "rate") r = sweep_rate(cfg);
    else if (name == "rate-coupling") r = sweep_rate_coupling(cfg);
    else if (name == "ser") r = sweep_ser(cfg);
    else if (name == "outage") r = sweep_outage(cfg);
    else throw InvalidArgument(fmt::format("unknown sweep '{}'", name));
    r.summary.push_back(fmt::format("seed = {}, config digest = {}", cfg.seed, config_digest(cfg)));
    return r;
}

}  // namespace mimo
