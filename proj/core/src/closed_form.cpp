#include "mimo/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <fmt/format.h>

#include "mimo/errors.hpp"
#include "mimo/special.hpp"

namespace mimo {

namespace bmp = boost::multiprecision;

// ---------------------------------------------------------------- spectrum

void check_spectrum(const std::vector<double>& tau) {
    if (tau.empty()) throw DegenerateSpectrum("empty spectrum");
    const double top = tau.back();
    if (!(top > 0.0) || !std::isfinite(top)) throw DegenerateSpectrum("largest eigenvalue must be positive");
    const double gap = spectrum_min_gap * top * (1.0 - 1e-9);
    if (!(tau.front() > 0.0)) throw DegenerateSpectrum("eigenvalues must be positive; drop zeros first");
    for (std::size_t i = 1; i < tau.size(); ++i) {
        if (!(tau[i] - tau[i - 1] >= gap))
            throw DegenerateSpectrum(fmt::format(
                "eigenvalues {} and {} are closer than {:g} * tau_max; perturb them (prepare_spectrum)",
                i, i + 1, spectrum_min_gap));
    }
}

PreparedSpectrum prepare_spectrum(const std::vector<double>& raw) {
    PreparedSpectrum out;
    out.diagnostics.input_size = raw.size();
    std::vector<double> t = raw;
    std::sort(t.begin(), t.end());
    if (t.empty() || !(t.back() > 0.0)) throw DegenerateSpectrum("spectrum has no positive eigenvalue");
    const double top = t.back();
    const double floor = spectrum_drop_ratio * top;
    std::vector<double> kept;
    for (double v : t) {
        if (v < floor)
            ++out.diagnostics.dropped;
        else
            kept.push_back(v);
    }
    const std::vector<double> original = kept;
    // Least-squares projection onto {gaps >= g}: with u_k = tau_k - k g the constraint is
    // u nondecreasing, so pool adjacent violators and shift back. Pools keep their mean,
    // i.e. a cluster is spread symmetrically about its centre.
    const double g = spectrum_min_gap * top * (1.0 + 1e-9);
    const std::size_t n = kept.size();
    std::vector<double> mean;
    std::vector<std::size_t> count;
    for (std::size_t k = 0; k < n; ++k) {
        mean.push_back(kept[k] - static_cast<double>(k) * g);
        count.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
            const double w1 = static_cast<double>(count[count.size() - 2]);
            const double w2 = static_cast<double>(count.back());
            const double m = (w1 * mean[mean.size() - 2] + w2 * mean.back()) / (w1 + w2);
            count[count.size() - 2] += count.back();
            mean[mean.size() - 2] = m;
            mean.pop_back();
            count.pop_back();
        }
    }
    std::size_t k = 0;
    for (std::size_t b = 0; b < mean.size(); ++b)
        for (std::size_t c = 0; c < count[b]; ++c, ++k) {
            // the floor only binds on the lowest pools; clamping keeps u monotone
            const double u = std::max(mean[b], floor);
            // untouched singletons keep their exact value
            if (count[b] > 1 || u != mean[b]) kept[k] = u + static_cast<double>(k) * g;
        }
    for (std::size_t k = 0; k < n; ++k) {
        if (kept[k] != original[k]) {
            ++out.diagnostics.spread;
            out.diagnostics.max_shift =
                std::max(out.diagnostics.max_shift, std::fabs(kept[k] - original[k]) / top);
        }
    }
    out.tau = std::move(kept);
    check_spectrum(out.tau);
    return out;
}

PreparedSpectrum prepare_spectrum(const Eigen::VectorXd& raw) {
    return prepare_spectrum(std::vector<double>(raw.data(), raw.data() + raw.size()));
}

// ---------------------------------------------------------------- density engine

namespace detail {

class DensityImpl {
public:
    virtual ~DensityImpl() = default;
    virtual std::size_t users() const = 0;
    virtual std::size_t size() const = 0;
    virtual int digits() const = 0;
    // Normalised units: eigenvalues divided by tau_max.
    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double moment(int k) const = 0;
    // all_j needs the physical scale: that reading is not scale covariant
    virtual double inv_mean(bool all_j, double scale) const = 0;
    virtual double cdf_closed(double a, OutageExponent e, double scale) const = 0;
    virtual double erfc_mean(double c) const = 0;
    virtual double log_norm() const = 0;
    virtual double log_norm_product() const = 0;
};

}  // namespace detail

namespace {

template <unsigned D>
using mpreal = bmp::number<bmp::mpfr_float_backend<D>, bmp::et_off>;

template <class T>
T ipow(const T& x, int e) {
    T r = 1;
    T b = x;
    unsigned u = static_cast<unsigned>(e);
    while (u) {
        if (u & 1u) r *= b;
        b *= b;
        u >>= 1;
    }
    return r;
}

template <class T>
double to_d(const T& v) {
    return v.template convert_to<double>();
}

// Gauss-Jordan with partial pivoting; returns the inverse, det via out-param.
template <class T>
std::vector<T> invert(std::vector<T> a, std::size_t K, T& det) {
    std::vector<T> inv(K * K, T(0));
    for (std::size_t i = 0; i < K; ++i) inv[i * K + i] = 1;
    det = 1;
    for (std::size_t c = 0; c < K; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < K; ++r)
            if (abs(a[r * K + c]) > abs(a[piv * K + c])) piv = r;
        if (a[piv * K + c] == 0) throw NumericFailure("singular cofactor matrix");
        if (piv != c) {
            for (std::size_t k = 0; k < K; ++k) {
                std::swap(a[piv * K + k], a[c * K + k]);
                std::swap(inv[piv * K + k], inv[c * K + k]);
            }
            det = -det;
        }
        const T p = a[c * K + c];
        det *= p;
        for (std::size_t k = 0; k < K; ++k) {
            a[c * K + k] /= p;
            inv[c * K + k] /= p;
        }
        for (std::size_t r = 0; r < K; ++r) {
            if (r == c) continue;
            const T f = a[r * K + c];
            if (f == 0) continue;
            for (std::size_t k = 0; k < K; ++k) {
                a[r * K + k] -= f * a[c * K + k];
                inv[r * K + k] -= f * inv[c * K + k];
            }
        }
    }
    return inv;
}

// f(x) = sum_r exp(-x/t_r) sum_j alpha[r][j] x^j
template <unsigned D>
class Model final : public detail::DensityImpl {
public:
    using T = mpreal<D>;

    Model(const std::vector<double>& tn, std::size_t K, bool literal_single)
        : K_(K), M_(tn.size()), n_(tn.size() - K) {
        t_.reserve(M_);
        for (double v : tn) t_.push_back(T(v));
        build_bracket();
        if (literal_single) {
            // ratio det(B)/prod(tau_j - tau_i) of the one-user form
            T w = 1;
            for (std::size_t p = 0; p < n_; ++p) w *= t_[n_] - t_[p];
            oinv_.assign(1, T(1) / w);
            det_ = w;
        } else {
            std::vector<T> omega(K_ * K_);
            for (std::size_t i = 0; i < K_; ++i) {
                T fact = 1;
                for (std::size_t j = 0; j < K_; ++j) {
                    if (j > 0) fact *= T(static_cast<unsigned>(j));
                    T s = 0;
                    for (std::size_t r = 0; r < M_; ++r)
                        if (c_[i * M_ + r] != 0) s += c_[i * M_ + r] * ipow(t_[r], static_cast<int>(j + 1));
                    omega[i * K_ + j] = fact * s;
                }
            }
            oinv_ = invert(omega, K_, det_);
        }
        alpha_.assign(M_ * K_, T(0));
        const T invK = T(1) / T(static_cast<unsigned>(K_));
        for (std::size_t r = 0; r < M_; ++r)
            for (std::size_t j = 0; j < K_; ++j) {
                T s = 0;
                for (std::size_t i = 0; i < K_; ++i)
                    if (c_[i * M_ + r] != 0) s += oinv_[j * K_ + i] * c_[i * M_ + r];
                alpha_[r * K_ + j] = literal_single ? s : s * invK;
            }
        fact_.assign(2 * K_ + 8, T(1));
        for (std::size_t k = 1; k < fact_.size(); ++k) fact_[k] = fact_[k - 1] * T(static_cast<unsigned>(k));
    }

    std::size_t users() const override { return K_; }
    std::size_t size() const override { return M_; }
    int digits() const override { return static_cast<int>(D); }

    double pdf(double xd) const override {
        if (xd < 0.0) return 0.0;
        const T x(xd);
        T total = 0;
        for (std::size_t r = 0; r < M_; ++r) {
            T poly = alpha_[r * K_ + K_ - 1];
            for (std::size_t j = K_ - 1; j-- > 0;) poly = poly * x + alpha_[r * K_ + j];
            total += poly * exp(-x / t_[r]);
        }
        const double v = to_d(total);
        if (v < -1e-9) throw NumericFailure(fmt::format("negative density {:g} at x = {:g}", v, xd));
        return std::max(v, 0.0);
    }

    double cdf(double xd) const override {
        if (xd <= 0.0) return 0.0;
        const T x(xd);
        T total = 0;
        for (std::size_t r = 0; r < M_; ++r) {
            const T y = x / t_[r];
            const T e = exp(-y);
            T partial = 0;  // sum_{m<=j} y^m/m!
            T ym = 1;
            T tp = t_[r];
            for (std::size_t j = 0; j < K_; ++j) {
                if (j > 0) {
                    ym *= y / T(static_cast<unsigned>(j));
                    tp *= t_[r];
                }
                partial += ym;
                // int_0^x s^j e^{-s/t} ds = j! t^{j+1} (1 - e^{-y} sum_{m<=j} y^m/m!)
                total += alpha_[r * K_ + j] * fact_[j] * tp * (T(1) - e * partial);
            }
        }
        return to_d(total);
    }

    double moment(int k) const override {
        T total = 0;
        for (std::size_t r = 0; r < M_; ++r) {
            T tp = ipow(t_[r], k + 1);
            for (std::size_t j = 0; j < K_; ++j) {
                total += alpha_[r * K_ + j] * factorial(j + static_cast<std::size_t>(k)) * tp;
                tp *= t_[r];
            }
        }
        return to_d(total);
    }

    double inv_mean(bool all_j, double scale) const override {
        const T gamma = boost::math::constants::euler<T>();
        T total = 0;
        for (std::size_t r = 0; r < M_; ++r) {
            T tp = t_[r];
            for (std::size_t j = 1; j < K_; ++j) {
                total += alpha_[r * K_ + j] * fact_[j - 1] * tp;
                tp *= t_[r];
            }
        }
        if (!all_j) {
            for (std::size_t r = 0; r < M_; ++r) total += alpha_[r * K_] * (log(t_[r]) - gamma);
        } else {
            const T w = literal_scale();
            for (std::size_t i = 0; i < K_; ++i) {
                T lg = 0;
                for (std::size_t r = 0; r < M_; ++r)
                    if (c_[i * M_ + r] != 0) lg += c_[i * M_ + r] * (log(t_[r]) - gamma);
                T sj = 1;
                for (std::size_t j = 0; j < K_; ++j) {
                    total += w * oinv_[j * K_ + i] * lg / sj;
                    sj *= T(scale);
                }
            }
        }
        return to_d(total);
    }

    double cdf_closed(double ad, OutageExponent e, double scale) const override {
        if (ad <= 0.0) return 0.0;
        const T a(ad);
        const T w = literal_scale();
        const T s2 = (e == OutageExponent::minus_three) ? T(1) / (T(scale) * T(scale)) : T(1);
        const int shift = (e == OutageExponent::minus_three) ? -3 : -1;
        T total = 0;
        for (std::size_t i = 0; i < K_; ++i) {
            for (std::size_t y = 1; y <= K_; ++y) {
                T term = 0;
                for (std::size_t r = 0; r < M_; ++r) {
                    if (c_[i * M_ + r] == 0) continue;
                    // bracket coefficient with the t^(n-1) factor stripped
                    const T coef = c_[i * M_ + r] / ipow(t_[r], static_cast<int>(n_) - 1);
                    term += coef * theta(t_[r], y, a, shift, s2);
                }
                total += w * oinv_[(y - 1) * K_ + i] * term;
            }
        }
        return to_d(total);
    }

    double erfc_mean(double cd) const override {
        if (cd <= 0.0) return to_d(moment_exact(0));
        const T c(cd);
        T total = 0;
        for (std::size_t r = 0; r < M_; ++r) {
            const T ct = c * t_[r];
            const T mu = ct / (T(1) + ct);
            const T q = (T(1) - mu) / T(4);
            const T root = sqrt(mu);
            T series = 0;
            T binom_q = 1;  // C(2m,m) q^m
            T tp = t_[r];
            for (std::size_t j = 0; j < K_; ++j) {
                if (j > 0) {
                    binom_q *= q * T(static_cast<unsigned>(2 * (2 * j - 1))) / T(static_cast<unsigned>(j));
                    tp *= t_[r];
                }
                series += binom_q;
                total += alpha_[r * K_ + j] * fact_[j] * tp * (T(1) - root * series);
            }
        }
        return to_d(total);
    }

    double log_norm() const override {
        if (K_ == 1 && literal_) return -to_d(log(abs(det_)));
        return -std::log(static_cast<double>(K_)) - to_d(log(abs(det_)));
    }

    double log_norm_product() const override {
        // log det(B) - log K - sum_{q<p} log(t_p - t_q) - sum_{p<K} log p!
        T s = 0;
        for (std::size_t p = 0; p < n_; ++p)
            for (std::size_t q = 0; q < p; ++q) s += log(t_[p] - t_[q]);
        for (std::size_t p = 0; p < M_; ++p)
            for (std::size_t q = 0; q < p; ++q) s -= log(t_[p] - t_[q]);
        for (std::size_t p = 1; p < K_; ++p) s -= log(fact_[p]);
        if (!(K_ == 1 && literal_)) s -= log(T(static_cast<unsigned>(K_)));
        return to_d(s);
    }

    void mark_literal() { literal_ = true; }

private:
    // Bracket of the density: phi_i(x) = t_{n+i}^{n-1} e^{-x/t_{n+i}} - sum_p L_p(t_{n+i}) t_p^{n-1} e^{-x/t_p},
    // where L_p is the Lagrange basis on t_1..t_n; this is sum_q [B^-1]_{q,p} t_{n+i}^{q-1}.
    void build_bracket() {
        c_.assign(K_ * M_, T(0));
        std::vector<T> den(n_, T(1));
        for (std::size_t p = 0; p < n_; ++p)
            for (std::size_t s = 0; s < n_; ++s)
                if (s != p) den[p] *= t_[p] - t_[s];
        std::vector<T> tpow(n_);
        for (std::size_t p = 0; p < n_; ++p) tpow[p] = ipow(t_[p], static_cast<int>(n_) - 1);
        for (std::size_t i = 0; i < K_; ++i) {
            const T& top = t_[n_ + i];
            T num = 1;
            for (std::size_t s = 0; s < n_; ++s) num *= top - t_[s];
            for (std::size_t p = 0; p < n_; ++p) {
                const T L = num / ((top - t_[p]) * den[p]);
                c_[i * M_ + p] = -L * tpow[p];
            }
            c_[i * M_ + n_ + i] = ipow(top, static_cast<int>(n_) - 1);
        }
    }

    // theta(x, y) = (y-1)! x^{n+y-1} - e^{-a/x} sum_{s<y} (y-1)!/s! a^s x^{n+y-s+shift}
    T theta(const T& x, std::size_t y, const T& a, int shift, const T& s2) const {
        const T head = fact_[y - 1] * ipow(x, static_cast<int>(n_ + y) - 1);
        T sum = 0;
        T as = 1;
        for (std::size_t s = 0; s < y; ++s) {
            if (s > 0) as *= a;
            const int ex = static_cast<int>(n_ + y) - static_cast<int>(s) + shift;
            const T xp = ex >= 0 ? ipow(x, ex) : T(1) / ipow(x, -ex);
            sum += fact_[y - 1] / fact_[s] * as * xp;
        }
        return head - exp(-a / x) * sum * s2;
    }

    T literal_scale() const {
        return (K_ == 1 && literal_) ? T(1) : T(1) / T(static_cast<unsigned>(K_));
    }

    T factorial(std::size_t k) const {
        if (k < fact_.size()) return fact_[k];
        T f = fact_.back();
        for (std::size_t m = fact_.size(); m <= k; ++m) f *= T(static_cast<unsigned>(m));
        return f;
    }

    T moment_exact(int k) const {
        T total = 0;
        for (std::size_t r = 0; r < M_; ++r)
            for (std::size_t j = 0; j < K_; ++j)
                total += alpha_[r * K_ + j] * factorial(j + static_cast<std::size_t>(k))
                         * ipow(t_[r], static_cast<int>(j) + k + 1);
        return total;
    }

    std::size_t K_, M_, n_;
    bool literal_ = false;
    std::vector<T> t_;
    std::vector<T> c_;      // K x M bracket coefficients
    std::vector<T> oinv_;   // K x K, [Omega^-1]_{j,i} at j*K + i
    std::vector<T> alpha_;  // M x K
    std::vector<T> fact_;
    T det_;
};

template <unsigned D>
std::shared_ptr<detail::DensityImpl> make_model(const std::vector<double>& tn, std::size_t K,
                                                bool single) {
    auto m = std::make_shared<Model<D>>(tn, K, single);
    if (single) m->mark_literal();
    return m;
}

bool close(double a, double b, double tol) {
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// Two consecutive precisions must agree before the higher one is used.
bool agree(const detail::DensityImpl& lo, const detail::DensityImpl& hi) {
    const double tol = 1e-12;
    const double m = hi.moment(1);
    if (!close(lo.moment(0), hi.moment(0), tol)) return false;
    if (!close(lo.moment(1), m, tol)) return false;
    if (!close(lo.inv_mean(false, 1.0), hi.inv_mean(false, 1.0), tol)) return false;
    for (double q : {0.25, 1.0, 2.0}) {
        if (!close(lo.cdf(q * m), hi.cdf(q * m), 1e-10)) return false;
        if (std::fabs(lo.pdf(q * m) - hi.pdf(q * m)) > 1e-10 * (1.0 / m)) return false;
    }
    return std::fabs(hi.moment(0) - 1.0) < 1e-10;
}

std::shared_ptr<const detail::DensityImpl> build_adaptive(const std::vector<double>& tn,
                                                          std::size_t K, bool single) {
    using Builder = std::shared_ptr<detail::DensityImpl> (*)(const std::vector<double>&,
                                                              std::size_t, bool);
    const Builder ladder[] = {&make_model<40>, &make_model<80>, &make_model<160>,
                              &make_model<320>, &make_model<640>};
    std::shared_ptr<detail::DensityImpl> prev;
    for (const Builder b : ladder) {
        std::shared_ptr<detail::DensityImpl> cur;
        try {
            cur = b(tn, K, single);
        } catch (const NumericFailure&) {
            prev.reset();
            continue;
        }
        try {
            if (prev && agree(*prev, *cur)) return cur;
        } catch (const NumericFailure&) {
        }
        prev = cur;
    }
    throw NumericFailure("closed-form density did not stabilise at 640 digits");
}

std::vector<double> normalised(const std::vector<double>& tau) {
    std::vector<double> tn(tau);
    const double s = tau.back();
    for (double& v : tn) v /= s;
    tn.back() = 1.0;
    return tn;
}

}  // namespace

// ---------------------------------------------------------------- EigenDensity

EigenDensity::EigenDensity(std::shared_ptr<const detail::DensityImpl> impl, double scale)
    : impl_(std::move(impl)), scale_(scale) {}

EigenDensity EigenDensity::single(const std::vector<double>& tau) {
    check_spectrum(tau);
    if (tau.size() < 2) throw InvalidArgument("one-user density needs M >= 2");
    return EigenDensity(build_adaptive(normalised(tau), 1, true), tau.back());
}

EigenDensity EigenDensity::multi(const std::vector<double>& tau, std::size_t K) {
    check_spectrum(tau);
    if (K < 1) throw InvalidArgument("K must be at least 1");
    if (tau.size() <= K)
        throw DegenerateSpectrum(fmt::format("need more than K = {} nonzero eigenvalues, have {}", K,
                                             tau.size()));
    return EigenDensity(build_adaptive(normalised(tau), K, false), tau.back());
}

std::size_t EigenDensity::users() const { return impl_->users(); }
std::size_t EigenDensity::size() const { return impl_->size(); }
int EigenDensity::precision_digits() const { return impl_->digits(); }

double EigenDensity::pdf(double x) const { return impl_->pdf(x / scale_) / scale_; }
double EigenDensity::cdf(double x) const { return impl_->cdf(x / scale_); }
double EigenDensity::moment(int k) const {
    if (k < 0) throw InvalidArgument("moment order must be non-negative");
    return impl_->moment(k) * std::pow(scale_, k);
}
double EigenDensity::inv_mean(bool all_j) const { return impl_->inv_mean(all_j, scale_) / scale_; }
double EigenDensity::cdf_closed(double a, OutageExponent e) const {
    return impl_->cdf_closed(a / scale_, e, scale_);
}
double EigenDensity::erfc_mean_closed(double c) const { return impl_->erfc_mean(c * scale_); }
double EigenDensity::log_normaliser() const { return impl_->log_norm(); }
double EigenDensity::log_normaliser_product_form() const { return impl_->log_norm_product(); }

// ---------------------------------------------------------------- propositions

Modulation SystemParams::modulation_for(std::size_t k) const {
    if (modulation.empty()) return {};
    if (modulation.size() == 1) return modulation.front();
    return modulation.at(k);
}

void SystemParams::check() const {
    detail::check_positive(snr_ut, "SNR_UT");
    if (beta.size() < 1) throw InvalidArgument("at least one user required");
    if ((beta.array() <= 0.0).any()) throw InvalidArgument("beta must be positive");
    if (!modulation.empty() && modulation.size() != 1 && modulation.size() != K())
        throw InvalidArgument("modulation list must have 1 or K entries");
}

double expected_xi(const std::vector<double>& tau) { return EigenDensity::single(tau).mean(); }

double ergodic_gain(const std::vector<double>& tau, const std::vector<double>& tau_hat,
                    double snr_ut, double beta_1) {
    detail::check_positive(snr_ut, "SNR_UT");
    detail::check_positive(beta_1, "beta_1");
    return snr_ut * beta_1 * (expected_xi(tau) - expected_xi(tau_hat));
}

Eigen::VectorXd rate_lower_bound(const SystemParams& params, const std::vector<double>& tau) {
    params.check();
    const EigenDensity f = EigenDensity::multi(tau, params.K());
    const double im = f.inv_mean();
    if (!(im > 0.0)) throw NumericFailure(fmt::format("E(1/xi) = {:g} is not positive", im));
    Eigen::VectorXd r(params.K());
    for (std::size_t k = 0; k < params.K(); ++k)
        r(k) = std::log2(1.0 + params.snr_ut * params.beta(k) / im);
    return r;
}

namespace {

double integrate(const std::function<double(double)>& g, double a, double b, const char* what) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 20, 1e-13, &err);
    if (!(err <= 1e-9 * std::max(1.0, std::fabs(v))))
        throw NumericFailure(fmt::format("{}: quadrature reached only {:g}", what, err));
    return v;
}

// Upper limit in units of tau_max beyond which the density mass is < 1e-16.
double tail_limit(const EigenDensity& f) {
    double x = 40.0 + 4.0 * static_cast<double>(f.users());
    while (1.0 - f.cdf(x * f.scale()) > 1e-16 && x < 1e4) x *= 1.5;
    return x;
}

}  // namespace

double ser_closed_form(const SystemParams& params, const EigenDensity& f) {
    params.check();
    const double s = f.scale();
    const double upper = tail_limit(f);
    double total = 0.0;
    for (std::size_t k = 0; k < params.K(); ++k) {
        const Modulation m = params.modulation_for(k);
        const double c = m.varpi * params.snr_ut * params.beta(k) * s;
        auto g = [&](double x) { return std::erfc(std::sqrt(c * x)) * f.pdf(x * s) * s; };
        total += 0.5 * m.omega * integrate(g, 0.0, upper, "ser_closed_form");
    }
    return total / static_cast<double>(params.K());
}

double ser_closed_form(const SystemParams& params, const std::vector<double>& tau) {
    params.check();
    return ser_closed_form(params, EigenDensity::multi(tau, params.K()));
}

double ser_closed_terms(const SystemParams& params, const EigenDensity& f) {
    params.check();
    double total = 0.0;
    for (std::size_t k = 0; k < params.K(); ++k) {
        const Modulation m = params.modulation_for(k);
        total += 0.5 * m.omega * f.erfc_mean_closed(m.varpi * params.snr_ut * params.beta(k));
    }
    return total / static_cast<double>(params.K());
}

double outage_closed_form(const SystemParams& params, const EigenDensity& f, OutageExponent e) {
    params.check();
    detail::check_positive(params.snr_th, "SNR_th");
    double total = 0.0;
    for (std::size_t k = 0; k < params.K(); ++k)
        total += f.cdf_closed(params.snr_th / (params.snr_ut * params.beta(k)), e);
    return total / static_cast<double>(params.K());
}

double outage_closed_form(const SystemParams& params, const std::vector<double>& tau,
                          OutageExponent e) {
    params.check();
    return outage_closed_form(params, EigenDensity::multi(tau, params.K()), e);
}

double outage_quadrature(const SystemParams& params, const EigenDensity& f) {
    params.check();
    detail::check_positive(params.snr_th, "SNR_th");
    const double s = f.scale();
    const double upper = tail_limit(f);
    double total = 0.0;
    for (std::size_t k = 0; k < params.K(); ++k) {
        // mass beyond the tail limit is below 1e-16
        const double a = std::min(params.snr_th / (params.snr_ut * params.beta(k)) / s, upper);
        auto g = [&](double x) { return f.pdf(x * s) * s; };
        total += integrate(g, 0.0, a, "outage_quadrature");
    }
    return total / static_cast<double>(params.K());
}

double channel_trace(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& C) {
    if (C.cols() != A.rows()) throw InvalidArgument("channel_trace: dimension mismatch");
    return (C * A).squaredNorm();
}

double asymptotic_snr(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& C, double snr_ut,
                      double beta_k) {
    return snr_ut * beta_k * channel_trace(A, C);
}

double asymptotic_rate(const SystemParams& params, double trace) {
    params.check();
    double r = 0.0;
    for (std::size_t k = 0; k < params.K(); ++k)
        r += std::log2(1.0 + params.snr_ut * params.beta(k) * trace);
    return r;
}

double asymptotic_rate(const SystemParams& params, const Eigen::MatrixXcd& A,
                       const Eigen::MatrixXcd& C) {
    return asymptotic_rate(params, channel_trace(A, C));
}

double asymptotic_ser(const SystemParams& params, double trace) {
    if (!(params.snr_ut >= 0.0)) throw InvalidArgument("SNR_UT must be non-negative");
    double s = 0.0;
    for (std::size_t k = 0; k < params.K(); ++k) {
        const Modulation m = params.modulation_for(k);
        s += 0.5 * m.omega * std::erfc(std::sqrt(m.varpi * params.snr_ut * params.beta(k) * trace));
    }
    return s / static_cast<double>(params.K());
}

double asymptotic_ser(const SystemParams& params, const Eigen::MatrixXcd& A,
                      const Eigen::MatrixXcd& C) {
    return asymptotic_ser(params, channel_trace(A, C));
}

double asymptotic_gain(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& C,
                       const Eigen::MatrixXcd& A_hat, const Eigen::MatrixXcd& C_hat,
                       double snr_ut, double beta_1) {
    return snr_ut * beta_1 * (channel_trace(A, C) - channel_trace(A_hat, C_hat));
}

}  // namespace mimo
