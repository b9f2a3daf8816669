#include "sorsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sorsim::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Series representation of P(a,x), valid for x < a+1.
double gamma_series(double a, double x) {
    const double gln = std::lgamma(a);
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15)
            return sum * std::exp(-x + a * std::log(x) - gln);
    }
    throw std::runtime_error("gamma_series: no convergence");
}

// Continued fraction for Q(a,x), valid for x >= a+1 (modified Lentz).
double gamma_cf(double a, double x) {
    const double gln = std::lgamma(a);
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15)
            return std::exp(-x + a * std::log(x) - gln) * h;
    }
    throw std::runtime_error("gamma_cf: no convergence");
}

double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) return h;
    }
    throw std::runtime_error("beta_cf: no convergence");
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double gammp(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0) return 0.0;
    return (x < a + 1.0) ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double gammq(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gammq: bad arguments");
    if (x == 0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_series(a, x) : gamma_cf(a, x);
}

double betai(double a, double b, double x) {
    if (x < 0 || x > 1) throw std::invalid_argument("betai: x outside [0,1]");
    if (x == 0) return 0.0;
    if (x == 1) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
    const double p = 0.5 * betai(0.5 * df, 0.5, df / (df + t * t));
    return t >= 0 ? p : 1.0 - p;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    s.count = values.size();
    if (s.count == 0) {
        s.mean = std::numeric_limits<double>::quiet_NaN();
        s.variance = std::numeric_limits<double>::quiet_NaN();
        s.ci95_half_width = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(s.count - 1);
        s.ci95_half_width = kZ95 * std::sqrt(s.variance / static_cast<double>(s.count));
    }
    return s;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: zero trials");
    if (successes > trials) throw std::invalid_argument("wilson_interval: successes > trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double hw = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - hw), std::min(1.0, centre + hw)};
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> expected_probability,
                                double min_expected) {
    if (observed.size() != expected_probability.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_test: need matching cell arrays of size >= 2");
    std::uint64_t total = 0;
    for (auto o : observed) total += o;
    if (total == 0) throw std::invalid_argument("chi_square_test: no observations");

    // Pool sparse cells left to right so every cell meets min_expected.
    std::vector<double> obs, exp;
    double o_acc = 0, e_acc = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += static_cast<double>(observed[i]);
        e_acc += expected_probability[i] * static_cast<double>(total);
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0;
        }
    }
    if (e_acc > 0 || o_acc > 0) {
        if (exp.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    if (obs.size() < 2) throw std::invalid_argument("chi_square_test: fewer than 2 cells after pooling");

    ChiSquareResult r;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double diff = obs[i] - exp[i];
        r.statistic += diff * diff / exp[i];
    }
    r.df = obs.size() - 1;
    r.p_value = gammq(0.5 * static_cast<double>(r.df), 0.5 * r.statistic);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b, double min_combined) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("chi_square_two_sample: need matching cell arrays of size >= 2");
    std::vector<double> ca, cb;
    double aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa += static_cast<double>(a[i]);
        bb += static_cast<double>(b[i]);
        if (aa + bb >= min_combined) {
            ca.push_back(aa);
            cb.push_back(bb);
            aa = bb = 0;
        }
    }
    if (aa > 0 || bb > 0) {
        if (ca.empty()) {
            ca.push_back(aa);
            cb.push_back(bb);
        } else {
            ca.back() += aa;
            cb.back() += bb;
        }
    }
    if (ca.size() < 2)
        throw std::invalid_argument("chi_square_two_sample: fewer than 2 cells after pooling");
    double na = 0, nb = 0;
    for (double v : ca) na += v;
    for (double v : cb) nb += v;
    if (na == 0 || nb == 0) throw std::invalid_argument("chi_square_two_sample: empty sample");

    ChiSquareResult r;
    const double total = na + nb;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        const double col = ca[i] + cb[i];
        const double ea = na * col / total;
        const double eb = nb * col / total;
        r.statistic += (ca[i] - ea) * (ca[i] - ea) / ea;
        r.statistic += (cb[i] - eb) * (cb[i] - eb) / eb;
    }
    r.df = ca.size() - 1;
    r.p_value = gammq(0.5 * static_cast<double>(r.df), 0.5 * r.statistic);
    return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    return {d, kolmogorov_q(lambda)};
}

SpearmanResult spearman_positive(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("spearman_positive: need >= 3 paired samples");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    SpearmanResult r;
    r.samples = x.size();
    r.rho = pearson(rx, ry);
    const double df = static_cast<double>(x.size() - 2);
    if (std::fabs(r.rho) >= 1.0) {
        r.p_value = r.rho > 0 ? 0.0 : 1.0;
        return r;
    }
    const double t = r.rho * std::sqrt(df / (1.0 - r.rho * r.rho));
    r.p_value = student_t_sf(t, df);
    return r;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("linear_fit: need >= 3 points");
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear_fit: x values are all equal");
    LinearFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = y[i] - (f.intercept + f.slope * x[i]);
        rss += resid * resid;
    }
    if (n > 2) f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return f;
}

}  // namespace sorsim::stats
