#include "ramplab/mathx.hpp"

#include <cmath>
#include <limits>

namespace ramplab::mathx {

double norm_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double norm_cdf(double z) {
    static const double inv_sqrt2 = 0.7071067811865475244008444;
    return 0.5 * std::erfc(-z * inv_sqrt2);
}

double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

double logistic_cdf(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double ez = std::exp(z);
    return ez / (1.0 + ez);
}

void NeumaierSum::add(double value) {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
        comp_ += (sum_ - t) + value;
    } else {
        comp_ += (value - t) + sum_;
    }
    sum_ = t;
}

double NeumaierSum::total() const { return sum_ + comp_; }

double sum(const std::vector<double>& v) {
    NeumaierSum s;
    for (double x : v) s.add(x);
    return s.total();
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return sum(v) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(v);
    NeumaierSum s;
    for (double x : v) s.add((x - m) * (x - m));
    return std::sqrt(s.total() / static_cast<double>(n - 1));
}

double pop_variance(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(v);
    NeumaierSum s;
    for (double x : v) s.add((x - m) * (x - m));
    return s.total() / static_cast<double>(n);
}

Moments moments(const std::vector<double>& v) {
    Moments out;
    const std::size_t n = v.size();
    if (n == 0) {
        out.mean = out.sd = out.skewness = out.kurtosis =
            std::numeric_limits<double>::quiet_NaN();
        out.degenerate = true;
        return out;
    }
    out.mean = mean(v);
    NeumaierSum s2, s3, s4;
    for (double x : v) {
        const double d = x - out.mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
    }
    const double nd = static_cast<double>(n);
    const double m2 = s2.total() / nd;
    out.sd = (n >= 2) ? std::sqrt(s2.total() / (nd - 1.0))
                      : std::numeric_limits<double>::quiet_NaN();
    if (m2 <= 0.0) {
        out.skewness = std::numeric_limits<double>::quiet_NaN();
        out.kurtosis = std::numeric_limits<double>::quiet_NaN();
        out.degenerate = true;
        return out;
    }
    out.skewness = (s3.total() / nd) / std::pow(m2, 1.5);
    out.kurtosis = (s4.total() / nd) / (m2 * m2);
    return out;
}

}  // namespace ramplab::mathx
