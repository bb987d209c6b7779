#pragma once

#include <cstddef>
#include <vector>

namespace ramplab::mathx {

// Standard normal density.
double norm_pdf(double z);

// Standard normal CDF via the complementary error function (absolute error
// well below 1e-14 across the real line).
double norm_cdf(double z);

// Inverse standard normal CDF (Wichura's PPND16 rational approximation,
// relative error ~1e-15 on (0,1)).
double norm_ppf(double p);

// Numerically stable logistic CDF.
double logistic_cdf(double z);

// Compensated (Neumaier) summation.
class NeumaierSum {
public:
    void add(double value);
    double total() const;

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double sum(const std::vector<double>& v);
double mean(const std::vector<double>& v);

// Sample standard deviation (denominator n-1); NaN when n < 2.
double sample_sd(const std::vector<double>& v);

// Population variance (denominator n).
double pop_variance(const std::vector<double>& v);

struct Moments {
    double mean = 0.0;
    double sd = 0.0;        // sample sd (n-1)
    double skewness = 0.0;  // standard moment ratio m3 / m2^(3/2)
    double kurtosis = 0.0;  // m4 / m2^2 (normal has kurtosis 3)
    bool degenerate = false;  // sd == 0: skewness/kurtosis undefined (NaN)
};

Moments moments(const std::vector<double>& v);

}  // namespace ramplab::mathx
