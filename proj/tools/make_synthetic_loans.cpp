// Generates data/synthetic_loans.csv: a 1989-row loan-approval dataset with
// the same column layout as the mortgage-application study (binary outcome
// `approve`, binary `white`, 22 further applicant/loan covariates) and 13
// rows containing an empty (missing) field. Scales and approval rates are
// chosen so the linear probability model pushes a sizable share of fitted
// values outside [0,1] while index models with any smooth link agree closely
// on the average effect of `white`.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ramplab/mathx.hpp"
#include "ramplab/rng.hpp"

namespace {

using ramplab::Rng;

double bern(Rng& r, double p) { return r.uniform01() < p ? 1.0 : 0.0; }

int poisson(Rng& r, double lambda) {
    // Knuth inversion; lambda is small everywhere we use it.
    const double L = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= r.uniform01();
    } while (p > L);
    return k - 1;
}

double expo(Rng& r, double mean) { return -mean * std::log(r.uniform01()); }

double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace

int main(int argc, char** argv) {
    const std::string out_path = (argc > 1) ? argv[1] : "data/synthetic_loans.csv";
    constexpr int kRows = 1989;
    constexpr std::uint64_t kSeed = 20240614;

    std::vector<std::string> names = {
        "approve", "white",  "loanamt", "suffolk", "appinc",  "unit",
        "married", "dep",    "emp",     "yjob",    "atotinc", "self",
        "other",   "rep",    "pubrec",  "hrat",    "obrat",   "cosign",
        "sch",     "mortno", "mortlat1", "mortlat2", "chist", "loanprc"};

    std::vector<std::vector<double>> cols(names.size(), std::vector<double>(kRows));

    for (int i = 0; i < kRows; ++i) {
        Rng r(kSeed, ramplab::make_stream(ramplab::kStreamTagSynthetic,
                                          static_cast<std::uint64_t>(i)));
        const double f = r.standard_normal();  // latent creditworthiness

        const double white = bern(r, ramplab::mathx::norm_cdf(0.95 + 0.40 * f));
        const double loanamt = std::round(std::exp(4.75 + 0.45 * f + 0.40 * r.standard_normal()));
        const double suffolk = bern(r, 0.15);
        const double appinc = std::round(std::exp(4.05 + 0.60 * f + 0.55 * r.standard_normal()));
        const double unit = 1.0 + std::min(poisson(r, 0.12), 3);
        const double married = bern(r, 0.66);
        const double dep = std::min(poisson(r, 0.77), 6);
        const double emp = (r.uniform01() < 0.93) ? 0.0 : round2(expo(r, 3.0));
        const double yjob = (r.uniform01() < 0.80) ? 0.0 : round2(expo(r, 2.2));
        const double atotinc =
            std::round(std::exp(7.60 + 0.80 * f + 0.60 * r.standard_normal()));
        const double self = bern(r, 0.13);
        const double other = (r.uniform01() < 0.90) ? 0.0 : round2(expo(r, 23.0));
        const double rep = std::min(poisson(r, 1.5), 9);
        const double pubrec = bern(r, ramplab::mathx::norm_cdf(-1.55 - 0.55 * f));
        const double hrat = round2(clip(24.8 + 6.5 * r.standard_normal() - 1.0 * f, 2.0, 60.0));
        const double obrat =
            round2(clip(hrat + 7.6 + 4.0 * r.standard_normal() - 0.8 * f, 3.0, 75.0));
        const double cosign = bern(r, 0.06);
        const double sch = bern(r, ramplab::mathx::norm_cdf(0.72 + 0.25 * f));
        const double mortno = bern(r, 0.33);
        const double mortlat1 = bern(r, 0.05);
        const double mortlat2 = bern(r, 0.035);
        const double chist = bern(r, ramplab::mathx::norm_cdf(1.00 + 0.55 * f));
        const double loanprc =
            round2(clip(0.77 + 0.16 * r.standard_normal() - 0.05 * f, 0.02, 1.60));

        // Latent approval index: strong enough drivers that approval
        // probabilities pile up near one, which is what pushes LPM fitted
        // values outside the unit interval.
        const double lat = -0.26 + 0.30 * white + 1.00 * chist - 0.75 * pubrec +
                           0.20 * married - 0.30 * self - 0.45 * mortlat1 -
                           0.55 * mortlat2 - 0.032 * (obrat - 32.4) -
                           1.05 * (loanprc - 0.77) + 0.12 * mortno + 0.35 * f;
        // Uniform latent error: the approval probability is piecewise linear
        // in the index, which keeps the smooth-link estimators and the ramp
        // in close agreement on average effects.
        const double eps = 1.15 * (2.0 * r.uniform01() - 1.0);
        const double approve = (lat + eps > 0.0) ? 1.0 : 0.0;

        const double values[] = {approve, white,  loanamt, suffolk, appinc,  unit,
                                 married, dep,    emp,     yjob,    atotinc, self,
                                 other,   rep,    pubrec,  hrat,    obrat,   cosign,
                                 sch,     mortno, mortlat1, mortlat2, chist, loanprc};
        for (std::size_t j = 0; j < names.size(); ++j) cols[j][i] = values[j];
    }

    // 13 rows with one missing (empty) field each, rotating over a handful of
    // optional applicant attributes.
    const int missing_rows[] = {37, 151, 289, 402, 515, 688, 803, 951, 1119, 1327, 1561, 1777, 1902};
    const char* missing_cols[] = {"appinc", "yjob", "atotinc", "unit", "dep"};
    std::set<std::pair<int, int>> holes;
    for (std::size_t t = 0; t < std::size(missing_rows); ++t) {
        int cj = -1;
        const std::string want = missing_cols[t % std::size(missing_cols)];
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (names[j] == want) cj = static_cast<int>(j);
        }
        holes.insert({missing_rows[t], cj});
    }

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << names[j] << (j + 1 < names.size() ? "," : "\n");
    }
    char buf[64];
    for (int i = 0; i < kRows; ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (holes.count({i, static_cast<int>(j)})) {
                // empty field = missing
            } else {
                const double v = cols[j][i];
                if (v == std::floor(v) && std::fabs(v) < 1e15) {
                    std::snprintf(buf, sizeof(buf), "%.0f", v);
                } else {
                    std::snprintf(buf, sizeof(buf), "%.2f", v);
                }
                out << buf;
            }
            out << (j + 1 < names.size() ? "," : "\n");
        }
    }
    std::cout << "wrote " << out_path << " (" << kRows << " rows, "
              << std::size(missing_rows) << " with a missing field)\n";
    return 0;
}
