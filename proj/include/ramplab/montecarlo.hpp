#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ramplab/dataset.hpp"
#include "ramplab/estimators.hpp"

namespace ramplab {

enum class CovariateDesign { SymNormal, AsymLognormal, UniformWide };
enum class ErrorLaw { Uniform, StdNormal };

struct SimScenario {
    CovariateDesign covariate_design = CovariateDesign::SymNormal;
    ErrorLaw error_law = ErrorLaw::Uniform;
    double a = 0.5;  // Uniform(-a,a) half-width; ignored for StdNormal
    Eigen::VectorXd betas;  // (b0,b1,b2) or (b0,b1,b2,b3) with interaction
    bool interaction = false;
    int n_obs = 1000;
    int reps = 1000;
    std::uint64_t seed = 0;

    void check() const;  // NonPositiveA / InvalidArgument
};

// Default true coefficients used throughout the simulation study.
Eigen::VectorXd default_betas(bool interaction);

struct TruthDraw {
    DesignMatrix design;        // [1, x1, x2(, x1:x2)] with binary y
    Eigen::VectorXd true_index; // x_i beta at the true coefficients
    double true_ape1 = 0.0;
    double true_ape2 = 0.0;
    double p_y1 = 0.0;
    double p_band = 0.0;  // fraction with |true index| <= a; NaN under StdNormal
};

// Deterministic draw: the RNG stream is derived from (seed, rep_index).
TruthDraw gen_draw(const SimScenario& scenario, std::uint64_t rep_index);

struct EstimatorRep {
    bool ok = false;
    double ape1 = 0.0;
    double ape2 = 0.0;
    double p01 = 0.0;
    double se1 = 0.0;
    double se2 = 0.0;
    double vcov_mineig_ratio = 0.0;  // min eigenvalue / trace of V_hat
    std::string error;
};

struct RepRecord {
    double t_ape1 = 0.0;
    double t_ape2 = 0.0;
    double p_y1 = 0.0;
    double p_band = 0.0;
    // order: OLS, ramp, probit, logit
    std::array<EstimatorRep, 4> est;
};

// Fit all four estimators on one draw; per-estimator failures are recorded,
// not fatal. SEs are filled only when collect_se is set.
RepRecord run_replication(const TruthDraw& draw, bool collect_se);

struct EstimatorCells {
    double ape1_mean = 0.0, ape1_sd = 0.0;
    double ape2_mean = 0.0, ape2_sd = 0.0;
    double p01_mean = 0.0;
    double se1_mean = 0.0, se2_mean = 0.0;
    int failures = 0;
};

struct SimReport {
    SimScenario scenario;
    // cells order: truth, OLS, ramp, probit, logit (truth has no p01/se)
    std::array<EstimatorCells, 5> cells;
    double p_y1 = 0.0;
    double p_band = 0.0;
    int reps_run = 0;
    bool collected_se = false;
    double worst_mineig_ratio = 0.0;  // most negative min-eig/trace seen
    std::int64_t total_fits = 0;
};

struct McOptions {
    int jobs = 0;  // 0: hardware concurrency
    bool collect_se = false;
};

// Seeded replication study; aggregation is an ordered compensated reduce over
// rep_index, so the result is independent of the job count.
SimReport run_mc(const SimScenario& scenario, const McOptions& opts = {});  // TooManyFailures

// Fixed scenarios of the simulation study, ids {1..8, 11, 12, 13}.
SimScenario table_scenario(int id, std::uint64_t seed);  // UnknownTable
SimReport reproduce_table(int id, std::uint64_t seed, const McOptions& opts = {});

std::string report_to_csv(const SimReport& report, int precision = 4);
std::string report_to_markdown(const SimReport& report, int precision = 4);

}  // namespace ramplab
