#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "ramplab/dataset.hpp"

namespace ramplab {

enum class EstimatorKind { OlsLpm, RampNls, Probit, Logit };

inline const char* estimator_name(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::OlsLpm: return "ols";
        case EstimatorKind::RampNls: return "ramp";
        case EstimatorKind::Probit: return "probit";
        case EstimatorKind::Logit: return "logit";
    }
    return "?";
}

enum class SolverPath { ClosedForm, NewtonTrim, FallbackSimplex };

inline const char* solver_path_name(SolverPath p) {
    switch (p) {
        case SolverPath::ClosedForm: return "ClosedForm";
        case SolverPath::NewtonTrim: return "NewtonTrim";
        case SolverPath::FallbackSimplex: return "FallbackSimplex";
    }
    return "?";
}

struct FitResult {
    EstimatorKind kind = EstimatorKind::OlsLpm;
    Eigen::VectorXd beta;
    Eigen::MatrixXd vcov;     // K x K robust covariance (filled by inference)
    Eigen::VectorXd index;    // X * beta
    Eigen::VectorXd prob;     // fitted response probabilities per link
    double objective = 0.0;   // SSR for OLS/NLS, log-likelihood for QMLE
    int iterations = 0;
    bool converged = false;
    SolverPath solver_path = SolverPath::ClosedForm;
    double frac_unit_interval = 0.0;  // [0,1] closed for OLS, (0,1) strict for ramp
    std::int64_t clamp_count = 0;     // QMLE probability clamps at 1e-12 (diagnostic)
};

// Piecewise-linear link: 0 for z <= 0, z on (0,1), 1 for z >= 1.
double ramp(double z);

// Uniform(-a,a) CDF: 0 below -a, (z+a)/(2a) on [-a,a], 1 above a.
double ramp_a(double z, double a);  // NonPositiveA

FitResult fit_ols(const DesignMatrix& design);  // RankDeficient

// Q_N(beta) = N^-1 sum (y_i - ramp(x_i beta))^2.
double nls_objective(const DesignMatrix& design, const Eigen::VectorXd& beta);

// Analytic a.e. gradient: -2 N^-1 sum x_i' (y_i - x_i beta) 1{x_i beta in (0,1)}.
Eigen::VectorXd nls_gradient(const DesignMatrix& design, const Eigen::VectorXd& beta);

// One trimming iteration: OLS on {i : x_i beta in (0,1)} (strict).
Eigen::VectorXd ito_step(const DesignMatrix& design,
                         const Eigen::VectorXd& beta);  // EmptyTrimSet, RankDeficientTrimSet

struct RampNlsOptions {
    double tol = 1e-10;
    int max_iter = 500;
    std::optional<Eigen::VectorXd> start;  // default: OLS coefficients
    bool force_simplex = false;            // skip the Newton path (diagnostics)
};

// Trimmed-OLS Newton iteration from the OLS start; on a degenerate trim set
// or a cycling active set, falls back to simplex minimization of the NLS
// objective (also from the OLS start). Either path finishes with a
// deterministic polish: snap to the basin's fixed point, then flip membership
// of kink-adjacent observations accepting strict objective improvements, so
// near-degenerate local minima are resolved identically by both paths.
FitResult fit_ramp_nls(const DesignMatrix& design, const RampNlsOptions& opts = {});

FitResult fit_probit(const DesignMatrix& design);  // PerfectSeparation, RankDeficient
FitResult fit_logit(const DesignMatrix& design);   // PerfectSeparation, RankDeficient

struct Prediction {
    Eigen::VectorXd index;
    Eigen::VectorXd prob;
};

Prediction predict(const FitResult& fit, const DesignMatrix& design);  // DimensionMismatch

// Mean squared prediction error N^-1 sum (y_i - prob_i)^2 (OLS probabilities
// unclamped).
double mean_squared_error(const FitResult& fit, const DesignMatrix& design);

}  // namespace ramplab
