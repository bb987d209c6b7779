#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "ramplab/dataset.hpp"
#include "ramplab/estimators.hpp"

namespace ramplab {

// Per-observation score rows s_i(beta)' in minimization sign convention, so
// column means vanish at a converged interior fit.
Eigen::MatrixXd score_matrix(const DesignMatrix& design, const FitResult& fit);

struct SandwichParts {
    Eigen::MatrixXd A_N;      // Hessian analogue
    Eigen::MatrixXd Omega_N;  // score outer-product
    Eigen::MatrixXd V_hat;    // A^-1 Omega A^-1
    Eigen::VectorXd se;       // sqrt(diag(V_hat)/N)
    std::int64_t clamp_count = 0;  // QMLE probabilities clamped at 1e-12
};

SandwichParts vcov_ols_robust(const DesignMatrix& design, const FitResult& fit);
SandwichParts vcov_ramp_sandwich(const DesignMatrix& design, const FitResult& fit);  // SingularA
SandwichParts vcov_qmle_sandwich(const DesignMatrix& design, const FitResult& fit);  // SingularA

// Dispatch on fit.kind.
SandwichParts vcov_robust(const DesignMatrix& design, const FitResult& fit);

enum class ApeKind { Derivative, DiscreteDiff };

struct ApeEstimate {
    std::string variable;
    ApeKind kind = ApeKind::Derivative;
    double estimate = 0.0;           // mean of pe
    double se = 0.0;                 // filled by ape_se / bootstrap
    Eigen::VectorXd pe;              // per-observation partial effects
    double p_hat = 0.0;              // ramp derivative APEs: interior fraction
    Eigen::RowVectorXd ghat;         // d mean(pe) / d beta (1 x K)
};

// Derivative APE of a continuous variable appearing in no interaction.
ApeEstimate ape_continuous(const DesignMatrix& design, const FitResult& fit,
                           const std::string& variable);  // NotContinuous, VariableInInteraction

// Derivative APE of a continuous variable that parents interaction columns:
// pe_i = (beta_k + sum_j beta_j x_other,ij) * link factor.
ApeEstimate ape_chain(const DesignMatrix& design, const FitResult& fit,
                      const std::string& variable);  // NotContinuous

// Discrete-difference APE of a binary variable; counterfactual rows set it to
// 1/0 and recompute every interaction column it parents.
ApeEstimate ape_discrete(const DesignMatrix& design, const FitResult& fit,
                         const std::string& variable);  // NotBinary

// Pick the appropriate APE by column kind (binary -> discrete; continuous
// parent -> chain; plain continuous -> derivative).
ApeEstimate ape_auto(const DesignMatrix& design, const FitResult& fit,
                     const std::string& variable);

// Delta-method SE from the influence h_i = pe_i - mean - Ghat A^-1 s_i.
double ape_se(const DesignMatrix& design, const FitResult& fit, const ApeEstimate& ape,
              const SandwichParts& parts);  // SingularA

// Nonparametric bootstrap over rows: refit, recompute the APE, sd across
// replications. Deterministic given seed; failed replications are dropped
// (error when more than 10% fail).
double bootstrap_ape_se(const DesignMatrix& design, EstimatorKind kind,
                        const std::string& variable, int reps, std::uint64_t seed);

}  // namespace ramplab
