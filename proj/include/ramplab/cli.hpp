#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ramplab/dataset.hpp"
#include "ramplab/estimators.hpp"
#include "ramplab/inference.hpp"

namespace ramplab {

struct FitRequest {
    std::vector<EstimatorKind> estimators;  // nonempty
    int bootstrap_reps = 0;                 // 0: no bootstrap SEs
    std::uint64_t seed = 0;
};

struct EstimatorReport {
    EstimatorKind kind = EstimatorKind::OlsLpm;
    bool ok = false;         // fit + inference completed
    bool converged = false;
    SolverPath solver_path = SolverPath::ClosedForm;
    std::string error;
    Eigen::VectorXd beta;
    Eigen::VectorXd se;                 // robust coefficient SEs
    std::vector<ApeEstimate> apes;      // one per reported variable, se filled
    std::vector<double> boot_se;        // parallel to apes (when bootstrapping)
    double frac_unit_interval = 0.0;
    double mse = 0.0;
};

struct FitReport {
    std::size_t n = 0;
    std::size_t dropped = 0;
    std::vector<std::string> ape_variables;  // binary/continuous design columns
    std::vector<EstimatorReport> estimators;
    bool any_convergence_failure = false;
};

// The computational core of the `fit` command (shared with tests): fits the
// requested estimators, attaches robust SEs, APEs with delta-method SEs, the
// unit-interval fraction, and the mean squared error. Convergence failures
// are recorded per estimator (partial report); data errors propagate.
FitReport compute_fit_report(const DesignMatrix& design, const FitRequest& request,
                             std::size_t dropped_rows = 0);

std::string fit_report_to_csv(const FitReport& report, int precision = 4);
std::string fit_report_to_markdown(const FitReport& report, int precision = 4);

// Full command-line front end. Returns the process exit code:
// 0 success, 2 input/data error, 3 convergence failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ramplab
