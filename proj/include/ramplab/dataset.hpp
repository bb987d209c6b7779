#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ramplab/mathx.hpp"

namespace ramplab {

// Column-oriented table holding complete cases only (rows with a missing
// value in any requested column are dropped, order preserved).
struct Dataset {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<double> y;
    std::size_t n_dropped = 0;

    std::size_t n() const { return y.size(); }
    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;  // UnknownColumn
};

// Parse a CSV file (header row, comma separators, '.' decimal point, empty
// field = missing) and keep complete cases across outcome + regressors.
Dataset load_csv(const std::string& path, const std::string& outcome,
                 const std::vector<std::string>& regressors);

// Assemble a Dataset from in-memory vectors (used by simulation and tests).
Dataset make_dataset(std::vector<std::string> names,
                     std::vector<std::vector<double>> columns,
                     std::vector<double> y);

enum class ColumnKind { Intercept, Continuous, Binary, Interaction };

struct ColumnInfo {
    ColumnKind kind = ColumnKind::Continuous;
    std::string name;
    // X-column indices of the interaction's parents (valid iff kind == Interaction).
    int parent_a = -1;
    int parent_b = -1;
};

struct DesignMatrix {
    Eigen::MatrixXd X;   // N x K, first column all ones
    Eigen::VectorXd y;   // binary outcomes
    std::vector<ColumnInfo> cols;

    std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t k() const { return static_cast<std::size_t>(X.cols()); }
    int column_index(const std::string& name) const;  // -1 when absent
};

struct DesignSpec {
    std::vector<std::string> regressors;
    std::vector<std::pair<std::string, std::string>> interactions;
    // When set, layout is [1, z..., w, w*z...] with w this binary column and
    // z the remaining regressors in listed order.
    std::optional<std::string> full_interactions_with;
};

// Build [intercept, regressors, interactions] (or the full-interaction
// layout), tag column kinds, and verify numerical rank
// (sigma_min/sigma_max > 1e-10, else RankDeficient naming a dependent column).
DesignMatrix build_design(const Dataset& data, const DesignSpec& spec);

struct ColumnDiagnostics {
    std::string name;
    mathx::Moments m;
};

struct ValidationReport {
    std::vector<ColumnDiagnostics> columns;
    bool rank_ok = false;
    double sv_ratio = 0.0;  // sigma_min / sigma_max
};

ValidationReport validate(const DesignMatrix& design);

}  // namespace ramplab
