#include "ramplab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ramplab/errors.hpp"
#include "ramplab/mathx.hpp"
#include "ramplab/rng.hpp"

namespace ramplab {

namespace {

constexpr double kClamp = 1e-12;

struct LinkEval {
    double G;   // response probability
    double g;   // a.e. density / derivative factor
    double gp;  // derivative of g
};

LinkEval link_eval(EstimatorKind kind, double z) {
    switch (kind) {
        case EstimatorKind::OlsLpm:
            return {z, 1.0, 0.0};
        case EstimatorKind::RampNls: {
            const double inside = (z > 0.0 && z < 1.0) ? 1.0 : 0.0;
            return {ramp(z), inside, 0.0};
        }
        case EstimatorKind::Probit: {
            const double pdf = mathx::norm_pdf(z);
            return {mathx::norm_cdf(z), pdf, -z * pdf};
        }
        case EstimatorKind::Logit: {
            const double G = mathx::logistic_cdf(z);
            const double g = G * (1.0 - G);
            return {G, g, g * (1.0 - 2.0 * G)};
        }
    }
    return {0.0, 0.0, 0.0};
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    // Equilibrate by the diagonal so the rank test is about genuine linear
    // dependence, not about regressor columns living on wildly different
    // scales (incomes in thousands next to indicator variables).
    const Eigen::Index k = A.rows();
    Eigen::VectorXd d(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(A(j, j) > 0.0)) {
            raise(ErrorCode::SingularA, "Hessian analogue A_N is numerically singular");
        }
        d(j) = std::sqrt(A(j, j));
    }
    const Eigen::MatrixXd As = d.cwiseInverse().asDiagonal() * A * d.cwiseInverse().asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        raise(ErrorCode::SingularA, "Hessian analogue A_N is numerically singular");
    }
    const Eigen::MatrixXd Bs = d.cwiseInverse().asDiagonal() * B;
    return d.cwiseInverse().asDiagonal() * lu.solve(Bs);
}

SandwichParts assemble(const DesignMatrix& design, const Eigen::MatrixXd& A,
                       const Eigen::MatrixXd& S, std::int64_t clamp_count) {
    const double n = static_cast<double>(design.n());
    SandwichParts parts;
    parts.A_N = A;
    parts.Omega_N = S.transpose() * S / n;
    const Eigen::MatrixXd Ainv_Om = solve_spd(A, parts.Omega_N);
    parts.V_hat = solve_spd(A, Ainv_Om.transpose()).transpose();
    // enforce exact symmetry against roundoff
    parts.V_hat = 0.5 * (parts.V_hat + parts.V_hat.transpose()).eval();
    parts.se.resize(parts.V_hat.rows());
    for (Eigen::Index j = 0; j < parts.V_hat.rows(); ++j) {
        parts.se(j) = std::sqrt(std::max(0.0, parts.V_hat(j, j)) / n);
    }
    parts.clamp_count = clamp_count;
    return parts;
}

}  // namespace

Eigen::MatrixXd score_matrix(const DesignMatrix& design, const FitResult& fit) {
    const Eigen::Index n = design.X.rows();
    Eigen::MatrixXd S(n, design.X.cols());
    const Eigen::VectorXd z = design.X * fit.beta;
    switch (fit.kind) {
        case EstimatorKind::OlsLpm:
            for (Eigen::Index i = 0; i < n; ++i) {
                S.row(i) = -design.X.row(i) * (design.y(i) - z(i));
            }
            break;
        case EstimatorKind::RampNls:
            for (Eigen::Index i = 0; i < n; ++i) {
                const bool interior = (z(i) > 0.0 && z(i) < 1.0);
                S.row(i) = interior ? (-design.X.row(i) * (design.y(i) - z(i))).eval()
                                    : Eigen::RowVectorXd::Zero(design.X.cols()).eval();
            }
            break;
        case EstimatorKind::Probit:
        case EstimatorKind::Logit:
            for (Eigen::Index i = 0; i < n; ++i) {
                const LinkEval le = link_eval(fit.kind, z(i));
                const double Gc = std::clamp(le.G, kClamp, 1.0 - kClamp);
                const double w = le.g / (Gc * (1.0 - Gc));
                S.row(i) = -design.X.row(i) * ((design.y(i) - Gc) * w);
            }
            break;
    }
    return S;
}

SandwichParts vcov_ols_robust(const DesignMatrix& design, const FitResult& fit) {
    const double n = static_cast<double>(design.n());
    const Eigen::MatrixXd A = design.X.transpose() * design.X / n;
    return assemble(design, A, score_matrix(design, fit), 0);
}

SandwichParts vcov_ramp_sandwich(const DesignMatrix& design, const FitResult& fit) {
    const double n = static_cast<double>(design.n());
    const Eigen::VectorXd z = design.X * fit.beta;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(design.X.cols(), design.X.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z(i) > 0.0 && z(i) < 1.0) {
            A.selfadjointView<Eigen::Lower>().rankUpdate(design.X.row(i).transpose(), 1.0);
        }
    }
    A = Eigen::MatrixXd(A.selfadjointView<Eigen::Lower>()) / n;
    return assemble(design, A, score_matrix(design, fit), 0);
}

SandwichParts vcov_qmle_sandwich(const DesignMatrix& design, const FitResult& fit) {
    const double n = static_cast<double>(design.n());
    const Eigen::VectorXd z = design.X * fit.beta;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(design.X.cols(), design.X.cols());
    std::int64_t clamp_count = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const LinkEval le = link_eval(fit.kind, z(i));
        const double Gc = std::clamp(le.G, kClamp, 1.0 - kClamp);
        if (Gc != le.G) ++clamp_count;
        const double w = le.g * le.g / (Gc * (1.0 - Gc));
        A.selfadjointView<Eigen::Lower>().rankUpdate(design.X.row(i).transpose(), w);
    }
    A = Eigen::MatrixXd(A.selfadjointView<Eigen::Lower>()) / n;
    return assemble(design, A, score_matrix(design, fit), clamp_count);
}

SandwichParts vcov_robust(const DesignMatrix& design, const FitResult& fit) {
    switch (fit.kind) {
        case EstimatorKind::OlsLpm: return vcov_ols_robust(design, fit);
        case EstimatorKind::RampNls: return vcov_ramp_sandwich(design, fit);
        case EstimatorKind::Probit:
        case EstimatorKind::Logit: return vcov_qmle_sandwich(design, fit);
    }
    raise(ErrorCode::InvalidArgument, "unknown estimator kind");
}

namespace {

// Interaction columns parented by `col`: pairs of (interaction column index,
// the other parent's column index).
std::vector<std::pair<int, int>> interactions_of(const DesignMatrix& design, int col) {
    std::vector<std::pair<int, int>> out;
    for (std::size_t j = 0; j < design.cols.size(); ++j) {
        const auto& info = design.cols[j];
        if (info.kind != ColumnKind::Interaction) continue;
        if (info.parent_a == col) out.emplace_back(static_cast<int>(j), info.parent_b);
        if (info.parent_b == col) out.emplace_back(static_cast<int>(j), info.parent_a);
    }
    return out;
}

ApeEstimate derivative_ape(const DesignMatrix& design, const FitResult& fit,
                           const std::string& variable, bool allow_parent) {
    const int k = design.column_index(variable);
    if (k < 0) raise(ErrorCode::UnknownColumn, "no design column named '" + variable + "'");
    if (design.cols[static_cast<std::size_t>(k)].kind != ColumnKind::Continuous) {
        raise(ErrorCode::NotContinuous, "'" + variable + "' is not a continuous regressor");
    }
    const auto inters = interactions_of(design, k);
    if (!inters.empty() && !allow_parent) {
        raise(ErrorCode::VariableInInteraction,
              "'" + variable + "' parents an interaction column; use the chain-rule APE");
    }

    const Eigen::Index n = design.X.rows();
    const Eigen::Index kk = design.X.cols();
    const double nd = static_cast<double>(n);
    const Eigen::VectorXd z = design.X * fit.beta;

    ApeEstimate ape;
    ape.variable = variable;
    ape.kind = ApeKind::Derivative;
    ape.pe.resize(n);
    ape.ghat = Eigen::RowVectorXd::Zero(kk);

    mathx::NeumaierSum pe_sum, g_sum;
    std::vector<mathx::NeumaierSum> other_sums(inters.size());
    Eigen::RowVectorXd qmle_term = Eigen::RowVectorXd::Zero(kk);
    const bool is_qmle =
        (fit.kind == EstimatorKind::Probit || fit.kind == EstimatorKind::Logit);

    for (Eigen::Index i = 0; i < n; ++i) {
        const LinkEval le = link_eval(fit.kind, z(i));
        double dcoef = fit.beta(k);
        for (std::size_t t = 0; t < inters.size(); ++t) {
            dcoef += fit.beta(inters[t].first) * design.X(i, inters[t].second);
        }
        ape.pe(i) = dcoef * le.g;
        pe_sum.add(ape.pe(i));
        g_sum.add(le.g);
        for (std::size_t t = 0; t < inters.size(); ++t) {
            other_sums[t].add(design.X(i, inters[t].second) * le.g);
        }
        if (is_qmle) qmle_term += design.X.row(i) * (dcoef * le.gp);
    }

    ape.estimate = pe_sum.total() / nd;
    ape.ghat(k) = g_sum.total() / nd;
    for (std::size_t t = 0; t < inters.size(); ++t) {
        ape.ghat(inters[t].first) = other_sums[t].total() / nd;
    }
    if (is_qmle) ape.ghat += qmle_term / nd;
    if (fit.kind == EstimatorKind::RampNls) ape.p_hat = g_sum.total() / nd;
    return ape;
}

}  // namespace

ApeEstimate ape_continuous(const DesignMatrix& design, const FitResult& fit,
                           const std::string& variable) {
    return derivative_ape(design, fit, variable, /*allow_parent=*/false);
}

ApeEstimate ape_chain(const DesignMatrix& design, const FitResult& fit,
                      const std::string& variable) {
    return derivative_ape(design, fit, variable, /*allow_parent=*/true);
}

ApeEstimate ape_discrete(const DesignMatrix& design, const FitResult& fit,
                         const std::string& variable) {
    const int k = design.column_index(variable);
    if (k < 0) raise(ErrorCode::UnknownColumn, "no design column named '" + variable + "'");
    if (design.cols[static_cast<std::size_t>(k)].kind != ColumnKind::Binary) {
        raise(ErrorCode::NotBinary, "'" + variable + "' is not a 0/1 regressor");
    }

    const Eigen::Index n = design.X.rows();
    const Eigen::Index kk = design.X.cols();
    const double nd = static_cast<double>(n);
    const auto inters = interactions_of(design, k);

    ApeEstimate ape;
    ape.variable = variable;
    ape.kind = ApeKind::DiscreteDiff;
    ape.pe.resize(n);
    ape.ghat = Eigen::RowVectorXd::Zero(kk);

    mathx::NeumaierSum pe_sum;
    Eigen::RowVectorXd gh = Eigen::RowVectorXd::Zero(kk);
    Eigen::RowVectorXd row1(kk), row0(kk);
    for (Eigen::Index i = 0; i < n; ++i) {
        row1 = design.X.row(i);
        row0 = design.X.row(i);
        row1(k) = 1.0;
        row0(k) = 0.0;
        for (const auto& [j, other] : inters) {
            row1(j) = design.X(i, other);
            row0(j) = 0.0;
        }
        const double z1 = row1 * fit.beta;
        const double z0 = row0 * fit.beta;
        const LinkEval le1 = link_eval(fit.kind, z1);
        const LinkEval le0 = link_eval(fit.kind, z0);
        ape.pe(i) = le1.G - le0.G;
        pe_sum.add(ape.pe(i));
        gh += le1.g * row1 - le0.g * row0;
    }
    ape.estimate = pe_sum.total() / nd;
    ape.ghat = gh / nd;
    return ape;
}

ApeEstimate ape_auto(const DesignMatrix& design, const FitResult& fit,
                     const std::string& variable) {
    const int k = design.column_index(variable);
    if (k < 0) raise(ErrorCode::UnknownColumn, "no design column named '" + variable + "'");
    const auto kind = design.cols[static_cast<std::size_t>(k)].kind;
    if (kind == ColumnKind::Binary) return ape_discrete(design, fit, variable);
    if (kind == ColumnKind::Continuous) {
        return interactions_of(design, k).empty() ? ape_continuous(design, fit, variable)
                                                  : ape_chain(design, fit, variable);
    }
    raise(ErrorCode::NotContinuous,
          "'" + variable + "' is an intercept or interaction column");
}

double ape_se(const DesignMatrix& design, const FitResult& fit, const ApeEstimate& ape,
              const SandwichParts& parts) {
    const Eigen::MatrixXd S = score_matrix(design, fit);
    const Eigen::VectorXd u = solve_spd(parts.A_N, ape.ghat.transpose());
    const Eigen::VectorXd correction = S * u;
    const double nd = static_cast<double>(design.n());
    std::vector<double> h(static_cast<std::size_t>(design.n()));
    for (Eigen::Index i = 0; i < correction.size(); ++i) {
        h[static_cast<std::size_t>(i)] = ape.pe(i) - ape.estimate - correction(i);
    }
    return std::sqrt(mathx::pop_variance(h) / nd);
}

double bootstrap_ape_se(const DesignMatrix& design, EstimatorKind kind,
                        const std::string& variable, int reps, std::uint64_t seed) {
    if (reps < 2) raise(ErrorCode::InvalidArgument, "bootstrap needs reps >= 2");
    const Eigen::Index n = design.X.rows();
    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(reps));
    int failures = 0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng(seed, make_stream(kStreamTagBootstrap, static_cast<std::uint64_t>(rep)));
        DesignMatrix re;
        re.X.resize(n, design.X.cols());
        re.y.resize(n);
        re.cols = design.cols;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto draw = static_cast<Eigen::Index>(rng.uniform01() * static_cast<double>(n));
            if (draw >= n) draw = n - 1;
            re.X.row(i) = design.X.row(draw);
            re.y(i) = design.y(draw);
        }
        try {
            FitResult fit;
            switch (kind) {
                case EstimatorKind::OlsLpm: fit = fit_ols(re); break;
                case EstimatorKind::RampNls: fit = fit_ramp_nls(re); break;
                case EstimatorKind::Probit: fit = fit_probit(re); break;
                case EstimatorKind::Logit: fit = fit_logit(re); break;
            }
            estimates.push_back(ape_auto(re, fit, variable).estimate);
        } catch (const Error&) {
            ++failures;
        }
    }
    if (failures * 10 > reps) {
        raise(ErrorCode::TooManyFailures,
              std::to_string(failures) + " of " + std::to_string(reps) +
                  " bootstrap replications failed");
    }
    return mathx::sample_sd(estimates);
}

}  // namespace ramplab
