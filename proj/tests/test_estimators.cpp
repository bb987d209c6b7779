#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "frozen_oracles.hpp"
#include "ramplab/dataset.hpp"
#include "ramplab/errors.hpp"
#include "ramplab/estimators.hpp"

using namespace ramplab;

namespace {

DesignMatrix design3(const double* x1, const double* x2, const double* y, int n) {
    DesignMatrix d;
    d.X.resize(n, 3);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        d.X(i, 1) = x1[i];
        d.X(i, 2) = x2[i];
        d.y(i) = y[i];
    }
    d.cols = {{ColumnKind::Intercept, "const", -1, -1},
              {ColumnKind::Continuous, "x1", -1, -1},
              {ColumnKind::Binary, "x2", -1, -1}};
    return d;
}

DesignMatrix fix_a() {
    return design3(frozen::kFixA_x1, frozen::kFixA_x2, frozen::kFixA_y,
                   static_cast<int>(std::size(frozen::kFixA_y)));
}

DesignMatrix fix_cycle() {
    return design3(frozen::kCycle_x1, frozen::kCycle_x2, frozen::kCycle_y,
                   static_cast<int>(std::size(frozen::kCycle_y)));
}

bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

bool raises(ErrorCode want, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == want;
    }
    return false;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("ramp clamps outside the unit interval") {
    CHECK(ramp(-1.0) == 0.0);
    CHECK(ramp(0.0) == 0.0);
    CHECK(ramp(0.25) == 0.25);
    CHECK(ramp(1.0) == 1.0);
    CHECK(ramp(7.5) == 1.0);
}

TEST_CASE("scaled ramp is the uniform cdf") {
    CHECK(ramp_a(-0.5, 0.5) == 0.0);
    CHECK(ramp_a(0.5, 0.5) == 1.0);
    CHECK(ramp_a(0.0, 0.5) == 0.5);
    CHECK(ramp_a(0.1, 0.5) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(ramp_a(-2.0, 1.0) == 0.0);
    CHECK(raises(ErrorCode::NonPositiveA, [] { ramp_a(0.1, 0.0); }));
    CHECK(raises(ErrorCode::NonPositiveA, [] { ramp_a(0.1, -1.0); }));
}

TEST_CASE("least squares fit matches the reference solution") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_ols(d);
    REQUIRE(f.beta.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(close(f.beta(j), frozen::kFixA_olsBeta[j], 1e-11));
    CHECK(close(f.objective, frozen::kFixA_olsSsr, 1e-11));
    CHECK(f.frac_unit_interval == frozen::kFixA_olsFrac01);
    CHECK(f.converged);
    CHECK(f.solver_path == SolverPath::ClosedForm);
    CHECK(f.kind == EstimatorKind::OlsLpm);
}

TEST_CASE("rank-deficient design is rejected") {
    DesignMatrix d;
    d.X.resize(4, 3);
    d.y.resize(4);
    for (int i = 0; i < 4; ++i) {
        d.X(i, 0) = 1.0;
        d.X(i, 1) = i + 1.0;
        d.X(i, 2) = 2.0 * (i + 1.0);
        d.y(i) = i % 2;
    }
    d.cols = {{ColumnKind::Intercept, "const", -1, -1},
              {ColumnKind::Continuous, "a", -1, -1},
              {ColumnKind::Continuous, "b", -1, -1}};
    CHECK(raises(ErrorCode::RankDeficient, [&] { fit_ols(d); }));
}

TEST_CASE("objective and gradient match the reference point values") {
    const DesignMatrix d = fix_a();
    Eigen::Map<const Eigen::VectorXd> bt(frozen::kFixA_testBeta, 3);
    CHECK(close(nls_objective(d, bt), frozen::kFixA_qAtTestBeta, 1e-13));
    const Eigen::VectorXd g = nls_gradient(d, bt);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::fabs(g(j) - frozen::kFixA_gradAtTestBeta[j]) <= 1e-12);
    }
}

TEST_CASE("trimming solver reaches the reference optimum") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_ramp_nls(d);
    CHECK(f.converged);
    CHECK(f.solver_path == SolverPath::NewtonTrim);
    for (int j = 0; j < 3; ++j) CHECK(close(f.beta(j), frozen::kFixA_rampBeta[j], 1e-10));
    CHECK(close(nls_objective(d, f.beta), frozen::kFixA_rampQ, 1e-12));
    const double n = static_cast<double>(d.n());
    CHECK(close(f.objective, frozen::kFixA_rampQ * n, 1e-12));  // SSR = N * Q_N
    CHECK(f.frac_unit_interval == frozen::kFixA_rampInterior / n);
}

TEST_CASE("converged trim fit is a fixed point of one more step") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_ramp_nls(d);
    const Eigen::VectorXd again = ito_step(d, f.beta);
    CHECK((again - f.beta).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("trim step error taxonomy") {
    const DesignMatrix d = fix_a();
    Eigen::VectorXd far(3);
    far << 5.0, 0.0, 0.0;  // every index at 5 -> empty interior
    CHECK(raises(ErrorCode::EmptyTrimSet, [&] { ito_step(d, far); }));
    Eigen::VectorXd wrong(2);
    wrong << 0.5, 0.0;
    CHECK(raises(ErrorCode::DimensionMismatch, [&] { ito_step(d, wrong); }));
}

TEST_CASE("forced empty trim set falls back to the simplex and descends") {
    const DesignMatrix d = fix_a();
    RampNlsOptions opts;
    Eigen::VectorXd far(3);
    far << 5.0, 0.0, 0.0;
    opts.start = far;
    const FitResult f = fit_ramp_nls(d, opts);
    CHECK(f.solver_path == SolverPath::FallbackSimplex);
    CHECK(f.converged);
    const double q_ols_start = nls_objective(d, fit_ols(d).beta);
    CHECK(nls_objective(d, f.beta) <= q_ols_start + 1e-15);
}

TEST_CASE("cycling active set falls back and still descends") {
    const DesignMatrix d = fix_cycle();
    const FitResult f = fit_ramp_nls(d);
    CHECK(f.solver_path == SolverPath::FallbackSimplex);
    CHECK(f.converged);
    CHECK(nls_objective(d, f.beta) <= frozen::kCycle_olsQ + 1e-12);
}

TEST_CASE("all-unit outcome is handled without hanging") {
    DesignMatrix d = fix_a();
    d.y.setOnes();
    const FitResult f = fit_ramp_nls(d);
    CHECK(f.converged);
    const double q_ols = nls_objective(d, fit_ols(d).beta);
    CHECK(nls_objective(d, f.beta) <= q_ols + 1e-15);
}

TEST_CASE("simplex path agrees with the trimming path") {
    const DesignMatrix d = fix_a();
    const FitResult newton = fit_ramp_nls(d);
    RampNlsOptions opts;
    opts.force_simplex = true;
    const FitResult simplex = fit_ramp_nls(d, opts);
    CHECK(simplex.solver_path == SolverPath::FallbackSimplex);
    CHECK(simplex.converged);
    CHECK((newton.beta - simplex.beta).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("all-interior data makes the trimming solver equal least squares exactly") {
    const int n = static_cast<int>(std::size(frozen::kFixB_y));
    DesignMatrix d;
    d.X.resize(n, 2);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        d.X(i, 1) = frozen::kFixB_x[i];
        d.y(i) = frozen::kFixB_y[i];
    }
    d.cols = {{ColumnKind::Intercept, "const", -1, -1},
              {ColumnKind::Continuous, "x", -1, -1}};
    const FitResult ols = fit_ols(d);
    REQUIRE(ols.index.minCoeff() > 0.02);
    REQUIRE(ols.index.maxCoeff() < 0.98);
    const FitResult rampf = fit_ramp_nls(d);
    CHECK(rampf.solver_path == SolverPath::NewtonTrim);
    for (int j = 0; j < 2; ++j) CHECK(rampf.beta(j) == ols.beta(j));  // bitwise
    CHECK(rampf.frac_unit_interval == 1.0);
}

TEST_CASE("probit fit matches the reference solution") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_probit(d);
    CHECK(f.converged);
    CHECK(f.clamp_count == 0);
    CHECK(f.frac_unit_interval == 1.0);
    for (int j = 0; j < 3; ++j) CHECK(close(f.beta(j), frozen::kFixA_probitBeta[j], 1e-9));
    CHECK(close(f.objective, frozen::kFixA_probitLoglik, 1e-9));
    for (int i = 0; i < f.prob.size(); ++i) {
        CHECK(f.prob(i) > 0.0);
        CHECK(f.prob(i) < 1.0);
    }
}

TEST_CASE("logit fit matches the reference solution") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_logit(d);
    CHECK(f.converged);
    for (int j = 0; j < 3; ++j) CHECK(close(f.beta(j), frozen::kFixA_logitBeta[j], 1e-9));
    CHECK(close(f.objective, frozen::kFixA_logitLoglik, 1e-9));
}

TEST_CASE("intercept-only likelihood fits reproduce the sample frequency") {
    const int n = 10;
    DesignMatrix d;
    d.X = Eigen::MatrixXd::Ones(n, 1);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) d.y(i) = (i < 3) ? 1.0 : 0.0;
    d.cols = {{ColumnKind::Intercept, "const", -1, -1}};

    const FitResult lf = fit_logit(d);
    CHECK(close(lf.beta(0), std::log(0.3 / 0.7), 1e-10));
    CHECK(close(lf.prob.mean(), 0.3, 1e-10));

    const FitResult pf = fit_probit(d);
    CHECK(close(pf.prob.mean(), 0.3, 1e-10));
}

TEST_CASE("perfectly separated data raises instead of diverging") {
    const int n = 8;
    DesignMatrix d;
    d.X.resize(n, 2);
    d.y.resize(n);
    // the two points nearest zero are far closer than the spread, so the
    // index must blow past the divergence guard before the score vanishes
    const double xs[n] = {-2.0, -1.5, -1.0, -0.1, 0.1, 1.0, 1.5, 2.0};
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        d.X(i, 1) = xs[i];
        d.y(i) = xs[i] > 0.0 ? 1.0 : 0.0;
    }
    d.cols = {{ColumnKind::Intercept, "const", -1, -1},
              {ColumnKind::Continuous, "x", -1, -1}};
    CHECK(raises(ErrorCode::PerfectSeparation, [&] { fit_probit(d); }));
    CHECK(raises(ErrorCode::PerfectSeparation, [&] { fit_logit(d); }));
}

TEST_CASE("prediction reapplies the fitted link") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_probit(d);
    const Prediction p = predict(f, d);
    CHECK((p.index - f.index).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.prob - f.prob).cwiseAbs().maxCoeff() == 0.0);

    DesignMatrix wrong = d;
    wrong.X = d.X.leftCols(2);
    CHECK(raises(ErrorCode::DimensionMismatch, [&] { predict(f, wrong); }));
}

TEST_CASE("mean squared error matches its definition") {
    const DesignMatrix d = fix_a();
    const FitResult f = fit_ols(d);
    const double direct = (d.y - f.prob).squaredNorm() / static_cast<double>(d.n());
    CHECK(close(mean_squared_error(f, d), direct, 1e-15));
}

}  // TEST_SUITE
