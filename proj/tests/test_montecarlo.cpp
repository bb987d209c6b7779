#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "doctest.h"
#include "frozen_oracles.hpp"
#include "ramplab/errors.hpp"
#include "ramplab/montecarlo.hpp"

using namespace ramplab;

namespace {

SimScenario scenario(CovariateDesign cd, ErrorLaw law, double a, bool inter, int n_obs,
                     int reps, std::uint64_t seed) {
    SimScenario sc;
    sc.covariate_design = cd;
    sc.error_law = law;
    sc.a = a;
    sc.interaction = inter;
    sc.betas = default_betas(inter);
    sc.n_obs = n_obs;
    sc.reps = reps;
    sc.seed = seed;
    return sc;
}

bool raises(ErrorCode want, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == want;
    }
    return false;
}

void check_first_rows(const TruthDraw& d, const double* x1, const double* x2,
                      const double* y) {
    for (int i = 0; i < 3; ++i) {
        CHECK(std::fabs(d.design.X(i, 1) - x1[i]) <= 1e-10);
        CHECK(d.design.X(i, 2) == x2[i]);
        CHECK(d.design.y(i) == y[i]);
    }
}

// bitwise-identical up to NaN (NaN cells, e.g. the truth row's p01, compare equal)
bool same(double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
}

void check_cells_equal(const SimReport& a, const SimReport& b) {
    for (int e = 0; e < 5; ++e) {
        CHECK(same(a.cells[e].ape1_mean, b.cells[e].ape1_mean));
        CHECK(same(a.cells[e].ape1_sd, b.cells[e].ape1_sd));
        CHECK(same(a.cells[e].ape2_mean, b.cells[e].ape2_mean));
        CHECK(same(a.cells[e].ape2_sd, b.cells[e].ape2_sd));
        CHECK(same(a.cells[e].p01_mean, b.cells[e].p01_mean));
        CHECK(same(a.cells[e].se1_mean, b.cells[e].se1_mean));
        CHECK(a.cells[e].failures == b.cells[e].failures);
    }
    CHECK(same(a.p_y1, b.p_y1));
    CHECK(same(a.p_band, b.p_band));
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("scenario validation rejects bad parameters") {
    SimScenario sc = scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5, false,
                              100, 10, 1);
    CHECK_NOTHROW(sc.check());

    SimScenario bad_a = sc;
    bad_a.a = 0.0;
    CHECK(raises(ErrorCode::NonPositiveA, [&] { bad_a.check(); }));

    SimScenario bad_b = sc;
    bad_b.betas = Eigen::VectorXd::Zero(4);  // interaction flag says 3
    CHECK(raises(ErrorCode::InvalidArgument, [&] { bad_b.check(); }));

    SimScenario bad_n = sc;
    bad_n.n_obs = 4;
    CHECK(raises(ErrorCode::InvalidArgument, [&] { bad_n.check(); }));

    SimScenario bad_r = sc;
    bad_r.reps = 0;
    CHECK(raises(ErrorCode::InvalidArgument, [&] { bad_r.check(); }));

    // normal errors ignore the half-width entirely
    SimScenario nrm = scenario(CovariateDesign::SymNormal, ErrorLaw::StdNormal, -1.0,
                               false, 100, 10, 1);
    CHECK_NOTHROW(nrm.check());
}

TEST_CASE("default coefficient vectors") {
    const Eigen::VectorXd b3 = default_betas(false);
    REQUIRE(b3.size() == 3);
    CHECK(b3(0) == 0.1);
    CHECK(b3(1) == 0.2);
    CHECK(b3(2) == -0.3);
    const Eigen::VectorXd b4 = default_betas(true);
    REQUIRE(b4.size() == 4);
    CHECK(b4(3) == -0.3);
}

TEST_CASE("draws replay the reference stream for every covariate design") {
    const TruthDraw sym = gen_draw(
        scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5, false, 5, 1, 123), 0);
    check_first_rows(sym, frozen::kDraw_sym_x1, frozen::kDraw_sym_x2, frozen::kDraw_sym_y);

    const TruthDraw asym = gen_draw(
        scenario(CovariateDesign::AsymLognormal, ErrorLaw::Uniform, 0.5, false, 5, 1, 123), 0);
    check_first_rows(asym, frozen::kDraw_asym_x1, frozen::kDraw_asym_x2, frozen::kDraw_asym_y);

    const TruthDraw uni = gen_draw(
        scenario(CovariateDesign::UniformWide, ErrorLaw::Uniform, 0.5, false, 5, 1, 123), 0);
    check_first_rows(uni, frozen::kDraw_uniwide_x1, frozen::kDraw_uniwide_x2,
                     frozen::kDraw_uniwide_y);
}

TEST_CASE("per-draw truth statistics match the reference") {
    const TruthDraw sym = gen_draw(
        scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5, false, 50, 1, 123), 0);
    CHECK(sym.true_ape1 == frozen::kTruthSym_ape1);  // integer-count formula is exact
    CHECK(std::fabs(sym.true_ape2 - frozen::kTruthSym_ape2) <= 1e-12);
    CHECK(sym.p_band == frozen::kTruthSym_pband);
    CHECK(sym.p_y1 == frozen::kTruthSym_py1);

    const TruthDraw an = gen_draw(
        scenario(CovariateDesign::AsymLognormal, ErrorLaw::StdNormal, 1.0, false, 50, 1, 9), 2);
    CHECK(std::fabs(an.true_ape1 - frozen::kTruthAsymN_ape1) <= 1e-12);
    CHECK(std::fabs(an.true_ape2 - frozen::kTruthAsymN_ape2) <= 1e-12);
    CHECK(an.p_y1 == frozen::kTruthAsymN_py1);
    CHECK(std::isnan(an.p_band));
}

TEST_CASE("single replication fits all estimators") {
    const TruthDraw d = gen_draw(
        scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5, false, 200, 1, 31), 0);
    const RepRecord r = run_replication(d, true);
    CHECK(r.t_ape1 == d.true_ape1);
    for (int e = 0; e < 4; ++e) {
        CHECK(r.est[e].ok);
        CHECK(r.est[e].se1 > 0.0);
        CHECK(r.est[e].se2 > 0.0);
        CHECK(r.est[e].vcov_mineig_ratio >= -1e-10);
    }
    CHECK(r.est[2].p01 == 1.0);  // probit probabilities always inside [0,1]
    CHECK(r.est[3].p01 == 1.0);
}

TEST_CASE("study results are reproducible and job-count invariant") {
    const SimScenario sc = scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5,
                                    false, 60, 8, 55);
    McOptions one;
    one.jobs = 1;
    one.collect_se = true;
    const SimReport r1 = run_mc(sc, one);
    const SimReport r2 = run_mc(sc, one);
    check_cells_equal(r1, r2);

    McOptions two = one;
    two.jobs = 2;
    const SimReport r3 = run_mc(sc, two);
    check_cells_equal(r1, r3);  // ordered reduction: worker count cannot matter
    CHECK(r1.reps_run == 8);
    CHECK(r1.total_fits == 4 * 8);
    CHECK(r1.worst_mineig_ratio >= -1e-10);
}

TEST_CASE("a single replication yields means but no spread") {
    const SimScenario sc = scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5,
                                    false, 80, 1, 7);
    McOptions opts;
    opts.jobs = 1;
    const SimReport r = run_mc(sc, opts);
    for (int e = 0; e < 5; ++e) {
        CHECK(std::isfinite(r.cells[e].ape1_mean));
        CHECK(std::isnan(r.cells[e].ape1_sd));
    }
    CHECK_FALSE(r.collected_se);
    CHECK(r.cells[1].se1_mean == 0.0);
}

TEST_CASE("delta standard errors are collected on request") {
    const SimScenario sc = scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5,
                                    false, 120, 4, 19);
    McOptions opts;
    opts.jobs = 1;
    opts.collect_se = true;
    const SimReport r = run_mc(sc, opts);
    CHECK(r.collected_se);
    for (int e = 1; e < 5; ++e) {
        CHECK(r.cells[e].se1_mean > 0.0);
        CHECK(r.cells[e].se2_mean > 0.0);
    }
}

TEST_CASE("near-deterministic outcomes overwhelm the likelihood fits") {
    // Tiny noise + wide covariate support separates almost every draw.
    const SimScenario sc = scenario(CovariateDesign::UniformWide, ErrorLaw::Uniform, 0.01,
                                    false, 6, 10, 99);
    McOptions opts;
    opts.jobs = 1;
    CHECK(raises(ErrorCode::TooManyFailures, [&] { run_mc(sc, opts); }));
}

TEST_CASE("fixed study scenarios are wired to the right designs") {
    const SimScenario t1 = table_scenario(1, 5);
    CHECK(t1.covariate_design == CovariateDesign::SymNormal);
    CHECK(t1.error_law == ErrorLaw::Uniform);
    CHECK(t1.a == 0.5);
    CHECK_FALSE(t1.interaction);
    CHECK(t1.n_obs == 1000);
    CHECK(t1.reps == 1000);
    CHECK(t1.seed == 5);
    CHECK(t1.betas.size() == 3);

    const SimScenario t4 = table_scenario(4, 5);
    CHECK(t4.interaction);
    CHECK(t4.betas.size() == 4);
    CHECK(t4.a == 0.5);

    const SimScenario t8 = table_scenario(8, 5);
    CHECK(t8.covariate_design == CovariateDesign::UniformWide);
    CHECK(t8.a == 1.0);

    const SimScenario t11 = table_scenario(11, 5);
    CHECK(t11.error_law == ErrorLaw::StdNormal);
    CHECK(t11.covariate_design == CovariateDesign::SymNormal);

    const SimScenario t13 = table_scenario(13, 5);
    CHECK(t13.error_law == ErrorLaw::StdNormal);
    CHECK(t13.covariate_design == CovariateDesign::AsymLognormal);

    for (int id : {0, 9, 10, 14}) {
        CHECK(raises(ErrorCode::UnknownTable, [&] { table_scenario(id, 5); }));
    }
}

TEST_CASE("text reports carry the same numbers in both formats") {
    const SimScenario sc = scenario(CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5,
                                    false, 60, 3, 11);
    McOptions opts;
    opts.jobs = 1;
    opts.collect_se = true;
    const SimReport r = run_mc(sc, opts);
    const std::string csv = report_to_csv(r, 4);
    const std::string md = report_to_markdown(r, 4);

    CHECK(csv.rfind("estimator,statistic,value\n", 0) == 0);
    for (const char* label : {"truth", "ols", "ramp", "probit", "logit"}) {
        CHECK(csv.find(std::string(label) + ",ape1_mean,") != std::string::npos);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", r.cells[1].ape1_mean);
    CHECK(csv.find(std::string(",ape1_mean,") + buf) != std::string::npos);
    CHECK(md.find(buf) != std::string::npos);
    std::snprintf(buf, sizeof(buf), "%.4f", r.p_y1);
    CHECK(csv.find(std::string("sample,p_y1,") + buf) != std::string::npos);
    CHECK(md.find(buf) != std::string::npos);
    CHECK(md.find("| statistic |") == 0);
    CHECK(md.find("APE1 mean delta SE") != std::string::npos);

    // higher precision changes the rendering, not the numbers
    const std::string csv6 = report_to_csv(r, 6);
    std::snprintf(buf, sizeof(buf), "%.6f", r.cells[1].ape1_mean);
    CHECK(csv6.find(buf) != std::string::npos);
}

}  // TEST_SUITE
