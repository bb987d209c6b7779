#include "ramplab/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "ramplab/errors.hpp"
#include "ramplab/inference.hpp"
#include "ramplab/mathx.hpp"
#include "ramplab/rng.hpp"

namespace ramplab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kSqrt2 = std::sqrt(2.0);

const char* kEstimatorLabels[5] = {"truth", "ols", "ramp", "probit", "logit"};

}  // namespace

void SimScenario::check() const {
    if (error_law == ErrorLaw::Uniform && !(a > 0.0)) {
        raise(ErrorCode::NonPositiveA, "uniform error half-width a must be positive");
    }
    const Eigen::Index want = interaction ? 4 : 3;
    if (betas.size() != want) {
        raise(ErrorCode::InvalidArgument,
              "betas must have length " + std::to_string(want) +
                  (interaction ? " with" : " without") + " interaction");
    }
    if (n_obs < 5) raise(ErrorCode::InvalidArgument, "n_obs too small");
    if (reps < 1) raise(ErrorCode::InvalidArgument, "reps must be >= 1");
}

Eigen::VectorXd default_betas(bool interaction) {
    Eigen::VectorXd b(interaction ? 4 : 3);
    if (interaction) {
        b << 0.1, 0.2, -0.3, -0.3;
    } else {
        b << 0.1, 0.2, -0.3;
    }
    return b;
}

TruthDraw gen_draw(const SimScenario& sc, std::uint64_t rep_index) {
    sc.check();
    const int n = sc.n_obs;
    const bool inter = sc.interaction;
    Rng rng(sc.seed, make_stream(kStreamTagReplication, rep_index));

    Eigen::VectorXd x1(n), x2(n), u(n);
    for (int i = 0; i < n; ++i) {
        const double v = rng.standard_normal();
        const double e = rng.standard_normal();
        const double r = rng.standard_normal();
        switch (sc.covariate_design) {
            case CovariateDesign::SymNormal:
                x1(i) = (v + e) / kSqrt2;
                x2(i) = ((v + r) / kSqrt2 > 0.0) ? 1.0 : 0.0;
                break;
            case CovariateDesign::AsymLognormal:
                x1(i) = std::exp(0.25 + (v + e) / kSqrt2);
                x2(i) = (0.25 + (v + r) / kSqrt2 > 0.0) ? 1.0 : 0.0;
                break;
            case CovariateDesign::UniformWide:
                x1(i) = rng.uniform(-10.0, 10.0);
                x2(i) = (0.25 + (v + r) / kSqrt2 > 0.0) ? 1.0 : 0.0;
                break;
        }
        u(i) = (sc.error_law == ErrorLaw::Uniform) ? rng.uniform(-sc.a, sc.a)
                                                   : rng.standard_normal();
    }

    const Eigen::Index k = inter ? 4 : 3;
    TruthDraw draw;
    draw.design.X.resize(n, k);
    draw.design.y.resize(n);
    draw.design.X.col(0).setOnes();
    draw.design.X.col(1) = x1;
    draw.design.X.col(2) = x2;
    if (inter) draw.design.X.col(3) = x1.cwiseProduct(x2);
    draw.design.cols = {{ColumnKind::Intercept, "const", -1, -1},
                        {ColumnKind::Continuous, "x1", -1, -1},
                        {ColumnKind::Binary, "x2", -1, -1}};
    if (inter) draw.design.cols.push_back({ColumnKind::Interaction, "x1:x2", 1, 2});

    const Eigen::VectorXd& b = sc.betas;
    draw.true_index = draw.design.X * b;
    for (int i = 0; i < n; ++i) {
        draw.design.y(i) = (draw.true_index(i) + u(i) > 0.0) ? 1.0 : 0.0;
    }

    // truth statistics at the true coefficients
    std::int64_t cnt_y1 = 0;
    mathx::NeumaierSum ape2_sum;
    if (sc.error_law == ErrorLaw::Uniform) {
        // integer counts keep the a=1 symmetric case exact
        std::int64_t cnt_band = 0, cnt_band_x2 = 0;
        for (int i = 0; i < n; ++i) {
            const double idx = draw.true_index(i);
            const bool band = std::fabs(idx) <= sc.a;
            if (band) {
                ++cnt_band;
                if (x2(i) == 1.0) ++cnt_band_x2;
            }
            const double idx1 = b(0) + b(1) * x1(i) + b(2) + (inter ? b(3) * x1(i) : 0.0);
            const double idx0 = b(0) + b(1) * x1(i);
            ape2_sum.add(ramp_a(idx1, sc.a) - ramp_a(idx0, sc.a));
            if (draw.design.y(i) == 1.0) ++cnt_y1;
        }
        const double denom = 2.0 * sc.a * static_cast<double>(n);
        draw.true_ape1 =
            (b(1) * static_cast<double>(cnt_band) +
             (inter ? b(3) * static_cast<double>(cnt_band_x2) : 0.0)) /
            denom;
        draw.p_band = static_cast<double>(cnt_band) / static_cast<double>(n);
    } else {
        mathx::NeumaierSum ape1_sum;
        for (int i = 0; i < n; ++i) {
            const double idx = draw.true_index(i);
            const double dcoef = b(1) + (inter ? b(3) * x2(i) : 0.0);
            ape1_sum.add(dcoef * mathx::norm_pdf(idx));
            const double idx1 = b(0) + b(1) * x1(i) + b(2) + (inter ? b(3) * x1(i) : 0.0);
            const double idx0 = b(0) + b(1) * x1(i);
            ape2_sum.add(mathx::norm_cdf(idx1) - mathx::norm_cdf(idx0));
            if (draw.design.y(i) == 1.0) ++cnt_y1;
        }
        draw.true_ape1 = ape1_sum.total() / static_cast<double>(n);
        draw.p_band = kNaN;
    }
    draw.true_ape2 = ape2_sum.total() / static_cast<double>(n);
    draw.p_y1 = static_cast<double>(cnt_y1) / static_cast<double>(n);
    return draw;
}

namespace {

double mineig_ratio(const Eigen::MatrixXd& V) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V, Eigen::EigenvaluesOnly);
    const double tr = V.trace();
    return (tr > 0.0) ? es.eigenvalues().minCoeff() / tr : 0.0;
}

}  // namespace

RepRecord run_replication(const TruthDraw& draw, bool collect_se) {
    RepRecord rec;
    rec.t_ape1 = draw.true_ape1;
    rec.t_ape2 = draw.true_ape2;
    rec.p_y1 = draw.p_y1;
    rec.p_band = draw.p_band;

    const EstimatorKind kinds[4] = {EstimatorKind::OlsLpm, EstimatorKind::RampNls,
                                    EstimatorKind::Probit, EstimatorKind::Logit};
    for (int e = 0; e < 4; ++e) {
        EstimatorRep& er = rec.est[static_cast<std::size_t>(e)];
        try {
            FitResult fit;
            switch (kinds[e]) {
                case EstimatorKind::OlsLpm: fit = fit_ols(draw.design); break;
                case EstimatorKind::RampNls: fit = fit_ramp_nls(draw.design); break;
                case EstimatorKind::Probit: fit = fit_probit(draw.design); break;
                case EstimatorKind::Logit: fit = fit_logit(draw.design); break;
            }
            if (!fit.converged) {
                er.error = "did not converge";
                continue;
            }
            const ApeEstimate a1 = ape_auto(draw.design, fit, "x1");
            const ApeEstimate a2 = ape_auto(draw.design, fit, "x2");
            er.ape1 = a1.estimate;
            er.ape2 = a2.estimate;
            er.p01 = (kinds[e] == EstimatorKind::Probit || kinds[e] == EstimatorKind::Logit)
                         ? 1.0
                         : fit.frac_unit_interval;
            const SandwichParts parts = vcov_robust(draw.design, fit);
            er.vcov_mineig_ratio = mineig_ratio(parts.V_hat);
            if (collect_se) {
                er.se1 = ape_se(draw.design, fit, a1, parts);
                er.se2 = ape_se(draw.design, fit, a2, parts);
            }
            er.ok = true;
        } catch (const Error& ex) {
            er.error = ex.what();
        }
    }
    return rec;
}

SimReport run_mc(const SimScenario& scenario, const McOptions& opts) {
    scenario.check();
    const int reps = scenario.reps;
    std::vector<RepRecord> records(static_cast<std::size_t>(reps));

    int jobs = opts.jobs;
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min(jobs, reps);

    auto worker = [&](int first, int past) {
        for (int r = first; r < past; ++r) {
            const TruthDraw draw = gen_draw(scenario, static_cast<std::uint64_t>(r));
            records[static_cast<std::size_t>(r)] = run_replication(draw, opts.collect_se);
        }
    };
    if (jobs == 1) {
        worker(0, reps);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (reps + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            const int first = j * chunk;
            const int past = std::min(reps, first + chunk);
            if (first >= past) break;
            pool.emplace_back(worker, first, past);
        }
        for (auto& t : pool) t.join();
    }

    // ordered deterministic reduce
    SimReport rep;
    rep.scenario = scenario;
    rep.reps_run = reps;
    rep.collected_se = opts.collect_se;
    rep.worst_mineig_ratio = 0.0;

    std::vector<double> t1, t2, py1, band;
    std::array<std::vector<double>, 4> a1, a2, p01, se1, se2;
    for (const RepRecord& r : records) {
        t1.push_back(r.t_ape1);
        t2.push_back(r.t_ape2);
        py1.push_back(r.p_y1);
        if (!std::isnan(r.p_band)) band.push_back(r.p_band);
        for (std::size_t e = 0; e < 4; ++e) {
            const EstimatorRep& er = r.est[e];
            if (!er.ok) {
                ++rep.cells[e + 1].failures;
                continue;
            }
            a1[e].push_back(er.ape1);
            a2[e].push_back(er.ape2);
            p01[e].push_back(er.p01);
            if (opts.collect_se) {
                se1[e].push_back(er.se1);
                se2[e].push_back(er.se2);
            }
            rep.worst_mineig_ratio = std::min(rep.worst_mineig_ratio, er.vcov_mineig_ratio);
            ++rep.total_fits;
        }
    }

    for (std::size_t e = 0; e < 4; ++e) {
        if (rep.cells[e + 1].failures * 20 > reps) {
            raise(ErrorCode::TooManyFailures,
                  std::string(kEstimatorLabels[e + 1]) + " failed in " +
                      std::to_string(rep.cells[e + 1].failures) + " of " +
                      std::to_string(reps) + " replications");
        }
    }

    auto fill = [&](EstimatorCells& c, const std::vector<double>& v1,
                    const std::vector<double>& v2) {
        c.ape1_mean = mathx::mean(v1);
        c.ape1_sd = mathx::sample_sd(v1);
        c.ape2_mean = mathx::mean(v2);
        c.ape2_sd = mathx::sample_sd(v2);
    };
    fill(rep.cells[0], t1, t2);
    rep.cells[0].p01_mean = kNaN;
    for (std::size_t e = 0; e < 4; ++e) {
        fill(rep.cells[e + 1], a1[e], a2[e]);
        rep.cells[e + 1].p01_mean = mathx::mean(p01[e]);
        if (opts.collect_se) {
            rep.cells[e + 1].se1_mean = mathx::mean(se1[e]);
            rep.cells[e + 1].se2_mean = mathx::mean(se2[e]);
        }
    }
    rep.p_y1 = mathx::mean(py1);
    rep.p_band = band.empty() ? kNaN : mathx::mean(band);
    return rep;
}

SimScenario table_scenario(int id, std::uint64_t seed) {
    SimScenario sc;
    sc.seed = seed;
    switch (id) {
        case 1: sc = {CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5, {}, false, 1000, 1000, seed}; break;
        case 2: sc = {CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.25, {}, false, 1000, 1000, seed}; break;
        case 3: sc = {CovariateDesign::SymNormal, ErrorLaw::Uniform, 1.0, {}, false, 1000, 1000, seed}; break;
        case 4: sc = {CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.5, {}, true, 1000, 1000, seed}; break;
        case 5: sc = {CovariateDesign::SymNormal, ErrorLaw::Uniform, 0.25, {}, true, 1000, 1000, seed}; break;
        case 6: sc = {CovariateDesign::AsymLognormal, ErrorLaw::Uniform, 0.25, {}, false, 1000, 1000, seed}; break;
        case 7: sc = {CovariateDesign::AsymLognormal, ErrorLaw::Uniform, 1.0, {}, false, 1000, 1000, seed}; break;
        case 8: sc = {CovariateDesign::UniformWide, ErrorLaw::Uniform, 1.0, {}, false, 1000, 1000, seed}; break;
        case 11: sc = {CovariateDesign::SymNormal, ErrorLaw::StdNormal, 1.0, {}, false, 1000, 1000, seed}; break;
        case 12: sc = {CovariateDesign::SymNormal, ErrorLaw::StdNormal, 1.0, {}, true, 1000, 1000, seed}; break;
        case 13: sc = {CovariateDesign::AsymLognormal, ErrorLaw::StdNormal, 1.0, {}, false, 1000, 1000, seed}; break;
        default: raise(ErrorCode::UnknownTable, "no table with id " + std::to_string(id));
    }
    sc.betas = default_betas(sc.interaction);
    return sc;
}

SimReport reproduce_table(int id, std::uint64_t seed, const McOptions& opts) {
    return run_mc(table_scenario(id, seed), opts);
}

namespace {

std::string fmt(double v, int precision) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

}  // namespace

std::string report_to_csv(const SimReport& r, int precision) {
    std::ostringstream os;
    os << "estimator,statistic,value\n";
    auto emit = [&](const char* est, const char* stat, double v) {
        os << est << ',' << stat << ',' << fmt(v, precision) << '\n';
    };
    for (std::size_t e = 0; e < 5; ++e) {
        const EstimatorCells& c = r.cells[e];
        emit(kEstimatorLabels[e], "ape1_mean", c.ape1_mean);
        emit(kEstimatorLabels[e], "ape1_sd", c.ape1_sd);
        emit(kEstimatorLabels[e], "ape2_mean", c.ape2_mean);
        emit(kEstimatorLabels[e], "ape2_sd", c.ape2_sd);
        if (e > 0) {
            emit(kEstimatorLabels[e], "p01_mean", c.p01_mean);
            if (r.collected_se) {
                emit(kEstimatorLabels[e], "ape1_se_mean", c.se1_mean);
                emit(kEstimatorLabels[e], "ape2_se_mean", c.se2_mean);
            }
            os << kEstimatorLabels[e] << ",failures," << c.failures << '\n';
        }
    }
    emit("sample", "p_y1", r.p_y1);
    emit("sample", "p_band", r.p_band);
    os << "sample,reps," << r.reps_run << '\n';
    return os.str();
}

std::string report_to_markdown(const SimReport& r, int precision) {
    std::ostringstream os;
    const char* heads[5] = {"Truth", "OLS", "Ramp", "Probit", "Logit"};
    os << "| statistic |";
    for (const char* h : heads) os << ' ' << h << " |";
    os << '\n';
    os << "|---|";
    for (int i = 0; i < 5; ++i) os << "---|";
    os << '\n';
    auto row = [&](const char* name, auto getter) {
        os << "| " << name << " |";
        for (std::size_t e = 0; e < 5; ++e) os << ' ' << getter(r.cells[e], e) << " |";
        os << '\n';
    };
    row("APE1 mean", [&](const EstimatorCells& c, std::size_t) { return fmt(c.ape1_mean, precision); });
    row("APE1 sd", [&](const EstimatorCells& c, std::size_t) { return fmt(c.ape1_sd, precision); });
    row("APE2 mean", [&](const EstimatorCells& c, std::size_t) { return fmt(c.ape2_mean, precision); });
    row("APE2 sd", [&](const EstimatorCells& c, std::size_t) { return fmt(c.ape2_sd, precision); });
    row("P(0<=yhat<=1)", [&](const EstimatorCells& c, std::size_t e) {
        return e == 0 ? std::string("NA") : fmt(c.p01_mean, precision);
    });
    if (r.collected_se) {
        row("APE1 mean delta SE", [&](const EstimatorCells& c, std::size_t e) {
            return e == 0 ? std::string("NA") : fmt(c.se1_mean, precision);
        });
        row("APE2 mean delta SE", [&](const EstimatorCells& c, std::size_t e) {
            return e == 0 ? std::string("NA") : fmt(c.se2_mean, precision);
        });
    }
    row("failures", [&](const EstimatorCells& c, std::size_t e) {
        return e == 0 ? std::string("NA") : std::to_string(c.failures);
    });
    os << "| P(y=1) | " << fmt(r.p_y1, precision) << " | | | | |\n";
    os << "| P(-a<=xb<=a) | " << fmt(r.p_band, precision) << " | | | | |\n";
    os << "| replications | " << r.reps_run << " | | | | |\n";
    return os.str();
}

}  // namespace ramplab
