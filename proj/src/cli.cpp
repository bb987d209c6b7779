#include "ramplab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "ramplab/errors.hpp"
#include "ramplab/montecarlo.hpp"

namespace ramplab {

namespace {

std::string fmt(double v, int precision) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::vector<EstimatorKind> parse_estimators(const std::string& csv) {
    std::vector<EstimatorKind> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (tok == "ols") out.push_back(EstimatorKind::OlsLpm);
        else if (tok == "ramp") out.push_back(EstimatorKind::RampNls);
        else if (tok == "probit") out.push_back(EstimatorKind::Probit);
        else if (tok == "logit") out.push_back(EstimatorKind::Logit);
        else raise(ErrorCode::InvalidArgument, "unknown estimator '" + tok + "'");
    }
    if (out.empty()) raise(ErrorCode::InvalidArgument, "estimator list is empty");
    return out;
}

}  // namespace

FitReport compute_fit_report(const DesignMatrix& design, const FitRequest& request,
                             std::size_t dropped_rows) {
    if (request.estimators.empty()) {
        raise(ErrorCode::InvalidArgument, "no estimators requested");
    }
    FitReport rep;
    rep.n = design.n();
    rep.dropped = dropped_rows;
    for (const auto& info : design.cols) {
        if (info.kind == ColumnKind::Binary || info.kind == ColumnKind::Continuous) {
            rep.ape_variables.push_back(info.name);
        }
    }

    for (EstimatorKind kind : request.estimators) {
        EstimatorReport er;
        er.kind = kind;
        try {
            FitResult fit;
            switch (kind) {
                case EstimatorKind::OlsLpm: fit = fit_ols(design); break;
                case EstimatorKind::RampNls: fit = fit_ramp_nls(design); break;
                case EstimatorKind::Probit: fit = fit_probit(design); break;
                case EstimatorKind::Logit: fit = fit_logit(design); break;
            }
            er.converged = fit.converged;
            er.solver_path = fit.solver_path;
            er.beta = fit.beta;
            er.frac_unit_interval = fit.frac_unit_interval;
            er.mse = mean_squared_error(fit, design);
            const SandwichParts parts = vcov_robust(design, fit);
            fit.vcov = parts.V_hat;
            er.se = parts.se;
            for (const auto& var : rep.ape_variables) {
                ApeEstimate ape = ape_auto(design, fit, var);
                ape.se = ape_se(design, fit, ape, parts);
                er.apes.push_back(std::move(ape));
                if (request.bootstrap_reps > 0) {
                    er.boot_se.push_back(bootstrap_ape_se(design, kind, var,
                                                          request.bootstrap_reps,
                                                          request.seed));
                }
            }
            er.ok = true;
            if (!fit.converged) rep.any_convergence_failure = true;
        } catch (const Error& ex) {
            if (is_input_error(ex.code())) throw;
            er.error = ex.what();
            rep.any_convergence_failure = true;
        }
        rep.estimators.push_back(std::move(er));
    }
    return rep;
}

std::string fit_report_to_csv(const FitReport& report, int precision) {
    std::ostringstream os;
    os << "estimator,section,name,value\n";
    for (const auto& er : report.estimators) {
        const char* est = estimator_name(er.kind);
        if (!er.error.empty()) {
            os << est << ",error,message," << er.error << '\n';
            continue;
        }
        for (Eigen::Index j = 0; j < er.beta.size(); ++j) {
            os << est << ",coef,b" << j << ',' << fmt(er.beta(j), precision) << '\n';
            os << est << ",coef_se,b" << j << ',' << fmt(er.se(j), precision) << '\n';
        }
        for (std::size_t t = 0; t < er.apes.size(); ++t) {
            const auto& ape = er.apes[t];
            os << est << ",ape," << ape.variable << ',' << fmt(ape.estimate, precision) << '\n';
            os << est << ",ape_se," << ape.variable << ',' << fmt(ape.se, precision) << '\n';
            if (t < er.boot_se.size()) {
                os << est << ",ape_boot_se," << ape.variable << ','
                   << fmt(er.boot_se[t], precision) << '\n';
            }
        }
        os << est << ",stat,frac01," << fmt(er.frac_unit_interval, precision) << '\n';
        os << est << ",stat,mse," << fmt(er.mse, precision) << '\n';
        os << est << ",stat,converged," << (er.converged ? 1 : 0) << '\n';
        os << est << ",stat,solver_path," << solver_path_name(er.solver_path) << '\n';
    }
    os << "sample,stat,n," << report.n << '\n';
    os << "sample,stat,dropped," << report.dropped << '\n';
    return os.str();
}

std::string fit_report_to_markdown(const FitReport& report, int precision) {
    std::ostringstream os;
    os << "# Fit report\n\nN = " << report.n << " (dropped " << report.dropped
       << " incomplete rows)\n";
    for (const auto& er : report.estimators) {
        os << "\n## " << estimator_name(er.kind) << "\n\n";
        if (!er.error.empty()) {
            os << "failed: " << er.error << "\n";
            continue;
        }
        os << "converged: " << (er.converged ? "yes" : "no") << " ("
           << solver_path_name(er.solver_path) << ")\n\n";
        os << "| term | coef | robust_se |\n|---|---|---|\n";
        for (Eigen::Index j = 0; j < er.beta.size(); ++j) {
            os << "| b" << j << " | " << fmt(er.beta(j), precision) << " | "
               << fmt(er.se(j), precision) << " |\n";
        }
        os << "\n| variable | ape_kind | estimate | delta_se |";
        const bool boot = !er.boot_se.empty();
        if (boot) os << " boot_se |";
        os << "\n|---|---|---|---|";
        if (boot) os << "---|";
        os << '\n';
        for (std::size_t t = 0; t < er.apes.size(); ++t) {
            const auto& ape = er.apes[t];
            os << "| " << ape.variable << " | "
               << (ape.kind == ApeKind::Derivative ? "derivative" : "discrete") << " | "
               << fmt(ape.estimate, precision) << " | " << fmt(ape.se, precision) << " |";
            if (boot) os << ' ' << fmt(er.boot_se[t], precision) << " |";
            os << '\n';
        }
        os << "\nfrac_unit_interval: " << fmt(er.frac_unit_interval, precision) << '\n';
        os << "mse: " << fmt(er.mse, precision) << '\n';
    }
    return os.str();
}

namespace {

void deliver(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) raise(ErrorCode::IoError, "cannot write '" + out_path + "'");
    f << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"binary-response models via trimmed least squares and QMLE"};
    app.fallthrough(true);

    std::uint64_t seed = 0;
    std::string format = "markdown";
    int precision = 4;
    std::string out_path;
    int jobs = 0;
    app.add_option("--seed", seed, "RNG seed")->envname("RAMPLAB_SEED");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "markdown"}));
    app.add_option("--precision", precision, "printed decimal places")
        ->check(CLI::Range(0, 17));
    app.add_option("--out", out_path, "write the report to this file");
    app.add_option("--jobs", jobs, "worker threads for replications (0 = cores)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit estimators on a CSV dataset");
    std::string data_path, yname, full_w, estimators_csv = "ols,ramp,probit,logit";
    std::vector<std::string> xlist, interacts;
    int bootstrap = 0;
    fit_cmd->add_option("--data", data_path, "CSV file")->required();
    fit_cmd->add_option("--y", yname, "outcome column")->required();
    fit_cmd->add_option("--x", xlist, "regressor columns")->required()->delimiter(',');
    fit_cmd->add_option("--interact", interacts, "interaction pair A:B (repeatable)");
    fit_cmd->add_option("--full-interact", full_w,
                        "binary column interacted with every other regressor");
    fit_cmd->add_option("--estimators", estimators_csv, "subset of ols,ramp,probit,logit");
    fit_cmd->add_option("--bootstrap", bootstrap, "bootstrap replications for APE SEs");

    // table
    auto* table_cmd = app.add_subcommand("table", "reproduce a simulation-study table");
    int table_id = 0;
    int table_reps = -1;
    table_cmd->add_option("id", table_id, "table id (1-8, 11-13)")->required();
    table_cmd->add_option("--reps", table_reps, "replication count (default 1000)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run a custom scenario");
    std::string design_s, error_s = "uniform:0.5";
    std::vector<double> beta_list;
    bool interaction = false;
    int sim_n = 1000, sim_reps = 1000;
    sim_cmd->add_option("--design", design_s, "sym|asym|uniwide")
        ->required()
        ->check(CLI::IsMember({"sym", "asym", "uniwide"}));
    sim_cmd->add_option("--error", error_s, "uniform:A or normal");
    sim_cmd->add_option("--beta", beta_list, "true coefficients")->delimiter(',');
    sim_cmd->add_flag("--interaction", interaction, "include the x1*x2 interaction");
    sim_cmd->add_option("--n", sim_n, "observations per replication");
    sim_cmd->add_option("--reps", sim_reps, "replication count");

    app.require_subcommand(1);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (fit_cmd->parsed()) {
            DesignSpec spec;
            spec.regressors = xlist;
            for (const auto& pair : interacts) {
                const auto pos = pair.find(':');
                if (pos == std::string::npos || pos == 0 || pos + 1 == pair.size()) {
                    raise(ErrorCode::InvalidArgument,
                          "--interact expects A:B, got '" + pair + "'");
                }
                spec.interactions.emplace_back(pair.substr(0, pos), pair.substr(pos + 1));
            }
            if (!full_w.empty()) spec.full_interactions_with = full_w;

            const Dataset ds = load_csv(data_path, yname, xlist);
            const DesignMatrix d = build_design(ds, spec);
            FitRequest req;
            req.estimators = parse_estimators(estimators_csv);
            req.bootstrap_reps = bootstrap;
            req.seed = seed;
            const FitReport rep = compute_fit_report(d, req, ds.n_dropped);
            deliver(format == "csv" ? fit_report_to_csv(rep, precision)
                                    : fit_report_to_markdown(rep, precision),
                    out_path, out);
            return rep.any_convergence_failure ? 3 : 0;
        }
        if (table_cmd->parsed()) {
            SimScenario sc = table_scenario(table_id, seed);
            if (table_reps > 0) sc.reps = table_reps;
            const SimReport rep = run_mc(sc, {jobs, false});
            deliver(format == "csv" ? report_to_csv(rep, precision)
                                    : report_to_markdown(rep, precision),
                    out_path, out);
            return 0;
        }
        // simulate
        SimScenario sc;
        sc.covariate_design = (design_s == "sym")    ? CovariateDesign::SymNormal
                              : (design_s == "asym") ? CovariateDesign::AsymLognormal
                                                     : CovariateDesign::UniformWide;
        if (error_s == "normal") {
            sc.error_law = ErrorLaw::StdNormal;
            sc.a = 1.0;
        } else if (error_s.rfind("uniform:", 0) == 0) {
            sc.error_law = ErrorLaw::Uniform;
            try {
                sc.a = std::stod(error_s.substr(8));
            } catch (const std::exception&) {
                raise(ErrorCode::InvalidArgument, "cannot parse '" + error_s + "'");
            }
        } else {
            raise(ErrorCode::InvalidArgument,
                  "--error must be 'normal' or 'uniform:A', got '" + error_s + "'");
        }
        sc.interaction = interaction;
        if (beta_list.empty()) {
            sc.betas = default_betas(interaction);
        } else {
            sc.betas = Eigen::Map<Eigen::VectorXd>(beta_list.data(),
                                                   static_cast<Eigen::Index>(beta_list.size()));
        }
        sc.n_obs = sim_n;
        sc.reps = sim_reps;
        sc.seed = seed;
        sc.check();
        const SimReport rep = run_mc(sc, {jobs, false});
        deliver(format == "csv" ? report_to_csv(rep, precision)
                                : report_to_markdown(rep, precision),
                out_path, out);
        return 0;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return is_input_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace ramplab
