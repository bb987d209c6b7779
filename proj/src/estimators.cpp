#include "ramplab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "ramplab/errors.hpp"
#include "ramplab/mathx.hpp"

namespace ramplab {

double ramp(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    return z;
}

double ramp_a(double z, double a) {
    if (!(a > 0.0)) raise(ErrorCode::NonPositiveA, "half-width a must be positive");
    if (z < -a) return 0.0;
    if (z > a) return 1.0;
    return (z + a) / (2.0 * a);
}

namespace {

using Mask = std::vector<bool>;

Mask interior_mask(const Eigen::VectorXd& z) {
    Mask m(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        m[static_cast<std::size_t>(i)] = (z(i) > 0.0 && z(i) < 1.0);
    }
    return m;
}

std::size_t mask_count(const Mask& m) {
    return static_cast<std::size_t>(std::count(m.begin(), m.end(), true));
}

// OLS on the rows selected by mask. Returns nullopt when the subdesign is
// numerically rank-deficient.
std::optional<Eigen::VectorXd> masked_ols(const DesignMatrix& d, const Mask& mask) {
    const std::size_t m = mask_count(mask);
    const Eigen::Index k = d.X.cols();
    if (m < static_cast<std::size_t>(k)) return std::nullopt;
    Eigen::MatrixXd Xs(static_cast<Eigen::Index>(m), k);
    Eigen::VectorXd ys(static_cast<Eigen::Index>(m));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
        if (mask[static_cast<std::size_t>(i)]) {
            Xs.row(r) = d.X.row(i);
            ys(r) = d.y(i);
            ++r;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) return std::nullopt;
    return qr.solve(ys);
}

struct MaskHash {
    std::size_t operator()(const Mask& m) const { return std::hash<Mask>{}(m); }
};

struct NewtonOutcome {
    Eigen::VectorXd beta;
    Mask mask;
    int iterations = 0;
};

// Iterate trimmed OLS from `start` until the membership set is unchanged and
// the coefficient step is below tol. Returns nullopt on a degenerate trim
// set, a cycling active set, or iteration exhaustion.
std::optional<NewtonOutcome> newton_core(const DesignMatrix& d, const Eigen::VectorXd& start,
                                         double tol, int max_iter) {
    Eigen::VectorXd b = start;
    Mask mask = interior_mask(d.X * b);
    if (mask_count(mask) == 0) return std::nullopt;
    std::unordered_set<Mask, MaskHash> seen;
    seen.insert(mask);
    for (int it = 1; it <= max_iter; ++it) {
        const auto bn = masked_ols(d, mask);
        if (!bn) return std::nullopt;
        const Mask mn = interior_mask(d.X * *bn);
        const bool same = (mn == mask);
        if (same && (*bn - b).cwiseAbs().maxCoeff() < tol) {
            return NewtonOutcome{*bn, mn, it};
        }
        if (!same && seen.count(mn)) return std::nullopt;  // genuine cycle
        if (mask_count(mn) < d.k()) return std::nullopt;
        seen.insert(mn);
        b = *bn;
        mask = mn;
    }
    return std::nullopt;
}

struct PolishOutcome {
    Eigen::VectorXd beta;
    double q;
    Mask mask;
    int accepts = 0;
};

// Resolve near-degenerate local minima: try flipping membership of each
// observation whose fitted index lies within `delta` of a kink, continue the
// trimming iteration to a fixed point, and accept strict improvements of the
// NLS objective. Terminates at flip-local optimality. When the current mask
// trims nothing, the fit already equals full-sample OLS and is left intact.
PolishOutcome polish(const DesignMatrix& d, Eigen::VectorXd beta, double q, Mask mask,
                     double tol, int max_iter) {
    constexpr double kDelta = 0.02;
    constexpr int kMaxAccepts = 50;
    PolishOutcome out{std::move(beta), q, std::move(mask), 0};
    if (mask_count(out.mask) == out.mask.size()) return out;
    bool improved = true;
    while (improved && out.accepts < kMaxAccepts) {
        improved = false;
        const Eigen::VectorXd z = d.X * out.beta;
        std::vector<std::pair<double, Eigen::Index>> cand;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double dist = std::min(std::fabs(z(i)), std::fabs(z(i) - 1.0));
            if (dist <= kDelta) cand.emplace_back(dist, i);
        }
        std::sort(cand.begin(), cand.end());
        for (const auto& [dist, i] : cand) {
            Mask m2 = out.mask;
            const std::size_t ii = static_cast<std::size_t>(i);
            m2[ii] = !m2[ii];
            if (mask_count(m2) < d.k()) continue;
            const auto seed = masked_ols(d, m2);
            if (!seed) continue;
            const auto r = newton_core(d, *seed, tol, max_iter);
            if (!r) continue;
            const double q2 = nls_objective(d, r->beta);
            if (q2 < out.q - 1e-15 * std::max(1.0, out.q)) {
                out.beta = r->beta;
                out.q = q2;
                out.mask = r->mask;
                ++out.accepts;
                improved = true;
                break;
            }
        }
    }
    return out;
}

struct SimplexOutcome {
    Eigen::VectorXd beta;
    double q;
    int iterations = 0;
    bool converged = false;
};

// Standard Nelder-Mead on Q_N. Converged when every vertex lies within 1e-8
// (sup-norm) of the best vertex (simplex diameter criterion).
SimplexOutcome nelder_mead(const DesignMatrix& d, const Eigen::VectorXd& start) {
    const Eigen::Index k = start.size();
    const int np = static_cast<int>(k) + 1;
    constexpr double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;
    constexpr double kDiamTol = 1e-8;
    const int max_iter = 20000;

    std::vector<Eigen::VectorXd> v(static_cast<std::size_t>(np));
    std::vector<double> f(static_cast<std::size_t>(np));
    v[0] = start;
    for (int j = 1; j < np; ++j) {
        v[static_cast<std::size_t>(j)] = start;
        double& e = v[static_cast<std::size_t>(j)](j - 1);
        e = (e != 0.0) ? 1.05 * e : 0.00025;
    }
    for (int j = 0; j < np; ++j) {
        f[static_cast<std::size_t>(j)] = nls_objective(d, v[static_cast<std::size_t>(j)]);
    }

    std::vector<int> order(static_cast<std::size_t>(np));
    SimplexOutcome out;
    int it = 0;
    for (; it < max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return f[static_cast<std::size_t>(a)] < f[static_cast<std::size_t>(b)];
        });
        const auto ib = static_cast<std::size_t>(order[0]);
        const auto iw = static_cast<std::size_t>(order[static_cast<std::size_t>(np - 1)]);
        const auto is = static_cast<std::size_t>(order[static_cast<std::size_t>(np - 2)]);

        double diam = 0.0;
        for (int j = 0; j < np; ++j) {
            diam = std::max(diam, (v[static_cast<std::size_t>(j)] - v[ib]).cwiseAbs().maxCoeff());
        }
        if (diam < kDiamTol) {
            out.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
        for (int j = 0; j < np; ++j) {
            if (static_cast<std::size_t>(j) != iw) centroid += v[static_cast<std::size_t>(j)];
        }
        centroid /= static_cast<double>(np - 1);

        const Eigen::VectorXd xr = centroid + kAlpha * (centroid - v[iw]);
        const double fr = nls_objective(d, xr);
        if (fr < f[ib]) {
            const Eigen::VectorXd xe = centroid + kGamma * (xr - centroid);
            const double fe = nls_objective(d, xe);
            if (fe < fr) {
                v[iw] = xe;
                f[iw] = fe;
            } else {
                v[iw] = xr;
                f[iw] = fr;
            }
        } else if (fr < f[is]) {
            v[iw] = xr;
            f[iw] = fr;
        } else {
            const bool outside = fr < f[iw];
            Eigen::VectorXd xc;
            if (outside) {
                xc = centroid + kRho * (xr - centroid);
            } else {
                xc = centroid - kRho * (centroid - v[iw]);
            }
            const double fc = nls_objective(d, xc);
            if (fc < std::min(fr, f[iw])) {
                v[iw] = xc;
                f[iw] = fc;
            } else {
                for (int j = 0; j < np; ++j) {
                    const auto js = static_cast<std::size_t>(j);
                    if (js == ib) continue;
                    v[js] = v[ib] + kSigma * (v[js] - v[ib]);
                    f[js] = nls_objective(d, v[js]);
                }
            }
        }
    }

    const auto best = static_cast<std::size_t>(
        std::min_element(f.begin(), f.end()) - f.begin());
    out.beta = v[best];
    out.q = f[best];
    out.iterations = it;
    return out;
}

FitResult finish_ramp_result(const DesignMatrix& d, Eigen::VectorXd beta, int iterations,
                             bool converged, SolverPath path) {
    FitResult fr;
    fr.kind = EstimatorKind::RampNls;
    fr.beta = std::move(beta);
    fr.index = d.X * fr.beta;
    fr.prob.resize(fr.index.size());
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < fr.index.size(); ++i) {
        fr.prob(i) = ramp(fr.index(i));
        if (fr.index(i) > 0.0 && fr.index(i) < 1.0) ++inside;
    }
    fr.objective = static_cast<double>(d.n()) * nls_objective(d, fr.beta);  // SSR
    fr.iterations = iterations;
    fr.converged = converged;
    fr.solver_path = path;
    fr.frac_unit_interval = static_cast<double>(inside) / static_cast<double>(d.n());
    return fr;
}

}  // namespace

FitResult fit_ols(const DesignMatrix& design) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.X.cols()) {
        raise(ErrorCode::RankDeficient, "design matrix rank-deficient in OLS");
    }
    FitResult fr;
    fr.kind = EstimatorKind::OlsLpm;
    fr.beta = qr.solve(design.y);
    fr.index = design.X * fr.beta;
    fr.prob = fr.index;  // linear projection, unclamped
    fr.objective = (design.y - fr.index).squaredNorm();
    fr.iterations = 1;
    fr.converged = true;
    fr.solver_path = SolverPath::ClosedForm;
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < fr.index.size(); ++i) {
        if (fr.index(i) >= 0.0 && fr.index(i) <= 1.0) ++inside;
    }
    fr.frac_unit_interval = static_cast<double>(inside) / static_cast<double>(design.n());
    return fr;
}

double nls_objective(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    if (beta.size() != design.X.cols()) {
        raise(ErrorCode::DimensionMismatch, "coefficient length != column count");
    }
    const Eigen::VectorXd z = design.X * beta;
    mathx::NeumaierSum s;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double r = design.y(i) - ramp(z(i));
        s.add(r * r);
    }
    return s.total() / static_cast<double>(design.n());
}

Eigen::VectorXd nls_gradient(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    if (beta.size() != design.X.cols()) {
        raise(ErrorCode::DimensionMismatch, "coefficient length != column count");
    }
    const Eigen::VectorXd z = design.X * beta;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(beta.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z(i) > 0.0 && z(i) < 1.0) {
            grad += design.X.row(i).transpose() * (design.y(i) - z(i));
        }
    }
    return grad * (-2.0 / static_cast<double>(design.n()));
}

Eigen::VectorXd ito_step(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    if (beta.size() != design.X.cols()) {
        raise(ErrorCode::DimensionMismatch, "coefficient length != column count");
    }
    const Mask mask = interior_mask(design.X * beta);
    const std::size_t m = mask_count(mask);
    if (m == 0) raise(ErrorCode::EmptyTrimSet, "no observation index in (0,1)");
    const auto b = masked_ols(design, mask);
    if (!b) {
        raise(ErrorCode::RankDeficientTrimSet,
              "trimmed subdesign rank-deficient (" + std::to_string(m) + " rows)");
    }
    return *b;
}

FitResult fit_ramp_nls(const DesignMatrix& design, const RampNlsOptions& opts) {
    const FitResult ols = fit_ols(design);
    const Eigen::VectorXd start = opts.start.value_or(ols.beta);

    std::optional<NewtonOutcome> newton;
    if (!opts.force_simplex) newton = newton_core(design, start, opts.tol, opts.max_iter);
    if (newton) {
        const auto p = polish(design, newton->beta, nls_objective(design, newton->beta),
                              newton->mask, opts.tol, opts.max_iter);
        return finish_ramp_result(design, p.beta, newton->iterations + p.accepts, true,
                                  SolverPath::NewtonTrim);
    }

    // Fallback: simplex minimization from the OLS start, then the same polish.
    const auto nm = nelder_mead(design, ols.beta);
    Eigen::VectorXd beta = nm.beta;
    double q = nm.q;
    Mask mask = interior_mask(design.X * beta);
    if (const auto snap = newton_core(design, beta, opts.tol, opts.max_iter)) {
        beta = snap->beta;
        q = nls_objective(design, beta);
        mask = snap->mask;
    }
    const auto p = polish(design, std::move(beta), q, std::move(mask), opts.tol, opts.max_iter);
    return finish_ramp_result(design, p.beta, nm.iterations + p.accepts, nm.converged,
                              SolverPath::FallbackSimplex);
}

namespace {

FitResult fit_qmle(const DesignMatrix& design, EstimatorKind kind) {
    const Eigen::Index n = design.X.rows();
    const Eigen::Index k = design.X.cols();
    const double nd = static_cast<double>(n);
    const bool probit = (kind == EstimatorKind::Probit);
    constexpr double kClamp = 1e-12;

    const double ybar = design.y.mean();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    const double yc = std::clamp(ybar, 1e-6, 1.0 - 1e-6);
    b(0) = probit ? mathx::norm_ppf(yc) : std::log(yc / (1.0 - yc));

    std::int64_t clamp_count = 0;
    auto link_cdf = [&](double z) {
        return probit ? mathx::norm_cdf(z) : mathx::logistic_cdf(z);
    };
    auto neg_loglik = [&](const Eigen::VectorXd& bb) {
        const Eigen::VectorXd z = design.X * bb;
        mathx::NeumaierSum s;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double G = std::clamp(link_cdf(z(i)), kClamp, 1.0 - kClamp);
            s.add(design.y(i) * std::log(G) + (1.0 - design.y(i)) * std::log(1.0 - G));
        }
        return -s.total() / nd;
    };
    // The index separates the sample when it classifies every outcome
    // perfectly; only then does the likelihood lack an interior maximum.
    auto separating = [&](const Eigen::VectorXd& zz) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double margin = design.y(i) > 0.5 ? zz(i) : -zz(i);
            if (margin < 0.0) return false;
        }
        return true;
    };

    bool converged = false;
    int iterations = 0;
    Eigen::VectorXd z = design.X * b;
    for (int it = 0; it < 100; ++it) {
        iterations = it + 1;
        z = design.X * b;
        Eigen::VectorXd G(n), g(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double raw = link_cdf(z(i));
            const double Gc = std::clamp(raw, kClamp, 1.0 - kClamp);
            if (Gc != raw) ++clamp_count;
            G(i) = Gc;
            g(i) = probit ? mathx::norm_pdf(z(i)) : Gc * (1.0 - Gc);
        }
        Eigen::VectorXd score = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double denom = G(i) * (1.0 - G(i));
            const double si = (design.y(i) - G(i)) * g(i) / denom;
            const double wi = g(i) * g(i) / denom;
            score += design.X.row(i).transpose() * si;
            H.selfadjointView<Eigen::Lower>().rankUpdate(design.X.row(i).transpose(), wi);
        }
        score /= nd;
        H = Eigen::MatrixXd(H.selfadjointView<Eigen::Lower>()) / nd;
        if (score.cwiseAbs().maxCoeff() < 1e-10) {
            // A vanishing score is genuine convergence unless the coefficients
            // are diverging along a separating direction, where the densities
            // underflow and every score term goes to zero with the same sign.
            // An interior optimum instead balances terms of opposite signs, so
            // misclassified observations certify the optimum even when heavy-
            // tailed regressors push individual indexes far out.
            if (z.cwiseAbs().maxCoeff() <= 30.0 || !separating(z)) converged = true;
            break;
        }
        Eigen::VectorXd dh(k);
        bool singular = false;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!(H(j, j) > 0.0)) {
                singular = true;
                break;
            }
            dh(j) = std::sqrt(H(j, j));
        }
        Eigen::VectorXd step(k);
        if (!singular) {
            const Eigen::MatrixXd Hs =
                dh.cwiseInverse().asDiagonal() * H * dh.cwiseInverse().asDiagonal();
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Hs);
            lu.setThreshold(1e-12);
            if (lu.isInvertible()) {
                step = dh.cwiseInverse().asDiagonal() *
                       lu.solve((dh.cwiseInverse().asDiagonal() * score).eval());
            } else {
                singular = true;
            }
        }
        if (singular) {
            if (z.cwiseAbs().maxCoeff() > 30.0 && separating(z)) {
                raise(ErrorCode::PerfectSeparation,
                      std::string(estimator_name(kind)) +
                          " weighting matrix degenerated along a separating index");
            }
            raise(ErrorCode::SingularA,
                  std::string(estimator_name(kind)) +
                      " expected Hessian is numerically singular");
        }
        const double f0 = neg_loglik(b);
        // accept within roundoff slack so the terminal Newton step (which
        // improves by less than summation noise) is not rejected
        const double slack = 1e-12 * std::max(1.0, std::fabs(f0));
        double lam = 1.0;
        for (int h = 0; h < 30; ++h) {
            if (neg_loglik(b + lam * step) <= f0 + slack) break;
            lam *= 0.5;
        }
        b += lam * step;
    }

    z = design.X * b;
    if (!converged && z.cwiseAbs().maxCoeff() > 30.0 && separating(z)) {
        raise(ErrorCode::PerfectSeparation,
              std::string(estimator_name(kind)) +
                  " score did not converge and the index separates the sample");
    }

    FitResult fr;
    fr.kind = kind;
    fr.beta = b;
    fr.index = z;
    fr.prob.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) fr.prob(i) = link_cdf(z(i));
    fr.objective = -nd * neg_loglik(b);  // log-likelihood
    fr.iterations = iterations;
    fr.converged = converged;
    fr.solver_path = SolverPath::NewtonTrim;
    fr.frac_unit_interval = 1.0;  // probabilities always in [0,1]
    fr.clamp_count = clamp_count;
    return fr;
}

}  // namespace

FitResult fit_probit(const DesignMatrix& design) {
    return fit_qmle(design, EstimatorKind::Probit);
}

FitResult fit_logit(const DesignMatrix& design) {
    return fit_qmle(design, EstimatorKind::Logit);
}

Prediction predict(const FitResult& fit, const DesignMatrix& design) {
    if (fit.beta.size() != design.X.cols()) {
        raise(ErrorCode::DimensionMismatch, "fit has " + std::to_string(fit.beta.size()) +
                                                " coefficients, design has " +
                                                std::to_string(design.X.cols()) + " columns");
    }
    Prediction p;
    p.index = design.X * fit.beta;
    p.prob.resize(p.index.size());
    for (Eigen::Index i = 0; i < p.index.size(); ++i) {
        switch (fit.kind) {
            case EstimatorKind::OlsLpm: p.prob(i) = p.index(i); break;
            case EstimatorKind::RampNls: p.prob(i) = ramp(p.index(i)); break;
            case EstimatorKind::Probit: p.prob(i) = mathx::norm_cdf(p.index(i)); break;
            case EstimatorKind::Logit: p.prob(i) = mathx::logistic_cdf(p.index(i)); break;
        }
    }
    return p;
}

double mean_squared_error(const FitResult& fit, const DesignMatrix& design) {
    const Prediction p = predict(fit, design);
    mathx::NeumaierSum s;
    for (Eigen::Index i = 0; i < p.prob.size(); ++i) {
        const double r = design.y(i) - p.prob(i);
        s.add(r * r);
    }
    return s.total() / static_cast<double>(design.n());
}

}  // namespace ramplab
