#include "mmk/multi_asset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmk {

namespace {

void require_dim(bool cond, const char* what) {
    if (!cond) throw std::domain_error(std::string(what) + ": dimension mismatch");
}

void require_ordered(double t, double T, const char* what) {
    if (!(t <= T)) throw std::domain_error(std::string(what) + ": requires t <= T");
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::domain_error("Matrix::from_rows: ragged rows");
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix cholesky_lower(const Matrix& m) {
    const int n = m.dim();
    Matrix l(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = 0.0;
            for (int p = 0; p < j; ++p) sum += l(i, p) * l(j, p);
            if (i == j) {
                const double diag = m(i, i) - sum;
                if (!(diag > 0.0))
                    throw std::domain_error("cholesky_lower: matrix is not positive definite");
                l(i, j) = std::sqrt(diag);
            } else {
                l(i, j) = (m(i, j) - sum) / l(j, j);
            }
        }
    }
    return l;
}

ValidationReport validate_multi_env(const MultiEnv& menv,
                                    const std::vector<PriceModel>& models) {
    ValidationReport report;
    auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };
    const std::size_t m = static_cast<std::size_t>(menv.M);
    if (menv.M < 1) fail("M must be >= 1");
    if (menv.A.size() != m) fail("A must have length M");
    if (menv.k.size() != m) fail("k must have length M");
    if (menv.z.size() != m) fail("z must have length M");
    if (menv.alpha.size() != m) fail("alpha must have length M");
    if (menv.Lambda.dim() != menv.M) fail("Lambda must be MxM");
    if (menv.Omega.dim() != menv.M) fail("Omega must be MxM");
    if (!models.empty() && models.size() != m) fail("models must have length M");
    if (!report.ok()) return report;

    for (int i = 0; i < menv.M; ++i) {
        if (!(menv.A[i] > 0.0)) fail("A must be > 0");
        if (!(menv.k[i] > 0.0)) fail("k must be > 0");
        if (!(menv.z[i] >= 0.0)) fail("z must be >= 0");
    }
    if (!(menv.epsilon >= 0.0)) fail("epsilon must be >= 0");
    if (!(menv.eta >= 0.0)) fail("eta must be >= 0");
    if (!(menv.nu >= 0.0)) fail("nu must be >= 0");
    for (const auto* mat : {&menv.Lambda, &menv.Omega}) {
        const char* name = (mat == &menv.Lambda) ? "Lambda" : "Omega";
        for (int i = 0; i < menv.M; ++i)
            for (int j = 0; j < i; ++j)
                if ((*mat)(i, j) != (*mat)(j, i)) {
                    fail(std::string(name) + " must be symmetric");
                    i = menv.M;
                    break;
                }
        try {
            cholesky_lower(*mat);
        } catch (const std::domain_error&) {
            fail(std::string(name) + " must be positive definite");
        }
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double lam = menv.Lambda(static_cast<int>(i), static_cast<int>(i));
        const double s2 = models[i].sigma * models[i].sigma;
        if (std::abs(lam - s2) > 1e-9 * std::max(1.0, std::abs(lam)))
            fail("model sigma^2 must match Lambda diagonal");
    }
    return report;
}

PenaltyMatrix penalty_matrix(const MultiEnv& menv, double t, double T) {
    require_ordered(t, T, "penalty_matrix");
    require_dim(menv.Omega.dim() == menv.M && menv.Lambda.dim() == menv.M, "penalty_matrix");
    PenaltyMatrix out;
    out.pi = Matrix(menv.M);
    for (int i = 0; i < menv.M; ++i)
        for (int j = 0; j < menv.M; ++j)
            out.pi(i, j) = menv.eta * menv.Omega(i, j) + menv.nu * menv.Lambda(i, j) * (T - t);
    return out;
}

VectorControls vector_quotes(const MultiEnv& menv, const std::vector<PriceModel>& models,
                             double t, const std::vector<double>& s, const std::vector<int>& q,
                             double T, ExpansionMode mode, int quad_nodes) {
    require_ordered(t, T, "vector_quotes");
    const std::size_t m = static_cast<std::size_t>(menv.M);
    require_dim(models.size() == m && s.size() == m && q.size() == m &&
                    menv.A.size() == m && menv.k.size() == m && menv.z.size() == m &&
                    menv.alpha.size() == m,
                "vector_quotes");

    Matrix pi(menv.M);
    if (mode == ExpansionMode::Full) {
        pi = penalty_matrix(menv, t, T).pi;
    } else {
        for (int i = 0; i < menv.M; ++i)
            for (int j = 0; j < menv.M; ++j) pi(i, j) = menv.eta * menv.Omega(i, j);
    }

    VectorControls out;
    out.delta_plus.resize(m);
    out.delta_minus.resize(m);
    out.psi.resize(m);
    out.r.resize(m);
    for (int i = 0; i < menv.M; ++i) {
        const double delta_bet = directional_bet(models[i], t, s[i], T);
        double bias = 0.0;
        if (mode == ExpansionMode::Full) {
            MarketEnv env_i;
            env_i.A = menv.A[i];
            env_i.k = menv.k[i];
            env_i.z = menv.z[i];
            const detail::BiasIntegralEval eval(
                env_i, models[i], t, T, quad_nodes, menv.alpha[i], [&](double xi) {
                    double row = 0.0;
                    for (int j = 0; j < menv.M; ++j)
                        row += menv.eta * menv.Omega(i, j) +
                               menv.nu * menv.Lambda(i, j) * (T - xi);
                    return row;
                });
            bias = eval(s[i]);
        }
        double q_pi = 0.0;
        for (int j = 0; j < menv.M; ++j) q_pi += pi(i, j) * static_cast<double>(q[j]);
        const ControlSet c = detail::assemble_quote(1.0 / menv.k[i], menv.alpha[i], delta_bet,
                                                    menv.epsilon, bias, q_pi, pi(i, i), s[i]);
        out.delta_plus[i] = c.delta_plus;
        out.delta_minus[i] = c.delta_minus;
        out.psi[i] = c.psi;
        out.r[i] = c.r;
    }
    return out;
}

double iso_risk(const MultiEnv& menv, const std::vector<int>& q, double t, double T) {
    require_dim(static_cast<int>(q.size()) == menv.M, "iso_risk");
    const Matrix pi = penalty_matrix(menv, t, T).pi;
    double form = 0.0;
    for (int i = 0; i < menv.M; ++i) {
        double row = 0.0;
        for (int j = 0; j < menv.M; ++j) row += pi(i, j) * static_cast<double>(q[j]);
        form += static_cast<double>(q[i]) * row;
    }
    return menv.epsilon * form;
}

std::vector<RankedConfig> rank_inventory_configs(const MultiEnv& menv,
                                                 const std::vector<std::vector<int>>& configs,
                                                 double t, double T) {
    if (configs.empty()) throw std::domain_error("rank_inventory_configs: empty config list");
    std::vector<RankedConfig> ranked;
    ranked.reserve(configs.size());
    for (const auto& q : configs) ranked.push_back({q, iso_risk(menv, q, t, T)});
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedConfig& a, const RankedConfig& b) {
        if (a.risk != b.risk) return a.risk < b.risk;
        return std::lexicographical_compare(a.q.begin(), a.q.end(), b.q.begin(), b.q.end());
    });
    return ranked;
}

std::vector<double> correlated_step(const Matrix& chol_lower,
                                    const std::vector<PriceModel>& models,
                                    const std::vector<double>& s, double dt,
                                    const std::vector<double>& gaussian_draws) {
    const std::size_t m = s.size();
    require_dim(models.size() == m && gaussian_draws.size() == m &&
                    chol_lower.dim() == static_cast<int>(m),
                "correlated_step");
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> scaled(m);
    for (std::size_t j = 0; j < m; ++j) scaled[j] = gaussian_draws[j] * sqrt_dt;
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double diffusion = 0.0;
        for (std::size_t j = 0; j <= i; ++j)
            diffusion += chol_lower(static_cast<int>(i), static_cast<int>(j)) * scaled[j];
        const PriceModel& model = models[i];
        if (model.kind == PriceKind::Martingale) {
            out[i] = s[i] + diffusion;
        } else {
            out[i] = s[i] + model.a * (model.mu - s[i]) * dt + diffusion;
        }
    }
    return out;
}

std::vector<double> correlated_step(const MultiEnv& menv, const std::vector<PriceModel>& models,
                                    const std::vector<double>& s, double dt,
                                    const std::vector<double>& gaussian_draws) {
    return correlated_step(cholesky_lower(menv.Lambda), models, s, dt, gaussian_draws);
}

}  // namespace mmk
