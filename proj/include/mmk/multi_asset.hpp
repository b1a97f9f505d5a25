#pragma once

#include <vector>

#include "mmk/core.hpp"
#include "mmk/price_model.hpp"
#include "mmk/quote_engine.hpp"

namespace mmk {

// Small dense square matrix, row major. Sized for per-book asset counts,
// not linear algebra at scale.
class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    int dim() const { return n_; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * n_ + j];
    }

  private:
    int n_ = 0;
    std::vector<double> data_;
};

// Lower-triangular Cholesky factor; throws std::domain_error if the input
// is not positive definite.
Matrix cholesky_lower(const Matrix& m);

// M-asset market parameters. Lambda is the covariance of the mid-price
// diffusion, Omega the terminal-penalty matrix.
struct MultiEnv {
    int M = 0;
    std::vector<double> A;
    std::vector<double> k;
    std::vector<double> z;
    std::vector<double> alpha;
    Matrix Lambda;
    Matrix Omega;
    double epsilon = 0.0;
    double eta = 0.0;
    double nu = 0.0;
};

struct PenaltyMatrix {
    Matrix pi;
};

struct VectorControls {
    std::vector<double> delta_plus;
    std::vector<double> delta_minus;
    std::vector<double> psi;
    std::vector<double> r;
};

struct RankedConfig {
    std::vector<int> q;
    double risk = 0.0;
};

ValidationReport validate_multi_env(const MultiEnv& menv,
                                    const std::vector<PriceModel>& models);

// pi = eta*Omega + nu*(T-t)*Lambda. Reduces to the scalar unitary penalty
// for M = 1 with Omega = [z], Lambda = [sigma^2].
PenaltyMatrix penalty_matrix(const MultiEnv& menv, double t, double T);

// Vector optimal quotes under transaction costs; per-asset spreads have no
// cross terms, the centres pick up the penalty matrix through both the
// bias integrals and the inventory tilt.
VectorControls vector_quotes(const MultiEnv& menv, const std::vector<PriceModel>& models,
                             double t, const std::vector<double>& s, const std::vector<int>& q,
                             double T, ExpansionMode mode = ExpansionMode::Full,
                             int quad_nodes = kDefaultQuadNodes);

// Quadratic inventory risk epsilon * q' (eta*Omega + nu*(T-t)*Lambda) q
// with q held fixed over [t, T].
double iso_risk(const MultiEnv& menv, const std::vector<int>& q, double t, double T);

// Ascending by iso_risk; ties broken lexicographically on the vector.
std::vector<RankedConfig> rank_inventory_configs(const MultiEnv& menv,
                                                 const std::vector<std::vector<int>>& configs,
                                                 double t, double T);

// One correlated Euler step: per-asset drift plus Cholesky-coloured
// Gaussian noise. The overload taking a precomputed factor is for hot
// loops; both produce identical values.
std::vector<double> correlated_step(const MultiEnv& menv, const std::vector<PriceModel>& models,
                                    const std::vector<double>& s, double dt,
                                    const std::vector<double>& gaussian_draws);
std::vector<double> correlated_step(const Matrix& chol_lower,
                                    const std::vector<PriceModel>& models,
                                    const std::vector<double>& s, double dt,
                                    const std::vector<double>& gaussian_draws);

}  // namespace mmk
