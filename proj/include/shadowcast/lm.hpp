#ifndef SHADOWCAST_LM_HPP
#define SHADOWCAST_LM_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace shadowcast::lm {

struct Options {
    int max_iterations = 200;
    double cost_change_tol = 1e-10;  // relative, between accepted steps
    double lambda_up = 10.0;
    double lambda_down = 1.0 / 3.0;
    double lambda_floor = 1e-12;
    double lambda_ceiling = 1e12;
};

struct Result {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // (J^T J)^-1 at the solution (whitened residuals)
    double cost = 0.0;           // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    std::string message;
};

// Fills r(p) (length m) and, when J != nullptr, the m x n Jacobian dr/dp.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J)>;

// Levenberg-Marquardt with Marquardt diagonal scaling. First trial step is
// pure Gauss-Newton; steps are accepted only on strict cost decrease.
// Terminates on relative cost change < cost_change_tol, a vanished gradient,
// or max_iterations (converged stays false in the last case).
Result minimize(const ResidualFn& f, Eigen::VectorXd p0, int n_residuals,
                const Options& opts = {});

}  // namespace shadowcast::lm

#endif
