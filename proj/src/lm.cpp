#include "shadowcast/lm.hpp"

#include <cmath>
#include <limits>

namespace shadowcast::lm {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Solve (A + lambda * diag(A)) x = -g. Returns false when the system is
// numerically singular.
bool solve_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& g, double lambda,
                Eigen::VectorXd& step) {
    Eigen::MatrixXd M = A;
    if (lambda > 0.0) {
        for (int i = 0; i < M.rows(); ++i) {
            double d = A(i, i);
            if (d <= 0.0) d = 1.0;  // degenerate column; plain damping
            M(i, i) += lambda * d;
        }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    step = ldlt.solve(-g);
    if (!finite(step)) return false;
    // Reject solutions the factorization silently mangled.
    const double resid = (M * step + g).norm();
    return resid <= 1e-6 * (g.norm() + 1.0);
}

}  // namespace

Result minimize(const ResidualFn& f, Eigen::VectorXd p0, int n_residuals, const Options& opts) {
    const int n = static_cast<int>(p0.size());
    Result out;
    out.params = p0;
    out.covariance = Eigen::MatrixXd::Zero(n, n);

    Eigen::VectorXd r(n_residuals);
    Eigen::MatrixXd J(n_residuals, n);
    f(p0, r, &J);
    if (!finite(r)) {
        out.message = "residuals not finite at the initial point";
        return out;
    }
    double cost = r.squaredNorm();
    Eigen::VectorXd p = p0;
    double lambda = 0.0;  // 0 = try the pure Gauss-Newton step

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        Eigen::MatrixXd A = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;

        if (cost <= 1e-300) {
            out.converged = true;
            out.message = "cost vanished";
            break;
        }

        bool accepted = false;
        while (!accepted) {
            Eigen::VectorXd step;
            const bool solved = solve_step(A, g, lambda, step);
            if (solved) {
                Eigen::VectorXd p_try = p + step;
                Eigen::VectorXd r_try(n_residuals);
                f(p_try, r_try, nullptr);
                const double cost_try = finite(r_try)
                                            ? r_try.squaredNorm()
                                            : std::numeric_limits<double>::infinity();
                if (cost_try < cost) {  // strict decrease only
                    const double rel_change = (cost - cost_try) / std::max(cost, 1e-300);
                    p = p_try;
                    f(p, r, &J);
                    cost = r.squaredNorm();
                    lambda = lambda <= opts.lambda_floor ? 0.0
                                                         : std::max(lambda * opts.lambda_down,
                                                                    opts.lambda_floor);
                    accepted = true;
                    if (rel_change < opts.cost_change_tol || cost <= 1e-300) {
                        out.converged = true;
                        out.message = "relative cost change below tolerance";
                    }
                    break;
                }
            }
            // Failed solve or no decrease: damp harder.
            lambda = lambda == 0.0 ? 1e-4 : lambda * opts.lambda_up;
            if (lambda > opts.lambda_ceiling) {
                if (g.lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + cost)) {
                    out.converged = true;
                    out.message = "gradient vanished";
                } else if (!solved && lambda > opts.lambda_ceiling) {
                    out.message = "singular normal equations";
                } else {
                    out.message = "no descent step found";
                }
                break;
            }
        }
        if (!accepted) {
            ++iter;
            break;
        }
        if (out.converged) {
            ++iter;
            break;
        }
    }
    if (!out.converged && out.message.empty())
        out.message = "max iterations reached";

    out.params = p;
    out.cost = cost;
    out.iterations = iter;

    // Covariance from the final Jacobian; left zero (and noted) when singular.
    Eigen::MatrixXd A = J.transpose() * J;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        out.covariance = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
    } else {
        out.converged = false;
        if (out.message == "relative cost change below tolerance" ||
            out.message == "gradient vanished" || out.message == "cost vanished")
            out.message = "singular normal equations at the solution";
    }
    return out;
}

}  // namespace shadowcast::lm
