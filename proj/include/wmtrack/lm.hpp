#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace wmtrack {

struct LmOptions {
    int max_iterations = 500;
    double xtol = 1e-13;
    double gtol = 1e-15;
};

struct LmResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd jtj;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and Nielsen's damping
// update.  `model(p, r, J)` fills residuals and Jacobian; `project(p)` can
// clamp parameters onto their admissible set after each trial step.
template <class Model, class Project>
LmResult levenberg_marquardt(Model&& model, Eigen::VectorXd p, Project&& project, const LmOptions& opt = {}) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    VectorXd r;
    MatrixXd J;
    model(p, r, J);
    double rss = r.squaredNorm();
    MatrixXd A = J.transpose() * J;
    VectorXd g = J.transpose() * r;

    LmResult out;
    double mu = 1e-3;
    double nu = 2.0;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (!std::isfinite(rss)) break;
        if (g.lpNorm<Eigen::Infinity>() <= opt.gtol * std::max(1.0, rss) || rss == 0.0) {
            out.converged = true;
            break;
        }
        VectorXd d = A.diagonal().cwiseMax(1e-30 * std::max(1.0, A.diagonal().maxCoeff()));
        MatrixXd M = A;
        M.diagonal() += mu * d;
        VectorXd h = M.ldlt().solve(-g);
        if (!h.allFinite()) {
            mu *= nu;
            nu *= 2.0;
            continue;
        }
        VectorXd pn = p + h;
        project(pn);
        h = pn - p;
        if (h.norm() <= opt.xtol * (p.norm() + opt.xtol)) {
            out.converged = true;
            break;
        }
        VectorXd rn;
        MatrixXd Jn;
        model(pn, rn, Jn);
        double rss_n = rn.squaredNorm();
        double predicted = h.dot(mu * d.cwiseProduct(h) - g);
        if (std::isfinite(rss_n) && rss_n < rss) {
            double rho = predicted > 0.0 ? (rss - rss_n) / predicted : 1.0;
            double drop = rss - rss_n;
            p = pn;
            r = rn;
            J = Jn;
            rss = rss_n;
            A = J.transpose() * J;
            g = J.transpose() * r;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
            if (drop <= 1e-30 * std::max(rss, 1e-300) && h.norm() <= 1e-10 * (p.norm() + 1e-10)) {
                out.converged = true;
                ++it;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if (mu > 1e30) {
                // no downhill step exists at this resolution: a minimum
                out.converged = true;
                break;
            }
        }
    }
    out.params = p;
    out.jtj = A;
    out.rss = rss;
    out.iterations = it;
    return out;
}

}  // namespace wmtrack
