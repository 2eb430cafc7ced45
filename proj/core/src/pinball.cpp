#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conformal/models.hpp"

namespace conformal {

// Frisch-Newton style primal-dual interior point for quantile regression.
// Solves the bounded-variable dual LP
//     max  y'a   s.t.  X'a = (1 - tau) X'1,  a in [0,1]^n,
// whose equality multiplier beta is the pinball-loss minimizer. Each Newton
// step reduces to an m x m normal-equations solve. All tolerances are
// relative to the least-squares residual scale, so the solver is exactly
// equivariant under power-of-two rescaling of y.
Eigen::VectorXd fit_pinball(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            double tau, const PinballOptions& options) {
  const Eigen::Index n = X.rows();
  const Eigen::Index m = X.cols();
  if (y.size() != n) throw std::invalid_argument("dimension mismatch: rows of X != length of y");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("invalid level");
  if (n < m) throw std::invalid_argument("underdetermined");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < m) throw std::runtime_error("singular design");

  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd r = y - X * beta;
  const double scale0 = r.cwiseAbs().mean();
  if (scale0 == 0.0) return beta;  // exact interpolation is optimal for every tau

  const double nd = static_cast<double>(n);
  Eigen::VectorXd z = (-r).cwiseMax(0.0).array() + 1e-4 * scale0;  // w - z = r kept exact
  Eigen::VectorXd w = r.cwiseMax(0.0).array() + 1e-4 * scale0;
  Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 1.0 - tau);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(n, tau);
  const Eigen::VectorXd b = X.transpose() * a;

  const double target = options.gap_tol * scale0;
  const double accept = options.accept_tol * scale0;
  double gap = (a.dot(z) + s.dot(w)) / nd;

  const auto step_limit = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) alpha = std::min(alpha, -0.9995 * v[i] / dv[i]);
    return alpha;
  };

  for (int iter = 0; iter < options.max_iterations && gap > target; ++iter) {
    const Eigen::VectorXd rb = b - X.transpose() * a;
    const Eigen::VectorXd rd = y - X * beta + z - w;
    const Eigen::VectorXd d =
        (z.array() / a.array() + w.array() / s.array()).inverse().matrix();

    Eigen::MatrixXd M = X.transpose() * d.asDiagonal() * X;
    M.diagonal().array() += 1e-14 * M.trace();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);

    const auto solve_direction = [&](const Eigen::VectorXd& rz, const Eigen::VectorXd& rw,
                                     Eigen::VectorXd& db, Eigen::VectorXd& da,
                                     Eigen::VectorXd& ds, Eigen::VectorXd& dz,
                                     Eigen::VectorXd& dw) {
      const Eigen::VectorXd q =
          rd + (rz.array() / a.array()).matrix() - (rw.array() / s.array()).matrix();
      db = ldlt.solve(X.transpose() * (d.asDiagonal() * q) - rb);
      da = d.asDiagonal() * (q - X * db);
      ds = -da;
      dz = ((rz - z.cwiseProduct(da)).array() / a.array()).matrix();
      dw = ((rw - w.cwiseProduct(ds)).array() / s.array()).matrix();
    };

    // affine scaling direction
    Eigen::VectorXd db, da, ds, dz, dw;
    solve_direction(-a.cwiseProduct(z), -s.cwiseProduct(w), db, da, ds, dz, dw);
    const double ap_aff = std::min(step_limit(a, da), step_limit(s, ds));
    const double ad_aff = std::min(step_limit(z, dz), step_limit(w, dw));
    const double mu = gap / 2.0;
    const double mu_aff = ((a + ap_aff * da).dot(z + ad_aff * dz) +
                           (s + ap_aff * ds).dot(w + ad_aff * dw)) /
                          (2.0 * nd);
    double sigma = mu_aff / mu;
    sigma = std::clamp(sigma * sigma * sigma, 0.0, 1.0);

    // corrector
    const Eigen::VectorXd rz2 = Eigen::VectorXd::Constant(n, sigma * mu) -
                                a.cwiseProduct(z) - da.cwiseProduct(dz);
    const Eigen::VectorXd rw2 = Eigen::VectorXd::Constant(n, sigma * mu) -
                                s.cwiseProduct(w) - ds.cwiseProduct(dw);
    solve_direction(rz2, rw2, db, da, ds, dz, dw);

    const double ap = std::min({1.0, step_limit(a, da), step_limit(s, ds)});
    const double ad = std::min({1.0, step_limit(z, dz), step_limit(w, dw)});
    a += ap * da;
    s += ap * ds;
    beta += ad * db;
    z += ad * dz;
    w += ad * dw;
    if (!beta.allFinite()) throw std::runtime_error("pinball solver diverged");

    gap = (a.dot(z) + s.dot(w)) / nd;
  }

  if (gap > accept) {
    std::ostringstream msg;
    msg << "pinball solver did not converge: mean-loss gap " << gap
        << " exceeds tolerance " << accept;
    throw std::runtime_error(msg.str());
  }
  return beta;
}

}  // namespace conformal
