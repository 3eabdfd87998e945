#include "gpdistill/laplace.hpp"

#include <cmath>
#include <string>

#include "gpdistill/continuous_bernoulli.hpp"
#include "gpdistill/errors.hpp"
#include "gpdistill/quadrature.hpp"

namespace gpdistill {

namespace {

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

struct LocalTerms {
  Eigen::VectorXd grad;  // d/df log p(y|f)
  Eigen::VectorXd w;     // -d2/df2 log p(y|f)
};

LocalTerms local_terms(const Eigen::VectorXd& y, const Eigen::VectorXd& f, Likelihood likelihood) {
  const Eigen::Index n = f.size();
  LocalTerms t{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = sigmoid(f(i));
    t.grad(i) = y(i) - s;
    t.w(i) = s * sigmoid(-f(i));
    if (likelihood == Likelihood::continuous_bernoulli) {
      const CbTerms cb = cb_terms_at_latent(f(i));
      t.grad(i) += cb.dlog_c;
      t.w(i) -= cb.d2log_c;
    }
  }
  return t;
}

Eigen::LLT<Eigen::MatrixXd> factor_b(const Eigen::MatrixXd& k, const Eigen::VectorXd& sw) {
  Eigen::MatrixXd b = sw.asDiagonal() * k * sw.asDiagonal();
  b.diagonal().array() += 1.0;
  return Eigen::LLT<Eigen::MatrixXd>(b);
}

}  // namespace

bool BinaryDataset::strictly_binary() const {
  return (ys.array() == 0.0 || ys.array() == 1.0).all();
}

void BinaryDataset::validate() const {
  if (ys.size() == 0) throw InvalidArgument("dataset is empty");
  if (xs.rows() != ys.size())
    throw InvalidArgument("dataset has " + std::to_string(xs.rows()) + " inputs but " +
                          std::to_string(ys.size()) + " targets");
  if (!(ys.array() >= 0.0 && ys.array() <= 1.0).all())
    throw InvalidArgument("classification targets must lie in [0, 1]");
}

const char* to_string(Likelihood l) {
  return l == Likelihood::bernoulli ? "bernoulli" : "continuous_bernoulli";
}

const char* to_string(ProbabilityMethod m) {
  return m == ProbabilityMethod::latent_mean ? "latent_mean" : "quadrature";
}

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& f, Likelihood likelihood) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    acc += y(i) * f(i) - softplus(f(i));
    if (likelihood == Likelihood::continuous_bernoulli) acc += cb_terms_at_latent(f(i)).log_c;
  }
  return acc;
}

double log_posterior(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Eigen::VectorXd& m,
                     const Eigen::VectorXd& f, Likelihood likelihood) {
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw SingularMatrix("log_posterior: K is not positive definite");
  const Eigen::VectorXd g = f - m;
  return log_likelihood(y, f, likelihood) - 0.5 * g.dot(llt.solve(g));
}

Eigen::VectorXd log_posterior_gradient(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                                       const Eigen::VectorXd& m, const Eigen::VectorXd& f, Likelihood likelihood) {
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw SingularMatrix("log_posterior_gradient: K is not positive definite");
  return local_terms(y, f, likelihood).grad - llt.solve(f - m);
}

LaplaceFit laplace_mode(const Eigen::VectorXd& targets, const Eigen::MatrixXd& k,
                        const Eigen::VectorXd& prior_mean, Likelihood likelihood, const NewtonOptions& opts) {
  const Eigen::Index n = targets.size();
  if (k.rows() != n || k.cols() != n || prior_mean.size() != n)
    throw InvalidArgument("laplace_mode: size mismatch");
  if (!(targets.array() >= 0.0 && targets.array() <= 1.0).all())
    throw InvalidArgument("laplace_mode: targets must lie in [0, 1]");

  LaplaceFit fit;
  fit.likelihood = likelihood;
  fit.prior_mean_at_train = prior_mean;

  // f = m + K a throughout, so K^{-1}(f - m) = a and psi needs no inverse.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = prior_mean;
  auto psi_of = [&](const Eigen::VectorXd& av, const Eigen::VectorXd& fv) {
    return log_likelihood(targets, fv, likelihood) - 0.5 * av.dot(fv - prior_mean);
  };
  double psi = psi_of(a, f);
  fit.psi_trace.push_back(psi);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const LocalTerms lt = local_terms(targets, f, likelihood);
    fit.grad_norm = (lt.grad - a).norm();
    if (fit.grad_norm < opts.grad_tol) {
      fit.converged = true;
      break;
    }

    // A non-positive effective curvature (possible only through roundoff for
    // the continuous Bernoulli) is clamped; the line search below then
    // guards the ascent.
    const Eigen::VectorXd w = lt.w.cwiseMax(0.0);
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::VectorXd b = w.cwiseProduct(f - prior_mean) + lt.grad;
    const auto llt = factor_b(k, sw);
    if (llt.info() != Eigen::Success) throw NumericalError("laplace_mode: Newton system is not positive definite");
    const Eigen::VectorXd c = llt.matrixL().solve(sw.cwiseProduct(k * b));
    const Eigen::VectorXd a_newton = b - sw.cwiseProduct(llt.matrixU().solve(c));
    const Eigen::VectorXd da = a_newton - a;
    const Eigen::VectorXd df = k * da;

    double step = 1.0;
    Eigen::VectorXd a_try = a_newton;
    Eigen::VectorXd f_try = f + df;
    double psi_try = psi_of(a_try, f_try);
    const double slack = 1e-13 * (1.0 + std::abs(psi));
    int halvings = 0;
    while (!(psi_try >= psi - slack)) {
      if (++halvings > opts.max_halvings) {
        const double min_w = lt.w.minCoeff();
        std::string msg = "laplace_mode: line search failed after " + std::to_string(opts.max_halvings) +
                          " halvings at iteration " + std::to_string(iter + 1);
        if (min_w <= 0.0) msg += "; effective Hessian lost positive definiteness (min W = " + std::to_string(min_w) + ")";
        throw ConvergenceError(msg, iter + 1, fit.grad_norm);
      }
      step *= 0.5;
      a_try = a + step * da;
      f_try = f + step * df;
      psi_try = psi_of(a_try, f_try);
    }
    fit.halvings += halvings;

    const double change = (f_try - f).cwiseAbs().maxCoeff();
    a = std::move(a_try);
    f = std::move(f_try);
    psi = psi_try;
    fit.psi_trace.push_back(psi);
    fit.iterations = iter + 1;
    if (change < opts.step_tol) {
      fit.converged = true;
      break;
    }
  }

  const LocalTerms lt = local_terms(targets, f, likelihood);
  fit.grad_norm = (lt.grad - a).norm();
  if (!fit.converged)
    throw ConvergenceError("laplace_mode: no convergence after " + std::to_string(opts.max_iters) +
                               " iterations (gradient norm " + std::to_string(fit.grad_norm) + ")",
                           fit.iterations, fit.grad_norm);
  if (!(lt.w.array() > 0.0).all())
    throw IndefiniteMatrix("laplace_mode: effective Hessian W + K^{-1} - d2logC is not positive definite at the "
                           "mode (min W = " + std::to_string(lt.w.minCoeff()) + ")");

  fit.f_hat = f;
  fit.w_diag = lt.w;
  fit.weights = lt.grad;
  fit.psi = psi;
  const auto llt = factor_b(k, lt.w.cwiseSqrt());
  if (llt.info() != Eigen::Success) throw NumericalError("laplace_mode: I + W^1/2 K W^1/2 factorization failed");
  fit.chol_lower = llt.matrixL();
  return fit;
}

double laplace_marginal_loglik(const LaplaceFit& fit, const Eigen::VectorXd& targets) {
  if (!fit.converged) throw NumericalError("laplace_marginal_loglik: fit did not converge");
  const double quad = fit.weights.dot(fit.f_hat - fit.prior_mean_at_train);
  const double log_det_b = 2.0 * fit.chol_lower.diagonal().array().log().sum();
  return log_likelihood(targets, fit.f_hat, fit.likelihood) - 0.5 * quad - 0.5 * log_det_b;
}

double class_probability(double mean, double variance, ProbabilityMethod method) {
  return method == ProbabilityMethod::latent_mean ? sigmoid(mean) : expected_sigmoid(mean, variance);
}

GpcModel::GpcModel(PosteriorChain prior, Eigen::VectorXd targets, Likelihood likelihood, double diag_shift,
                   const NewtonOptions& opts)
    : prior_(std::move(prior)), targets_(std::move(targets)), diag_shift_(diag_shift) {
  if (targets_.size() != prior_.train_xs().rows()) throw InvalidArgument("GpcModel: target count mismatch");
  if (!(diag_shift_ >= 0.0)) throw InvalidArgument("GpcModel: diagonal shift must be non-negative");
  gram_ = prior_.train_covariance();
  gram_.diagonal().array() += diag_shift_;
  fit_ = laplace_mode(targets_, gram_, prior_.train_mean(), likelihood, opts);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GpcModel::predict_marginals(const Points& test_xs) const {
  const Eigen::MatrixXd kx = prior_.covariance(test_xs, prior_.train_xs());
  Eigen::VectorXd mean = prior_.mean(test_xs) + kx * fit_.weights;
  const Eigen::VectorXd sw = fit_.w_diag.cwiseSqrt();
  const Eigen::MatrixXd v = fit_.chol_lower.triangularView<Eigen::Lower>().solve(sw.asDiagonal() * kx.transpose());
  Eigen::VectorXd var(test_xs.rows());
  for (Eigen::Index i = 0; i < test_xs.rows(); ++i) {
    const Points xi = test_xs.row(i);
    var(i) = std::max(prior_.covariance(xi, xi)(0, 0) - v.col(i).squaredNorm(), 0.0);
  }
  return {std::move(mean), std::move(var)};
}

Prediction GpcModel::predict_latent(const Points& test_xs) const {
  const Eigen::MatrixXd kx = prior_.covariance(test_xs, prior_.train_xs());
  Prediction p;
  p.mean = prior_.mean(test_xs) + kx * fit_.weights;
  const Eigen::VectorXd sw = fit_.w_diag.cwiseSqrt();
  const Eigen::MatrixXd v = fit_.chol_lower.triangularView<Eigen::Lower>().solve(sw.asDiagonal() * kx.transpose());
  p.cov = prior_.covariance(test_xs, test_xs);
  p.cov.noalias() -= v.transpose() * v;
  p.cov = 0.5 * (p.cov + p.cov.transpose()).eval();
  p.cov.diagonal() = p.cov.diagonal().cwiseMax(0.0);
  return p;
}

Eigen::VectorXd GpcModel::predict_proba(const Points& test_xs, ProbabilityMethod method) const {
  const auto [mean, var] = predict_marginals(test_xs);
  Eigen::VectorXd p(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) p(i) = class_probability(mean(i), var(i), method);
  return p;
}

PosteriorChain GpcModel::posterior() const {
  // (K + W^{-1})^{-1} = W^{1/2} B^{-1} W^{1/2}, B = I + W^{1/2} K W^{1/2}
  const Eigen::Index n = fit_.f_hat.size();
  const Eigen::VectorXd sw = fit_.w_diag.cwiseSqrt();
  const Eigen::MatrixXd li = fit_.chol_lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd inner = sw.asDiagonal() * (li.transpose() * li) * sw.asDiagonal();
  inner = 0.5 * (inner + inner.transpose()).eval();
  return prior_.condition(std::move(inner), fit_.weights);
}

GpcModel fit_gpc(const BinaryDataset& data, const KernelParams& params, Likelihood likelihood, double reg_gamma,
                 const NewtonOptions& opts) {
  data.validate();
  params.validate();
  if (!(reg_gamma >= 0.0)) throw InvalidArgument("reg_gamma must be non-negative");
  return GpcModel(PosteriorChain(params, data.xs), data.ys, likelihood, params.jitter + reg_gamma, opts);
}

}  // namespace gpdistill
