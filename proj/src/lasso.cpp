#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <string>

#include "ripe/error.hpp"
#include "ripe/estimator.hpp"
#include "ripe/hash.hpp"
#include "ripe/kernels.hpp"

namespace ripe {

namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

void validate(const LassoConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error(ErrorCode::ValueOutOfRange, "alpha must lie in (0,1)");
  if (!(cfg.shrink > 0.0)) throw Error(ErrorCode::ValueOutOfRange, "shrink must be positive");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::ValueOutOfRange, "tol must be positive");
  if (cfg.max_iter == 0) throw Error(ErrorCode::ValueOutOfRange, "max_iter must be positive");
}

std::uint64_t config_hash(const LassoConfig& cfg) {
  Fnv1a h;
  h.bytes(&cfg.alpha, sizeof cfg.alpha);
  h.bytes(&cfg.shrink, sizeof cfg.shrink);
  h.bytes(&cfg.tol, sizeof cfg.tol);
  h.u64(cfg.max_iter);
  h.u64(cfg.center);
  h.u64(cfg.standardize);
  h.u64(static_cast<std::uint64_t>(cfg.score));
  return h.value();
}

double lambda_schedule(std::size_t n, std::size_t p, std::size_t i, const LassoConfig& cfg) {
  if (i < 2) throw Error(ErrorCode::InvalidPosition, "lambda is defined for positions >= 2, got " + std::to_string(i));
  if (n == 0) throw Error(ErrorCode::EmptyInput, "lambda needs at least one sample");
  validate(cfg);
  const double level = cfg.alpha / (2.0 * static_cast<double>(p) * static_cast<double>(i - 1));
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(boost::math::complement(normal, level));
  return cfg.shrink * 2.0 * z / std::sqrt(static_cast<double>(n));
}

GramFit lasso_gram(const Eigen::MatrixXd& gram, Node target, std::span<const Node> predictors, double lambda,
                   const LassoConfig& cfg) {
  GramFit fit;
  const std::size_t m = predictors.size();
  const std::size_t p = static_cast<std::size_t>(gram.rows());
  const double s_tt = gram(target, target);
  fit.theta.assign(m, 0.0);
  if (m == 0) {
    fit.rss_over_n = s_tt;
    fit.objective = s_tt;
    return fit;
  }
  const double half = lambda / 2.0;
  auto column = [&](Node j) { return std::span<const double>(gram.col(j).data(), p); };

  // g = S[:, target] - sum_k theta_k S[:, k], kept over every gene.
  std::vector<double> g(column(target).begin(), column(target).end());
  std::vector<std::size_t> active;
  std::vector<char> in_active(m, 0);

  auto refresh = [&] {
    std::copy(column(target).begin(), column(target).end(), g.begin());
    for (std::size_t a : active) {
      if (fit.theta[a] != 0.0) kernels::axpy(-fit.theta[a], column(predictors[a]), g);
    }
  };

  std::size_t sweeps = 0;
  fit.converged = false;
  while (sweeps < cfg.max_iter) {
    // Full pass over every predictor.
    double max_delta = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const Node j = predictors[a];
      const double s = gram(j, j);
      if (s <= 0.0) continue;
      const double next = soft(g[j] + s * fit.theta[a], half) / s;
      const double d = next - fit.theta[a];
      if (d == 0.0) continue;
      fit.theta[a] = next;
      kernels::axpy(-d, column(j), g);
      max_delta = std::max(max_delta, std::fabs(d));
      if (!in_active[a]) {
        in_active[a] = 1;
        active.push_back(a);
      }
    }
    ++sweeps;
    if (max_delta < cfg.tol) {
      fit.converged = true;
      break;
    }

    // Inner passes over the active set; only g on active predictors is kept current.
    std::sort(active.begin(), active.end());
    while (sweeps < cfg.max_iter) {
      double inner_delta = 0.0;
      for (std::size_t a : active) {
        const Node j = predictors[a];
        const double s = gram(j, j);
        const double next = soft(g[j] + s * fit.theta[a], half) / s;
        const double d = next - fit.theta[a];
        if (d == 0.0) continue;
        fit.theta[a] = next;
        for (std::size_t b : active) g[predictors[b]] -= d * gram(predictors[b], j);
        inner_delta = std::max(inner_delta, std::fabs(d));
      }
      ++sweeps;
      if (inner_delta < cfg.tol) break;
    }
    refresh();
  }
  if (!fit.converged) refresh();
  fit.iterations = sweeps;

  double theta_c = 0.0;
  double theta_g = 0.0;
  double l1 = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    if (fit.theta[a] == 0.0) continue;
    theta_c += fit.theta[a] * gram(predictors[a], target);
    theta_g += fit.theta[a] * g[predictors[a]];
    l1 += std::fabs(fit.theta[a]);
  }
  fit.rss_over_n = std::max(0.0, s_tt - theta_c - theta_g);
  fit.objective = fit.rss_over_n + lambda * l1;
  return fit;
}

LassoResult lasso_solve(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double lambda, const LassoConfig& cfg) {
  validate(cfg);
  if (!(lambda >= 0.0)) throw Error(ErrorCode::ValueOutOfRange, "lambda must be non-negative");
  const Eigen::Index n = y.size();
  const Eigen::Index m = X.cols();
  if (X.rows() != n) throw Error(ErrorCode::LengthMismatch, "X and y have different row counts");
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no samples");

  Eigen::MatrixXd Z(n, m + 1);
  Z.leftCols(m) = X;
  Z.col(m) = y;
  if (cfg.center) Z.rowwise() -= Z.colwise().mean();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(m + 1);
  if (cfg.standardize) {
    for (Eigen::Index j = 0; j <= m; ++j) {
      const double sd = std::sqrt(Z.col(j).squaredNorm() / static_cast<double>(n));
      if (sd > 0.0) {
        scale(j) = sd;
        Z.col(j) /= sd;
      }
    }
  }
  const Eigen::MatrixXd gram = Z.transpose() * Z / static_cast<double>(n);
  std::vector<Node> predictors(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) predictors[static_cast<std::size_t>(j)] = static_cast<Node>(j);
  const GramFit fit = lasso_gram(gram, static_cast<Node>(m), predictors, lambda, cfg);

  LassoResult result;
  Eigen::VectorXd theta(m);
  for (Eigen::Index j = 0; j < m; ++j) theta(j) = fit.theta[static_cast<std::size_t>(j)];
  const Eigen::VectorXd residual = Z.col(m) - Z.leftCols(m) * theta;
  result.rss = residual.squaredNorm();
  result.objective = result.rss / static_cast<double>(n) + lambda * theta.lpNorm<1>();
  result.coefficients = theta.cwiseQuotient(scale.head(m)) * scale(m);
  result.iterations = fit.iterations;
  result.converged = fit.converged;
  return result;
}

}  // namespace ripe
