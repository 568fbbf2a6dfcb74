#pragma once

#include <string>
#include <vector>

#include "fbmgen/kernels.hpp"
#include "fbmgen/pathgen.hpp"

namespace fbmgen {

struct CovarianceEstimate {
	std::vector<double> grid;
	std::vector<double> mean;
	std::vector<double> cov;      // row-major m x m
	std::vector<double> stderr_;  // entrywise standard error of cov
	int replicas = 0;
	bool stderr_reliable = true;  // false when replicas are too few

	double cov_at(std::size_t i, std::size_t j) const { return cov[i * grid.size() + j]; }
	double stderr_at(std::size_t i, std::size_t j) const { return stderr_[i * grid.size() + j]; }
};

// Unbiased mean/covariance. Standard errors use the Gaussian moment formula
// SE[C_ij] = sqrt((C_ii C_jj + C_ij^2)/(M-1)), or a replica bootstrap when
// bootstrap > 0 (value = resample count).
CovarianceEstimate empirical_covariance(const std::vector<PathSample>& paths,
                                        const std::vector<double>& grid, int bootstrap = 0);

struct DeviationResult {
	double sup_norm;        // sup_{ij} |cov - fbm_covariance|
	double normalized_sup;  // sup_{ij} |cov - fbm_covariance| / stderr
	double mean_normalized;
};

DeviationResult covariance_deviation(const CovarianceEstimate& est, double H);

// one-sample Kolmogorov-Smirnov test against N(mean, variance)
double gaussianity_test(const std::vector<double>& samples, double mean, double variance);
double ks_statistic(std::vector<double> samples, double mean, double variance);

// slope/2 of log Var[X(t+d)-X(t)] vs log d across dyadic lags
double hurst_estimate(const std::vector<PathSample>& paths, const std::vector<double>& grid);

struct BoundReport {
	std::vector<double> margins;  // K t^{2H} - (Var^ - 3 stderr) per grid t
	double min_margin = 0.0;
	int violations = 0;
};

BoundReport bound_check(const std::vector<PathSample>& paths, const std::vector<double>& grid,
                        const KernelParams& params, const BoundConstants& constants);

struct ConvergenceRow {
	double n;
	double sup_dev;
	double mean_normalized_dev;
	double ks_p_t1;  // KS p-value of Y_n(1) against N(0, 1)
	double hurst;
	double bound_min_margin;
	int replicas;
};

struct ConvergenceReport {
	std::vector<ConvergenceRow> rows;  // sorted by n
	std::string table() const;
	std::string json() const;
};

}  // namespace fbmgen
