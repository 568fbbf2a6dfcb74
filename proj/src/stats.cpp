#include "fbmgen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "fbmgen/csvio.hpp"
#include "fbmgen/rng.hpp"

namespace fbmgen {

CovarianceEstimate empirical_covariance(const std::vector<PathSample>& paths,
                                        const std::vector<double>& grid, int bootstrap) {
	if (paths.size() < 2) throw std::invalid_argument("empirical_covariance: needs >= 2 paths");
	const std::size_t m = grid.size();
	for (const PathSample& p : paths)
		if (p.values.size() != m)
			throw std::invalid_argument("empirical_covariance: mismatched grids");
	const std::size_t M = paths.size();

	CovarianceEstimate est;
	est.grid = grid;
	est.replicas = static_cast<int>(M);
	est.mean.assign(m, 0.0);
	for (const PathSample& p : paths)
		for (std::size_t i = 0; i < m; ++i) est.mean[i] += p.values[i];
	for (double& v : est.mean) v /= static_cast<double>(M);

	est.cov.assign(m * m, 0.0);
	for (const PathSample& p : paths)
		for (std::size_t i = 0; i < m; ++i) {
			double di = p.values[i] - est.mean[i];
			for (std::size_t j = i; j < m; ++j)
				est.cov[i * m + j] += di * (p.values[j] - est.mean[j]);
		}
	for (std::size_t i = 0; i < m; ++i)
		for (std::size_t j = i; j < m; ++j) {
			est.cov[i * m + j] /= static_cast<double>(M - 1);
			est.cov[j * m + i] = est.cov[i * m + j];
		}

	est.stderr_.assign(m * m, 0.0);
	if (bootstrap > 0) {
		// replica bootstrap of each covariance entry
		Rng rng(0x626f6f74u ^ static_cast<std::uint64_t>(M));
		std::vector<double> acc(m * m, 0.0), acc2(m * m, 0.0), bm(m), bc(m * m);
		std::vector<std::size_t> idx(M);
		for (int b = 0; b < bootstrap; ++b) {
			for (std::size_t r = 0; r < M; ++r)
				idx[r] = static_cast<std::size_t>(rng.uniform() * M);
			std::fill(bm.begin(), bm.end(), 0.0);
			for (std::size_t r : idx)
				for (std::size_t i = 0; i < m; ++i) bm[i] += paths[r].values[i];
			for (double& v : bm) v /= static_cast<double>(M);
			std::fill(bc.begin(), bc.end(), 0.0);
			for (std::size_t r : idx)
				for (std::size_t i = 0; i < m; ++i) {
					double di = paths[r].values[i] - bm[i];
					for (std::size_t j = i; j < m; ++j) bc[i * m + j] += di * (paths[r].values[j] - bm[j]);
				}
			for (std::size_t i = 0; i < m; ++i)
				for (std::size_t j = i; j < m; ++j) {
					double v = bc[i * m + j] / static_cast<double>(M - 1);
					acc[i * m + j] += v;
					acc2[i * m + j] += v * v;
				}
		}
		for (std::size_t i = 0; i < m; ++i)
			for (std::size_t j = i; j < m; ++j) {
				double mu = acc[i * m + j] / bootstrap;
				double va = std::max(0.0, acc2[i * m + j] / bootstrap - mu * mu);
				est.stderr_[i * m + j] = est.stderr_[j * m + i] =
				    std::sqrt(va * bootstrap / std::max(1, bootstrap - 1));
			}
	} else {
		// Gaussian moment formula: Var[C_ij] = (C_ii C_jj + C_ij^2)/(M-1)
		for (std::size_t i = 0; i < m; ++i)
			for (std::size_t j = 0; j < m; ++j) {
				double v = (est.cov[i * m + i] * est.cov[j * m + j] +
				            est.cov[i * m + j] * est.cov[i * m + j]) /
				           static_cast<double>(M - 1);
				est.stderr_[i * m + j] = std::sqrt(std::max(0.0, v));
			}
	}
	est.stderr_reliable = M >= 30;
	return est;
}

DeviationResult covariance_deviation(const CovarianceEstimate& est, double H) {
	const std::size_t m = est.grid.size();
	DeviationResult r{0.0, 0.0, 0.0};
	std::size_t counted = 0;
	for (std::size_t i = 0; i < m; ++i)
		for (std::size_t j = 0; j < m; ++j) {
			double exact = fbm_covariance(est.grid[i], est.grid[j], H);
			double dev = std::fabs(est.cov_at(i, j) - exact);
			r.sup_norm = std::max(r.sup_norm, dev);
			double se = est.stderr_at(i, j);
			if (se > 0.0) {
				r.normalized_sup = std::max(r.normalized_sup, dev / se);
				r.mean_normalized += dev / se;
				++counted;
			}
		}
	if (counted) r.mean_normalized /= static_cast<double>(counted);
	return r;
}

double ks_statistic(std::vector<double> samples, double mean, double variance) {
	if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
	if (!(variance > 0.0)) throw std::invalid_argument("ks_statistic: variance must be > 0");
	std::sort(samples.begin(), samples.end());
	const double sd = std::sqrt(variance);
	const double M = static_cast<double>(samples.size());
	double d = 0.0;
	for (std::size_t i = 0; i < samples.size(); ++i) {
		double z = (samples[i] - mean) / sd;
		double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
		d = std::max(d, std::fabs(cdf - static_cast<double>(i) / M));
		d = std::max(d, std::fabs(static_cast<double>(i + 1) / M - cdf));
	}
	return d;
}

double gaussianity_test(const std::vector<double>& samples, double mean, double variance) {
	if (samples.size() < 100) throw std::invalid_argument("gaussianity_test: needs >= 100 samples");
	if (!(variance > 0.0)) throw std::invalid_argument("gaussianity_test: variance must be > 0");
	double d = ks_statistic(samples, mean, variance);
	// asymptotic Kolmogorov distribution with Stephens' finite-sample correction
	double sn = std::sqrt(static_cast<double>(samples.size()));
	double lambda = d * (sn + 0.12 + 0.11 / sn);
	double p = 0.0;
	for (int k = 1; k <= 100; ++k) {
		double term = 2.0 * ((k & 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
		p += term;
		if (std::fabs(term) < 1e-16) break;
	}
	return std::clamp(p, 0.0, 1.0);
}

double hurst_estimate(const std::vector<PathSample>& paths, const std::vector<double>& grid) {
	if (paths.size() < 1000) throw std::invalid_argument("hurst_estimate: needs >= 1000 replicas");
	const std::size_t m = grid.size();
	// dyadic lags on the uniform part of the grid
	std::vector<double> logd, logv;
	for (std::size_t lag = 1; lag < m; lag *= 2) {
		double acc = 0.0;
		std::size_t cnt = 0;
		for (const PathSample& p : paths)
			for (std::size_t i = 0; i + lag < m; ++i) {
				double d = p.values[i + lag] - p.values[i];
				acc += d * d;
				++cnt;
			}
		if (cnt == 0) continue;
		double var = acc / static_cast<double>(cnt);
		if (!(var > 0.0)) continue;
		logd.push_back(std::log(grid[lag] - grid[0]));
		logv.push_back(std::log(var));
	}
	if (logd.size() < 3) throw std::invalid_argument("hurst_estimate: fewer than 3 usable lags");
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	const double k = static_cast<double>(logd.size());
	for (std::size_t i = 0; i < logd.size(); ++i) {
		sx += logd[i];
		sy += logv[i];
		sxx += logd[i] * logd[i];
		sxy += logd[i] * logv[i];
	}
	double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
	return 0.5 * slope;
}

BoundReport bound_check(const std::vector<PathSample>& paths, const std::vector<double>& grid,
                        const KernelParams& params, const BoundConstants& constants) {
	const std::size_t m = grid.size();
	const std::size_t M = paths.size();
	BoundReport rep;
	rep.margins.assign(m, 0.0);
	bool any = false;
	for (std::size_t i = 0; i < m; ++i) {
		double t = grid[i];
		if (t <= 0.0) continue;  // both sides zero
		double mu = 0.0;
		for (const PathSample& p : paths) mu += p.values[i];
		mu /= static_cast<double>(M);
		double var = 0.0;
		for (const PathSample& p : paths) {
			double d = p.values[i] - mu;
			var += d * d;
		}
		var /= static_cast<double>(M - 1);
		double se = var * std::sqrt(2.0 / static_cast<double>(M - 1));
		double bound = constants.K * std::pow(t, 2.0 * params.H);
		rep.margins[i] = bound - (var - 3.0 * se);
		if (rep.margins[i] < 0.0) ++rep.violations;
		rep.min_margin = any ? std::min(rep.min_margin, rep.margins[i]) : rep.margins[i];
		any = true;
	}
	return rep;
}

std::string ConvergenceReport::table() const {
	auto sig4 = [](double v) {
		char buf[24];
		std::snprintf(buf, sizeof buf, "%.4g", v);
		return std::string(buf);
	};
	std::ostringstream os;
	os << std::left << std::setw(8) << "n" << std::setw(12) << "sup_dev" << std::setw(14)
	   << "mean_dev/se" << std::setw(12) << "ks_p(t=1)" << std::setw(10) << "hurst"
	   << std::setw(14) << "bound_margin" << std::setw(10) << "replicas" << '\n';
	for (const ConvergenceRow& r : rows) {
		os << std::left << std::setw(8) << sig4(r.n) << std::setw(12) << sig4(r.sup_dev)
		   << std::setw(14) << sig4(r.mean_normalized_dev) << std::setw(12) << sig4(r.ks_p_t1)
		   << std::setw(10) << sig4(r.hurst) << std::setw(14) << sig4(r.bound_min_margin)
		   << std::setw(10) << r.replicas << '\n';
	}
	return os.str();
}

std::string ConvergenceReport::json() const {
	auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
	std::ostringstream os;
	os << "[\n";
	for (std::size_t i = 0; i < rows.size(); ++i) {
		const ConvergenceRow& r = rows[i];
		os << "  {\"n\": " << num(r.n) << ", \"sup_dev\": " << num(r.sup_dev)
		   << ", \"mean_normalized_dev\": " << num(r.mean_normalized_dev)
		   << ", \"ks_p_t1\": " << num(r.ks_p_t1) << ", \"hurst\": " << num(r.hurst)
		   << ", \"bound_min_margin\": " << num(r.bound_min_margin)
		   << ", \"replicas\": " << r.replicas << "}" << (i + 1 < rows.size() ? "," : "") << "\n";
	}
	os << "]\n";
	return os.str();
}

}  // namespace fbmgen
