#include "fbmgen/gaussian.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fbmgen/csvio.hpp"
#include "fbmgen/hash.hpp"
#include "fbmgen/kernels.hpp"
#include "fbmgen/parallel.hpp"
#include "fbmgen/rng.hpp"

namespace fbmgen {

void OracleConfig::validate() const {
	if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("H must lie in (0, 1)");
	if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
	if (time_grid.empty() || time_grid.front() != 0.0)
		throw std::invalid_argument("time_grid must start at 0");
	for (std::size_t i = 1; i < time_grid.size(); ++i)
		if (!(time_grid[i] > time_grid[i - 1]))
			throw std::invalid_argument("time_grid must be strictly increasing");
	if (time_grid.size() > grid_cap + 1)
		throw std::invalid_argument("time_grid exceeds the grid cap");
}

std::string OracleConfig::hash() const {
	std::ostringstream os;
	os << "oracle|H=" << format_double(H) << "|replicas=" << replicas << "|seed=" << seed
	   << "|grid=";
	for (double t : time_grid) os << format_double(t) << ',';
	return sha256_hex(os.str());
}

std::vector<double> fbm_cholesky(const std::vector<double>& grid, double H) {
	// factorize the covariance on the positive grid times
	std::vector<double> ts;
	for (double t : grid)
		if (t > 0.0) ts.push_back(t);
	const std::size_t m = ts.size();
	std::vector<double> L(m * m, 0.0);
	for (std::size_t i = 0; i < m; ++i)
		for (std::size_t j = 0; j <= i; ++j) L[i * m + j] = fbm_covariance(ts[i], ts[j], H);
	for (std::size_t j = 0; j < m; ++j) {
		double d = L[j * m + j];
		for (std::size_t k = 0; k < j; ++k) d -= L[j * m + k] * L[j * m + k];
		if (!(d > 0.0))
			throw std::invalid_argument("fbm_cholesky: covariance not positive definite "
			                            "(duplicate or invalid grid points)");
		d = std::sqrt(d);
		L[j * m + j] = d;
		for (std::size_t i = j + 1; i < m; ++i) {
			double v = L[i * m + j];
			for (std::size_t k = 0; k < j; ++k) v -= L[i * m + k] * L[j * m + k];
			L[i * m + j] = v / d;
		}
	}
	return L;
}

std::vector<PathSample> fbm_exact_paths(const OracleConfig& config) {
	config.validate();
	const std::vector<double>& grid = config.time_grid;
	std::size_t m = 0;
	for (double t : grid)
		if (t > 0.0) ++m;
	std::vector<double> L = fbm_cholesky(grid, config.H);
	std::string h = config.hash();

	std::vector<PathSample> out(config.replicas);
	parallel_for(static_cast<std::size_t>(config.replicas), [&](std::size_t r) {
		Rng rng = Rng::stream(config.seed, r);
		std::vector<double> z(m);
		for (double& v : z) v = rng.normal();
		PathSample& ps = out[r];
		ps.replica_id = static_cast<int>(r);
		ps.seed = config.seed;
		ps.config_hash = h;
		ps.values.assign(grid.size(), 0.0);
		std::size_t row = 0;
		for (std::size_t i = 0; i < grid.size(); ++i) {
			if (grid[i] <= 0.0) continue;
			double acc = 0.0;
			for (std::size_t k = 0; k <= row; ++k) acc += L[row * m + k] * z[k];
			ps.values[i] = acc;
			++row;
		}
	});
	return out;
}

double gaussian_sheet_cell(std::uint64_t seed, const Rect& rect) {
	double a = rect.area();
	if (!(a > 0.0)) throw std::invalid_argument("gaussian_sheet_cell: rectangle area must be > 0");
	Rng rng(mix64(seed));
	return std::sqrt(a) * rng.normal();
}

}  // namespace fbmgen
