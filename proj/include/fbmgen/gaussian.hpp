#pragma once

#include <cstdint>
#include <vector>

#include "fbmgen/field.hpp"
#include "fbmgen/pathgen.hpp"

namespace fbmgen {

struct OracleConfig {
	double H = 0.7;
	std::vector<double> time_grid;  // same convention as ApproxConfig
	int replicas = 1;
	std::uint64_t seed = 0;
	std::size_t grid_cap = 256;  // Cholesky is O(m^3)

	void validate() const;
	std::string hash() const;
};

// Exact fBm draws on the grid via Cholesky factorization of the covariance
// (t = 0 pinned to zero, excluded from the factorized matrix).
std::vector<PathSample> fbm_exact_paths(const OracleConfig& config);

// lower-triangular Cholesky factor of the fBm covariance on grid[1..]
std::vector<double> fbm_cholesky(const std::vector<double>& grid, double H);

// Centered Gaussian cell draw with variance = rect area (white-noise measure
// evaluated on a rectangle).
double gaussian_sheet_cell(std::uint64_t seed, const Rect& rect);

}  // namespace fbmgen
