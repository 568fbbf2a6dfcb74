#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbmgen/field.hpp"
#include "fbmgen/kernels.hpp"
#include "fbmgen/quadrature.hpp"

namespace fbmgen {

enum class Integrator { exact, panel };

struct ApproxConfig {
	double n = 2.0;
	std::vector<double> time_grid;  // sorted, strictly increasing, starts at 0
	KernelParams kernel{};
	KernelVariant variant = KernelVariant::standard;
	QuadratureConfig quad{};
	int replicas = 1;
	std::uint64_t seed = 0;
	// exact: closed-form x-integrals between parity flips, Gauss-Legendre in y
	// only (error independent of the point count). panel: tensor panels with
	// parity sampled at the nodes; subject to the refinement contract.
	Integrator integrator = Integrator::exact;

	void validate() const;
	std::string hash() const;  // content hash of all generator-relevant fields
};

std::vector<double> default_time_grid(int points = 64);  // i/(points-1), i = 0..points-1
std::vector<double> time_grid_positive(const ApproxConfig& config);

struct PathSample {
	std::vector<double> values;
	int replica_id = 0;
	std::uint64_t seed = 0;
	std::string config_hash;
};

// Y_n(t) for every grid t of one field; one shared parity pass per field
PathSample evaluate_path(const PointField& field, const ApproxConfig& config);

// all replicas (fields sampled from per-replica streams of config.seed)
std::vector<PathSample> simulate_paths(const ApproxConfig& config);

// B_n(u, v): sgn(uv) n ∬_{[0,|u|]x[-|v|,0]} sqrt(x|y|) parity dx dy.
// (u, v) addresses the cell [0,|u|]x[-|v|,0]; closed form per parity band.
double sheet_approx(const PointField& field, double n, double u, double v);

struct BoundConstants {
	double K1;
	double K2;
	double C;  // sup_{z>=1} e^{-2z} z ∫_1^z w^{-1} e^{2w} dw, computed once
	double K;
};

BoundConstants bound_constants(const KernelParams& params);
double universal_Q_bound();

struct OracleEstimate {
	double value = 0.0;
	double stderr_ = 0.0;
	std::uint64_t samples = 0;
};

// E[Y_n(t)^2] by importance-sampled 4-D Monte Carlo over the exact pair
// correlation (deterministic given config.seed). Throws ToleranceError when
// the standard error exceeds max_stderr.
OracleEstimate variance_oracle(const ApproxConfig& config, double t,
                               std::uint64_t samples = 4'000'000,
                               double max_stderr = 1e300);

// same quantity by tensor quadrature; only practical for small n
double variance_oracle_quad(const ApproxConfig& config, double t, int panels_per_axis = 48);

// E[Y_n(t)] = n sqrt(2 c_H) ∬ phi_t sqrt(x|y|) e^{-2 n x|y|} dx dy (the
// finite-n mean is not exactly zero; this is the diagnostic 2-D integral)
double mean_oracle(const ApproxConfig& config, double t, double tol = 1e-9);

// kernel mass outside the sampled rectangle, as share of the full-plane mass
double truncation_diagnostic(const ApproxConfig& config, double t);

void write_paths_csv(const std::string& path, const std::vector<PathSample>& paths,
                     const std::vector<double>& grid);

}  // namespace fbmgen
