#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbmgen/kernels.hpp"

namespace fbmgen {

struct QuadratureConfig {
	int panels_per_axis = 64;
	int gauss_order = 8;
	int refinement_factor = 2;
	double rel_tol = 1e-6;

	void validate() const {
		if (panels_per_axis < 1) throw std::invalid_argument("panels_per_axis must be >= 1");
		if (refinement_factor < 2) throw std::invalid_argument("refinement_factor must be >= 2");
		if (gauss_order != 4 && gauss_order != 8 && gauss_order != 16)
			throw std::invalid_argument("gauss_order must be 4, 8 or 16");
	}
};

// Raised when a quadrature or Monte Carlo routine cannot certify the requested
// tolerance; carries the best estimate and the achieved error bound.
struct ToleranceError : std::runtime_error {
	ToleranceError(const std::string& msg, double est, double err)
	    : std::runtime_error(msg), estimate(est), error_bound(err) {}
	double estimate;
	double error_bound;
};

struct GaussRule {
	std::vector<double> nodes;    // on [-1, 1]
	std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 52);

// 2 c_H ∬ phi_{t1} phi_{t2} dx dy over the joint support. The inner x-integral
// is closed-form per branch; the outer integral runs over b = -y-s with
// Gauss-Legendre panels graded into the kinks at b = 0, t1, t2 and the
// remaining tail taken in closed form after swapping the integration order.
double kernel_inner_product(double t1, double t2, const KernelParams& p,
                            const QuadratureConfig& quad = {});

}  // namespace fbmgen
