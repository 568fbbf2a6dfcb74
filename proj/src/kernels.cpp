#include "fbmgen/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "fbmgen/quadrature.hpp"

namespace fbmgen {

double h_kernel(double t, double x, double y) {
	if (!(t >= 0.0)) throw std::invalid_argument("h_kernel: t must be >= 0");
	if (!(x >= 0.0)) throw std::invalid_argument("h_kernel: x must be >= 0");
	if (y < -t) {
		if (-y < x) return t;
		if (-t - y < x) return x + t + y;  // and x <= -y
		return 0.0;
	}
	if (y < 0.0) {
		if (-y < x) return -y;
		return x;  // 0 < x <= -y; also covers x = 0
	}
	return 0.0;
}

double h_kernel_quad(double t, double x, double y, double tol) {
	if (!(t >= 0.0)) throw std::invalid_argument("h_kernel_quad: t must be >= 0");
	if (!(x >= 0.0)) throw std::invalid_argument("h_kernel_quad: x must be >= 0");
	if (t == 0.0) return 0.0;
	auto ind = [x, y](double u) { return (u - y >= 0.0 && u - y <= x) ? 1.0 : 0.0; };
	// split at the integrand's jumps (u = y, u = x+y) so no panel straddles one
	double cuts[4] = {-t, std::clamp(y, -t, 0.0), std::clamp(x + y, -t, 0.0), 0.0};
	std::sort(cuts, cuts + 4);
	double acc = 0.0;
	for (int i = 0; i < 3; ++i)
		if (cuts[i + 1] > cuts[i]) acc += adaptive_simpson(ind, cuts[i], cuts[i + 1], tol);
	return acc;
}

double g_kernel(double t, double x, double y, const KernelParams& p) {
	p.validate();
	return h_kernel(t, x, y + p.s);
}

double phi_composed(double t, double x, double y, const KernelParams& p) {
	if (!(x > 0.0)) throw std::invalid_argument("phi: x must be > 0");
	return g_kernel(t, x, y, p) * std::pow(x, p.H - 2.0);
}

double phi_kernel(double t, double x, double y, const KernelParams& p) {
	p.validate();
	if (!(t >= 0.0)) throw std::invalid_argument("phi: t must be >= 0");
	if (!(x > 0.0)) throw std::invalid_argument("phi: x must be > 0");
	const double s = p.s;
	if (y < -t - s) {
		if (-y - s < x) return t * std::pow(x, p.H - 2.0);
		if (-t - s - y < x) return (x + t + s + y) * std::pow(x, p.H - 2.0);
		return 0.0;
	}
	if (y < -s) {
		if (-y - s < x) return (-y - s) * std::pow(x, p.H - 2.0);
		return std::pow(x, p.H - 1.0);  // 0 < x <= -y-s
	}
	return 0.0;
}

double h_reflected(double t, double x, double y) { return h_kernel(t, x, -y); }

double g_reflected(double t, double x, double y, const KernelParams& p) {
	return g_kernel(t, x, -y, p);
}

double phi_reflected(double t, double x, double y, const KernelParams& p) {
	return phi_kernel(t, x, -y, p);
}

double phi_variant(double t, double x, double y, const KernelParams& p, KernelVariant v) {
	return v == KernelVariant::standard ? phi_kernel(t, x, y, p) : phi_reflected(t, x, y, p);
}

double fbm_covariance(double t1, double t2, double H) {
	if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("fbm_covariance: H must lie in (0, 1)");
	if (!(t1 >= 0.0) || !(t2 >= 0.0))
		throw std::invalid_argument("fbm_covariance: times must be >= 0");
	const double e = 2.0 * H;
	return 0.5 * (std::pow(t1, e) + std::pow(t2, e) - std::pow(std::fabs(t1 - t2), e));
}

}  // namespace fbmgen
