#pragma once

#include <stdexcept>
#include <string>

namespace fbmgen {

enum class KernelVariant { standard, reflected };

inline const char* variant_name(KernelVariant v) {
	return v == KernelVariant::standard ? "standard" : "reflected";
}

struct KernelParams {
	double H = 0.7;
	double s = 1.0;

	void validate() const {
		if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("H must lie in (1/2, 1)");
		if (!(s > 0.0)) throw std::invalid_argument("s must be > 0");
	}

	// normalization constant H(2H-1)(1-H)(3-2H), always recomputed from H
	double c() const { return H * (2.0 * H - 1.0) * (1.0 - H) * (3.0 - 2.0 * H); }
};

// Occupation kernel: h(t,x,y) = |[-t,0] ∩ [y, y+x]|. Nondecreasing in t and x,
// bounded by min(t, x). Branch conditions keep the half-open convention fixed.
double h_kernel(double t, double x, double y);

// Same value via 1-D numerical integration of the interval indicator; slow,
// used as an independent cross-check.
double h_kernel_quad(double t, double x, double y, double tol = 1e-10);

// g(t,x,y) = h(t, x, y+s); equivalently h(t+s,x,y) - h(s,x,y).
double g_kernel(double t, double x, double y, const KernelParams& p);

// phi_t(x,y) = g(t,x,y) / x^{2-H}, x > 0. Two implementations that must agree:
// phi_composed chains through g_kernel, phi_kernel is the piecewise table.
double phi_composed(double t, double x, double y, const KernelParams& p);
double phi_kernel(double t, double x, double y, const KernelParams& p);

// reflected variant: second spatial coordinate negated
double h_reflected(double t, double x, double y);
double g_reflected(double t, double x, double y, const KernelParams& p);
double phi_reflected(double t, double x, double y, const KernelParams& p);

double phi_variant(double t, double x, double y, const KernelParams& p, KernelVariant v);

// (t1^{2H} + t2^{2H} - |t1-t2|^{2H}) / 2
double fbm_covariance(double t1, double t2, double H);

}  // namespace fbmgen
