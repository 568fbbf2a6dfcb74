#include "fbmgen/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fbmgen {

namespace {

const GaussRule rule4 = {
    {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
    {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538}};

const GaussRule rule8 = {
    {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
     0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363},
    {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
     0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763}};

const GaussRule rule16 = {
    {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
     -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
     0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
     0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499},
    {0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
     0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
     0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
     0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541}};

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
	double m = 0.5 * (a + b);
	double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
	double flm = f(lm), frm = f(rm);
	double h6 = (b - a) / 12.0;
	double left = h6 * (fa + 4.0 * flm + fm);
	double right = h6 * (fm + 4.0 * frm + fb);
	double delta = left + right - whole;
	if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
	return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
	       simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
	switch (order) {
		case 4: return rule4;
		case 8: return rule8;
		case 16: return rule16;
	}
	throw std::invalid_argument("gauss_legendre: order must be 4, 8 or 16");
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
	if (a == b) return 0.0;
	double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
	double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
	return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {

// Inner x-integral of phi_{t1}*phi_{t2} at fixed b = -y-s, in closed form.
// On each segment phi_t(x) = (a + c*x) x^{H-2}: low branch (b > t) has
// (t-b, 1) on [b-t, b] then (t, 0) beyond; high branch (b <= t) has (0, 1)
// on (0, b] then (b, 0) beyond. The product integrates termwise; zero
// coefficients are skipped so x^negative never multiplies an exact zero.
struct InnerProduct {
	double t1, t2, H;
	double e1, e2, e3;  // 2H-3, 2H-2, 2H-1

	InnerProduct(double t1_, double t2_, double H_)
	    : t1(t1_), t2(t2_), H(H_), e1(2 * H - 3), e2(2 * H - 2), e3(2 * H - 1) {}

	double segment(double a1, double c1, double a2, double c2, double lo, double hi) const {
		if (!(hi > lo)) return 0.0;
		double A = a1 * a2, B = a1 * c2 + a2 * c1, C = c1 * c2;
		double v = 0.0;
		if (A != 0.0) v += A / e1 * (std::pow(hi, e1) - std::pow(lo, e1));
		if (B != 0.0) v += B / e2 * (std::pow(hi, e2) - std::pow(lo, e2));
		if (C != 0.0) v += C / e3 * (std::pow(hi, e3) - std::pow(lo, e3));
		return v;
	}

	double operator()(double b) const {
		if (!(b > 0.0)) return 0.0;
		double L1 = std::max(0.0, b - t1), L2 = std::max(0.0, b - t2);
		double lo = std::max(L1, L2);
		double a1 = b > t1 ? t1 - b : 0.0;
		double a2 = b > t2 ? t2 - b : 0.0;
		double finite = segment(a1, 1.0, a2, 1.0, lo, b);
		double tail = std::min(t1, b) * std::min(t2, b) * std::pow(b, e1) / (3.0 - 2.0 * H);
		return finite + tail;
	}
};

}  // namespace

double kernel_inner_product(double t1, double t2, const KernelParams& p,
                            const QuadratureConfig& quad) {
	p.validate();
	quad.validate();
	if (!(t1 >= 0.0 && t1 <= 1.0 && t2 >= 0.0 && t2 <= 1.0))
		throw std::invalid_argument("kernel_inner_product: times must lie in [0, 1]");
	if (t1 == 0.0 || t2 == 0.0) return 0.0;

	const double H = p.H;
	const double tmin = std::min(t1, t2), tmax = std::max(t1, t2);
	const InnerProduct inner(t1, t2, H);

	// inner(b) is continuous with Holder kinks (leading term ~ d^{2H-1}) at
	// b = tmin and b = tmax; panels graded dyadically into the kinks resolve
	// them to machine precision.
	const GaussRule& gr = gauss_legendre(quad.gauss_order);
	const int depth = 64;
	const int sub0 = std::max(1, quad.panels_per_axis / 64);

	auto panel = [&](const std::function<double(double)>& f, double a, double b, int sub) {
		double acc = 0.0;
		double w = (b - a) / sub;
		for (int j = 0; j < sub; ++j) {
			double pa = a + j * w;
			double half = 0.5 * w;
			double mid = pa + half;
			for (std::size_t k = 0; k < gr.nodes.size(); ++k)
				acc += half * gr.weights[k] * f(mid + half * gr.nodes[k]);
		}
		return acc;
	};

	// dyadic grading of [a, b] into the endpoint `into` (= a or b)
	auto graded = [&](const std::function<double(double)>& f, double a, double b, bool into_a,
	                  int sub) {
		if (!(b > a)) return 0.0;
		double acc = 0.0;
		double w = b - a;
		for (int k = 0; k < depth; ++k) {
			double hi = w * std::ldexp(1.0, -k);
			double lo = (k == depth - 1) ? 0.0 : w * std::ldexp(1.0, -k - 1);
			if (into_a)
				acc += panel(f, a + lo, a + hi, sub);
			else
				acc += panel(f, b - hi, b - lo, sub);
		}
		return acc;
	};

	auto run = [&](int sub) {
		double acc = 0.0;
		// [0, tmin]: both kernels in the short branch, integrand ~ b^{2H-1}
		acc += graded(inner, 0.0, tmin, true, sub);
		// [tmin, tmax]: kinks at both ends
		if (tmax > tmin) {
			double m = 0.5 * (tmin + tmax);
			acc += graded(inner, tmin, m, true, sub);
			acc += graded(inner, m, tmax, false, sub);
		}
		// [tmax, tmax+1]: graded out of the kink
		acc += graded(inner, tmax, tmax + 1.0, true, sub);
		// [B, inf): with u = b - x and the order of integration swapped,
		//   int_B^inf inner = int_0^tmin (t1-u)(t2-u)(B-u)^{2H-3} du / (3-2H)
		//                     + t1 t2 B^{2H-2} / ((3-2H)(2-2H)).
		// B - u >= 1 keeps the u-integrand analytic, so a 16-node rule is exact;
		// the antiderivative-difference form is avoided because it cancels
		// catastrophically for b >> t.
		const double B = tmax + 1.0;
		const GaussRule& g16 = gauss_legendre(16);
		double swapped = 0.0;
		double half = 0.5 * tmin, mid = half;
		for (std::size_t k = 0; k < g16.nodes.size(); ++k) {
			double u = mid + half * g16.nodes[k];
			swapped += half * g16.weights[k] * (t1 - u) * (t2 - u) *
			           std::pow(B - u, 2.0 * H - 3.0);
		}
		acc += swapped / (3.0 - 2.0 * H);
		acc += t1 * t2 * std::pow(B, 2.0 * H - 2.0) / ((3.0 - 2.0 * H) * (2.0 - 2.0 * H));
		return acc;
	};

	double coarse = run(sub0);
	double fine = run(sub0 * quad.refinement_factor);
	double scale = 2.0 * p.c();
	double diff = std::fabs(fine - coarse);
	if (diff > quad.rel_tol * std::max(std::fabs(fine), 1e-12))
		throw ToleranceError("kernel_inner_product: refinement check failed", scale * fine,
		                     scale * diff);
	return scale * fine;
}

}  // namespace fbmgen
