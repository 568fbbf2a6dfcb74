#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbmgen/quadrature.hpp"

using namespace fbmgen;

TEST_CASE("gauss rules") {
	for (int order : {4, 8, 16}) {
		const GaussRule& r = gauss_legendre(order);
		REQUIRE(r.nodes.size() == static_cast<std::size_t>(order));
		double wsum = 0.0;
		for (std::size_t i = 0; i < r.nodes.size(); ++i) {
			wsum += r.weights[i];
			CHECK(r.nodes[i] == doctest::Approx(-r.nodes[order - 1 - i]).epsilon(1e-15));
			CHECK(r.weights[i] == doctest::Approx(r.weights[order - 1 - i]).epsilon(1e-15));
		}
		CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
		// exact for polynomials up to degree 2*order - 1
		double acc = 0.0;
		int d = 2 * order - 2;
		for (std::size_t i = 0; i < r.nodes.size(); ++i)
			acc += r.weights[i] * std::pow(r.nodes[i], d);
		CHECK(acc == doctest::Approx(2.0 / (d + 1)).epsilon(1e-13));
	}
	CHECK_THROWS_AS(gauss_legendre(5), std::invalid_argument);
	CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("adaptive simpson") {
	auto sq = [](double x) { return x * x; };
	CHECK(adaptive_simpson(sq, 0, 1, 1e-12) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
	auto s = [](double x) { return std::sin(x); };
	CHECK(adaptive_simpson(s, 0, M_PI, 1e-12) == doctest::Approx(2.0).epsilon(1e-11));
	auto e = [](double x) { return std::exp(-x * x); };
	CHECK(adaptive_simpson(e, -6, 6, 1e-12) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-11));
	CHECK(adaptive_simpson(sq, 2, 2, 1e-12) == 0.0);
}

TEST_CASE("quadrature config validation") {
	QuadratureConfig q;
	CHECK_NOTHROW(q.validate());
	q.gauss_order = 5;
	CHECK_THROWS_AS(q.validate(), std::invalid_argument);
	q = {};
	q.panels_per_axis = 0;
	CHECK_THROWS_AS(q.validate(), std::invalid_argument);
	q = {};
	q.refinement_factor = 1;
	CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("inner product normalization: kip(t,t) = t^{2H}") {
	for (double H : {0.51, 0.55, 0.7, 0.9, 0.99})
		for (double ss : {0.5, 1.0, 2.0}) {
			KernelParams p{H, ss};
			for (double t : {0.05, 0.25, 0.5, 1.0}) {
				double v = kernel_inner_product(t, t, p);
				CHECK(v == doctest::Approx(std::pow(t, 2 * H)).epsilon(1e-10));
			}
		}
}

TEST_CASE("inner product reproduces the covariance") {
	const double ts[5] = {0.1, 0.3, 0.5, 0.75, 1.0};
	for (double H : {0.55, 0.7, 0.9}) {
		KernelParams p{H, 1.0};
		for (double t1 : ts)
			for (double t2 : ts) {
				double v = kernel_inner_product(t1, t2, p);
				double c = fbm_covariance(t1, t2, H);
				CHECK(v == doctest::Approx(c).epsilon(1e-10));
			}
	}
	KernelParams p{0.7, 1.0};
	CHECK(kernel_inner_product(0.5, 1.0, p) ==
	      doctest::Approx(fbm_covariance(0.5, 1.0, 0.7)).epsilon(1e-12));
}

TEST_CASE("inner product trivia") {
	KernelParams p{0.7, 1.0};
	CHECK(kernel_inner_product(0.0, 0.7, p) == 0.0);
	CHECK(kernel_inner_product(0.7, 0.0, p) == 0.0);
	CHECK(kernel_inner_product(1.0, 1.0, p) == doctest::Approx(1.0).epsilon(1e-12));
	KernelParams q{0.85, 0.25};
	CHECK(kernel_inner_product(1.0, 1.0, q) == doctest::Approx(1.0).epsilon(1e-12));
	// symmetric in its arguments
	CHECK(kernel_inner_product(0.3, 0.8, p) ==
	      doctest::Approx(kernel_inner_product(0.8, 0.3, p)).epsilon(1e-12));
	// the value cannot depend on the kernel shift
	double a = kernel_inner_product(0.5, 1.0, KernelParams{0.7, 0.25});
	double b = kernel_inner_product(0.5, 1.0, KernelParams{0.7, 4.0});
	CHECK(a == doctest::Approx(b).epsilon(1e-12));
	// insensitive to the Gauss order
	QuadratureConfig q4, q16;
	q4.gauss_order = 4;
	q16.gauss_order = 16;
	CHECK(kernel_inner_product(0.4, 0.9, p, q4) ==
	      doctest::Approx(kernel_inner_product(0.4, 0.9, p, q16)).epsilon(1e-9));
}

TEST_CASE("inner product domain") {
	KernelParams p{0.7, 1.0};
	CHECK_THROWS_AS(kernel_inner_product(1.5, 0.5, p), std::invalid_argument);
	CHECK_THROWS_AS(kernel_inner_product(-0.1, 0.5, p), std::invalid_argument);
	CHECK_THROWS_AS(kernel_inner_product(0.5, 0.5, KernelParams{0.49, 1.0}), std::invalid_argument);
}

TEST_CASE("unattainable tolerance raises") {
	KernelParams p{0.61, 1.0};
	QuadratureConfig q;
	q.rel_tol = 1e-30;
	try {
		kernel_inner_product(0.37, 0.91, p, q);
		FAIL("expected ToleranceError");
	} catch (const ToleranceError& e) {
		// the carried estimate is still the best available value
		CHECK(e.estimate == doctest::Approx(fbm_covariance(0.37, 0.91, 0.61)).epsilon(1e-8));
		CHECK(e.error_bound > 0.0);
	}
}
