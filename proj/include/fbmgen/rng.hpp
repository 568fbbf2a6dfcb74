#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fbmgen {

// splitmix64 finalizer (Steele/Lea/Flood); also used as a cheap 64-bit hash.
inline std::uint64_t mix64(std::uint64_t z) {
	z += 0x9e3779b97f4a7c15ull;
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
	return z ^ (z >> 31);
}

// Deterministic counter-based generator. Streams derived from the same master
// seed but different stream ids are independent for practical purposes.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : state_(seed) {}

	static Rng stream(std::uint64_t master, std::uint64_t id) {
		return Rng(mix64(master ^ mix64(id ^ 0x5851f42d4c957f2dull)));
	}

	std::uint64_t next_u64() {
		state_ += 0x9e3779b97f4a7c15ull;
		std::uint64_t z = state_;
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}

	// uniform on [0, 1)
	double uniform() {
		return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
	}

	double uniform(double a, double b) { return a + (b - a) * uniform(); }

	// standard normal, Marsaglia polar method
	double normal() {
		if (have_spare_) {
			have_spare_ = false;
			return spare_;
		}
		double u, v, q;
		do {
			u = 2.0 * uniform() - 1.0;
			v = 2.0 * uniform() - 1.0;
			q = u * u + v * v;
		} while (q >= 1.0 || q == 0.0);
		double f = std::sqrt(-2.0 * std::log(q) / q);
		spare_ = v * f;
		have_spare_ = true;
		return u * f;
	}

	// zero-mean Laplace with scale b (density exp(-|x|/b)/(2b))
	double laplace(double b) {
		double u = uniform() - 0.5;
		double s = u < 0 ? -1.0 : 1.0;
		return -s * b * std::log1p(-2.0 * std::fabs(u));
	}

	// exact Poisson sample; large means are split into chunks so the CDF
	// inversion never underflows
	std::uint64_t poisson(double lambda) {
		if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda must be >= 0");
		std::uint64_t total = 0;
		while (lambda > 32.0) {
			total += poisson_small(32.0);
			lambda -= 32.0;
		}
		return total + poisson_small(lambda);
	}

private:
	std::uint64_t poisson_small(double lambda) {
		double p = std::exp(-lambda);
		double cum = p;
		double u = uniform();
		std::uint64_t k = 0;
		while (u > cum) {
			++k;
			p *= lambda / static_cast<double>(k);
			cum += p;
			if (p < 1e-300 && u > cum) break;  // unreachable in practice
		}
		return k;
	}

	std::uint64_t state_;
	double spare_ = 0.0;
	bool have_spare_ = false;
};

}  // namespace fbmgen
