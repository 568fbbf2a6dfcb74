#include "fbmgen/pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbmgen/csvio.hpp"
#include "fbmgen/hash.hpp"
#include "fbmgen/parallel.hpp"
#include "fbmgen/rng.hpp"

namespace fbmgen {

namespace {
constexpr double kRefineTol = 1e-3;  // panel-mode refinement contract
}

std::vector<double> default_time_grid(int points) {
	if (points < 2) throw std::invalid_argument("time grid needs >= 2 points");
	std::vector<double> g(points);
	for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
	g.back() = 1.0;
	return g;
}

void ApproxConfig::validate() const {
	kernel.validate();
	quad.validate();
	if (!(n > 0.0)) throw std::invalid_argument("n must be > 0");
	if (!(n > kernel.s))
		throw std::invalid_argument("n must exceed s (kernel support is empty otherwise)");
	if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
	if (time_grid.empty() || time_grid.front() != 0.0)
		throw std::invalid_argument("time_grid must start at 0");
	for (std::size_t i = 1; i < time_grid.size(); ++i)
		if (!(time_grid[i] > time_grid[i - 1]))
			throw std::invalid_argument("time_grid must be strictly increasing");
	if (time_grid.back() > 1.0) throw std::invalid_argument("time_grid must lie in [0, 1]");
}

std::string ApproxConfig::hash() const {
	std::ostringstream os;
	os << "approx|n=" << format_double(n) << "|H=" << format_double(kernel.H)
	   << "|s=" << format_double(kernel.s) << "|variant=" << variant_name(variant)
	   << "|integrator=" << (integrator == Integrator::exact ? "exact" : "panel")
	   << "|panels=" << quad.panels_per_axis << "|order=" << quad.gauss_order
	   << "|refine=" << quad.refinement_factor << "|replicas=" << replicas << "|seed=" << seed
	   << "|grid=";
	for (double t : time_grid) os << format_double(t) << ',';
	return sha256_hex(os.str());
}

namespace {

// ---- exact integrator ----------------------------------------------------
//
// Y_n(t)/(n sqrt(2 c_H)) = ∬ phi_t(x,y) sqrt(x|y|) parity(x,y) dx dy.
//
// The rectangle is cut into horizontal bands at every point ordinate, every
// case-switch line y = -s-t_i, and a height cap. Inside a band the parity
// along x flips exactly at the abscissas of the points above the band, so
// with U_k(x) = x^{e_k}/e_k (e_1 = H-1/2, e_2 = H+1/2) the signed
// antiderivatives G_k(x) = ∫_0^x parity(u) u^{e_k-1} du are closed forms and
// the x-integral of phi_t sqrt(x) parity reduces to a few G evaluations. The
// remaining y-integral is piecewise smooth between the kink ordinates where
// the branch diagonals cross a flip abscissa; Gauss-Legendre handles those
// pieces. Bands lying fully in the short branch (beta = -y-s <= t) do not
// depend on t, so their value is computed once and folded into every t above
// the threshold. Error is independent of the number of field points.
class BandIntegrator {
public:
	BandIntegrator(const PointField& field, const std::vector<double>& ts, double n,
	               const KernelParams& kp, const GaussRule& gr)
	    : n_(n), s_(kp.s), e1_(kp.H - 0.5), e2_(kp.H + 0.5), ts_(ts), gr_(gr) {
		double pn = std::pow(n_, e1_);
		u1n_ = pn / e1_;
		u2n_ = pn * n_ / e2_;

		// points sorted by descending y for top-down activation
		by_y_ = field.points();
		std::sort(by_y_.begin(), by_y_.end(),
		          [](const Point& a, const Point& b) { return a.y > b.y; });

		// band cuts, descending from -s to -n
		cuts_.push_back(-s_);
		for (double t : ts_)
			if (-s_ - t > -n_) cuts_.push_back(-s_ - t);
		for (const Point& p : by_y_)
			if (p.y < -s_ && p.y > -n_) cuts_.push_back(p.y);
		cuts_.push_back(-n_);
		std::sort(cuts_.begin(), cuts_.end(), std::greater<double>());
		cuts_.erase(std::unique(cuts_.begin(), cuts_.end()), cuts_.end());
		// height cap keeps per-band kink lists short
		std::vector<double> capped;
		capped.reserve(cuts_.size() * 2);
		for (std::size_t i = 0; i + 1 < cuts_.size(); ++i) {
			capped.push_back(cuts_[i]);
			double gap = cuts_[i] - cuts_[i + 1];
			int extra = static_cast<int>(gap / 0.1);
			for (int j = 1; j <= extra; ++j) capped.push_back(cuts_[i] - gap * j / (extra + 1));
		}
		capped.push_back(cuts_.back());
		cuts_ = std::move(capped);
	}

	// accumulated band integrals per grid time (same order as ts)
	std::vector<double> run() {
		std::vector<double> low(ts_.size(), 0.0);
		std::vector<double> high_add(ts_.size() + 1, 0.0);
		std::size_t next_pt = 0;
		// points above every band (y > -s) flip parity for all of them
		while (next_pt < by_y_.size() && by_y_[next_pt].y >= -s_) insert(by_y_[next_pt++].x);

		for (std::size_t k = 0; k + 1 < cuts_.size(); ++k) {
			double yh = cuts_[k], yl = cuts_[k + 1];
			while (next_pt < by_y_.size() && by_y_[next_pt].y >= yh) insert(by_y_[next_pt++].x);
			rebuild_prefix();
			double bmax = -yl - s_;
			// first grid index whose t >= bmax: the whole band sits in the
			// t-independent short branch for those times
			std::size_t i0 = static_cast<std::size_t>(
			    std::lower_bound(ts_.begin(), ts_.end(), bmax - 1e-12) - ts_.begin());
			if (i0 < ts_.size()) high_add[i0] += band_value(yl, yh, ts_[i0]);
			for (std::size_t i = 0; i < i0; ++i) low[i] += band_value(yl, yh, ts_[i]);
		}
		double acc = 0.0;
		for (std::size_t i = 0; i < ts_.size(); ++i) {
			acc += high_add[i];
			low[i] += acc;
		}
		return low;
	}

private:
	void insert(double x) {
		std::size_t pos = static_cast<std::size_t>(
		    std::upper_bound(fx_.begin(), fx_.end(), x) - fx_.begin());
		double p = std::pow(x, e1_);
		fx_.insert(fx_.begin() + pos, x);
		fu1_.insert(fu1_.begin() + pos, p / e1_);
		fu2_.insert(fu2_.begin() + pos, p * x / e2_);
	}

	void rebuild_prefix() {
		std::size_t m = fx_.size();
		T1_.assign(m + 1, 0.0);
		T2_.assign(m + 1, 0.0);
		double sign = 1.0;
		for (std::size_t i = 0; i < m; ++i) {
			double pu1 = i ? fu1_[i - 1] : 0.0, pu2 = i ? fu2_[i - 1] : 0.0;
			T1_[i + 1] = T1_[i] + sign * (fu1_[i] - pu1);
			T2_[i + 1] = T2_[i] + sign * (fu2_[i] - pu2);
			sign = -sign;
		}
		double sg = (m & 1) ? -1.0 : 1.0;
		g1n_ = T1_[m] + sg * (u1n_ - (m ? fu1_[m - 1] : 0.0));
	}

	void eval_G(double x, double& g1, double& g2) const {
		if (x <= 0.0) {
			g1 = g2 = 0.0;
			return;
		}
		if (x > n_) x = n_;
		std::size_t m = static_cast<std::size_t>(
		    std::upper_bound(fx_.begin(), fx_.end(), x) - fx_.begin());
		double p = std::pow(x, e1_);
		double sg = (m & 1) ? -1.0 : 1.0;
		g1 = T1_[m] + sg * (p / e1_ - (m ? fu1_[m - 1] : 0.0));
		g2 = T2_[m] + sg * (p * x / e2_ - (m ? fu2_[m - 1] : 0.0));
	}

	// ∫_yl^yh sqrt(-y) * (x-integral of phi_t sqrt(x) parity) dy
	double band_value(double yl, double yh, double t) const {
		kinks_.clear();
		kinks_.push_back(yl);
		kinks_.push_back(yh);
		double bmin = -yh - s_, bmax = -yl - s_;
		if (t > bmin && t < bmax) kinks_.push_back(-s_ - t);
		// branch diagonals d = beta and c = beta - t cross flip abscissas
		auto lo1 = std::upper_bound(fx_.begin(), fx_.end(), bmin);
		auto hi1 = std::lower_bound(fx_.begin(), fx_.end(), bmax);
		for (auto it = lo1; it != hi1; ++it) kinks_.push_back(-s_ - *it);
		auto lo2 = std::upper_bound(fx_.begin(), fx_.end(), bmin - t);
		auto hi2 = std::lower_bound(fx_.begin(), fx_.end(), bmax - t);
		for (auto it = lo2; it != hi2; ++it) kinks_.push_back(-s_ - t - *it);
		std::sort(kinks_.begin(), kinks_.end());

		double acc = 0.0;
		for (std::size_t seg = 0; seg + 1 < kinks_.size(); ++seg) {
			double a = kinks_[seg], b = kinks_[seg + 1];
			if (!(b > a)) continue;
			double half = 0.5 * (b - a), mid = 0.5 * (a + b);
			for (std::size_t q = 0; q < gr_.nodes.size(); ++q) {
				double y = mid + half * gr_.nodes[q];
				double beta = -y - s_;
				double g1d, g2d;
				eval_G(beta, g1d, g2d);
				double inner;
				if (beta > t) {
					double g1c, g2c;
					eval_G(beta - t, g1c, g2c);
					inner = (g2d - g2c) - (beta - t) * (g1d - g1c) + t * (g1n_ - g1d);
				} else {
					inner = g2d + beta * (g1n_ - g1d);
				}
				acc += half * gr_.weights[q] * std::sqrt(-y) * inner;
			}
		}
		return acc;
	}

	double n_, s_, e1_, e2_;
	std::vector<double> ts_;
	const GaussRule& gr_;
	std::vector<Point> by_y_;
	std::vector<double> cuts_;
	std::vector<double> fx_, fu1_, fu2_;
	std::vector<double> T1_, T2_;
	double u1n_, u2n_, g1n_ = 0.0;
	mutable std::vector<double> kinks_;
};

std::vector<double> exact_values(const PointField& field, const ApproxConfig& config,
                                 const std::vector<double>& ts) {
	BandIntegrator bi(field, ts, config.n, config.kernel, gauss_legendre(config.quad.gauss_order));
	return bi.run();
}

// ---- panel integrator ----------------------------------------------------
// Tensor Gauss-Legendre panels with parity sampled at the nodes (the
// node-constant parity assumption); one parity batch is shared by all grid
// times. Subject to the refinement contract.
std::vector<double> panel_values(const PointField& field, const ApproxConfig& config,
                                 const std::vector<double>& ts, int panels) {
	const double n = config.n, s = config.kernel.s;
	const GaussRule& gr = gauss_legendre(config.quad.gauss_order);
	const std::size_t g = gr.nodes.size();

	std::vector<double> ycuts{-n};
	for (int i = 1; i <= panels; ++i) ycuts.push_back(-n + (n - s) * i / panels);
	for (double t : ts)
		if (-s - t > -n) ycuts.push_back(-s - t);
	std::sort(ycuts.begin(), ycuts.end());
	ycuts.erase(std::unique(ycuts.begin(), ycuts.end()), ycuts.end());

	std::vector<double> xcuts(panels + 1);
	for (int i = 0; i <= panels; ++i) xcuts[i] = n * i / panels;

	std::vector<Point> nodes;
	std::vector<double> wts;
	nodes.reserve((ycuts.size() - 1) * panels * g * g);
	wts.reserve(nodes.capacity());
	for (std::size_t r = 0; r + 1 < ycuts.size(); ++r) {
		double hy = 0.5 * (ycuts[r + 1] - ycuts[r]), my = 0.5 * (ycuts[r + 1] + ycuts[r]);
		for (std::size_t c = 0; c + 1 < xcuts.size(); ++c) {
			double hx = 0.5 * (xcuts[c + 1] - xcuts[c]), mx = 0.5 * (xcuts[c + 1] + xcuts[c]);
			for (std::size_t a = 0; a < g; ++a)
				for (std::size_t b = 0; b < g; ++b) {
					nodes.push_back({mx + hx * gr.nodes[a], my + hy * gr.nodes[b]});
					wts.push_back(hx * hy * gr.weights[a] * gr.weights[b]);
				}
		}
	}
	std::vector<int> par = field.parity_batch(nodes);

	std::vector<double> out(ts.size(), 0.0);
	for (std::size_t i = 0; i < ts.size(); ++i) {
		double acc = 0.0;
		for (std::size_t q = 0; q < nodes.size(); ++q) {
			double ph = phi_kernel(ts[i], nodes[q].x, nodes[q].y, config.kernel);
			if (ph != 0.0)
				acc += wts[q] * par[q] * ph * std::sqrt(nodes[q].x * -nodes[q].y);
		}
		out[i] = acc;
	}
	return out;
}

}  // namespace

PathSample evaluate_path(const PointField& field, const ApproxConfig& config) {
	config.validate();
	if (field.config().n != config.n)
		throw std::invalid_argument("evaluate_path: field and config disagree on n");

	// the reflected construction on a positive-y field equals the standard
	// one on the mirrored field
	if (config.variant == KernelVariant::reflected) {
		ApproxConfig std_cfg = config;
		std_cfg.variant = KernelVariant::standard;
		PathSample ps = evaluate_path(field.mirrored(), std_cfg);
		ps.config_hash = config.hash();
		return ps;
	}
	if (field.rect().y_lo >= 0.0)
		throw std::invalid_argument("evaluate_path: standard variant needs a field on y <= 0");

	std::vector<double> ts(time_grid_positive(config));
	std::vector<double> vals;
	if (config.integrator == Integrator::exact) {
		vals = exact_values(field, config, ts);
	} else {
		vals = panel_values(field, config, ts, config.quad.panels_per_axis);
		std::vector<double> fine = panel_values(field, config, ts,
		                                        config.quad.panels_per_axis *
		                                            config.quad.refinement_factor);
		for (std::size_t i = 0; i < vals.size(); ++i) {
			double diff = std::fabs(fine[i] - vals[i]);
			if (diff > kRefineTol * std::max(1.0, std::fabs(fine[i])))
				throw ToleranceError("evaluate_path: refinement contract failed at t=" +
				                         format_double(ts[i]),
				                     fine[i], diff);
		}
		vals = std::move(fine);
	}

	double scale = config.n * std::sqrt(2.0 * config.kernel.c());
	PathSample ps;
	ps.config_hash = config.hash();
	ps.values.assign(config.time_grid.size(), 0.0);
	std::size_t j = 0;
	for (std::size_t i = 0; i < config.time_grid.size(); ++i)
		if (config.time_grid[i] > 0.0) ps.values[i] = scale * vals[j++];
	return ps;
}

std::vector<PathSample> simulate_paths(const ApproxConfig& config) {
	config.validate();
	std::vector<PathSample> out(config.replicas);
	std::string h = config.hash();
	parallel_for(static_cast<std::size_t>(config.replicas), [&](std::size_t r) {
		std::uint64_t field_seed = Rng::stream(config.seed, r).next_u64();
		FieldConfig fc;
		fc.n = config.n;
		fc.seed = field_seed;
		PointField f = sample_field(fc);
		if (config.variant == KernelVariant::reflected) f = f.mirrored();
		out[r] = evaluate_path(f, config);
		out[r].replica_id = static_cast<int>(r);
		out[r].seed = field_seed;
		out[r].config_hash = h;
	});
	return out;
}

double sheet_approx(const PointField& field, double n, double u, double v) {
	if (u == 0.0 || v == 0.0) return 0.0;
	double au = std::fabs(u), av = std::fabs(v);
	const Rect& r = field.rect();
	if (au > r.x_hi || -av < r.y_lo)
		throw std::invalid_argument("sheet_approx: cell outside sampled rectangle");

	// points inside the cell, by descending y; separable closed form per band
	std::vector<Point> pts;
	for (const Point& p : field.points())
		if (p.x <= au && p.y >= -av && p.y <= 0.0) pts.push_back(p);
	std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.y > b.y; });

	auto u32 = [](double x) { return (2.0 / 3.0) * x * std::sqrt(x); };  // ∫ sqrt = (2/3)x^{3/2}
	std::vector<double> fx;
	double acc = 0.0;
	std::size_t next = 0;
	double ytop = 0.0;
	while (next <= pts.size()) {
		double ybot = (next < pts.size()) ? pts[next].y : -av;
		if (ybot < ytop) {
			// x-integral of sqrt(x)*parity with flips at fx
			double ix = 0.0, prev = 0.0, sign = 1.0;
			for (double f : fx) {
				ix += sign * (u32(f) - u32(prev));
				prev = f;
				sign = -sign;
			}
			ix += sign * (u32(au) - u32(prev));
			acc += (u32(-ybot) - u32(-ytop)) * ix;
			ytop = ybot;
		}
		if (next == pts.size()) break;
		fx.insert(std::upper_bound(fx.begin(), fx.end(), pts[next].x), pts[next].x);
		++next;
	}
	double sgn = ((u > 0) == (v > 0)) ? 1.0 : -1.0;
	return sgn * n * acc;
}

std::vector<double> time_grid_positive(const ApproxConfig& config) {
	std::vector<double> ts;
	for (double t : config.time_grid)
		if (t > 0.0) ts.push_back(t);
	return ts;
}

BoundConstants bound_constants(const KernelParams& params) {
	params.validate();
	const double H = params.H, s = params.s;
	BoundConstants bc{};
	bc.K1 = 3.0 / (8.0 * H * (2.0 * H - 1.0)) + 1.0 / (8.0 * H * (3.0 - 2.0 * H)) +
	        1.0 / (4.0 * H * H - 1.0);
	bc.K2 = 1.0 / (4.0 * (1.0 - H) * (3.0 - 2.0 * H) * (2.0 * H - 1.0));
	bc.C = universal_Q_bound();
	bc.K = 3.0 * (111.0 / 8.0 + 2.0 * bc.K1 * std::sqrt((1.0 + s) / s) +
	              2.0 * bc.K2 * std::sqrt((2.0 + s) / s) + 2.0 * bc.K2 * bc.C);
	return bc;
}

double universal_Q_bound() {
	// sup_{z>=1} Q(z), Q(z) = z ∫_0^{z-1} e^{-2v}/(z-v) dv; computed once by
	// golden-section search (Q is unimodal with an interior maximum)
	static const double value = [] {
		auto Q = [](double z) {
			if (z <= 1.0) return 0.0;
			auto f = [z](double v) { return std::exp(-2.0 * v) / (z - v); };
			return z * adaptive_simpson(f, 0.0, z - 1.0, 1e-13);
		};
		double a = 1.0, b = 64.0;
		const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
		double c = b - gr * (b - a), d = a + gr * (b - a);
		double fc = Q(c), fd = Q(d);
		for (int i = 0; i < 200; ++i) {
			if (fc < fd) {
				a = c;
				c = d;
				fc = fd;
				d = a + gr * (b - a);
				fd = Q(d);
			} else {
				b = d;
				d = c;
				fd = fc;
				c = b - gr * (b - a);
				fc = Q(c);
			}
		}
		return std::max(fc, fd);
	}();
	return value;
}

OracleEstimate variance_oracle(const ApproxConfig& config, double t, std::uint64_t samples,
                               double max_stderr) {
	config.validate();
	if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("variance_oracle: t must be in [0, 1]");
	if (samples < 1'000'000)
		throw std::invalid_argument("variance_oracle: needs >= 1e6 samples");
	OracleEstimate est;
	est.samples = samples;
	if (t == 0.0) return est;

	const double n = config.n, s = config.kernel.s;
	const KernelParams& kp = config.kernel;
	const double area = n * (n - s);  // p1 uniform on [0,n] x [-n,-s]
	Rng rng(mix64(config.seed ^ 0x9d2c5680u) ^ mix64(static_cast<std::uint64_t>(t * (1ull << 32))));

	double sum = 0.0, sum2 = 0.0;
	for (std::uint64_t i = 0; i < samples; ++i) {
		double x1 = rng.uniform(0.0, n);
		double y1 = rng.uniform(-n, -s);
		double q1 = 1.0 / area;
		double x2, y2, q2;
		// half uniform, half a Laplace pair matched to the correlation decay
		double bx = 1.0 / (2.0 * n * -y1), by = 1.0 / (2.0 * n * x1);
		if (rng.uniform() < 0.5) {
			x2 = rng.uniform(0.0, n);
			y2 = rng.uniform(-n, -s);
		} else {
			x2 = x1 + rng.laplace(bx);
			y2 = y1 + rng.laplace(by);
		}
		double lap = std::exp(-std::fabs(x2 - x1) / bx) / (2.0 * bx) *
		             std::exp(-std::fabs(y2 - y1) / by) / (2.0 * by);
		q2 = 0.5 / area + 0.5 * lap;
		double f = 0.0;
		if (x2 > 0.0 && x2 <= n && y2 >= -n && y2 <= -s) {
			double ph1 = phi_kernel(t, x1, y1, kp);
			if (ph1 != 0.0) {
				double ph2 = phi_kernel(t, x2, y2, kp);
				if (ph2 != 0.0)
					f = ph1 * ph2 * std::sqrt(x1 * -y1 * x2 * -y2) *
					    pair_correlation_exact(n, {x1, y1}, {x2, y2});
			}
		}
		double w = f / (q1 * q2);
		sum += w;
		sum2 += w * w;
	}
	double scale = 2.0 * kp.c() * n * n;
	double mean = sum / samples;
	double var = std::max(0.0, sum2 / samples - mean * mean);
	est.value = scale * mean;
	est.stderr_ = scale * std::sqrt(var / samples);
	if (est.stderr_ > max_stderr)
		throw ToleranceError("variance_oracle: standard error above requested bound", est.value,
		                     est.stderr_);
	return est;
}

double variance_oracle_quad(const ApproxConfig& config, double t, int panels_per_axis) {
	config.validate();
	if (!(t >= 0.0 && t <= 1.0))
		throw std::invalid_argument("variance_oracle_quad: t must be in [0, 1]");
	if (t == 0.0) return 0.0;
	const double n = config.n, s = config.kernel.s;
	const KernelParams& kp = config.kernel;
	const GaussRule& gr = gauss_legendre(4);
	int panels = std::max(2, panels_per_axis / 4);

	// 1-D composite rule shared by all four axes
	std::vector<double> xs, ws;
	auto fill = [&](double a, double b) {
		for (int p = 0; p < panels; ++p) {
			double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
			double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
			for (std::size_t k = 0; k < gr.nodes.size(); ++k) {
				xs.push_back(mid + half * gr.nodes[k]);
				ws.push_back(half * gr.weights[k]);
			}
		}
	};
	fill(0.0, n);
	std::size_t nx = xs.size();
	fill(-n, -s);

	double acc = 0.0;
	for (std::size_t i1 = 0; i1 < nx; ++i1)
		for (std::size_t j1 = nx; j1 < xs.size(); ++j1) {
			double ph1 = phi_kernel(t, xs[i1], xs[j1], kp);
			if (ph1 == 0.0) continue;
			double g1 = ph1 * std::sqrt(xs[i1] * -xs[j1]) * ws[i1] * ws[j1];
			for (std::size_t i2 = 0; i2 < nx; ++i2)
				for (std::size_t j2 = nx; j2 < xs.size(); ++j2) {
					double ph2 = phi_kernel(t, xs[i2], xs[j2], kp);
					if (ph2 == 0.0) continue;
					acc += g1 * ph2 * std::sqrt(xs[i2] * -xs[j2]) * ws[i2] * ws[j2] *
					       pair_correlation_exact(n, {xs[i1], xs[j1]}, {xs[i2], xs[j2]});
				}
		}
	return 2.0 * kp.c() * n * n * acc;
}

double mean_oracle(const ApproxConfig& config, double t, double tol) {
	config.validate();
	if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("mean_oracle: t must be in [0, 1]");
	if (t == 0.0) return 0.0;
	const double n = config.n, s = config.kernel.s;

	// E[parity(x,y)] = exp(-2 n x |y|); substitute w = 2 n |y| x in the inner
	// integral so the exponential is tame, splitting at the branch corners
	auto inner = [&](double y) {
		double ay = -y;
		double beta = ay - s;
		if (beta <= 0.0) return 0.0;
		double r = 2.0 * n * ay;
		auto f = [&](double w) {
			double x = w / r;
			if (!(x > 0.0)) return 0.0;
			double ph = phi_kernel(t, x, y, config.kernel);
			return ph == 0.0 ? 0.0 : ph * std::sqrt(x) * std::exp(-w) / r;
		};
		double wmax = std::min(r * n, 60.0);
		std::vector<double> splits{0.0};
		for (double xx : {beta - t, beta}) {
			double w = r * xx;
			if (w > 0.0 && w < wmax) splits.push_back(w);
		}
		splits.push_back(wmax);
		std::sort(splits.begin(), splits.end());
		double acc = 0.0;
		for (std::size_t i = 0; i + 1 < splits.size(); ++i)
			acc += adaptive_simpson(f, splits[i], splits[i + 1], tol / 4.0);
		return acc;
	};
	auto outer = [&](double y) { return std::sqrt(-y) * inner(y); };
	double split = std::max(-n, -s - t);
	double acc = adaptive_simpson(outer, -n, split, tol) +
	             adaptive_simpson(outer, split, -s, tol);
	return config.n * std::sqrt(2.0 * config.kernel.c()) * acc;
}

double truncation_diagnostic(const ApproxConfig& config, double t) {
	config.validate();
	if (!(t > 0.0 && t <= 1.0))
		throw std::invalid_argument("truncation_diagnostic: t must be in (0, 1]");
	const double n = config.n, s = config.kernel.s, H = config.kernel.H;
	const double e1 = 2.0 * H - 3.0, e2 = 2.0 * H - 2.0, e3 = 2.0 * H - 1.0;

	// ∬ phi_t^2 over the rectangle, via the same per-beta closed form as the
	// full-plane normalization but truncated at x = n
	auto inner = [&](double b) {
		if (!(b > 0.0)) return 0.0;
		double lo = std::max(0.0, b - t);
		double a = b > t ? t - b : 0.0;
		double hi = std::min(b, n);
		double A = a * a, B = 2.0 * a, C = 1.0;
		double v = 0.0;
		if (hi > lo) {
			if (A != 0.0) v += A / e1 * (std::pow(hi, e1) - std::pow(lo, e1));
			if (B != 0.0) v += B / e2 * (std::pow(hi, e2) - std::pow(lo, e2));
			v += C / e3 * (std::pow(hi, e3) - std::pow(lo, e3));
		}
		double amp = std::min(t, b);
		v += amp * amp * (std::pow(b, e1) - std::pow(n, e1)) / (3.0 - 2.0 * H);
		return v;
	};
	const GaussRule& gr = gauss_legendre(16);
	auto panel = [&](double a, double b) {
		double half = 0.5 * (b - a), mid = 0.5 * (a + b), acc = 0.0;
		for (std::size_t k = 0; k < gr.nodes.size(); ++k)
			acc += half * gr.weights[k] * inner(mid + half * gr.nodes[k]);
		return acc;
	};
	double bmax = n - s;
	double split = std::min(t, bmax);
	double acc = 0.0;
	for (int k = 0; k < 64; ++k) {
		double hi = split * std::ldexp(1.0, -k);
		double lo = (k == 63) ? 0.0 : split * std::ldexp(1.0, -k - 1);
		acc += panel(lo, hi);
	}
	if (bmax > split) {
		double m = 0.5 * (split + bmax);
		for (int k = 0; k < 64; ++k) {
			double hi = (m - split) * std::ldexp(1.0, -k);
			double lo = (k == 63) ? 0.0 : (m - split) * std::ldexp(1.0, -k - 1);
			acc += panel(split + lo, split + hi);
		}
		acc += panel(m, bmax);
	}
	double inside = 2.0 * config.kernel.c() * acc;
	double full = std::pow(t, 2.0 * H);
	return std::max(0.0, 1.0 - inside / full);
}

void write_paths_csv(const std::string& path, const std::vector<PathSample>& paths,
                     const std::vector<double>& grid) {
	CsvWriter w(path);
	w.header({"replica", "t", "value"});
	for (const PathSample& p : paths)
		for (std::size_t i = 0; i < grid.size(); ++i)
			w.row({std::to_string(p.replica_id), CsvWriter::cell(grid[i]),
			       CsvWriter::cell(p.values[i])});
}

}  // namespace fbmgen
