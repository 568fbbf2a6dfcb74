#include "fbmgen/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fbmgen/csvio.hpp"
#include "fbmgen/rng.hpp"

namespace fbmgen {

void FieldConfig::validate() const {
	if (!(n > 0.0)) throw std::invalid_argument("field: n must be > 0");
	if (windowed) {
		if (!(window.x_hi > window.x_lo) || !(window.y_hi > window.y_lo))
			throw std::invalid_argument("field: window must have positive area");
		if (window.x_lo < 0.0 || window.x_hi > n || window.y_lo < -n || window.y_hi > 0.0)
			throw std::invalid_argument("field: window must lie inside [0,n]x[-n,0]");
	}
}

Rect FieldConfig::domain() const { return windowed ? window : Rect{0.0, n, -n, 0.0}; }

PointField::PointField(FieldConfig config, std::vector<Point> pts, Rect rect)
    : config_(std::move(config)), pts_(std::move(pts)), rect_(rect) {
	for (const Point& p : pts_)
		if (!rect_.contains(p.x, p.y)) throw std::invalid_argument("field: point outside rectangle");
	std::sort(pts_.begin(), pts_.end(),
	          [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
}

int PointField::parity_at(double x, double y) const {
	if (!rect_.contains(x, y)) throw std::invalid_argument("parity_at: query outside rectangle");
	std::size_t count = 0;
	for (const Point& p : pts_) {
		if (p.x > x) break;
		if (p.y >= y) ++count;
	}
	return (count & 1) ? -1 : 1;
}

namespace {

class Fenwick {
public:
	explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
	void add(std::size_t i) {  // 0-based
		for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
	}
	std::size_t prefix(std::size_t cnt) const {  // count of inserted ranks < cnt
		std::size_t s = 0;
		for (std::size_t i = cnt; i > 0; i -= i & (~i + 1)) s += tree_[i];
		return s;
	}

private:
	std::vector<std::size_t> tree_;
};

}  // namespace

std::vector<int> PointField::parity_batch(const std::vector<Point>& queries) const {
	for (const Point& q : queries)
		if (!rect_.contains(q.x, q.y))
			throw std::invalid_argument("parity_batch: query outside rectangle");

	// offline sweep in x; a binary-indexed tree counts inserted point
	// ordinates, so each query reads #points{p.x <= q.x, p.y >= q.y}
	std::vector<double> ys(pts_.size());
	for (std::size_t i = 0; i < pts_.size(); ++i) ys[i] = pts_[i].y;
	std::sort(ys.begin(), ys.end());
	ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

	std::vector<std::size_t> order(queries.size());
	for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		return queries[a].x < queries[b].x;
	});

	Fenwick fw(ys.size());
	std::vector<int> out(queries.size(), 1);
	std::size_t next_pt = 0;
	for (std::size_t qi : order) {
		const Point& q = queries[qi];
		while (next_pt < pts_.size() && pts_[next_pt].x <= q.x) {
			std::size_t rank = static_cast<std::size_t>(
			    std::lower_bound(ys.begin(), ys.end(), pts_[next_pt].y) - ys.begin());
			fw.add(rank);
			++next_pt;
		}
		std::size_t below = static_cast<std::size_t>(
		    std::lower_bound(ys.begin(), ys.end(), q.y) - ys.begin());
		std::size_t count = next_pt - fw.prefix(below);
		out[qi] = (count & 1) ? -1 : 1;
	}
	return out;
}

PointField PointField::mirrored() const {
	std::vector<Point> pts = pts_;
	for (Point& p : pts) p.y = -p.y;
	Rect r{rect_.x_lo, rect_.x_hi, -rect_.y_hi, -rect_.y_lo};
	return PointField(config_, std::move(pts), r);
}

PointField sample_field(const FieldConfig& config) {
	config.validate();
	Rect dom = config.domain();
	Rng rng(config.seed);
	double lambda = config.n * dom.area();
	std::uint64_t count = rng.poisson(lambda);
	if (count > config.max_points)
		throw std::length_error("sample_field: point count " + std::to_string(count) +
		                        " exceeds max_points cap " + std::to_string(config.max_points));
	std::vector<Point> pts(count);
	for (std::uint64_t i = 0; i < count; ++i) {
		pts[i].x = rng.uniform(dom.x_lo, dom.x_hi);
		pts[i].y = rng.uniform(dom.y_lo, dom.y_hi);
	}
	return PointField(config, std::move(pts), dom);
}

void dump_points(const PointField& field, const std::string& path) {
	CsvWriter w(path);
	w.header({"x", "y"});
	for (const Point& p : field.points())
		w.row({CsvWriter::cell(p.x), CsvWriter::cell(p.y)});
}

PairRegion classify_pair(Point p1, Point p2) {
	if (p1.x <= p2.x) return p2.y <= p1.y ? PairRegion::omega1 : PairRegion::omega2;
	return p1.y >= p2.y ? PairRegion::omega3 : PairRegion::omega4;
}

double pair_correlation_exact(double n, Point p1, Point p2) {
	if (!(n > 0.0)) throw std::invalid_argument("pair_correlation_exact: n must be > 0");
	if (!(p1.x > 0.0 && p2.x > 0.0 && p1.y <= 0.0 && p2.y <= 0.0))
		throw std::invalid_argument("pair_correlation_exact: points must have x > 0, y <= 0");
	const double x1 = p1.x, y1 = p1.y, x2 = p2.x, y2 = p2.y;
	double expo = 0.0;
	switch (classify_pair(p1, p2)) {
		case PairRegion::omega1: expo = x1 * y1 - x2 * y2; break;
		case PairRegion::omega2: expo = x1 * (y2 - y1) - (x2 - x1) * y2; break;
		case PairRegion::omega3: expo = x2 * (y1 - y2) - (x1 - x2) * y1; break;
		case PairRegion::omega4: expo = x2 * y2 - x1 * y1; break;
	}
	return std::exp(-2.0 * n * expo);
}

}  // namespace fbmgen
