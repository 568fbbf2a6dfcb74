#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbmgen {

struct Point {
	double x;
	double y;
};

struct Rect {
	double x_lo, x_hi, y_lo, y_hi;
	double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }
	bool contains(double x, double y) const {
		return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi;
	}
};

struct FieldConfig {
	double n = 1.0;
	std::uint64_t seed = 0;
	// optional sampling window (subset of the full rectangle [0,n]x[-n,0]);
	// restriction of a Poisson field to a window is again Poisson, so sampling
	// the window directly is exact and avoids storing points no query can see
	bool windowed = false;
	Rect window{};
	std::size_t max_points = 50'000'000;

	void validate() const;
	Rect domain() const;  // the window if set, else [0,n]x[-n,0]
};

// Immutable planar Poisson field with intensity n on [0,n]x[-n,0], plus
// parity queries: parity(x,y) = (-1)^{#{p : p.x <= x, p.y >= y}} (prefix
// rectangle anchored at the upper-left corner, closed on point coordinates).
class PointField {
public:
	PointField(FieldConfig config, std::vector<Point> pts, Rect rect);

	const FieldConfig& config() const { return config_; }
	const std::vector<Point>& points() const { return pts_; }  // sorted by (x, y)
	const Rect& rect() const { return rect_; }

	int parity_at(double x, double y) const;
	std::vector<int> parity_batch(const std::vector<Point>& queries) const;

	// the same field with y negated (used by the reflected kernel variant)
	PointField mirrored() const;

private:
	FieldConfig config_;
	std::vector<Point> pts_;
	Rect rect_;
};

PointField sample_field(const FieldConfig& config);

// CSV dump, header `x,y`, sorted by x then y
void dump_points(const PointField& field, const std::string& path);

enum class PairRegion { omega1, omega2, omega3, omega4 };

PairRegion classify_pair(Point p1, Point p2);

// E[parity(p1) parity(p2)] for an intensity-n field, closed form per region
double pair_correlation_exact(double n, Point p1, Point p2);

}  // namespace fbmgen
