#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "harnlab/geometry.hpp"

namespace harnlab {

enum class Shape { interval, box, disk, annulus };

// Structured grid over an interval, rectangle, disk or annulus.
//
// Interval and box nodes are numbered lexicographically (x fastest). Polar
// grids number rings from the inside out with the angle fastest; a disk has
// an extra center node at index 0. Every node that is not a boundary node has
// its full stencil inside the grid.
class GridDomain {
 public:
  static GridDomain interval(double a, double b, double h);
  static GridDomain box(Point lo, Point hi, double h);
  // n_theta = 0 picks the smallest count with arc spacing <= h on the outer ring.
  static GridDomain disk(double radius, double h, std::size_t n_theta = 0);
  static GridDomain annulus(double r_inner, double r_outer, double h, std::size_t n_theta = 0);

  Shape shape() const { return shape_; }
  int dimension() const { return shape_ == Shape::interval ? 1 : 2; }
  std::size_t size() const { return points_.size(); }
  double spacing() const { return h_; }

  const Point& point(std::size_t i) const { return points_[i]; }
  double cell_volume(std::size_t i) const { return volumes_[i]; }
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
  std::span<const std::size_t> boundary_nodes() const { return boundary_nodes_; }
  std::span<const std::size_t> interior_nodes() const { return interior_nodes_; }
  double total_volume() const;

  // Structured access. Interval: nx nodes. Box: nx by ny. Polar: n_rings rings
  // (including boundary rings, excluding the disk center) by n_theta angles.
  std::size_t nx() const { return n0_; }
  std::size_t ny() const { return n1_; }
  double hx() const { return step0_; }
  double hy() const { return step1_; }
  std::size_t box_index(std::size_t i, std::size_t j) const { return j * n0_ + i; }
  Point lower() const { return lo_; }
  Point upper() const { return hi_; }

  std::size_t n_rings() const { return n0_; }
  std::size_t n_theta() const { return n1_; }
  double dr() const { return step0_; }
  double dtheta() const { return step1_; }
  bool has_center() const { return shape_ == Shape::disk; }
  double ring_radius(std::size_t ring) const;
  std::size_t polar_index(std::size_t ring, std::size_t k) const;
  double r_inner() const { return r_in_; }
  double r_outer() const { return r_out_; }

  double diameter() const;
  // Bounding box of the node set.
  std::pair<Point, Point> bounding_box() const;

 private:
  GridDomain() = default;
  void finish();

  Shape shape_ = Shape::interval;
  double h_ = 0.0;
  std::size_t n0_ = 0, n1_ = 1;
  double step0_ = 0.0, step1_ = 0.0;
  Point lo_{0.0, 0.0}, hi_{0.0, 0.0};
  double r_in_ = 0.0, r_out_ = 0.0;
  std::vector<Point> points_;
  std::vector<double> volumes_;
  std::vector<char> boundary_;
  std::vector<std::size_t> boundary_nodes_, interior_nodes_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

inline DomainPtr make_domain(GridDomain d) {
  return std::make_shared<const GridDomain>(std::move(d));
}

// Sorted node indices.
using NodeSubset = std::vector<std::size_t>;

NodeSubset all_nodes(const GridDomain& d);
NodeSubset select(const GridDomain& d, const Region& region);
NodeSubset interior_of(const GridDomain& d, const NodeSubset& s);
double measure(const GridDomain& d, const NodeSubset& s);

// Nodal values with the domain they live on. Values are always finite.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(DomainPtr domain, std::vector<double> values);
  static GridFunction sample(DomainPtr domain, const std::function<double(const Point&)>& f);
  static GridFunction constant(DomainPtr domain, double value);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

// Discrete L^s norm, s in (0, inf]. Exponents below 1 give the quasinorm
// (sum |f|^s w)^(1/s).
double lebesgue_norm(const GridFunction& f, double s, const NodeSubset& sub);
double lebesgue_norm(const GridFunction& f, double s);

// Uniformly local norm: sup over unit balls B_1(y) of the L^s norm on
// B_1(y) intersected with the subset. Centers y range over the subset's nodes
// and the corners of its bounding box.
double ul_norm(const GridFunction& f, double s, const NodeSubset& sub);
double ul_norm(const GridFunction& f, double s);

// Volume of {u > a} within the subset.
double level_set_measure(const GridFunction& u, double a, const NodeSubset& sub);

double sup_over(const GridFunction& u, const NodeSubset& sub);
double inf_over(const GridFunction& u, const NodeSubset& sub);

}  // namespace harnlab
