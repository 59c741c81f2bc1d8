// SPDX-License-Identifier: Apache-2.0
#include "rpoint/kernel.hpp"

#include <cmath>
#include <string>

#include "rpoint/error.hpp"

namespace rpoint {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::NearestNeighbor:
      return "nearest_neighbor";
    case KernelKind::SpreadOutBox:
      return "spread_out_box";
  }
  return "unknown";
}

StepKernel::StepKernel(KernelKind kind, int dimension, int radius)
    : kind_(kind), dimension_(dimension), radius_(radius), coord_variance_(0.0) {
  if (dimension < 1) throw DomainError("kernel dimension must be positive");
  if (kind == KernelKind::NearestNeighbor) {
    coord_variance_ = 1.0 / dimension;
    return;
  }
  if (radius < 1) throw DomainError("spread-out box radius must be at least 1");
  // Sum of y_1^2 over the punctured box, divided by its size.
  const double width = 2.0 * radius + 1.0;
  double squares = 0.0;
  for (int y = 1; y <= radius; ++y) squares += 2.0 * y * y;
  const double cells = std::pow(width, dimension) - 1.0;
  coord_variance_ = std::pow(width, dimension - 1) * squares / cells;
}

StepKernel StepKernel::nearest_neighbor(int dimension) {
  return StepKernel(KernelKind::NearestNeighbor, dimension, 1);
}

StepKernel StepKernel::spread_out_box(int dimension, int radius) {
  return StepKernel(KernelKind::SpreadOutBox, dimension, radius);
}

double StepKernel::characteristic(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dimension_) {
    throw DomainError("frequency has dimension " + std::to_string(u.size()) +
                      ", kernel has " + std::to_string(dimension_));
  }
  if (kind_ == KernelKind::NearestNeighbor) {
    double sum = 0.0;
    for (double uj : u) sum += std::cos(uj);
    return sum / dimension_;
  }
  // Product of 1-d Dirichlet sums over the full box, minus the origin.
  double box = 1.0;
  for (double uj : u) {
    double dirichlet = 1.0;
    for (int y = 1; y <= radius_; ++y) dirichlet += 2.0 * std::cos(uj * y);
    box *= dirichlet;
  }
  const double cells = std::pow(2.0 * radius_ + 1.0, dimension_) - 1.0;
  return (box - 1.0) / cells;
}

double step_char(const StepKernel& kernel, std::span<const double> u) {
  return kernel.characteristic(u);
}

}  // namespace rpoint
