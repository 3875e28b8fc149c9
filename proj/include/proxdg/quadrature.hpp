#pragma once

#include <array>
#include <vector>

namespace proxdg {

/// Symmetric quadrature rule on the reference triangle, given in barycentric
/// coordinates with weights summing to one (scale by the cell area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Rule exact for polynomials up to the requested total degree (max 6).
const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre rule on [-1,1]; weights sum to two.
struct SegmentRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const SegmentRule& segment_rule(int degree);

}  // namespace proxdg
