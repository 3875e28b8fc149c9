#include "proxdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace proxdg {

namespace {

TriangleRule centroid_rule() {
  return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}};
}

TriangleRule degree2_rule() {
  TriangleRule r;
  const double a = 1.0 / 6.0, b = 2.0 / 3.0, w = 1.0 / 3.0;
  r.points = {{b, a, a}, {a, b, a}, {a, a, b}};
  r.weights = {w, w, w};
  return r;
}

void add_symmetric(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  r.weights.insert(r.weights.end(), 3, w);
}

void add_permutations(TriangleRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  r.weights.insert(r.weights.end(), 6, w);
}

// Dunavant degree-4 rule, 6 points.
TriangleRule degree4_rule() {
  TriangleRule r;
  add_symmetric(r, 0.445948490915965, 0.223381589678011);
  add_symmetric(r, 0.091576213509771, 0.109951743655322);
  return r;
}

// Dunavant degree-5 rule, 7 points.
TriangleRule degree5_rule() {
  TriangleRule r;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.225);
  add_symmetric(r, 0.470142064105115, 0.132394152788506);
  add_symmetric(r, 0.101286507323456, 0.125939180544827);
  return r;
}

// Dunavant degree-6 rule, 12 points.
TriangleRule degree6_rule() {
  TriangleRule r;
  add_symmetric(r, 0.249286745170910, 0.116786275726379);
  add_symmetric(r, 0.063089014491502, 0.050844906370207);
  add_permutations(r, 0.053145049844816, 0.310352451033785, 0.082851075618374);
  return r;
}

SegmentRule gauss(int npoints) {
  switch (npoints) {
    case 1:
      return {{0.0}, {2.0}};
    case 2: {
      const double x = 1.0 / std::sqrt(3.0);
      return {{-x, x}, {1.0, 1.0}};
    }
    case 3: {
      const double x = std::sqrt(3.0 / 5.0);
      return {{-x, 0.0, x}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
      const double x1 = 0.3399810435848563, x2 = 0.8611363115940526;
      const double w1 = 0.6521451548625461, w2 = 0.3478548451374538;
      return {{-x2, -x1, x1, x2}, {w2, w1, w1, w2}};
    }
    default: {
      const double x1 = 0.5384693101056831, x2 = 0.9061798459386640;
      const double w0 = 128.0 / 225.0;
      const double w1 = 0.4786286704993665, w2 = 0.2369268850561891;
      return {{-x2, -x1, 0.0, x1, x2}, {w2, w1, w0, w1, w2}};
    }
  }
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const TriangleRule r1 = centroid_rule();
  static const TriangleRule r2 = degree2_rule();
  static const TriangleRule r4 = degree4_rule();
  static const TriangleRule r5 = degree5_rule();
  static const TriangleRule r6 = degree6_rule();
  if (degree <= 1) return r1;
  if (degree <= 2) return r2;
  if (degree <= 4) return r4;
  if (degree <= 5) return r5;
  if (degree <= 6) return r6;
  throw std::invalid_argument("triangle_rule: degree > 6 not available");
}

const SegmentRule& segment_rule(int degree) {
  static const SegmentRule g1 = gauss(1);
  static const SegmentRule g2 = gauss(2);
  static const SegmentRule g3 = gauss(3);
  static const SegmentRule g4 = gauss(4);
  static const SegmentRule g5 = gauss(5);
  if (degree <= 1) return g1;
  if (degree <= 3) return g2;
  if (degree <= 5) return g3;
  if (degree <= 7) return g4;
  if (degree <= 9) return g5;
  throw std::invalid_argument("segment_rule: degree > 9 not available");
}

}  // namespace proxdg
