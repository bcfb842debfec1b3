#pragma once

// Hand-rolled random generators for property tests. Deterministic for a
// given std::mt19937 state.

#include <random>
#include <vector>

#include "subgrad/pa_function.hpp"
#include "subgrad/polyhedron.hpp"
#include "subgrad/rational.hpp"

namespace subgrad::testgen {

inline Rational small_rational(std::mt19937& rng, int range = 6, int max_den = 2) {
  std::uniform_int_distribution<int> num(-range * max_den, range * max_den);
  std::uniform_int_distribution<int> den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline RationalVector small_vector(std::mt19937& rng, std::size_t dim, int range = 6, int max_den = 2) {
  RationalVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = small_rational(rng, range, max_den);
  return v;
}

inline RationalVector int_vector(std::mt19937& rng, std::size_t dim, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  RationalVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = d(rng);
  return v;
}

/// Convex hull of 1..max_vertices integer points in [lo, hi]^dim.
inline Polyhedron random_polytope(std::mt19937& rng, std::size_t dim, std::size_t max_vertices, int lo, int hi) {
  std::uniform_int_distribution<std::size_t> count(1, max_vertices);
  std::vector<RationalVector> verts;
  const std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) verts.push_back(int_vector(rng, dim, lo, hi));
  return Polyhedron::from_vrep(dim, verts);
}

/// Polyhedron with rays, lines or none, anchored at an integer point.
inline Polyhedron random_polyhedron(std::mt19937& rng, std::size_t dim) {
  std::vector<RationalVector> verts;
  std::vector<RationalVector> rays;
  std::uniform_int_distribution<int> nv(1, 4), nr(0, 2);
  const int v = nv(rng), r = nr(rng);
  for (int i = 0; i < v; ++i) verts.push_back(int_vector(rng, dim, -3, 3));
  for (int i = 0; i < r; ++i) {
    RationalVector d = int_vector(rng, dim, -2, 2);
    if (!d.is_zero()) rays.push_back(d);
  }
  return Polyhedron::from_vrep(dim, verts, rays);
}

/// max of 1..max_pieces affine pieces with small rational data.
inline PAConvexFunction random_pa(std::mt19937& rng, std::size_t dim, std::size_t max_pieces) {
  std::uniform_int_distribution<std::size_t> count(1, max_pieces);
  std::vector<AffinePiece> pieces;
  const std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) pieces.push_back({small_vector(rng, dim, 3, 2), small_rational(rng, 2, 2)});
  return PAConvexFunction(std::move(pieces));
}

/// Pieces that all pass through (x, value) so that x is a kink of several.
inline PAConvexFunction random_pa_kinked_at(std::mt19937& rng, const RationalVector& x, std::size_t max_pieces) {
  std::uniform_int_distribution<std::size_t> count(1, max_pieces);
  std::uniform_int_distribution<int> lift(0, 2);
  std::vector<AffinePiece> pieces;
  const std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) {
    RationalVector s = small_vector(rng, x.dim(), 3, 2);
    // Most pieces are active at x; some sit slightly below.
    Rational b = -dot(s, x) - (i == 0 ? 0 : lift(rng) == 0 ? Rational(1, 2) : Rational(0));
    pieces.push_back({s, b});
  }
  return PAConvexFunction(std::move(pieces));
}

}  // namespace subgrad::testgen
