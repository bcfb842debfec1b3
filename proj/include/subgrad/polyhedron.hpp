#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subgrad/rational.hpp"

namespace subgrad {

/// <normal, x> <= offset
struct Halfspace {
  RationalVector normal;
  Rational offset;

  bool contains(const RationalVector& x) const { return dot(normal, x) <= offset; }
  friend bool operator==(const Halfspace&, const Halfspace&) = default;
  friend bool operator<(const Halfspace& a, const Halfspace& b) {
    if (a.normal == b.normal) return a.offset < b.offset;
    return a.normal < b.normal;
  }
};

struct Generators {
  std::vector<RationalVector> vertices;
  std::vector<RationalVector> rays;  // lines appear as a pair r, -r

  friend bool operator==(const Generators&, const Generators&) = default;
};

enum class Emptiness { Unknown, Empty, Nonempty };

/// Hard limits of the double description engine. Exceeding one raises
/// CapExceeded instead of degrading silently.
struct KernelLimits {
  std::size_t max_dim = 8;
  std::size_t max_generators = 100000;
};

const KernelLimits& kernel_limits();
/// Process-wide override; call before any concurrent use. Reads
/// SUBGRAD_MAX_FACETS on first access when never set explicitly.
void set_kernel_limits(const KernelLimits& limits);

/// Convex polyhedron in Q^n with an optional halfspace description, an
/// optional generator description, or both. Values are immutable; operations
/// that need a missing description compute it on a copy.
///
/// A canonical polyhedron carries both descriptions:
///  - hrep: equalities as halfspace pairs (rows of the RREF of the affine
///    hull), then facets whose normals are orthogonal to the equality normals,
///    each scaled to a primitive integer normal; sorted, deduplicated.
///  - vrep: minimal-face representatives orthogonal to the lineality space,
///    rays as primitive integer vectors (lines as +/- pairs); sorted.
/// The empty set canonically has hrep {x_1 <= 0, -x_1 <= -1} and empty vrep.
/// Two canonical polyhedra are equal as sets iff they compare equal.
class Polyhedron {
 public:
  static Polyhedron from_hrep(std::size_t dim, std::vector<Halfspace> halfspaces);
  static Polyhedron from_vrep(std::size_t dim, std::vector<RationalVector> vertices,
                              std::vector<RationalVector> rays = {});
  static Polyhedron whole_space(std::size_t dim);
  static Polyhedron empty(std::size_t dim);
  static Polyhedron point(const RationalVector& p);
  /// Axis-aligned box [lo_i, hi_i].
  static Polyhedron box(const RationalVector& lo, const RationalVector& hi);
  /// Convex cone generated by `rays` (the origin alone when rays is empty).
  static Polyhedron cone(std::size_t dim, std::vector<RationalVector> rays);
  /// Both descriptions at once; throws InvalidArgument unless they describe
  /// the same set. Marked canonical when they are already in canonical form.
  static Polyhedron from_descriptions(std::size_t dim, std::vector<Halfspace> halfspaces, Generators generators);

  std::size_t dim() const noexcept { return dim_; }
  bool has_hrep() const noexcept { return hrep_.has_value(); }
  bool has_vrep() const noexcept { return vrep_.has_value(); }
  const std::vector<Halfspace>& hrep() const;
  const Generators& vrep() const;
  Emptiness emptiness() const noexcept { return emptiness_; }
  bool is_canonical() const noexcept { return canonical_; }

  /// Exact emptiness test (converts when the flag is unknown).
  bool is_empty() const;
  /// True when the canonical hrep has no constraints.
  bool is_whole_space() const;
  bool is_bounded() const;

  /// Structural comparison of the stored descriptions; meaningful as set
  /// equality only between canonical values.
  friend bool operator==(const Polyhedron& a, const Polyhedron& b);

 private:
  friend Polyhedron dual_description(const Polyhedron& p);
  Polyhedron() = default;

  std::size_t dim_ = 0;
  std::optional<std::vector<Halfspace>> hrep_;
  std::optional<Generators> vrep_;
  Emptiness emptiness_ = Emptiness::Unknown;
  bool canonical_ = false;
};

/// Both descriptions populated and canonical. Idempotent.
Polyhedron dual_description(const Polyhedron& p);
inline Polyhedron canonical(const Polyhedron& p) { return p.is_canonical() ? p : dual_description(p); }

/// sup{<d, x> : x in P}; +infinity iff some ray r has <d, r> > 0.
Extended support_function(const Polyhedron& p, const RationalVector& d);

bool contains_point(const Polyhedron& p, const RationalVector& x);

struct ContainmentResult {
  bool contained = true;
  std::optional<RationalVector> witness;  // point of the inner set outside the outer one
  explicit operator bool() const { return contained; }
};

/// Q subset of P; on failure the witness is a point of Q violating a facet of P.
ContainmentResult contains_polyhedron(const Polyhedron& outer, const Polyhedron& inner);
bool set_equal(const Polyhedron& a, const Polyhedron& b);

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q);
/// Empty if either operand is empty.
Polyhedron minkowski_sum(const Polyhedron& p, const Polyhedron& q);
/// {x : x + B subset of A}, computed by eroding the facets of A with the
/// support function of B. B empty gives the whole space; A empty and B
/// nonempty gives the empty set.
Polyhedron star_difference(const Polyhedron& a, const Polyhedron& b);
/// {M x + c : x in P}
Polyhedron affine_image(const Polyhedron& p, const RationalMatrix& m, const RationalVector& c);
Polyhedron negate(const Polyhedron& p);
Polyhedron translate(const Polyhedron& p, const RationalVector& shift);
/// Cone generated by the outward normals of the constraints active at x.
Polyhedron normal_cone_at(const Polyhedron& p, const RationalVector& x);
/// True iff C = -C. C must be a cone (contains 0, generated by rays).
bool cone_is_linear_subspace(const Polyhedron& c);
/// x lies in the interior of P (strict inequality on every constraint).
bool is_interior_point(const Polyhedron& p, const RationalVector& x);

enum class NormKind { L1, Linf, L2Approx };

struct NormSpec {
  NormKind kind = NormKind::L1;
  unsigned facets = 0;  // L2Approx only: even, >= 4

  static NormSpec l1() { return {NormKind::L1, 0}; }
  static NormSpec linf() { return {NormKind::Linf, 0}; }
  static NormSpec l2approx(unsigned k);

  bool is_exact_polyhedral() const { return kind != NormKind::L2Approx; }
  friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

NormSpec parse_norm(std::string_view text);  // "l1", "linf", "l2approx:<k>"
std::string format_norm(const NormSpec& norm);

/// Ball of radius eps of the dual norm: Linf box for L1, L1 cross-polytope
/// for Linf. L2Approx gives a circumscribed polytope whose facet normals are
/// rational unit vectors in every coordinate plane; see
/// l2approx_hausdorff_bound for its distance to the Euclidean ball.
Polyhedron dual_norm_ball(const NormSpec& norm, const Rational& eps, std::size_t dim);
double l2approx_hausdorff_bound(unsigned facets, std::size_t dim, double eps);
/// Rational unit vectors approximating k equally spaced directions in the plane.
std::vector<std::pair<Rational, Rational>> rational_circle_directions(unsigned k);

/// Norm of v (exact for L1/Linf). For L2Approx the gauge of the inscribed
/// polygon is used, which bounds the Euclidean norm from above.
Rational norm_value(const NormSpec& norm, const RationalVector& v);

/// inf{||a - b|| : a in A, b in B}; +infinity if either set is empty.
/// Exact for L1/Linf; an upper bound of the Euclidean gap for L2Approx.
Extended gap(const Polyhedron& a, const Polyhedron& b, const NormSpec& norm);

}  // namespace subgrad
