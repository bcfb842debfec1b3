#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "subgrad/polyhedron.hpp"
#include "subgrad/rational.hpp"

namespace subgrad {

/// x -> <slope, x> + intercept
struct AffinePiece {
  RationalVector slope;
  Rational intercept;

  Rational value_at(const RationalVector& x) const { return dot(slope, x) + intercept; }
  friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
  friend bool operator<(const AffinePiece& a, const AffinePiece& b) {
    if (a.slope == b.slope) return a.intercept < b.intercept;
    return a.slope < b.slope;
  }
};

/// max_i (<a_i, x> + c_i) on a polyhedral domain, +infinity outside it.
/// Pieces are stored sorted and deduplicated; the domain is canonical.
class PAConvexFunction {
 public:
  explicit PAConvexFunction(std::vector<AffinePiece> pieces);
  PAConvexFunction(std::vector<AffinePiece> pieces, Polyhedron domain);

  /// x -> <slope, x> + intercept on the whole space.
  static PAConvexFunction affine(RationalVector slope, Rational intercept = 0);
  /// Indicator of C: the zero function restricted to C.
  static PAConvexFunction indicator(const Polyhedron& c);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<AffinePiece>& pieces() const noexcept { return pieces_; }
  const Polyhedron& domain() const noexcept { return domain_; }
  bool has_proper_domain() const { return !domain_.is_whole_space(); }

  friend bool operator==(const PAConvexFunction&, const PAConvexFunction&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<AffinePiece> pieces_;
  Polyhedron domain_ = Polyhedron::whole_space(1);
};

Extended evaluate(const PAConvexFunction& f, const RationalVector& x);
bool in_domain(const PAConvexFunction& f, const RationalVector& x);
/// Interior of the domain (the whole space counts).
bool in_domain_interior(const PAConvexFunction& f, const RationalVector& x);
/// Indices of pieces attaining the maximum at x (exact ties).
std::vector<std::size_t> active_pieces(const PAConvexFunction& f, const RationalVector& x);

/// conv{active slopes} + N(dom f, x).
Polyhedron subdifferential_at(const PAConvexFunction& f, const RationalVector& x);
/// subdifferential_at(f, x) + eps * dual ball.
Polyhedron eps_subdifferential_at(const PAConvexFunction& f, const RationalVector& x, const Rational& eps,
                                  const NormSpec& norm);
/// max over active pieces of <slope, h>; x must lie in the domain interior.
Rational directional_derivative(const PAConvexFunction& f, const RationalVector& x, const RationalVector& h);

/// Same pieces on dom f intersected with A (f + indicator of A).
PAConvexFunction restrict(const PAConvexFunction& f, const Polyhedron& a);
/// Pairwise piece sums on the intersected domain.
PAConvexFunction operator+(const PAConvexFunction& f, const PAConvexFunction& g);
/// f + eps * ||. - x||_1 written as a max of pieces (one per piece and sign
/// vector). L1 only.
PAConvexFunction f_eps_expand(const PAConvexFunction& f, const RationalVector& x, const Rational& eps,
                              const NormSpec& norm);

/// f = g - h with dom g contained in dom h.
class DCFunction {
 public:
  DCFunction(PAConvexFunction g, PAConvexFunction h);

  std::size_t dim() const noexcept { return g_.dim(); }
  const PAConvexFunction& g() const noexcept { return g_; }
  const PAConvexFunction& h() const noexcept { return h_; }

  friend bool operator==(const DCFunction&, const DCFunction&) = default;

 private:
  PAConvexFunction g_;
  PAConvexFunction h_;
};

/// g(x) - h(x); +infinity outside dom g.
Extended evaluate(const DCFunction& f, const RationalVector& x);
/// Lower Dini directional derivative of g - h at x along d, with +infinity
/// for directions leaving dom g.
Extended dini_derivative(const DCFunction& f, const RationalVector& x, const RationalVector& d);

enum class HypothesisStatus { Holds, Fails, Unknown };
enum class Provenance { ExactByConvexity, Probe };

struct HypothesisEntry {
  std::string name;
  HypothesisStatus status = HypothesisStatus::Unknown;
  Provenance provenance = Provenance::ExactByConvexity;
  std::string detail;

  friend bool operator==(const HypothesisEntry&, const HypothesisEntry&) = default;
};

using HypothesisReport = std::vector<HypothesisEntry>;

/// Hypotheses of the difference formulas for a PA pair at x.
HypothesisReport dc_hypotheses(const DCFunction& f, const RationalVector& x);
bool all_green(const HypothesisReport& report);
const char* to_string(HypothesisStatus status);
const char* to_string(Provenance provenance);

struct DcSubdifferential {
  Polyhedron set;
  HypothesisReport hypotheses;
};

/// (eps+eta)-subdifferential of g star-minus the eta-subdifferential of h.
DcSubdifferential dc_dini_subdifferential(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                          const Rational& eta, const NormSpec& norm);

/// {x* : <x*, d> <= d-f(x; d) + eps ||d|| for all d}, computed without
/// star-differences. For each active piece b_j of h this is the set
/// G + cone{b_l - b_j : l active} - b_j with G = dg(x) + eps * dual ball,
/// and the result is the intersection over j.
Polyhedron dc_definitional_subdifferential(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                           const NormSpec& norm);

}  // namespace subgrad
