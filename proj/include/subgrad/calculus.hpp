#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subgrad/pa_function.hpp"
#include "subgrad/polyhedron.hpp"

namespace subgrad {

enum class ClaimId {
  SumRule12,
  Inclusion13,
  Equality22,
  Equality26,
  Intersection27,
  Cor11,
  Cor12a,
  Cor12b,
  LocalMinNecessary,
};

/// Command-line names: sum_rule12, inclusion13, equality22, ...
const char* to_string(ClaimId id);
ClaimId parse_claim_id(const std::string& text);

/// Comparison of lhs and rhs. Fails means lhs is not contained in rhs;
/// StrictInclusion means lhs is a proper subset of rhs.
enum class CertVerdict { Equal, StrictInclusion, Fails };
const char* to_string(CertVerdict verdict);

struct Statement {
  std::string name;
  bool value = false;
  friend bool operator==(const Statement&, const Statement&) = default;
};

struct Certificate {
  ClaimId claim = ClaimId::Equality22;
  std::vector<std::pair<std::string, std::string>> parameters;
  Polyhedron lhs = Polyhedron::empty(1);
  Polyhedron rhs = Polyhedron::empty(1);
  CertVerdict verdict = CertVerdict::Fails;
  /// Point of lhs outside rhs (Fails) or of rhs outside lhs (StrictInclusion).
  std::optional<RationalVector> witness;
  HypothesisReport hypotheses;
  /// How each side was computed.
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<Statement> statements;

  /// Inclusion claims hold unless Fails; equality claims need Equal;
  /// Cor11 needs its three statements to agree.
  bool claim_holds() const;
  bool is_equality_claim() const;
  /// Equal with every hypothesis established exactly.
  bool theorem_certified() const;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Verdict and witness from containment both ways.
void compare_sides(Certificate& cert);

/// eps-subdiff f + eta-subdiff g inside the (eps+eta)-subdifferential of f + g.
Certificate check_sum_rule(const PAConvexFunction& f, const PAConvexFunction& g, const RationalVector& x,
                           const Rational& eps, const Rational& eta, const NormSpec& norm = NormSpec::l1());

/// Definitional eps-subdifferential of g - h (lhs) against
/// (eps+eta)-subdiff g star-minus eta-subdiff h (rhs). Claim Equality22 for
/// eps = eta = 0, Equality26 otherwise.
Certificate check_difference_formula(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                     const Rational& eta, const NormSpec& norm = NormSpec::l1());
/// Same sides, reported as the inclusion lhs within rhs.
Certificate check_inclusion13(const DCFunction& f, const RationalVector& x, const Rational& eps, const Rational& eta,
                              const NormSpec& norm = NormSpec::l1());

/// lhs against the intersection over mu of (eps+mu)-subdiff g star-minus mu-subdiff h.
Certificate check_intersection_formula(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                       const std::vector<Rational>& mu_list, const NormSpec& norm = NormSpec::l1());

/// (i) some eta in the list has eta-subdiff h inside eta-subdiff g,
/// (ii) 0 lies in the lower subdifferential of g - h, (iii) every eta does.
/// The list must contain 0.
Certificate check_corollary11(const DCFunction& f, const RationalVector& x, const std::vector<Rational>& eta_list,
                              const NormSpec& norm = NormSpec::l1());

enum class Cor12Variant { A, B };
/// lhs against (dg(x) + eps * dual ball) star-minus dh(x).
Certificate check_corollary12(const DCFunction& f, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                              Cor12Variant variant);

/// dh(x) inside dg(x); necessary for a local minimum of g - h.
Certificate local_min_necessary(const DCFunction& f, const RationalVector& x);

}  // namespace subgrad
