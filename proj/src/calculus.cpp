#include "subgrad/calculus.hpp"

#include <algorithm>
#include <cctype>
#include <string_view>

#include "subgrad/errors.hpp"

namespace subgrad {

namespace {

constexpr const char* kDefinitional =
    "definitional: intersection over active pieces b_j of h of "
    "(dg(x) + eps*ball + cone{b_l - b_j}) - b_j";
constexpr const char* kErosion = "star-difference by facet erosion";

std::string join_rationals(const std::vector<Rational>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ",";
    out += format_rational(v);
  }
  return out;
}

Certificate make(ClaimId claim, const RationalVector& x) {
  Certificate c;
  c.claim = claim;
  c.parameters.emplace_back("point", format_vector(x));
  return c;
}

void require_nonnegative(const Rational& value, const char* name) {
  if (sgn(value) < 0) throw Error(ErrorCode::NegativeEps, std::string(name) + " = " + format_rational(value));
}

Certificate difference_certificate(ClaimId claim, const DCFunction& f, const RationalVector& x, const Rational& eps,
                                   const Rational& eta, const NormSpec& norm) {
  require_nonnegative(eps, "eps");
  require_nonnegative(eta, "eta");
  Certificate c = make(claim, x);
  c.parameters.emplace_back("eps", format_rational(eps));
  c.parameters.emplace_back("eta", format_rational(eta));
  c.parameters.emplace_back("norm", format_norm(norm));
  c.lhs = dc_definitional_subdifferential(f, x, eps, norm);
  DcSubdifferential rhs = dc_dini_subdifferential(f, x, eps, eta, norm);
  c.rhs = std::move(rhs.set);
  c.hypotheses = std::move(rhs.hypotheses);
  c.provenance = {{"lhs", kDefinitional}, {"rhs", kErosion}};
  compare_sides(c);
  return c;
}

}  // namespace

const char* to_string(ClaimId id) {
  switch (id) {
    case ClaimId::SumRule12: return "sum_rule12";
    case ClaimId::Inclusion13: return "inclusion13";
    case ClaimId::Equality22: return "equality22";
    case ClaimId::Equality26: return "equality26";
    case ClaimId::Intersection27: return "intersection27";
    case ClaimId::Cor11: return "cor11";
    case ClaimId::Cor12a: return "cor12a";
    case ClaimId::Cor12b: return "cor12b";
    case ClaimId::LocalMinNecessary: return "local_min_necessary";
  }
  return "?";
}

ClaimId parse_claim_id(const std::string& text) {
  // Accepts both "equality22" and "Equality22".
  auto fold = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c != '_' && c != '-') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  };
  for (auto id : {ClaimId::SumRule12, ClaimId::Inclusion13, ClaimId::Equality22, ClaimId::Equality26,
                  ClaimId::Intersection27, ClaimId::Cor11, ClaimId::Cor12a, ClaimId::Cor12b,
                  ClaimId::LocalMinNecessary}) {
    if (fold(text) == fold(to_string(id))) return id;
  }
  throw Error(ErrorCode::ParseError, "unknown claim '" + text + "'");
}

const char* to_string(CertVerdict verdict) {
  switch (verdict) {
    case CertVerdict::Equal: return "equal";
    case CertVerdict::StrictInclusion: return "strict_inclusion";
    case CertVerdict::Fails: return "fails";
  }
  return "?";
}

bool Certificate::is_equality_claim() const {
  switch (claim) {
    case ClaimId::Equality22:
    case ClaimId::Equality26:
    case ClaimId::Intersection27:
    case ClaimId::Cor12a:
    case ClaimId::Cor12b: return true;
    default: return false;
  }
}

bool Certificate::claim_holds() const {
  if (claim == ClaimId::Cor11) {
    return std::all_of(statements.begin(), statements.end(),
                       [&](const Statement& s) { return s.value == statements.front().value; });
  }
  if (is_equality_claim()) return verdict == CertVerdict::Equal;
  return verdict != CertVerdict::Fails;
}

bool Certificate::theorem_certified() const {
  if (verdict != CertVerdict::Equal || !all_green(hypotheses)) return false;
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const HypothesisEntry& e) { return e.provenance == Provenance::ExactByConvexity; });
}

void compare_sides(Certificate& cert) {
  const auto forward = contains_polyhedron(cert.rhs, cert.lhs);
  if (!forward.contained) {
    cert.verdict = CertVerdict::Fails;
    cert.witness = forward.witness;
    return;
  }
  const auto backward = contains_polyhedron(cert.lhs, cert.rhs);
  if (!backward.contained) {
    cert.verdict = CertVerdict::StrictInclusion;
    cert.witness = backward.witness;
    return;
  }
  cert.verdict = CertVerdict::Equal;
  cert.witness.reset();
}

Certificate check_sum_rule(const PAConvexFunction& f, const PAConvexFunction& g, const RationalVector& x,
                           const Rational& eps, const Rational& eta, const NormSpec& norm) {
  require_nonnegative(eps, "eps");
  require_nonnegative(eta, "eta");
  Certificate c = make(ClaimId::SumRule12, x);
  c.parameters.emplace_back("eps", format_rational(eps));
  c.parameters.emplace_back("eta", format_rational(eta));
  c.parameters.emplace_back("norm", format_norm(norm));
  c.lhs = minkowski_sum(eps_subdifferential_at(f, x, eps, norm), eps_subdifferential_at(g, x, eta, norm));
  c.rhs = eps_subdifferential_at(f + g, x, Rational(eps + eta), norm);
  c.hypotheses = {{"f convex", HypothesisStatus::Holds, Provenance::ExactByConvexity, "max of affine pieces"},
                  {"g convex", HypothesisStatus::Holds, Provenance::ExactByConvexity, "max of affine pieces"}};
  c.provenance = {{"lhs", "Minkowski sum of the two eps-subdifferentials"},
                  {"rhs", "eps-subdifferential of the pairwise piece sum"}};
  compare_sides(c);
  if (c.verdict == CertVerdict::Fails) {
    throw Error(ErrorCode::InternalError,
                "sum rule violated for convex inputs at " + format_vector(x) + " (witness " +
                    format_vector(*c.witness) + ")");
  }
  return c;
}

Certificate check_difference_formula(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                     const Rational& eta, const NormSpec& norm) {
  const ClaimId claim = (sgn(eps) == 0 && sgn(eta) == 0) ? ClaimId::Equality22 : ClaimId::Equality26;
  return difference_certificate(claim, f, x, eps, eta, norm);
}

Certificate check_inclusion13(const DCFunction& f, const RationalVector& x, const Rational& eps, const Rational& eta,
                              const NormSpec& norm) {
  return difference_certificate(ClaimId::Inclusion13, f, x, eps, eta, norm);
}

Certificate check_intersection_formula(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                       const std::vector<Rational>& mu_list, const NormSpec& norm) {
  require_nonnegative(eps, "eps");
  if (mu_list.empty()) throw Error(ErrorCode::InvalidArgument, "mu list is empty");
  for (const auto& mu : mu_list) require_nonnegative(mu, "mu");
  Certificate c = make(ClaimId::Intersection27, x);
  c.parameters.emplace_back("eps", format_rational(eps));
  c.parameters.emplace_back("mu", join_rationals(mu_list));
  c.parameters.emplace_back("norm", format_norm(norm));
  c.lhs = dc_definitional_subdifferential(f, x, eps, norm);
  Polyhedron acc = Polyhedron::whole_space(f.dim());
  for (const auto& mu : mu_list) {
    Polyhedron factor = dc_dini_subdifferential(f, x, eps, mu, norm).set;
    c.statements.push_back({"factor mu=" + format_rational(mu) + " equals lhs", set_equal(factor, c.lhs)});
    acc = intersect(acc, factor);
  }
  c.rhs = acc;
  c.hypotheses = dc_hypotheses(f, x);
  c.provenance = {{"lhs", kDefinitional},
                  {"rhs", "intersection over the mu list of star-differences by facet erosion"}};
  compare_sides(c);
  return c;
}

Certificate check_corollary11(const DCFunction& f, const RationalVector& x, const std::vector<Rational>& eta_list,
                              const NormSpec& norm) {
  if (std::none_of(eta_list.begin(), eta_list.end(), [](const Rational& e) { return sgn(e) == 0; })) {
    throw Error(ErrorCode::InvalidArgument, "eta list must contain 0");
  }
  for (const auto& eta : eta_list) require_nonnegative(eta, "eta");
  Certificate c = make(ClaimId::Cor11, x);
  c.parameters.emplace_back("eta", join_rationals(eta_list));
  c.parameters.emplace_back("norm", format_norm(norm));

  bool some = false, every = true;
  for (const auto& eta : eta_list) {
    const bool inc = contains_polyhedron(eps_subdifferential_at(f.g(), x, eta, norm),
                                         eps_subdifferential_at(f.h(), x, eta, norm))
                         .contained;
    some = some || inc;
    every = every && inc;
  }
  const RationalVector zero(f.dim());
  const bool zero_in = contains_point(dc_definitional_subdifferential(f, x, 0, norm), zero);
  c.statements = {{"(i) some eta: eta-subdiff h within eta-subdiff g", some},
                  {"(ii) 0 in the lower subdifferential of g - h", zero_in},
                  {"(iii) every eta: eta-subdiff h within eta-subdiff g", every}};
  c.lhs = subdifferential_at(f.h(), x);
  c.rhs = subdifferential_at(f.g(), x);
  c.hypotheses = dc_hypotheses(f, x);
  c.provenance = {{"lhs", "dh(x)"}, {"rhs", "dg(x)"}, {"(ii)", kDefinitional}};
  compare_sides(c);
  return c;
}

Certificate check_corollary12(const DCFunction& f, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                              Cor12Variant variant) {
  require_nonnegative(eps, "eps");
  Certificate c = make(variant == Cor12Variant::A ? ClaimId::Cor12a : ClaimId::Cor12b, x);
  c.parameters.emplace_back("eps", format_rational(eps));
  c.parameters.emplace_back("norm", format_norm(norm));
  c.lhs = dc_definitional_subdifferential(f, x, eps, norm);
  Polyhedron enlarged = minkowski_sum(subdifferential_at(f.g(), x), dual_norm_ball(norm, eps, f.dim()));
  c.rhs = star_difference(enlarged, subdifferential_at(f.h(), x));
  c.hypotheses = dc_hypotheses(f, x);
  if (variant == Cor12Variant::B) {
    c.hypotheses.push_back({"g lower semicontinuous and approximately convex", HypothesisStatus::Holds,
                            Provenance::ExactByConvexity, "g is convex and polyhedral"});
  }
  c.provenance = {{"lhs", kDefinitional}, {"rhs", "(dg(x) + eps*ball) star-minus dh(x), by facet erosion"}};
  compare_sides(c);
  return c;
}

Certificate local_min_necessary(const DCFunction& f, const RationalVector& x) {
  Certificate c = make(ClaimId::LocalMinNecessary, x);
  c.lhs = subdifferential_at(f.h(), x);
  c.rhs = subdifferential_at(f.g(), x);
  const bool zero_in = contains_point(star_difference(c.rhs, c.lhs), RationalVector(f.dim()));
  c.statements = {{"0 in dg(x) star-minus dh(x)", zero_in}};
  c.hypotheses = dc_hypotheses(f, x);
  c.provenance = {{"lhs", "dh(x)"}, {"rhs", "dg(x)"}};
  compare_sides(c);
  return c;
}

}  // namespace subgrad
