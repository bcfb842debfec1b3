#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "subgrad/blackbox.hpp"
#include "subgrad/pa_function.hpp"
#include "subgrad/polyhedron.hpp"

namespace subgrad {

/// Shells B(x, delta) for decreasing delta, with a fixed number of samples
/// each. Sample j uses the same random draws in every shell, scaled to the
/// shell radius, so shell statistics vary smoothly with delta.
struct SamplingPlan {
  std::vector<double> shell_radii = dyadic_radii(1, 20);
  std::size_t samples_per_shell = 256;
  std::uint64_t seed = 0x5eed5eedULL;
  std::size_t stabilization_window = 4;
  double stabilization_tol = 1e-6;
  /// Quotients below this value count as divergence to -infinity.
  double divergence_threshold = -1e6;
  /// Steps t*|u| below min_relative_step * max(|x|_inf, |f(x)|) are skipped
  /// because the difference quotient is dominated by rounding.
  double min_relative_step = 1e-7;
  /// Worker threads for sample evaluation; 0 uses the hardware concurrency.
  /// Results do not depend on this value.
  unsigned threads = 1;

  /// 2^-first, ..., 2^-last
  static std::vector<double> dyadic_radii(int first, int last);
  void validate() const;
};

enum class VerdictStatus { Holds, FailsWithWitness, Inconclusive };
const char* to_string(VerdictStatus status);

struct ShellStat {
  double radius = 0;
  double inf = 0;  // smallest sampled quantity in the shell (+inf when nothing was sampled)
  std::size_t samples = 0;
  std::size_t violations = 0;

  friend bool operator==(const ShellStat&, const ShellStat&) = default;
};

/// Named vectors describing the violating sample, plus the amount of the
/// violation.
struct Witness {
  std::vector<std::pair<std::string, std::vector<double>>> fields;
  double margin = 0;

  const std::vector<double>& get(const std::string& name) const;
  friend bool operator==(const Witness&, const Witness&) = default;
};

/// Holds means that no violation was found in the tail shells under the
/// plan (or that an exact shortcut applies); it is not a proof.
struct ProbeVerdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  std::optional<Witness> witness;
  std::vector<ShellStat> shells;
  std::string reason;

  friend bool operator==(const ProbeVerdict&, const ProbeVerdict&) = default;
};

struct DiniEstimate {
  double estimate = 0;  // -inf when diverged
  bool diverged = false;
  bool stable = false;
  std::vector<ShellStat> shells;     // raw sampled infima
  std::vector<double> envelope;      // suffix minimum of the raw infima
  std::vector<double> extrapolated;  // Richardson extrapolation of the envelope
  std::optional<Witness> divergence_witness;  // fields t, u, quotient
};

/// Sampled lower Dini-Hadamard derivative of f at x along h.
DiniEstimate dini_directional_estimate(const BlackBoxFunction& f, const std::vector<double>& x,
                                       const std::vector<double>& h, const SamplingPlan& plan);

/// Calm iff the lower derivative along 0 is 0; piecewise affine expressions
/// hold without sampling.
ProbeVerdict calmness_probe(const BlackBoxFunction& f, const std::vector<double>& x, const SamplingPlan& plan);

/// Searches for f(y) - f(x) < <x*, y - x> - (alpha + eps) ||y - x||.
ProbeVerdict eps_subgradient_membership_probe(const BlackBoxFunction& f, const std::vector<double>& x,
                                              const std::vector<double>& xstar, double eps, double alpha,
                                              const SamplingPlan& plan, const NormSpec& norm = NormSpec::l1());

enum class RegularityMode { Convex, Starshaped, Directional };
const char* to_string(RegularityMode mode);
RegularityMode parse_regularity_mode(const std::string& text);

/// Searches for violations of the approximate convexity inequality
/// f((1-t)y + tx) <= (1-t)f(y) + t f(x) + eps t(1-t)||x - y||, with y free
/// (convex), y = x-bar (starshaped) or y = x-bar and x = x-bar + s v,
/// v near u (directional).
ProbeVerdict approx_regularity_probe(const BlackBoxFunction& f, const std::vector<double>& x, double eps,
                                     RegularityMode mode, const SamplingPlan& plan,
                                     const NormSpec& norm = NormSpec::l1(), const std::vector<double>& u = {});

/// Exact gaps between the subdifferential at x and at sampled nearby points.
ProbeVerdict gap_continuity_probe(const PAConvexFunction& h, const RationalVector& x, const Rational& eps,
                                  const SamplingPlan& plan, const NormSpec& norm = NormSpec::l1());
ProbeVerdict gap_continuity_probe(const DCFunction& f, const RationalVector& x, const Rational& eps,
                                  const SamplingPlan& plan, const NormSpec& norm = NormSpec::l1());

/// Norm of a double vector; L2Approx is evaluated as the Euclidean norm.
double norm_value_double(const NormSpec& norm, const std::vector<double>& v);

// Replays re-evaluate a witness and report whether the violation reproduces.
bool replay_calmness_witness(const BlackBoxFunction& f, const std::vector<double>& x, const Witness& w,
                             double threshold);
bool replay_membership_witness(const BlackBoxFunction& f, const std::vector<double>& x,
                               const std::vector<double>& xstar, double eps, double alpha, const NormSpec& norm,
                               const Witness& w);
bool replay_regularity_witness(const BlackBoxFunction& f, const std::vector<double>& x, double eps,
                               RegularityMode mode, const NormSpec& norm, const Witness& w);
bool replay_gap_witness(const PAConvexFunction& h, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                        const Witness& w);
bool replay_gap_witness(const DCFunction& f, const RationalVector& x, const Rational& eps, const NormSpec& norm,
                        const Witness& w);

namespace sampling {

/// splitmix64 stream keyed by (seed, tag, index).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in the Euclidean unit ball of dimension n.
  std::vector<double> in_unit_ball(std::size_t n);

 private:
  std::uint64_t state_;
};

/// Runs fn(i) for i < count on `threads` workers; results are indexed by i.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Verdict from per-shell violation counts: Holds when the last `window`
/// shells are clean, FailsWithWitness when each of them has a violation,
/// Inconclusive otherwise.
VerdictStatus tail_verdict(const std::vector<ShellStat>& shells, std::size_t window);

}  // namespace sampling

}  // namespace subgrad
