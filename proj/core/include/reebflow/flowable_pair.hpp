#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reebflow/homeo1d.hpp"

namespace reebflow {

using PhiMap = std::function<double(double, double, double)>;

/// phi(x, x', y) = y' exactly when (x, x') and (y, y') are equivalent. The
/// classes of the relation are graphs of increasing homeomorphisms.
class EquivClassMap {
 public:
  EquivClassMap() = default;
  explicit EquivClassMap(PhiMap phi, std::string name = {});

  double operator()(double x, double x_prime, double y) const { return phi_(x, x_prime, y); }
  const std::string& name() const { return name_; }

 private:
  PhiMap phi_;
  std::string name_;
};

/// (x, x') ~ (y, y') iff x' - x = y' - y.
EquivClassMap translation_relation();
/// (x, x') ~ (y, y') iff x'^3 - x^3 = y'^3 - y^3.
EquivClassMap cubic_relation();

struct PairCheckOptions {
  std::vector<double> samples{-3.0, -1.25, -0.5, 0.0, 0.75, 2.0, 3.5};
  double tol = 1e-9;
};

/// A relation together with a fixed-point-free increasing map that preserves
/// it. Construction spot-checks the structural conditions on the sample
/// points and throws InvariantViolation naming the first one that fails.
class FlowablePair {
 public:
  FlowablePair(EquivClassMap relation, Homeo1D f, const PairCheckOptions& opts = {});

  const EquivClassMap& relation() const { return relation_; }
  const Homeo1D& f() const { return f_; }
  /// +1 when f moves points up, -1 when it moves them down.
  int orientation() const { return orientation_; }
  /// The upward-moving member of {f, f^-1}.
  const Homeo1D& generator() const { return generator_; }

 private:
  EquivClassMap relation_;
  Homeo1D f_;
  Homeo1D generator_;
  int orientation_ = 1;
};

FlowablePair translation_pair();
FlowablePair cubic_pair();

struct SqrtOptions {
  double tol = 1e-12;
  // Widens the initial fixed-point bracket on both sides; any value >= 0
  // gives the same root.
  double bracket_pad = 0.0;
};

/// The unique u with (x, u) ~ (u, f_x): the fixed point of the
/// order-reversing map u -> phi(u, f_x, x), where f_x is the image of x.
double sqrt_point(const EquivClassMap& relation, double x, double f_x, const SqrtOptions& opts = {});

enum class LevelStorage {
  on_demand,  // every evaluation solves its fixed point through the chain of levels
  tabulated,  // knot values solved once, linear interpolation between knots
};

struct HalvingOptions {
  LevelStorage storage = LevelStorage::on_demand;
  double window_lo = -64.0;
  double window_hi = 64.0;
  int knots = 4097;
  double tol = 1e-12;
  double bracket_pad = 0.0;
};

/// Square root s of p.f() with (relation, s) again flowable.
Homeo1D sqrt_of(const FlowablePair& p, const HalvingOptions& opts = {});

/// t = numerator / 2^exponent.
struct Dyadic {
  std::int64_t numerator = 0;
  int exponent = 0;

  double value() const;
  /// Exact dyadic representation of t with exponent <= max_exponent, if any.
  static std::optional<Dyadic> from_double(double t, int max_exponent);
};

struct FlowOptions {
  double tol = 1e-9;
  double horizon = 64.0;
};

struct FlowEvaluation {
  double value = 0.0;
  int depth = 0;     // dyadic depth at which the bracket closed (0 for exact dyadic t)
  double gap = 0.0;  // |Phi^{t_hi}(x) - Phi^{t_lo}(x)| at that depth
};

/// Iterated square roots of the generator: maps[0] = generator and
/// maps[k] o maps[k] = maps[k-1].
class HalvingSequence {
 public:
  HalvingSequence(FlowablePair pair, int depth, HalvingOptions opts = {});

  int depth() const { return static_cast<int>(maps_.size()) - 1; }
  const Homeo1D& level(int k) const { return maps_.at(static_cast<std::size_t>(k)); }
  std::span<const Homeo1D> maps() const { return maps_; }
  const FlowablePair& pair() const { return pair_; }
  int orientation() const { return pair_.orientation(); }
  const HalvingOptions& options() const { return opts_; }
  bool in_window(double x) const { return x >= opts_.window_lo && x <= opts_.window_hi; }

  /// Composes maps[k]^{eps_k} ... maps[0]^{eps_0} along the binary digits of t.
  double flow_dyadic(Dyadic t, double x) const;

  /// Phi^t(x) for real t: brackets t between consecutive dyadics of growing
  /// depth until the two images are closer than opts.tol.
  FlowEvaluation flow(double t, double x, const FlowOptions& opts = {}) const;

 private:
  FlowablePair pair_;
  HalvingOptions opts_;
  std::vector<Homeo1D> maps_;
};

HalvingSequence halving_sequence(const FlowablePair& p, int depth, const HalvingOptions& opts = {});
double flow_dyadic(const HalvingSequence& hs, Dyadic t, double x);
FlowEvaluation flow(const HalvingSequence& hs, double t, double x, const FlowOptions& opts = {});

struct GenerationSample {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

struct GenerationReport {
  double max_residual = 0.0;
  double tol = 0.0;
  std::size_t failures = 0;
  std::vector<double> residuals;
  bool passed() const { return failures == 0; }
};

/// Checks phi(Phi^t(x), Phi^t(y), x) = y on every sample.
GenerationReport verify_generates(const HalvingSequence& hs, std::span<const GenerationSample> samples,
                                  double tol, const FlowOptions& flow_opts = {});

}  // namespace reebflow
