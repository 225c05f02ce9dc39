#pragma once

#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace reebflow {

inline constexpr double kLn2 = std::numbers::ln2;

/// A point of the open quadrant Q = {x > 0, y > 0}, stored as the log of its
/// leaf invariant c = xy together with log x. Leaf-preserving maps only touch
/// log x, so the leaf of an orbit is carried bit for bit.
class QuadrantPoint {
 public:
  static QuadrantPoint from_xy(double x, double y);
  static QuadrantPoint from_logs(double lx, double ly);
  static QuadrantPoint on_leaf(double leaf_log, double lx);

  double lx() const { return lx_; }
  double ly() const { return leaf_log_ - lx_; }
  double leaf_log() const { return leaf_log_; }
  /// ln(y / x).
  double log_ratio() const { return leaf_log_ - 2.0 * lx_; }
  double x() const;
  double y() const;

  bool operator==(const QuadrantPoint&) const = default;

 private:
  QuadrantPoint(double leaf_log, double lx) : leaf_log_(leaf_log), lx_(lx) {}

  double leaf_log_ = 0.0;
  double lx_ = 0.0;
};

/// Delta is the positive y-axis, Delta' the positive x-axis.
enum class Side { delta, delta_prime };

struct BoundaryPoint {
  Side side = Side::delta;
  double coord = 1.0;  // y on Delta, x on Delta'

  static BoundaryPoint on_delta(double y);
  static BoundaryPoint on_delta_prime(double x);
  bool operator==(const BoundaryPoint&) const = default;
};

const char* side_name(Side s);

/// The distortion profile: beta(theta) = theta / h(theta) on [1/2, 1] and
/// beta(theta) = beta(theta / 2) on [1, 2], where h is the identity on
/// [1/2, 3/4] and dips below it by the quartic bump
/// amplitude * (theta - 3/4)^2 * (1 - theta)^2 on [3/4, 1].
class BetaProfile {
 public:
  static constexpr double kDefaultAmplitude = 32.0;

  /// Any amplitude other than the default is accepted only after a
  /// finite-difference check that h' > 3/4 on a 10^5-point grid.
  explicit BetaProfile(double bump_amplitude = kDefaultAmplitude);

  double amplitude() const { return amplitude_; }
  double h(double theta) const;  // theta in [1/2, 1]
  double operator()(double theta) const;

  /// theta in [1/2, 2] with theta / beta(theta)^2 = target.
  double solve_sq_ratio(double target) const;

  /// Minimum forward-difference slope of h on a uniform grid over [1/2, 1].
  static double min_h_slope(double amplitude, int grid = 100000);

 private:
  double amplitude_;
};

double beta(const BetaProfile& profile, double theta);

struct CounterexampleParams {
  double a = 1.0;
  double b = 0.7499;
  double delta = 1.0053862144429998;  // sqrt(0.7580 / 0.7499)
  double c = 1.2;
  double d = 0.7;

  /// Throws DomainError naming the first ordering constraint that fails.
  void validate() const;
};

// Builtin maps of Q in log coordinates.
bool in_sector(const QuadrantPoint& p);  // 1/2 <= y/x < 2
QuadrantPoint apply_g(const QuadrantPoint& p);
QuadrantPoint apply_g_inverse(const QuadrantPoint& p);
QuadrantPoint apply_k(const QuadrantPoint& p, const BetaProfile& profile);
QuadrantPoint apply_k_inverse(const QuadrantPoint& p, const BetaProfile& profile);
QuadrantPoint apply_f(const QuadrantPoint& p, const BetaProfile& profile);
QuadrantPoint apply_f_inverse(const QuadrantPoint& p, const BetaProfile& profile);
/// On both boundary rays f acts as g: (0, b) -> (0, b/2), (a, 0) -> (2a, 0).
BoundaryPoint apply_f(const BoundaryPoint& p, const BetaProfile& profile);

/// A leaf-preserving, forward-moving homeomorphism of Q extended to the two
/// boundary rays.
class ReebHomeo {
 public:
  enum class Kind { hyperbolic_g, counterexample, composite };

  static ReebHomeo hyperbolic_g();
  static ReebHomeo counterexample(BetaProfile profile = BetaProfile{});
  /// parts[0] is applied first.
  static ReebHomeo composite(std::vector<ReebHomeo> parts);

  Kind kind() const { return kind_; }
  std::string name() const;
  const BetaProfile& profile() const { return profile_; }

  QuadrantPoint forward(const QuadrantPoint& p) const;
  QuadrantPoint backward(const QuadrantPoint& p) const;
  BoundaryPoint forward(const BoundaryPoint& p) const;
  BoundaryPoint backward(const BoundaryPoint& p) const;

  QuadrantPoint iterate(QuadrantPoint p, long n) const;
  BoundaryPoint iterate(BoundaryPoint p, long n) const;

 private:
  ReebHomeo(Kind kind, BetaProfile profile) : kind_(kind), profile_(profile) {}

  Kind kind_;
  BetaProfile profile_;
  std::shared_ptr<const std::vector<ReebHomeo>> parts_;
};

struct ClosedFormIterate {
  QuadrantPoint point;
  std::optional<long> crossing_step;  // step whose input lies in the sector
  double crossing_theta = 0.0;
  double beta = 1.0;
};

/// n-fold counterexample map from its single sector crossing:
/// (2^n x beta(theta*), y / (2^n beta(theta*))).
ClosedFormIterate iterate_closed_form_detail(const QuadrantPoint& x0, long n, const BetaProfile& profile);
QuadrantPoint iterate_closed_form(const QuadrantPoint& x0, long n, const BetaProfile& profile);

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Leaf u of the middle strip -1 < t < 1 of the Reeb foliation, at height t.
PlanePoint strip_leaf(double u, double t);

}  // namespace reebflow
