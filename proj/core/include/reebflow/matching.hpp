#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reebflow/reeb_model.hpp"

namespace reebflow {

struct MatchingOptions {
  double tol = 1e-10;  // Cauchy gap tolerance on log x (or log y) of the limit terms
  int k_max = 200;
  // A term k only counts toward the Cauchy test once both orbits start with
  // y/x >= margin and end with y/x <= 1/margin (reversed for pullbacks).
  double boundary_margin = 16.0;
  int bracket_budget = 64;
  int scan_points = 4096;
  int monotone_probes = 9;
  double inverse_tol = 1e-13;  // bisection width on log height for inverse transfers
};

/// Pass/fail threshold for residuals: max(10 tol, 1e-8).
double matching_threshold(const MatchingOptions& opts);

/// Segment into Q landing at a boundary point: {(s, b + shear s)} for a Delta
/// anchor (0, b), {(a + shear t, t)} for a Delta' anchor (a, 0), with the
/// parameter in (0, extent).
struct Transversal {
  BoundaryPoint anchor;
  double extent = 1.0;
  double shear = 0.0;

  static Transversal at(BoundaryPoint anchor, double shear = 0.0);
  QuadrantPoint point(double log_param) const;
};

struct WitnessSolution {
  int k = 0;
  QuadrantPoint start = QuadrantPoint::from_logs(0.0, 0.0);  // x_k on the Delta transversal
  QuadrantPoint image = QuadrantPoint::from_logs(0.0, 0.0);  // f^k(x_k)
  double log_param = 0.0;
  double residual = 0.0;  // |log x(f^k(x_k)) - log x'|
  int evaluations = 0;
  bool scanned = false;  // monotone check failed and the scan fallback ran
};

/// x_k on the Delta transversal at x with x(f^k(x_k)) = x'. Throws
/// NumericalError("witness bracket failure") when no sign change is found
/// within the budget, and NumericalError when tol > 0 and the residual
/// exceeds it.
WitnessSolution solve_witness(const ReebHomeo& f, int k, BoundaryPoint x, BoundaryPoint x_prime, double tol,
                              const MatchingOptions& opts = {}, double shear = 0.0);

struct LimitResult {
  double value = 0.0;  // boundary coordinate of the limit
  bool converged = false;
  int k = 0;           // last index used
  double gap = 0.0;    // last warm gap (log coordinates)
  std::vector<double> gaps;
};

/// The transfer map alpha_{xx'} : Delta -> Delta' built from one witness
/// sequence. Witnesses are solved lazily and cached; copies share the cache.
class TransferMap {
 public:
  TransferMap(ReebHomeo f, BoundaryPoint x, BoundaryPoint x_prime, MatchingOptions opts = {}, double shear = 0.0);

  const WitnessSolution& witness(int k) const;

  /// lim x(f^k(y_k)) where y_k is the point of the leaf of x_k at height y.
  LimitResult forward_limit(double y) const;
  /// lim y(f^-k(y'_k)) where y'_k is the point of the leaf of x_k at width y'.
  LimitResult reverse_limit(double y_prime) const;

  /// Throw NumericalError("limit divergence") when the Cauchy test fails.
  double forward(double y) const;
  double reverse(double y_prime) const;
  /// alpha^-1 by bisection on log height, seeded by the reverse limit.
  double inverse(double y_prime) const;

  BoundaryPoint x() const { return x_; }
  BoundaryPoint x_prime() const { return x_prime_; }
  const MatchingOptions& options() const { return opts_; }

 private:
  struct Cache;

  ReebHomeo f_;
  BoundaryPoint x_;
  BoundaryPoint x_prime_;
  MatchingOptions opts_;
  double shear_;
  std::shared_ptr<Cache> cache_;
};

BoundaryPoint alpha(const ReebHomeo& f, BoundaryPoint x, BoundaryPoint x_prime, BoundaryPoint y,
                    const MatchingOptions& opts = {});
/// The reversed construction: the y on Delta with (x, x') ~ (y, y').
BoundaryPoint reverse_alpha(const ReebHomeo& f, BoundaryPoint x, BoundaryPoint x_prime, BoundaryPoint y_prime,
                            const MatchingOptions& opts = {});
/// beta_{x1 x2}(y1) = alpha_{x2 x'}^-1(alpha_{x1 x'}(y1)).
BoundaryPoint beta_transfer(const ReebHomeo& f, BoundaryPoint x1, BoundaryPoint x2, BoundaryPoint y1,
                            BoundaryPoint x_prime, const MatchingOptions& opts = {});

struct Triple {
  double x = 1.0;        // Delta
  double x_prime = 1.0;  // Delta'
  double y = 1.0;        // Delta
};

struct EightPointTuple {
  double x1 = 1.0, y1 = 1.0, x2 = 1.0, y2 = 1.0;  // Delta
  double x_prime1 = 1.0, x_prime2 = 1.0;          // Delta'
  std::optional<double> y_prime1, y_prime2;       // Delta', reported only
};

struct CaseRecord {
  std::map<std::string, double> values;
  double residual = 0.0;  // +inf when a limit failed to exist
  bool passed = false;
  std::string failure;
  int k_depth = 0;
  double cauchy_gap = 0.0;
};

struct MatchingReport {
  std::string check;
  bool passed = false;
  double threshold = 0.0;
  double tol = 0.0;
  double residual = 0.0;      // the headline residual of the check
  double max_residual = 0.0;  // over every case and route
  std::vector<CaseRecord> cases;
  std::map<std::string, double> diagnostics;
};

/// n^3 triples with every coordinate log-uniform in [lo, hi].
std::vector<Triple> default_four_point_grid(int n = 10, double lo = 0.5, double hi = 2.0);

MatchingReport check_four_point(const ReebHomeo& f, std::span<const Triple> grid, const MatchingOptions& opts = {});
MatchingReport check_eight_point(const ReebHomeo& f, const EightPointTuple& tuple, const MatchingOptions& opts = {});

/// x1 = (0,b), y1 = (0,delta b), x'1 = (a,0), x2 = (0,d), y2 = (0,delta d),
/// x'2 = (c,0), with y'1 = a/delta and y'2 = c/delta.
EightPointTuple counterexample_eight_points(const CounterexampleParams& params);

struct Section6Row {
  std::string label;
  double X = 0.0, Y = 0.0;
  int shifted = 0;           // start (X / (delta^e 4^n), delta^e Y) with e = shifted
  double ratio = 0.0;        // delta^{2e} Y / X, the crossing ratio
  double direct = 0.0;       // limit of x(f^{2n}(start)) by direct iteration
  double via_alpha = 0.0;    // alpha_{(0,Y)(X,0)}((0, delta^e Y))
  double closed_form = 0.0;  // beta(ratio) X / delta^e
  double nominal = 0.0;      // X / delta^e
  int n = 0;
  double gap = 0.0;
};

struct Section6Table {
  std::vector<Section6Row> rows;
  double residual = 0.0;           // direct - nominal on the last row
  double expected_residual = 0.0;  // (beta(delta^2 b/a) - 1) a / delta
};

Section6Table reproduce_section6(const BetaProfile& profile, const CounterexampleParams& params,
                                 const MatchingOptions& opts = {});

}  // namespace reebflow
