#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "reebflow/flowable_pair.hpp"
#include "reebflow/matching.hpp"
#include "reebflow/reeb_model.hpp"

namespace reebflow {

/// The relation "equal flow time" on one boundary ray in log coordinates
/// u = ln(coord). On Delta, phi(u1, v1, u2) = ln beta_{x1 x2}(y1) through the
/// Delta' anchor; on Delta' the roles swap and the anchor lies on Delta.
EquivClassMap approx_relation_as_phi(const ReebHomeo& f, Side side, double anchor, const MatchingOptions& opts = {});

/// f restricted to a boundary ray, in log coordinates.
Homeo1D boundary_map(const ReebHomeo& f, Side side);

struct BoundaryFlowOptions {
  int depth = 28;
  double flow_tol = 1e-8;  // bracket gap in log coordinates
  double horizon = 64.0;
  LevelStorage storage = LevelStorage::tabulated;
  double window_lo = -4.0;
  double window_hi = 4.0;
  int knots = 33;
  double sqrt_tol = 1e-12;
  MatchingOptions matching{};
};

class BoundaryFlow {
 public:
  BoundaryFlow(Side side, double anchor, HalvingSequence halving, FlowOptions flow_opts);

  Side side() const { return side_; }
  double anchor() const { return anchor_; }
  const HalvingSequence& halving() const { return *halving_; }

  /// Phi^t on the boundary coordinate.
  double operator()(double t, double coord) const;
  BoundaryPoint operator()(double t, BoundaryPoint p) const;
  FlowEvaluation evaluate_log(double t, double u) const;

 private:
  Side side_;
  double anchor_;
  std::shared_ptr<const HalvingSequence> halving_;
  FlowOptions flow_opts_;
};

/// The generating flow of (approx relation, f|side); anchor is the
/// coordinate of the auxiliary point on the opposite ray.
BoundaryFlow boundary_flow(const ReebHomeo& f, Side side, double anchor, const BoundaryFlowOptions& opts = {});

struct ConsistencySample {
  double x = 1.0;        // Delta
  double x_prime = 1.0;  // Delta'
  double t = 0.0;
};

struct FlowCheckReport {
  std::string check;
  double tol = 0.0;
  double max_residual = 0.0;
  std::size_t failures = 0;
  std::vector<double> residuals;
  bool passed() const { return failures == 0; }
};

/// alpha(x, x', Phi^t(x)) against Phi'^t(x') on every sample.
FlowCheckReport check_boundary_consistency(const ReebHomeo& f, const BoundaryFlow& flow_delta,
                                           const BoundaryFlow& flow_delta_prime,
                                           std::span<const ConsistencySample> samples, double tol,
                                           const MatchingOptions& opts = {});

struct PlanarFlowOptions {
  int max_steps = 4096;  // iterations allowed to reach the fundamental domain
};

/// Flow on Q from the time chart tau: tau(sigma(c)) = 0 on the diagonal
/// sigma(c) = (sqrt c, sqrt c), tau(f(p)) = tau(p) + 1, and tau linear in
/// log x across [sigma(c), f(sigma(c))). Boundary points go to the boundary
/// flows.
class PlanarFlow {
 public:
  PlanarFlow(ReebHomeo f, BoundaryFlow flow_delta, BoundaryFlow flow_delta_prime, PlanarFlowOptions opts = {});

  double time_coordinate(const QuadrantPoint& p) const;
  QuadrantPoint point_at(double leaf_log, double tau) const;

  QuadrantPoint operator()(double t, const QuadrantPoint& p) const;
  BoundaryPoint operator()(double t, const BoundaryPoint& p) const;

  const ReebHomeo& map() const { return f_; }
  const BoundaryFlow& flow_delta() const { return delta_; }
  const BoundaryFlow& flow_delta_prime() const { return delta_prime_; }

 private:
  ReebHomeo f_;
  BoundaryFlow delta_;
  BoundaryFlow delta_prime_;
  PlanarFlowOptions opts_;
};

QuadrantPoint planar_flow(const PlanarFlow& flow, double t, const QuadrantPoint& p);

struct ContinuitySample {
  double x_prime = 1.0;
  double t = 0.0;
};

/// Phi^t(p_j) against Phi^t(x') along p_j = (x', x' 2^-j) for j in
/// [first, last]; the residual of a sample is the worst tail distance.
struct ContinuityOptions {
  int first = 8;
  int last = 40;
  int tail = 8;
};

FlowCheckReport check_planar_continuity(const PlanarFlow& flow, std::span<const ContinuitySample> samples,
                                        double tol, const ContinuityOptions& opts = {});
/// Distances |Phi^t(p_j) - Phi^t(x')| for j = first..last.
std::vector<double> continuity_profile(const PlanarFlow& flow, double x_prime, double t,
                                       const ContinuityOptions& opts = {});

struct SynthesisOptions {
  BoundaryFlowOptions boundary{};
  PlanarFlowOptions planar{};
  MatchingOptions matching{};
  int gate_grid = 5;  // four-point gate grid per axis
  double delta_anchor = 1.0;        // Delta' anchor used by the Delta flow
  double delta_prime_anchor = 1.0;  // Delta anchor used by the Delta' flow
  bool allow_unsupported = false;
};

struct Synthesis {
  MatchingReport four_point;
  MatchingReport eight_point;
  bool supported = false;
  std::vector<std::string> notes;
  std::shared_ptr<const PlanarFlow> flow;
};

/// Runs the matching gate and, when it passes (or the override is set), the
/// boundary and planar flows. Throws DomainError("unsupported input ...")
/// when the gate fails without the override.
Synthesis synthesize(const ReebHomeo& f, const SynthesisOptions& opts = {});

/// Eight-point tuples used by the gate.
std::vector<EightPointTuple> default_eight_point_tuples();

}  // namespace reebflow
