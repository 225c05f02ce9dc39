#include "reebflow/flow_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reebflow/error.hpp"
#include "reebflow/parallel.hpp"

namespace reebflow {

EquivClassMap approx_relation_as_phi(const ReebHomeo& f, Side side, double anchor, const MatchingOptions& opts) {
  if (!(anchor > 0.0) || !std::isfinite(anchor)) throw DomainError("relation anchor needs a positive coordinate");
  if (side == Side::delta) {
    const auto x_prime = BoundaryPoint::on_delta_prime(anchor);
    return EquivClassMap(
        [f, x_prime, opts](double u1, double v1, double u2) {
          const double y_prime = TransferMap(f, BoundaryPoint::on_delta(std::exp(u1)), x_prime, opts).forward(std::exp(v1));
          return std::log(TransferMap(f, BoundaryPoint::on_delta(std::exp(u2)), x_prime, opts).inverse(y_prime));
        },
        "approx_delta");
  }
  const auto x = BoundaryPoint::on_delta(anchor);
  return EquivClassMap(
      [f, x, opts](double u1, double v1, double u2) {
        const double y = TransferMap(f, x, BoundaryPoint::on_delta_prime(std::exp(u1)), opts).inverse(std::exp(v1));
        return std::log(TransferMap(f, x, BoundaryPoint::on_delta_prime(std::exp(u2)), opts).forward(y));
      },
      "approx_delta_prime");
}

Homeo1D boundary_map(const ReebHomeo& f, Side side) {
  auto forward = [f, side](double u) { return std::log(f.forward(BoundaryPoint{side, std::exp(u)}).coord); };
  auto backward = [f, side](double u) { return std::log(f.backward(BoundaryPoint{side, std::exp(u)}).coord); };
  return Homeo1D(forward, RealMap(backward), std::string("f|") + side_name(side));
}

BoundaryFlow::BoundaryFlow(Side side, double anchor, HalvingSequence halving, FlowOptions flow_opts)
    : side_(side),
      anchor_(anchor),
      halving_(std::make_shared<const HalvingSequence>(std::move(halving))),
      flow_opts_(flow_opts) {}

FlowEvaluation BoundaryFlow::evaluate_log(double t, double u) const { return halving_->flow(t, u, flow_opts_); }

double BoundaryFlow::operator()(double t, double coord) const {
  if (!(coord > 0.0) || !std::isfinite(coord)) throw DomainError("boundary flow needs a positive coordinate");
  return std::exp(evaluate_log(t, std::log(coord)).value);
}

BoundaryPoint BoundaryFlow::operator()(double t, BoundaryPoint p) const {
  if (p.side != side_) throw DomainError("boundary flow applied to a point of the other ray");
  return {side_, (*this)(t, p.coord)};
}

BoundaryFlow boundary_flow(const ReebHomeo& f, Side side, double anchor, const BoundaryFlowOptions& opts) {
  FlowablePair pair(approx_relation_as_phi(f, side, anchor, opts.matching), boundary_map(f, side));
  HalvingOptions h;
  h.storage = opts.storage;
  h.window_lo = opts.window_lo;
  h.window_hi = opts.window_hi;
  h.knots = opts.knots;
  h.tol = opts.sqrt_tol;
  return BoundaryFlow(side, anchor, HalvingSequence(std::move(pair), opts.depth, h),
                      FlowOptions{opts.flow_tol, opts.horizon});
}

FlowCheckReport check_boundary_consistency(const ReebHomeo& f, const BoundaryFlow& flow_delta,
                                           const BoundaryFlow& flow_delta_prime,
                                           std::span<const ConsistencySample> samples, double tol,
                                           const MatchingOptions& opts) {
  FlowCheckReport report;
  report.check = "boundary_consistency";
  report.tol = tol;
  report.residuals = parallel_map<double>(samples.size(), [&](std::size_t i) {
    const auto& s = samples[i];
    try {
      const double y = flow_delta(s.t, s.x);
      const double y_prime = TransferMap(f, BoundaryPoint::on_delta(s.x), BoundaryPoint::on_delta_prime(s.x_prime), opts)
                                 .forward(y);
      return std::abs(y_prime - flow_delta_prime(s.t, s.x_prime));
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  });
  for (double r : report.residuals) {
    report.max_residual = std::max(report.max_residual, r);
    if (!(r <= tol)) ++report.failures;
  }
  return report;
}

PlanarFlow::PlanarFlow(ReebHomeo f, BoundaryFlow flow_delta, BoundaryFlow flow_delta_prime, PlanarFlowOptions opts)
    : f_(std::move(f)), delta_(std::move(flow_delta)), delta_prime_(std::move(flow_delta_prime)), opts_(opts) {
  if (delta_.side() != Side::delta || delta_prime_.side() != Side::delta_prime)
    throw DomainError("planar flow needs a Delta flow and a Delta' flow");
}

double PlanarFlow::time_coordinate(const QuadrantPoint& p) const {
  const double lc = p.leaf_log();
  const QuadrantPoint sigma = QuadrantPoint::on_leaf(lc, 0.5 * lc);
  const double lo = sigma.lx();
  const double hi = f_.forward(sigma).lx();
  QuadrantPoint q = p;
  long n = 0;
  for (int steps = 0; q.lx() < lo || q.lx() >= hi; ++steps) {
    if (steps >= opts_.max_steps) throw NumericalError("time coordinate overflow");
    if (q.lx() < lo) {
      q = f_.forward(q);
      --n;
    } else {
      q = f_.backward(q);
      ++n;
    }
  }
  return static_cast<double>(n) + (q.lx() - lo) / (hi - lo);
}

QuadrantPoint PlanarFlow::point_at(double leaf_log, double tau) const {
  if (!std::isfinite(tau)) throw DomainError("non-finite time coordinate");
  const double whole = std::floor(tau);
  if (std::abs(whole) > opts_.max_steps) throw NumericalError("time coordinate overflow");
  const QuadrantPoint sigma = QuadrantPoint::on_leaf(leaf_log, 0.5 * leaf_log);
  const double lo = sigma.lx();
  const double hi = f_.forward(sigma).lx();
  const QuadrantPoint q = QuadrantPoint::on_leaf(leaf_log, lo + (tau - whole) * (hi - lo));
  return f_.iterate(q, static_cast<long>(whole));
}

QuadrantPoint PlanarFlow::operator()(double t, const QuadrantPoint& p) const {
  if (!std::isfinite(t)) throw DomainError("non-finite flow time");
  if (t == std::floor(t)) {
    if (std::abs(t) > opts_.max_steps) throw NumericalError("time coordinate overflow");
    return f_.iterate(p, static_cast<long>(t));
  }
  return point_at(p.leaf_log(), time_coordinate(p) + t);
}

BoundaryPoint PlanarFlow::operator()(double t, const BoundaryPoint& p) const {
  return p.side == Side::delta ? delta_(t, p) : delta_prime_(t, p);
}

QuadrantPoint planar_flow(const PlanarFlow& flow, double t, const QuadrantPoint& p) { return flow(t, p); }

std::vector<double> continuity_profile(const PlanarFlow& flow, double x_prime, double t, const ContinuityOptions& opts) {
  const double target = flow(t, BoundaryPoint::on_delta_prime(x_prime)).coord;
  std::vector<double> out;
  for (int j = opts.first; j <= opts.last; ++j) {
    const QuadrantPoint p = QuadrantPoint::from_logs(std::log(x_prime), std::log(x_prime) - j * kLn2);
    const QuadrantPoint q = flow(t, p);
    out.push_back(std::hypot(q.x() - target, q.y()));
  }
  return out;
}

FlowCheckReport check_planar_continuity(const PlanarFlow& flow, std::span<const ContinuitySample> samples, double tol,
                                        const ContinuityOptions& opts) {
  FlowCheckReport report;
  report.check = "planar_continuity";
  report.tol = tol;
  report.residuals = parallel_map<double>(samples.size(), [&](std::size_t i) {
    try {
      const auto profile = continuity_profile(flow, samples[i].x_prime, samples[i].t, opts);
      const auto tail = std::min<std::size_t>(profile.size(), static_cast<std::size_t>(std::max(1, opts.tail)));
      return *std::max_element(profile.end() - static_cast<std::ptrdiff_t>(tail), profile.end());
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  });
  for (double r : report.residuals) {
    report.max_residual = std::max(report.max_residual, r);
    if (!(r <= tol)) ++report.failures;
  }
  return report;
}

std::vector<EightPointTuple> default_eight_point_tuples() {
  std::vector<EightPointTuple> out;
  out.push_back(counterexample_eight_points(CounterexampleParams{}));
  EightPointTuple generic;
  generic.x1 = 0.8;
  generic.y1 = 0.6;
  generic.x2 = 1.3;
  generic.y2 = 0.9;
  generic.x_prime1 = 1.1;
  generic.x_prime2 = 0.7;
  out.push_back(generic);
  return out;
}

Synthesis synthesize(const ReebHomeo& f, const SynthesisOptions& opts) {
  Synthesis out;
  const auto grid = default_four_point_grid(opts.gate_grid);
  out.four_point = check_four_point(f, grid, opts.matching);
  out.eight_point.check = "eight_point";
  out.eight_point.passed = true;
  for (const auto& tuple : default_eight_point_tuples()) {
    MatchingReport r = check_eight_point(f, tuple, opts.matching);
    out.eight_point.threshold = r.threshold;
    out.eight_point.tol = r.tol;
    out.eight_point.passed = out.eight_point.passed && r.passed;
    out.eight_point.residual = std::max(out.eight_point.residual, r.residual);
    out.eight_point.max_residual = std::max(out.eight_point.max_residual, r.max_residual);
    for (auto& c : r.cases) out.eight_point.cases.push_back(std::move(c));
  }
  out.supported = out.four_point.passed && out.eight_point.passed;
  if (!out.supported) {
    if (!opts.allow_unsupported)
      throw DomainError("unsupported input: " + f.name() + " fails the " +
                        (out.four_point.passed ? "eight" : "four") + "-point matching check");
    out.notes.push_back("unsupported input");
  }
  BoundaryFlow d = boundary_flow(f, Side::delta, opts.delta_anchor, opts.boundary);
  BoundaryFlow dp = boundary_flow(f, Side::delta_prime, opts.delta_prime_anchor, opts.boundary);
  out.flow = std::make_shared<const PlanarFlow>(f, std::move(d), std::move(dp), opts.planar);
  return out;
}

}  // namespace reebflow
