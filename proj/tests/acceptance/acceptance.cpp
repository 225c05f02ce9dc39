// One line per acceptance criterion; exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "reebflow/flow_synthesis.hpp"
#include "reebflow/flowable_pair.hpp"
#include "reebflow/matching.hpp"
#include "reebflow/reeb_model.hpp"

using namespace reebflow;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome below(double measured, double tol, const std::string& what = "max error") {
  return {measured < tol, what + " " + fmt(measured) + " < " + fmt(tol)};
}

Outcome c1_sqrt() {
  const Homeo1D s = sqrt_of(cubic_pair());
  double worst = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double x = -8.0 + 16.0 * i / 511.0;
    worst = std::max(worst, std::abs(s(x) - std::cbrt(x * x * x + 0.5)));
  }
  return below(worst, 1e-6);
}

Outcome c2_flow() {
  // The cube-root flow is only Hoelder in t near its cusp, so the dyadic
  // bracket needs a deep sequence to close to 1e-9.
  const HalvingSequence hs(cubic_pair(), 80);
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double t = -2.0 + 4.0 * i / 40.0;
    for (double x = -2.0; x <= 2.0; x += 0.25)
      worst = std::max(worst, std::abs(hs.flow(t, x).value - std::cbrt(x * x * x + t)));
  }
  return below(worst, 1e-6);
}

Outcome c3_levels() {
  std::string detail;
  bool ok = true;
  const std::pair<const char*, FlowablePair> pairs[] = {{"translation", translation_pair()}, {"cubic", cubic_pair()}};
  for (const auto& [name, pair] : pairs) {
    const HalvingSequence hs(pair, 20);
    double prev = INFINITY, dev = 0.0;
    bool decreasing = true;
    for (int k = 0; k <= 20; ++k) {
      dev = 0.0;
      for (int i = 0; i < 4097; ++i) {
        const double x = -8.0 + 16.0 * i / 4096.0;
        dev = std::max(dev, std::abs(hs.level(k)(x) - x));
      }
      decreasing = decreasing && dev < prev;
      prev = dev;
    }
    ok = ok && decreasing && dev < 1e-3;
    detail += std::string(detail.empty() ? "" : ", ") + name + " k=20 deviation " + fmt(dev) +
              (decreasing ? " decreasing" : " not decreasing");
  }
  return {ok, detail + " (< 0.001)"};
}

Outcome c4_beta() {
  const BetaProfile p;
  bool ok = true;
  double prev_r1 = -INFINITY, prev_r2 = -INFINITY;
  for (int i = 0; i <= 100000; ++i) {
    const double th = 0.5 + 1.5 * i / 100000.0;
    const double b = p(th);
    const bool flat = th <= 0.75 || (th >= 1.0 && th <= 1.5) || th == 2.0;
    ok = ok && (flat ? b == 1.0 : b > 1.0);
    if (th <= 1.0) ok = ok && b == p(2.0 * th);
    ok = ok && th / b > prev_r1 && th / (b * b) > prev_r2;
    prev_r1 = th / b;
    prev_r2 = th / (b * b);
  }
  const double slope = BetaProfile::min_h_slope(p.amplitude());
  ok = ok && slope >= 0.75 + 0.05;
  return {ok, std::string("properties ") + (ok ? "hold" : "violated") + ", min h' " + fmt(slope) + " >= 0.8"};
}

Outcome c5_closed_form() {
  const ReebHomeo f = ReebHomeo::counterexample();
  const BetaProfile profile;
  prop::Gen gen(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto x0 = gen.admissible_start();
    const int n = gen.integer(0, 60);
    const auto d = f.iterate(x0, n);
    const auto c = iterate_closed_form(x0, n, profile);
    worst = std::max({worst, std::abs(d.lx() - c.lx()), std::abs(d.ly() - c.ly())});
  }
  return below(worst, 1e-12, "max log error");
}

Outcome c6_four_point() {
  const auto grid = default_four_point_grid(10);
  const auto g = check_four_point(ReebHomeo::hyperbolic_g(), grid);
  const auto f = check_four_point(ReebHomeo::counterexample(), grid);
  const bool ok = g.passed && f.passed && g.max_residual < 1e-8 && f.max_residual < 1e-8;
  return {ok, "g " + std::string(g.passed ? "pass" : "fail") + " " + fmt(g.max_residual) + ", counterexample " +
                  (f.passed ? "pass" : "fail") + " " + fmt(f.max_residual) + " (< 1e-08)"};
}

Outcome c7_eight_point() {
  const CounterexampleParams params;
  const auto tuple = counterexample_eight_points(params);
  const auto g = check_eight_point(ReebHomeo::hyperbolic_g(), tuple);
  const auto g2 = check_eight_point(ReebHomeo::hyperbolic_g(), default_eight_point_tuples().back());
  const auto f = check_eight_point(ReebHomeo::counterexample(), tuple);
  const double expected = (beta(BetaProfile{}, params.delta * params.delta * params.b / params.a) - 1.0) *
                          params.a / params.delta;
  const double rel = std::abs(f.residual - expected) / expected;
  const bool ok = g.passed && g2.passed && g.residual < 1e-8 && g2.residual < 1e-8 && !f.passed && rel < 0.01;
  return {ok, "g residual " + fmt(std::max(g.residual, g2.residual)) + " (< 1e-08), counterexample " +
                  (f.passed ? "pass" : "fail") + " residual " + fmt(f.residual) + " vs " + fmt(expected) +
                  " rel " + fmt(rel) + " (< 0.01)"};
}

Outcome c8_section6() {
  const CounterexampleParams params;
  const auto t = reproduce_section6(BetaProfile{}, params);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i)
    worst = std::max({worst, std::abs(t.rows[i].direct - t.rows[i].closed_form),
                      std::abs(t.rows[i].via_alpha - t.rows[i].closed_form)});
  const double eighth = t.rows.back().direct - t.rows.back().nominal;
  const double rel = std::abs(eighth - oracle::kEightPointResidual) / oracle::kEightPointResidual;
  const bool ok = t.rows.size() == 8 && worst < 1e-9 && rel < 0.01;
  return {ok, "rows 1-7 max error " + fmt(worst) + " (< 1e-09), row 8 deviation " + fmt(eighth) + " rel " +
                  fmt(rel) + " (< 0.01)"};
}

const Synthesis& g_synthesis() {
  static const Synthesis s = synthesize(ReebHomeo::hyperbolic_g());
  return s;
}

Outcome c9_boundary_flow() {
  const BoundaryFlow& base = g_synthesis().flow->flow_delta();
  const BoundaryFlow other = boundary_flow(ReebHomeo::hyperbolic_g(), Side::delta, 1.7);
  double oracle_err = 0.0, anchor_gap = 0.0;
  for (int i = 0; i <= 16; ++i) {
    const double t = -2.0 + 4.0 * i / 16.0;
    for (int j = 0; j <= 8; ++j) {
      const double y = std::exp2(-1.0 + 2.0 * j / 8.0);
      const double v = base(t, y);
      oracle_err = std::max(oracle_err, std::abs(v - std::exp2(-t) * y));
      anchor_gap = std::max(anchor_gap, std::abs(v - other(t, y)));
    }
  }
  return {oracle_err < 1e-6 && anchor_gap < 1e-6,
          "oracle error " + fmt(oracle_err) + ", anchor gap " + fmt(anchor_gap) + " (< 1e-06)"};
}

Outcome c10_planar_flow() {
  const auto& s = g_synthesis();
  const PlanarFlow& flow = *s.flow;
  prop::Gen gen(10);
  double err = 0.0, add = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = QuadrantPoint::from_xy(gen.log_uniform(0.125, 8.0), gen.log_uniform(0.125, 8.0));
    const double t = gen.uniform(-3.0, 3.0);
    const auto q = flow(t, p);
    err = std::max({err, std::abs(q.x() - std::exp2(t) * p.x()), std::abs(q.y() - std::exp2(-t) * p.y())});
    const double a = gen.uniform(-1.5, 1.5), b = gen.uniform(-1.5, 1.5);
    const auto lhs = flow(a, flow(b, p)), rhs = flow(a + b, p);
    add = std::max({add, std::abs(lhs.x() - rhs.x()), std::abs(lhs.y() - rhs.y())});
  }
  std::vector<ConsistencySample> samples;
  for (double x : {0.6, 1.0, 1.7})
    for (double xp : {0.7, 1.4})
      for (double t : {-1.0, 0.5, 1.25}) samples.push_back({x, xp, t});
  const auto rep = check_boundary_consistency(flow.map(), flow.flow_delta(), flow.flow_delta_prime(), samples, 1e-6);
  const bool ok = s.supported && err < 1e-6 && add < 1e-6 && rep.passed() && rep.max_residual < 1e-6;
  return {ok, "flow error " + fmt(err) + ", additivity " + fmt(add) + ", consistency " + fmt(rep.max_residual) +
                  " (< 1e-06)"};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c11_cli() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "reebflow_acceptance";
  fs::create_directories(dir);
  struct Example {
    std::vector<std::string> args;
    const char* out_flag;
    int expected;
  };
  const Example examples[] = {
      {{"check", "eight-point", "--model", "hyperbolic_g"}, "--out", 0},
      {{"check", "eight-point", "--model", "counterexample"}, "--out", 1},
      {{"plot", "figure1"}, "--svg", 0},
  };
  bool ok = true;
  std::string codes;
  for (std::size_t i = 0; i < std::size(examples); ++i) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = examples[i].args;
      const std::string out = (dir / ("example" + std::to_string(i) + "_" + std::to_string(rep))).string();
      args.insert(args.end(), {examples[i].out_flag, out});
      const int code = cli::run(args);
      if (rep == 0) codes += (codes.empty() ? "" : ",") + std::to_string(code);
      ok = ok && code == examples[i].expected;
      const std::string text = slurp(out);
      ok = ok && !text.empty();
      if (rep == 0) first = text;
      else ok = ok && text == first;
    }
  }
  fs::remove_all(dir);
  return {ok, "exit codes " + codes + " (expected 0,1,0), reports " + (ok ? "deterministic" : "differ or missing")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"square-root oracle", c1_sqrt},
      {"flow uniqueness oracle", c2_flow},
      {"halving levels tend to identity", c3_levels},
      {"beta profile properties", c4_beta},
      {"closed-form iterate", c5_closed_form},
      {"four-point checker", c6_four_point},
      {"eight-point checker", c7_eight_point},
      {"counterexample limit table", c8_section6},
      {"boundary-flow oracle", c9_boundary_flow},
      {"planar flow", c10_planar_flow},
      {"end-to-end CLI", c11_cli},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", n, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
