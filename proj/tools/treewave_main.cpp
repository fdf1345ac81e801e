#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "treewave/chaos.hpp"
#include "treewave/comparison.hpp"
#include "treewave/dynamics.hpp"
#include "treewave/kernels.hpp"
#include "treewave/nonlinearity.hpp"
#include "treewave/regions.hpp"
#include "treewave/wave_solver.hpp"

using namespace treewave;

namespace {

// All numeric output goes through one formatter so runs are byte-identical.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_or_empty(double x) { return std::isnan(x) ? "" : fmt(x); }

const char* fmt_bool(bool b) { return b ? "true" : "false"; }

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("step counts must be >= 1");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    v.push_back(lo);
    return v;
  }
  for (int i = 0; i < steps; ++i)
    v.push_back(lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(steps - 1));
  return v;
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    os = &file;
  }
  std::ostream& stream() { return *os; }
};

struct GlobalFlags {
  std::string out;
  int threads = 0;
  std::uint64_t seed = 12345;
  bool quiet = false;
};

void note(const GlobalFlags& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << "\n";
}

DiffusionSchedule parse_schedule(const std::string& text) {
  if (text == "reversal") return DiffusionSchedule::reversal();
  const std::string prefix = "const:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t pos = 0;
    double d = std::stod(text.substr(prefix.size()), &pos);
    if (pos != text.size() - prefix.size())
      throw std::invalid_argument("schedule must be const:<d> or reversal");
    return DiffusionSchedule::constant(d);
  }
  throw std::invalid_argument("schedule must be const:<d> or reversal");
}

std::vector<int> parse_word(const std::string& text) {
  std::vector<int> word;
  word.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1')
      throw std::invalid_argument("the word must consist of 0 and 1 only");
    word.push_back(ch - '0');
  }
  if (word.empty()) throw std::invalid_argument("the word must be non-empty");
  return word;
}

// ---------------------------------------------------------------- speed --

struct SpeedArgs {
  double a = 0.5, d = 0.1, k = 2.0;
  double L = 20.0;
  int i0 = 8;
};

int run_speed(const SpeedArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  System s = System::cubic(args.a, args.d, args.k);
  WaveGrid grid = WaveGrid::make(args.L, args.i0);
  WaveSolution sol = solve_adaptive(s, grid);
  out.stream() << "c," << fmt(sol.c) << ",converged,"
               << fmt_bool(sol.converged) << ",residual,"
               << fmt(sol.residual_norm) << "\n";
  return sol.converged ? 0 : 3;
}

// ----------------------------------------------------------------- scan --

struct ScanArgs {
  double a_min = 0.05, a_max = 0.95;
  int a_steps = 19;
  double d_min = 0.01, d_max = 0.5;
  int d_steps = 10;
  double k = 2.0;
  double L = 20.0;
  int i0 = 8;
};

int run_scan(const ScanArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  System tmpl = System::cubic(0.5, args.d_min, args.k);
  std::vector<double> a_values = linspace(args.a_min, args.a_max, args.a_steps);
  std::vector<double> d_values = linspace(args.d_min, args.d_max, args.d_steps);
  WaveGrid grid = WaveGrid::make(args.L, args.i0);
  int threads = g.threads;
  if (threads <= 0)
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  SpeedMap map = sweep(tmpl, a_values, d_values, grid, threads);

  std::ostream& os = out.stream();
  os << "a,d,c,converged,pinned\n";
  for (std::size_t di = 0; di < map.d_values.size(); ++di) {
    for (std::size_t ai = 0; ai < map.a_values.size(); ++ai) {
      std::size_t idx = di * map.a_values.size() + ai;
      os << fmt(map.a_values[ai]) << ',' << fmt(map.d_values[di]) << ','
         << fmt(map.c[idx]) << ',' << fmt_bool(map.converged[idx] != 0) << ','
         << fmt_bool(map.pinned[idx] != 0) << "\n";
    }
  }
  return 0;
}

// -------------------------------------------------------------- regions --

struct RegionsArgs {
  double k = 2.0;
  int a_steps = 241;
};

int run_regions(const RegionsArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  CubicBoundary cb = cubic_boundaries(args.k, args.a_steps);
  std::ostream& os = out.stream();
  os << "a,d_minus,d_plus,d_star,d0,dminus_min,dminus_max,dplus_min,"
        "dplus_max\n";
  for (std::size_t i = 0; i < cb.a_grid.size(); ++i) {
    os << fmt(cb.a_grid[i]) << ',' << fmt_or_empty(cb.d_minus_curve[i]) << ','
       << fmt_or_empty(cb.d_plus_curve[i]) << ','
       << fmt_or_empty(cb.d_star_curve[i]) << ','
       << fmt_or_empty(cb.d0_curve[i]) << ','
       << fmt_or_empty(cb.dminus_min_curve[i]) << ','
       << fmt_or_empty(cb.dminus_max_curve[i]) << ','
       << fmt_or_empty(cb.dplus_min_curve[i]) << ','
       << fmt_or_empty(cb.dplus_max_curve[i]) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- classify --

struct ClassifyArgs {
  double a = 0.5, d = 0.1, k = 2.0;
};

int run_classify(const ClassifyArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  System s = System::cubic(args.a, args.d, args.k);
  Classification cls = classify(s);
  std::ostream& os = out.stream();
  os << "a,d,verdict,witness_A\n";
  os << fmt(args.a) << ',' << fmt(args.d) << ',' << to_string(cls.verdict)
     << ',' << (cls.witness_A ? fmt(*cls.witness_A) : "") << "\n";
  return 0;
}

// ------------------------------------------------------------- simulate --

struct SimulateArgs {
  double a = 0.5, k = 2.0;
  std::string schedule = "const:0.1";
  double t_end = 100.0;
  double dt = 0.0;  // 0: pick 90% of the stability limit
  double sample_dt = 0.0;
  int i_min = -60, i_max = 60;
};

int run_simulate(const SimulateArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  DiffusionSchedule sched = parse_schedule(args.schedule);
  System s = System::cubic(args.a, sched.max_over(0.0, args.t_end), args.k);
  double dt = args.dt;
  if (dt <= 0.0) dt = 0.9 * stability_limit(s, sched, 0.0, args.t_end);
  double sample_dt = args.sample_dt;
  if (sample_dt <= 0.0) sample_dt = std::max(dt, args.t_end / 100.0);

  LatticeState st = LatticeState::step_front(args.i_min, args.i_max);
  std::ostream& os = out.stream();
  os << "t,i,u\n";
  double next_sample = 0.0;
  double last_emitted = -1.0;
  auto emit = [&](double t, const LatticeState& state) {
    for (int i = state.lo; i <= state.hi; ++i)
      os << fmt(t) << ',' << i << ',' << fmt(state.at(i)) << "\n";
    last_emitted = t;
  };
  LatticeObserver obs = [&](double t, const LatticeState& state) {
    if (t + 1e-9 >= next_sample) {
      emit(t, state);
      while (next_sample <= t + 1e-9) next_sample += sample_dt;
    }
  };
  LatticeState final_state =
      integrate(s, sched, std::move(st), 0.0, args.t_end, dt, obs);
  if (last_emitted < args.t_end - 1e-9) emit(args.t_end, final_state);
  return 0;
}

struct SimulateTreeArgs {
  double a = 0.5, k = 2.0;
  std::string schedule = "const:0.1";
  double t_end = 50.0;
  double dt = 0.0;
  double sample_dt = 0.0;
  int i_min = -6, i_max = 6;
};

int run_simulate_tree(const SimulateTreeArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  double k_round = std::round(args.k);
  if (std::abs(args.k - k_round) > 1e-12 || k_round < 1.0)
    throw std::invalid_argument(
        "tree simulation needs an integer branching factor k >= 1");
  int k_int = static_cast<int>(k_round);
  DiffusionSchedule sched = parse_schedule(args.schedule);
  System s =
      System::cubic(args.a, sched.max_over(0.0, args.t_end), args.k);
  double dt = args.dt;
  if (dt <= 0.0) dt = 0.9 * stability_limit(s, sched, 0.0, args.t_end);
  double sample_dt = args.sample_dt;
  if (sample_dt <= 0.0) sample_dt = std::max(dt, args.t_end / 100.0);

  std::vector<double> layer_values;
  for (int i = args.i_min; i <= args.i_max; ++i)
    layer_values.push_back(i < 0 ? 0.0 : 1.0);
  TreeState st = TreeState::layered(args.i_min, args.i_max, k_int,
                                     layer_values);
  std::ostream& os = out.stream();
  os << "t,layer,node,u\n";
  double next_sample = 0.0;
  double last_emitted = -1.0;
  auto emit = [&](double t, const TreeState& state) {
    for (std::size_t l = 0; l < state.layers.size(); ++l)
      for (std::size_t j = 0; j < state.layers[l].size(); ++j)
        os << fmt(t) << ',' << state.i_min + static_cast<int>(l) << ',' << j
           << ',' << fmt(state.layers[l][j]) << "\n";
    last_emitted = t;
  };
  TreeObserver obs = [&](double t, const TreeState& state) {
    if (t + 1e-9 >= next_sample) {
      emit(t, state);
      while (next_sample <= t + 1e-9) next_sample += sample_dt;
    }
  };
  TreeState final_state =
      integrate_tree(s, sched, std::move(st), 0.0, args.t_end, dt, obs);
  if (last_emitted < args.t_end - 1e-9) emit(args.t_end, final_state);
  return 0;
}

// ------------------------------------------------------------- reversal --

struct ReversalArgs {
  double a = 0.72, k = 2.0;
  double dt = 0.2;
};

int run_reversal(const ReversalArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  ReversalResult res = reversal_demo(args.k, args.a, args.dt);
  std::ostream& os = out.stream();
  os << "time,front_position,phase\n";
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    os << fmt(res.times[i]) << ',' << fmt(res.positions[i]) << ','
       << (i == 0 ? std::string() : res.phases[i - 1]) << "\n";
  }
  os << "expected_sequence," << fmt_bool(res.expected_sequence) << "\n";
  return 0;
}

// ------------------------------------------------------------ check-sub --

struct CheckSubArgs {
  std::string family;
  double a = 0.5, d = 0.1, k = 2.0;
  double A = 0.0;   // 0: pick automatically
  double l = 0.0;   // 0: sqrt(k)
  double xi0 = 0.0, xi1 = 0.5;
};

int run_check_sub(const CheckSubArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  System s = System::cubic(args.a, args.d, args.k);
  s.validate();

  Certificate cert;
  if (args.family == "steep") {
    double A = args.A;
    if (A <= 0.0) {
      Membership mem = in_D_minus(s);
      A = mem.inside && mem.witness_A ? *mem.witness_A : (1.0 + args.a) / 2.0;
    }
    cert = build_steep(s, A, args.xi0, args.xi1);
  } else {
    double l = args.l > 0.0 ? args.l : std::sqrt(args.k);
    double A = args.A;
    if (A <= 0.0) A = args.a <= 0.99 ? 0.99 : (1.0 + args.a) / 2.0;
    cert = build_wide(s, l, A);
  }

  std::ostream& os = out.stream();
  os << "xi,I_value\n";
  std::vector<double> grid =
      linspace(cert.psi.active_lo - 2.0, cert.psi.active_hi + 2.0, 2001);
  ResidualScan scan = residual_op(s, cert.cbar, cert.psi, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << fmt(grid[i]) << ',' << fmt(scan.values[i]) << "\n";
  VerifyReport rep = verify_certificate(s, cert);
  os << "pass," << fmt_bool(rep.pass) << ",cbar," << fmt(cert.cbar) << ",maxI,"
     << fmt(rep.max_residual) << "\n";
  note(g, "certificate " + cert.family + ": epsilon = " + fmt(cert.epsilon) +
              ", grid points = " + std::to_string(rep.n_points));
  return 0;
}

// ---------------------------------------------------------------- chaos --

struct ChaosArgs {
  double a = 0.52, d = 0.014, k = 2.0;
  std::string word;
  int pad = 8;
};

int run_chaos(const ChaosArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  System s = System::cubic(args.a, args.d, args.k);
  SymbolOrbit orbit = steady_state_from_word(s, parse_word(args.word),
                                             args.pad);
  std::ostream& os = out.stream();
  os << "i,s_i,u_i\n";
  for (std::size_t j = 0; j < orbit.values.size(); ++j) {
    int i = static_cast<int>(j) - orbit.pad;
    os << i << ',' << orbit.symbols[j] << ',' << fmt(orbit.values[j]) << "\n";
  }
  note(g, std::string("converged=") + fmt_bool(orbit.converged) +
              " residual=" + fmt(orbit.residual_norm) +
              " membership=" + fmt_bool(orbit.membership_ok));
  return orbit.converged ? 0 : 3;
}

struct ChaosStripsArgs {
  double a = 0.52, d = 0.014, k = 2.0;
  int samples = 200;
};

int run_chaos_strips(const ChaosStripsArgs& args, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  System s = System::cubic(args.a, args.d, args.k);
  std::optional<HdCertificate> cert = check_Hd(s);
  if (!cert) {
    std::cerr << "the steepness hypotheses fail at these parameters; "
                 "no strips exist\n";
    return 2;
  }
  Strips strips = build_strips(s, *cert, args.samples);
  std::ostream& os = out.stream();
  os << "curve,u,v\n";
  for (const auto& curve : strips.curves)
    for (const auto& pt : curve.pts)
      os << curve.name << ',' << fmt(pt[0]) << ',' << fmt(pt[1]) << "\n";
  return 0;
}

// ------------------------------------------------------------- selftest --

int run_selftest(bool inject_fault, const GlobalFlags& g) {
  Output out;
  out.open(g.out);
  std::ostream& os = out.stream();
  os << "check,pass\n";
  bool all = true;
  auto report = [&](const std::string& name, bool pass) {
    os << name << ',' << fmt_bool(pass) << "\n";
    all = all && pass;
  };

  // Closed forms against the general-purpose scan path on an identical
  // nonlinearity registered as custom.
  {
    Nonlinearity cubic_as_custom = Nonlinearity::custom(
        "cubic-scan",
        [](double v, double a) { return v * (1.0 - v) * (v - a); },
        [](double v, double a) {
          return -3.0 * v * v + 2.0 * (1.0 + a) * v - a;
        },
        [](double v, double a) { return -6.0 * v + 2.0 * (1.0 + a); },
        [](double v, double) { return -v * (1.0 - v); });
    Nonlinearity cubic = Nonlinearity::cubic();
    bool pass = true;
    for (auto [a, k] : {std::pair{0.3, 2.0}, {0.52, 2.0}, {0.1933, 5.0},
                        {0.7, 0.5}}) {
      double dm_scan = d_minus(cubic_as_custom, a);
      double dp_scan = d_plus(cubic_as_custom, a, k);
      double A = (1.0 + a) / 2.0;
      double dd_scan = d_diamond(cubic_as_custom, A, a, k);
      double dm_closed = d_minus(cubic, a);
      double dp_closed = d_plus(cubic, a, k);
      if (inject_fault) dp_closed = -dp_closed;
      double dd_closed = d_diamond(cubic, A, a, k);
      pass = pass && std::abs(dm_scan - dm_closed) < 1e-8 &&
             std::abs(dp_scan - dp_closed) < 1e-8 &&
             std::abs(dd_scan - dd_closed) < 1e-8;
    }
    report("closed_forms_vs_scan", pass);
  }

  // k = 1 speed antisymmetry c(a) = -c(1-a).
  {
    WaveGrid grid = WaveGrid::make(20.0, 8);
    WaveSolution left = solve_adaptive(System::cubic(0.3, 0.1, 1.0), grid);
    WaveSolution right = solve_adaptive(System::cubic(0.7, 0.1, 1.0), grid);
    bool pass = left.converged && right.converged &&
                std::abs(left.c + right.c) < 1e-3;
    report("speed_antisymmetry", pass);
  }

  // Analytic Jacobian against finite differences of the residual.
  {
    System s = System::cubic(0.35, 0.08, 2.0);
    WaveGrid grid = WaveGrid::make(5.0, 4);
    int n = grid.n();
    std::mt19937_64 rng(g.seed);
    auto uniform = [&rng]() {
      return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    std::vector<double> values(static_cast<std::size_t>(n - 1));
    for (auto& v : values) v = 0.2 + 0.6 * uniform();
    double c = -0.3 + 0.6 * uniform();
    bool pass = true;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> dphi(values.size());
      for (auto& v : dphi) v = uniform() - 0.5;
      double dc = uniform() - 0.5;
      double h = 1e-6;
      std::vector<double> bumped = values;
      for (std::size_t i = 0; i < bumped.size(); ++i) bumped[i] += h * dphi[i];
      std::vector<double> f0 = residual(s, grid, c, values);
      std::vector<double> f1 = residual(s, grid, c + h * dc, bumped);
      std::vector<double> jv = jacobian_apply(s, grid, c, values, dphi, dc);
      double worst = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < f0.size(); ++i) {
        double fd = (f1[i] - f0[i]) / h;
        worst = std::max(worst, std::abs(fd - jv[i]));
        scale = std::max(scale, std::abs(jv[i]));
      }
      pass = pass && worst <= 1e-5 * std::max(1.0, scale);
    }
    report("jacobian_fd", pass);
  }

  // One short chaos word at the certified parameters.
  {
    System s = System::cubic(0.52, 0.014, 2.0);
    bool pass = false;
    if (auto cert = check_Hd(s)) {
      SymbolOrbit orbit = steady_state_from_word(s, {0, 1, 1, 0});
      pass = orbit.converged && orbit.residual_norm < 1e-12 &&
             orbit.membership_ok;
    }
    report("chaos_word", pass);
  }

  os << "all," << fmt_bool(all) << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "traveling waves, pinning regions, sub-solution certificates and "
      "chaotic steady states for bistable lattice dynamics on k-ary trees"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "plain key=value file; explicit flags take precedence");

  GlobalFlags g;
  app.add_option("--out", g.out, "write CSV here instead of standard output");
  app.add_option("--threads", g.threads,
                 "worker threads for sweeps (default: hardware)");
  app.add_option("--seed", g.seed, "seed for any sampled checks");
  app.add_flag("--quiet", g.quiet, "suppress informational notes on stderr");

  SpeedArgs speed_args;
  auto* speed = app.add_subcommand("speed", "solve one traveling-wave speed");
  speed->fallthrough();
  speed->add_option("--a", speed_args.a, "detuning parameter")->required();
  speed->add_option("--d", speed_args.d, "diffusion")->required();
  speed->add_option("--k", speed_args.k, "branching factor")->required();
  speed->add_option("--L", speed_args.L, "domain half-width");
  speed->add_option("--i0", speed_args.i0, "grid cells per unit shift");

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "speed sweep over an (a,d) grid");
  scan->fallthrough();
  scan->add_option("--a-min", scan_args.a_min, "grid start in a")->required();
  scan->add_option("--a-max", scan_args.a_max, "grid end in a")->required();
  scan->add_option("--a-steps", scan_args.a_steps, "points in a")->required();
  scan->add_option("--d-min", scan_args.d_min, "grid start in d")->required();
  scan->add_option("--d-max", scan_args.d_max, "grid end in d")->required();
  scan->add_option("--d-steps", scan_args.d_steps, "points in d")->required();
  scan->add_option("--k", scan_args.k, "branching factor")->required();
  scan->add_option("--L", scan_args.L, "domain half-width");
  scan->add_option("--i0", scan_args.i0, "grid cells per unit shift");

  RegionsArgs regions_args;
  auto* regions =
      app.add_subcommand("regions", "analytic boundary curves for cubic");
  regions->fallthrough();
  regions->add_option("--k", regions_args.k, "branching factor")->required();
  regions->add_option("--a-steps", regions_args.a_steps, "points in a");

  ClassifyArgs classify_args;
  auto* classify_cmd =
      app.add_subcommand("classify", "region verdict for one (a,d,k)");
  classify_cmd->fallthrough();
  classify_cmd->add_option("--a", classify_args.a, "detuning")->required();
  classify_cmd->add_option("--d", classify_args.d, "diffusion")->required();
  classify_cmd->add_option("--k", classify_args.k, "branching")->required();

  SimulateArgs sim_args;
  auto* simulate =
      app.add_subcommand("simulate", "explicit lattice time integration");
  simulate->fallthrough();
  simulate->add_option("--a", sim_args.a, "detuning")->required();
  simulate->add_option("--k", sim_args.k, "branching factor")->required();
  simulate->add_option("--schedule", sim_args.schedule,
                       "const:<d> or reversal")->required();
  simulate->add_option("--t-end", sim_args.t_end, "final time")->required();
  simulate->add_option("--dt", sim_args.dt,
                       "step (default: 90% of the stability limit)");
  simulate->add_option("--sample-dt", sim_args.sample_dt,
                       "output sampling interval");
  simulate->add_option("--i-min", sim_args.i_min, "window start");
  simulate->add_option("--i-max", sim_args.i_max, "window end");

  SimulateTreeArgs tree_args;
  auto* simulate_tree = app.add_subcommand(
      "simulate-tree", "per-node time integration on the k-ary tree");
  simulate_tree->fallthrough();
  simulate_tree->add_option("--a", tree_args.a, "detuning")->required();
  simulate_tree->add_option("--k", tree_args.k, "integer branching factor")
      ->required();
  simulate_tree->add_option("--schedule", tree_args.schedule,
                            "const:<d> or reversal")->required();
  simulate_tree->add_option("--t-end", tree_args.t_end, "final time")
      ->required();
  simulate_tree->add_option("--dt", tree_args.dt,
                            "step (default: 90% of the stability limit)");
  simulate_tree->add_option("--sample-dt", tree_args.sample_dt,
                            "output sampling interval");
  simulate_tree->add_option("--i-min", tree_args.i_min, "layer window start");
  simulate_tree->add_option("--i-max", tree_args.i_max, "layer window end");

  ReversalArgs reversal_args;
  auto* reversal = app.add_subcommand(
      "reversal", "diffusion-ramp demo: pinned, outward, pinned, inward");
  reversal->fallthrough();
  reversal->add_option("--a", reversal_args.a, "detuning");
  reversal->add_option("--k", reversal_args.k, "branching factor");
  reversal->add_option("--dt", reversal_args.dt, "integration step");

  CheckSubArgs check_args;
  auto* check_sub = app.add_subcommand(
      "check-sub", "build and grid-verify a sub-solution certificate");
  check_sub->fallthrough();
  check_sub->add_option("--family", check_args.family, "steep or wide")
      ->required()
      ->check(CLI::IsMember({"steep", "wide"}));
  check_sub->add_option("--a", check_args.a, "detuning")->required();
  check_sub->add_option("--d", check_args.d, "diffusion")->required();
  check_sub->add_option("--k", check_args.k, "branching factor")->required();
  check_sub->add_option("--A", check_args.A, "plateau level (default: auto)");
  check_sub->add_option("--l", check_args.l,
                        "decay base for the wide family (default: sqrt(k))");
  check_sub->add_option("--xi0", check_args.xi0, "steep ramp start");
  check_sub->add_option("--xi1", check_args.xi1, "steep ramp end");

  ChaosArgs chaos_args;
  auto* chaos =
      app.add_subcommand("chaos", "pinned steady state from a {0,1} word");
  chaos->fallthrough();
  chaos->add_option("--a", chaos_args.a, "detuning")->required();
  chaos->add_option("--d", chaos_args.d, "diffusion")->required();
  chaos->add_option("--k", chaos_args.k, "branching factor")->required();
  chaos->add_option("--word", chaos_args.word, "symbol word, e.g. 01101")
      ->required();
  chaos->add_option("--pad", chaos_args.pad, "tail copies on each side");

  ChaosStripsArgs strips_args;
  auto* chaos_strips = app.add_subcommand(
      "chaos-strips", "sampled horseshoe strip boundary curves");
  chaos_strips->fallthrough();
  chaos_strips->add_option("--a", strips_args.a, "detuning")->required();
  chaos_strips->add_option("--d", strips_args.d, "diffusion")->required();
  chaos_strips->add_option("--k", strips_args.k, "branching factor")
      ->required();
  chaos_strips->add_option("--samples", strips_args.samples,
                           "points per curve");

  bool inject_fault = false;
  auto* selftest =
      app.add_subcommand("selftest", "fast cross-checks of the build");
  selftest->fallthrough();
  selftest->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help();
    return 64;
  }

  try {
    if (speed->parsed()) return run_speed(speed_args, g);
    if (scan->parsed()) return run_scan(scan_args, g);
    if (regions->parsed()) return run_regions(regions_args, g);
    if (classify_cmd->parsed()) return run_classify(classify_args, g);
    if (simulate->parsed()) return run_simulate(sim_args, g);
    if (simulate_tree->parsed()) return run_simulate_tree(tree_args, g);
    if (reversal->parsed()) return run_reversal(reversal_args, g);
    if (check_sub->parsed()) return run_check_sub(check_args, g);
    if (chaos->parsed()) return run_chaos(chaos_args, g);
    if (chaos_strips->parsed()) return run_chaos_strips(strips_args, g);
    if (selftest->parsed()) return run_selftest(inject_fault, g);
  } catch (const certificate_unavailable& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}
