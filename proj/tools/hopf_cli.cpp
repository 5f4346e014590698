// Command-line front end: simulation, equilibrium analysis, theorem
// verification suites, bifurcation sweeps, manifold/orbit export, and the
// compound-matrix certificate. Emits CSV and JSON (stable key order, 17
// significant digits in CSV) suitable for plotting and regression diffing.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hopf/hopf.hpp"

namespace {

using nlohmann::ordered_json;
// Pull in the Vec3 arithmetic operators (std::array does not trigger ADL into
// the library namespace).
using hopf::operator-;
using hopf::operator+;
using hopf::operator*;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

struct ParamCli {
  // scaled block
  std::optional<double> k, k3, k5;
  // original rate-constant block
  std::optional<double> k1, k2, ok3, k4, ok5, A;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--k", k, "growth parameter k, any sign (scaled block)");
    cmd->add_option("--k3", k3, "rate k3 > 0 (scaled block)");
    cmd->add_option("--k5", k5, "rate k5 > 0 (scaled block)");
    cmd->add_option("--k1", k1, "rate k1 > 0 (original block)");
    cmd->add_option("--k2", k2, "rate k2 > 0 (original block)");
    cmd->add_option("--orig-k3", ok3, "rate k3 > 0 (original block)");
    cmd->add_option("--k4", k4, "rate k4 > 0 (original block)");
    cmd->add_option("--orig-k5", ok5, "rate k5 > 0 (original block)");
    cmd->add_option("--A", A, "outer reactant concentration >= 0 (original block)");
  }

  hopf::Params resolve() const {
    const bool has_scaled = k.has_value() || k3.has_value() || k5.has_value();
    const bool has_orig = k1 || k2 || ok3 || k4 || ok5 || A;
    if (has_scaled == has_orig)
      throw CLI::ValidationError(
          "params", "provide exactly one of the scaled (--k/--k3/--k5) or original "
                    "(--k1..--A) parameter blocks");
    if (has_scaled) {
      if (!(k && k3 && k5))
        throw CLI::ValidationError("params", "scaled block requires --k, --k3 and --k5");
      hopf::Params p{*k, *k3, *k5};
      p.validate();
      return p;
    }
    if (!(k1 && k2 && ok3 && k4 && ok5 && A))
      throw CLI::ValidationError("params",
                                 "original block requires --k1 --k2 --orig-k3 --k4 --orig-k5 --A");
    const hopf::OriginalParams op{*k1, *k2, *ok3, *k4, *ok5, *A};
    return hopf::scale_from_original(op).first;
  }
};

ordered_json params_json(const hopf::Params& p) {
  return ordered_json{{"k", p.k}, {"k3", p.k3}, {"k5", p.k5}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path.string());
  os << content;
}

void emit_json(const ordered_json& j, const std::string& out_file) {
  const std::string text = j.dump(2) + "\n";
  if (!out_file.empty())
    write_text_file(out_file, text);
  else
    std::cout << text;
}

std::string csv_row(std::initializer_list<double> vals) {
  std::string row;
  char buf[64];
  bool first = true;
  for (double v : vals) {
    if (!first) row += ',';
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row += buf;
    first = false;
  }
  row += '\n';
  return row;
}

/// Deterministic parallel map: results land in input order no matter how the
/// work is scheduled across threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : workers) t.join();
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const hopf::Params& p, hopf::Vec3 s0, double t_end,
                 const hopf::IntegratorConfig& cfg, const std::string& out_dir) {
  const auto traj = hopf::integrate(p, s0, t_end, cfg);
  if (traj.status != hopf::IntegrateStatus::Ok) {
    std::cerr << "integration failed: " << hopf::to_string(traj.status) << "\n";
    return kExitNumericalFailure;
  }
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(std::filesystem::path(out_dir) / "trajectory.csv", std::ios::binary);
    hopf::write_csv(traj, os);
  }
  ordered_json j;
  j["params"] = params_json(p);
  j["regime"] = hopf::to_string(hopf::classify_regime(p));
  j["t_end"] = t_end;
  const auto& fs = traj.states.back();
  j["final_state"] = {fs[0], fs[1], fs[2]};
  j["tail_window"] = {t_end / 2.0, t_end};
  j["tail_averages"] = {hopf::time_average(traj, 0, t_end / 2.0, t_end),
                        hopf::time_average(traj, 1, t_end / 2.0, t_end),
                        hopf::time_average(traj, 2, t_end / 2.0, t_end)};
  j["steps_accepted"] = traj.steps_accepted;
  j["negativity_clamps"] = traj.clamp_count;
  write_text_file(std::filesystem::path(out_dir) / "summary.json", j.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// equilibria

int cmd_equilibria(const hopf::Params& p, const std::string& out_file) {
  ordered_json j;
  j["params"] = params_json(p);
  j["regime"] = hopf::to_string(hopf::classify_regime(p));
  ordered_json arr = ordered_json::array();
  for (const auto& e : hopf::equilibria(p)) {
    const auto cls = hopf::classify_equilibrium(p, e);
    ordered_json ej;
    ej["point"] = {e[0], e[1], e[2]};
    ej["stability"] = hopf::to_string(cls.stability);
    ordered_json roots = ordered_json::array();
    for (const auto& r : cls.spectrum.roots) roots.push_back({{"re", r.real()}, {"im", r.imag()}});
    ej["eigenvalues"] = roots;
    ej["routh_hurwitz_stable"] = cls.routh_hurwitz_stable;
    arr.push_back(std::move(ej));
  }
  j["equilibria"] = std::move(arr);
  const auto hp = hopf::hopf_point(p.k3, p.k5);
  j["hopf_point"] = {{"k_h", hp.k_h}, {"omega", hp.omega}};
  emit_json(j, out_file);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::uint64_t seed = 0;
  double horizon = 400.0;
  int invariance_samples = 200;
  int census_starts = 8;
  unsigned jobs = 1;
};

hopf::CheckResult check(const std::string& name, bool pass, double measured, double bound,
                        double tol, std::string note = {}) {
  return {name, pass, measured, bound, tol, std::move(note)};
}

void verify_decay(const hopf::Params& p, const VerifyOptions& opt, hopf::VerificationReport& rep) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const hopf::Vec3 s0{u(rng), u(rng), u(rng)};
    const auto traj = hopf::integrate(p, s0, 200.0);
    worst = std::max(worst, hopf::norm_inf(traj.states.back()));
  }
  rep.add(check("theorem1a_decay_to_origin", worst < 1e-6, worst, 1e-6, 0.0,
                "max final norm over 5 interior starts, T=200"));
}

void verify_positive_k(const hopf::Params& p, const VerifyOptions& opt,
                       hopf::VerificationReport& rep) {
  const double M = hopf::attractor_bound(p);
  std::mt19937_64 rng(opt.seed + 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Theorem 3: random starts in [0, 10M]^3 end up inside [0, M + slack]^3.
  double worst_final = 0.0;
  for (int i = 0; i < 10; ++i) {
    const hopf::Vec3 s0{10.0 * M * u01(rng), 10.0 * M * u01(rng), 10.0 * M * u01(rng)};
    const auto traj = hopf::integrate(p, s0, opt.horizon);
    worst_final = std::max(worst_final, hopf::max_component(traj.states.back()));
  }
  rep.add(check("theorem3_attractor_bound", worst_final <= M + 1e-6, worst_final, M, 1e-6,
                "max final component over 10 starts in [0,10M]^3"));

  const auto box = hopf::invariant_box_default(p);
  rep.add(check("theorem3_extremal_box_K_equals_M", std::fabs(box.K - M) <= 1e-12 * M, box.K, M,
                1e-12 * M));
  const auto inv = hopf::verify_forward_invariance(p, box, opt.invariance_samples, 20.0, {},
                                                   opt.seed + 2);
  rep.add(check("theorem3_box_forward_invariance", inv.pass, inv.worst_margin, 0.0, 1e-9,
                "worst membership margin"));

  const auto ratios = hopf::ratio_liminf_check(p, {1.0, 1.0, 1.0}, opt.horizon);
  rep.add(check("theorem3_ratio_liminf_z_over_x", ratios.z_over_x_measured >=
                ratios.z_over_x_bound - 1e-6, ratios.z_over_x_measured, ratios.z_over_x_bound,
                1e-6));
  rep.add(check("theorem3_ratio_liminf_y_over_x", ratios.y_over_x_measured >=
                ratios.y_over_x_bound - 1e-6, ratios.y_over_x_measured, ratios.y_over_x_bound,
                1e-6));

  const double eta = hopf::persistence_floor(p, hopf::interior_grid(0.1, 10.0, 3), opt.horizon);
  rep.add(check("theorem4_uniform_persistence", eta > 0.0, eta, 0.0, 0.0,
                "empirical eta from a 3x3x3 interior grid"));

  const auto trace = hopf::trace_unstable_manifold_origin(p, 1e-7);
  rep.add(check("theorem4_unstable_manifold_connects", trace.settled, trace.settle_time, 0.0, 0.0,
                trace.limit_kind == hopf::LimitKind::Equilibrium
                    ? "tail settled at E"
                    : "tail settled on a periodic orbit"));
}

void verify_regime_b(const hopf::Params& p, const VerifyOptions& opt,
                     hopf::VerificationReport& rep) {
  std::mt19937_64 rng(opt.seed + 3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const hopf::Vec3 e = hopf::interior_equilibrium(p);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const hopf::Vec3 s0{u(rng), u(rng), u(rng)};
    const auto traj = hopf::integrate(p, s0, 1000.0);
    worst = std::max(worst, hopf::norm(traj.states.back() - e));
  }
  rep.add(check("theorem1b_convergence_to_E", worst < 1e-6, worst, 1e-6, 0.0,
                "max final distance to E over 5 interior starts, T=1000"));

  hopf::CertificateConfig ccfg;
  ccfg.horizon = 500.0;
  ccfg.grid_per_axis = 2;
  const auto cert = hopf::q2_bar(p, ccfg);
  rep.add(check("theorem1b_bendixson_certificate", cert.applicable && cert.pass, cert.q2_bar,
                0.0, cert.applicable ? 1e-3 : 0.0,
                cert.applicable ? "q2_bar tail average, epsilon=" + std::to_string(cert.epsilon)
                                : cert.detail));
}

void verify_regime_c(const hopf::Params& p, const VerifyOptions& opt,
                     hopf::VerificationReport& rep) {
  const auto sm = hopf::trace_stable_manifold_E(p, 1e-7 * std::min(1.0, p.k));
  rep.add(check("proposition2_upper_branch", sm.upper.valid(), sm.upper.worst_box_violation, 0.0,
                1e-9, "monotonicity, box containment, endpoint, forward convergence"));
  rep.add(check("proposition2_lower_branch", sm.lower.valid(), sm.lower.worst_box_violation, 0.0,
                1e-9, "monotonicity, box containment, endpoint, forward convergence"));

  const auto orbit = hopf::find_periodic_orbit(p, hopf::default_orbit_guess(p));
  const double trivial_err = std::abs(orbit.multipliers[orbit.trivial_index()] - 1.0);
  rep.add(check("theorem1c_trivial_multiplier", trivial_err < 1e-6, trivial_err, 1e-6, 0.0));
  rep.add(check("theorem1c_orbit_stability", orbit.stability == hopf::Stability::Stable,
                orbit.max_nontrivial_modulus(), 1.0, 1e-6, "max nontrivial multiplier modulus"));
  rep.add(check("theorem1c_orbit_closure", orbit.closure_residual < 1e-9,
                orbit.closure_residual, 1e-9, 0.0));
  rep.add(check("theorem1c_liouville_product", orbit.liouville_mismatch < 1e-6,
                orbit.liouville_mismatch, 1e-6, 0.0));
  const auto avgs =
      hopf::flow_time_averages(p, orbit.section_point, 0.0, orbit.period,
                               hopf::IntegratorConfig{1e-12, 1e-14, 1.0, 20'000'000});
  const double avg_err = std::max({std::fabs(avgs[0] - p.k), std::fabs(avgs[1] - p.k),
                                   std::fabs(avgs[2] - p.k)});
  rep.add(check("eq3_orbit_period_averages", avg_err < 1e-6, avg_err, 1e-6, 0.0,
                "max deviation of one-period averages from k"));

  std::vector<std::string> failures;
  const auto census = hopf::orbit_census(p, opt.census_starts, {}, {}, 1e-6, &failures);
  rep.add(check("orbit_census_count", census.size() >= 1,
                static_cast<double>(census.size()), 1.0, 0.0,
                std::to_string(opt.census_starts) + " seeds, " +
                    std::to_string(failures.size()) + " failed"));
}

int cmd_verify(const hopf::Params& p, const VerifyOptions& opt, const std::string& out_file,
               bool timing) {
  const auto t_start = std::chrono::steady_clock::now();
  hopf::VerificationReport rep;
  rep.params = p;
  rep.include_runtime = timing;

  const hopf::Regime regime = hopf::classify_regime(p);
  rep.add(check("regime_classification", true, p.k, p.k3 + p.k5, 0.0, hopf::to_string(regime)));

  switch (regime) {
    case hopf::Regime::GlobalDecay:
      verify_decay(p, opt, rep);
      break;
    case hopf::Regime::StableInterior:
      verify_positive_k(p, opt, rep);
      verify_regime_b(p, opt, rep);
      break;
    case hopf::Regime::Oscillatory:
      verify_positive_k(p, opt, rep);
      verify_regime_c(p, opt, rep);
      break;
    case hopf::Regime::HopfBoundary:
      verify_positive_k(p, opt, rep);
      break;
  }

  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  emit_json(rep.to_json(), out_file);
  return rep.all_pass() ? kExitOk : kExitVerificationFailed;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(double k_min, double k_max, double k_step, double k3, double k5, int census_starts,
              unsigned jobs, const std::string& out_file) {
  if (!(k_step > 0.0 && k_max >= k_min))
    throw CLI::ValidationError("sweep", "need k-min <= k-max and k-step > 0");
  std::vector<double> ks;
  for (double k = k_min; k <= k_max + 1e-12; k += k_step) ks.push_back(k);

  struct Row {
    double k = 0.0;
    std::string regime;
    double max_re = 0.0;
    std::optional<double> period, amplitude;
    std::optional<int> census;
    bool error = false;
  };
  std::vector<Row> rows(ks.size());

  parallel_for(ks.size(), jobs, [&](std::size_t i) {
    Row& row = rows[i];
    row.k = ks[i];
    const hopf::Params p{ks[i], k3, k5};
    const auto regime = hopf::classify_regime(p);
    row.regime = hopf::to_string(regime);
    if (p.k > 0.0) {
      const auto sp = hopf::eigenvalues(hopf::jacobian(p, hopf::interior_equilibrium(p)));
      row.max_re = sp.max_real_part();
    } else {
      row.max_re = p.k;  // largest eigenvalue at the origin
    }
    if (regime == hopf::Regime::Oscillatory) {
      try {
        const auto census = hopf::orbit_census(p, census_starts);
        row.census = static_cast<int>(census.size());
        if (!census.empty()) {
          const auto& orb = census.front().orbit;
          row.period = orb.period;
          hopf::IntegratorConfig tight{1e-12, 1e-14, 1.0, 20'000'000};
          const auto traj = hopf::integrate(p, orb.section_point, orb.period, tight);
          double xlo = orb.section_point[0], xhi = xlo;
          for (int j = 0; j <= 2000; ++j) {
            const double x = traj.at(orb.period * j / 2000.0)[0];
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
          }
          row.amplitude = xhi - xlo;
        }
      } catch (const std::exception&) {
        row.error = true;
      }
    }
  });

  std::string csv = "k,regime,max_re_eig_E,orbit_period,orbit_amplitude_x,census_count,error\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.k);
    csv += buf;
    csv += ',';
    csv += r.regime;
    std::snprintf(buf, sizeof(buf), ",%.17g", r.max_re);
    csv += buf;
    auto opt_field = [&](const std::optional<double>& v) {
      csv += ',';
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.17g", *v);
        csv += buf;
      }
    };
    opt_field(r.period);
    opt_field(r.amplitude);
    csv += ',';
    if (r.census) csv += std::to_string(*r.census);
    csv += r.error ? ",1\n" : ",0\n";
  }
  if (!out_file.empty())
    write_text_file(out_file, csv);
  else
    std::cout << csv;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// manifold

int cmd_manifold(const hopf::Params& p, double delta, const std::string& out_dir) {
  if (!(p.k > p.k3 + p.k5)) {
    std::cerr << "manifold: the stable manifold of E is one-dimensional only for k > k3+k5 "
                 "(got k=" << p.k << ", k3+k5=" << p.k3 + p.k5 << ")\n";
    return kExitConfigError;
  }
  const auto sm = hopf::trace_stable_manifold_E(p, delta);
  std::filesystem::create_directories(out_dir);

  auto dump_branch = [&](const hopf::ManifoldBranch& br, const std::string& name) {
    std::string csv = "t,x,y,z\n";
    for (std::size_t i = 0; i < br.times.size(); ++i)
      csv += csv_row({br.times[i], br.states[i][0], br.states[i][1], br.states[i][2]});
    write_text_file(std::filesystem::path(out_dir) / (name + ".csv"), csv);
    ordered_json j;
    j["endpoint"] = {br.boundary_endpoint[0], br.boundary_endpoint[1], br.boundary_endpoint[2]};
    j["endpoint_ok"] = br.endpoint_ok;
    j["worst_monotonicity_violation"] = br.worst_monotonicity_violation;
    j["worst_box_violation"] = br.worst_box_violation;
    j["forward_terminal_distance_to_E"] = br.forward_terminal_distance_to_E;
    j["valid"] = br.valid();
    return j;
  };

  ordered_json j;
  j["params"] = params_json(p);
  j["delta"] = delta;
  j["p_u"] = dump_branch(sm.upper, "p_u");
  j["p_l"] = dump_branch(sm.lower, "p_l");
  write_text_file(std::filesystem::path(out_dir) / "endpoints.json", j.dump(2) + "\n");
  return (sm.upper.valid() && sm.lower.valid()) ? kExitOk : kExitVerificationFailed;
}

// ---------------------------------------------------------------------------
// orbit

int cmd_orbit(const hopf::Params& p, const std::string& out_dir) {
  if (!(p.k > p.k3 + p.k5)) {
    std::cerr << "orbit: periodic orbits require k > k3+k5\n";
    return kExitConfigError;
  }
  const auto orbit = hopf::find_periodic_orbit(p, hopf::default_orbit_guess(p));
  std::filesystem::create_directories(out_dir);

  ordered_json j;
  j["params"] = params_json(p);
  j["section_point"] = {orbit.section_point[0], orbit.section_point[1], orbit.section_point[2]};
  j["period"] = orbit.period;
  ordered_json mults = ordered_json::array();
  for (const auto& m : orbit.multipliers) mults.push_back({{"re", m.real()}, {"im", m.imag()}});
  j["multipliers"] = std::move(mults);
  j["stability"] = hopf::to_string(orbit.stability);
  j["closure_residual"] = orbit.closure_residual;
  j["liouville_mismatch"] = orbit.liouville_mismatch;
  write_text_file(std::filesystem::path(out_dir) / "orbit.json", j.dump(2) + "\n");

  hopf::IntegratorConfig tight{1e-12, 1e-14, 1.0, 20'000'000};
  const auto traj = hopf::integrate(p, orbit.section_point, orbit.period, tight);
  std::string csv = "t,x,y,z\n";
  for (int i = 0; i < 1000; ++i) {
    const double t = orbit.period * i / 1000.0;
    const auto s = traj.at(t);
    csv += csv_row({t, s[0], s[1], s[2]});
  }
  write_text_file(std::filesystem::path(out_dir) / "orbit.csv", csv);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bendixson

int cmd_bendixson(const hopf::Params& p, double epsilon, double horizon, int grid,
                  const std::string& out_file) {
  hopf::CertificateConfig ccfg;
  ccfg.epsilon = epsilon;
  ccfg.horizon = horizon;
  ccfg.grid_per_axis = grid;
  const auto cert = hopf::q2_bar(p, ccfg);
  ordered_json j;
  j["params"] = params_json(p);
  j["applicable"] = cert.applicable;
  j["epsilon"] = cert.epsilon;
  j["horizon"] = cert.horizon;
  j["n_starts"] = cert.n_starts;
  j["q2_bar"] = cert.q2_bar;
  j["margin"] = cert.margin;
  j["pass"] = cert.pass;
  if (!cert.detail.empty()) j["detail"] = cert.detail;
  emit_json(j, out_file);
  if (!cert.applicable) return kExitOk;  // "not applicable" is a valid answer
  return cert.pass ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analysis and verification toolkit for the smallest chemical reaction system "
               "with a Hopf bifurcation"};
  app.require_subcommand(1);
  app.fallthrough();

  unsigned default_jobs = std::max(1u, std::thread::hardware_concurrency());
  unsigned jobs = default_jobs;
  app.add_option("--jobs", jobs, "worker threads for sweeps and censuses")
      ->envname("HOPF_VERIFIER_JOBS");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for all randomized sampling");

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate a trajectory, export CSV + summary JSON");
  ParamCli sim_params;
  sim_params.add_options(sim);
  double x0 = 1.0, y0 = 1.0, z0 = 1.0, t_end = 100.0;
  double rel_tol = 1e-10, abs_tol = 1e-12;
  std::string sim_out = ".";
  sim->add_option("--x0", x0, "initial x >= 0");
  sim->add_option("--y0", y0, "initial y >= 0");
  sim->add_option("--z0", z0, "initial z >= 0");
  sim->add_option("--t-end", t_end, "integration horizon > 0");
  sim->add_option("--rel-tol", rel_tol, "relative tolerance");
  sim->add_option("--abs-tol", abs_tol, "absolute tolerance");
  sim->add_option("--out", sim_out, "output directory");

  // equilibria
  auto* eq = app.add_subcommand("equilibria", "equilibria with stability classification");
  ParamCli eq_params;
  eq_params.add_options(eq);
  std::string eq_out;
  eq->add_option("--out", eq_out, "output JSON file (default stdout)");

  // verify
  auto* ver = app.add_subcommand("verify", "run the regime-appropriate verification suite");
  ParamCli ver_params;
  ver_params.add_options(ver);
  VerifyOptions vopt;
  std::string ver_out;
  bool timing = false;
  ver->add_option("--horizon", vopt.horizon, "verification horizon");
  ver->add_option("--invariance-samples", vopt.invariance_samples, "invariance sample count");
  ver->add_option("--census-starts", vopt.census_starts, "orbit census seed count");
  ver->add_option("--out", ver_out, "output JSON file (default stdout)");
  ver->add_flag("--timing", timing, "include runtime_seconds in the report (non-reproducible)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "bifurcation sweep over k, CSV output");
  double k_min = 1.5, k_max = 3.0, k_step = 0.05, sw_k3 = 1.0, sw_k5 = 1.0;
  int sw_census = 5;
  std::string sw_out;
  sw->add_option("--k-min", k_min, "sweep start");
  sw->add_option("--k-max", k_max, "sweep end");
  sw->add_option("--k-step", k_step, "sweep step > 0");
  sw->add_option("--k3", sw_k3, "rate k3 > 0");
  sw->add_option("--k5", sw_k5, "rate k5 > 0");
  sw->add_option("--census-starts", sw_census, "census seeds per oscillatory point");
  sw->add_option("--out", sw_out, "output CSV file (default stdout)");

  // manifold
  auto* man = app.add_subcommand("manifold", "trace the stable manifold of E (k > k3+k5)");
  ParamCli man_params;
  man_params.add_options(man);
  double man_delta = 1e-7;
  std::string man_out = ".";
  man->add_option("--delta", man_delta, "offset along the stable eigenvector (0, 1e-6]");
  man->add_option("--out", man_out, "output directory");

  // orbit
  auto* orb = app.add_subcommand("orbit", "locate the periodic orbit, export JSON + CSV");
  ParamCli orb_params;
  orb_params.add_options(orb);
  std::string orb_out = ".";
  orb->add_option("--out", orb_out, "output directory");

  // bendixson
  auto* ben = app.add_subcommand("bendixson", "compound-matrix certificate ruling out orbits");
  ParamCli ben_params;
  ben_params.add_options(ben);
  double ben_eps = 0.0, ben_horizon = 2000.0;
  int ben_grid = 4;
  std::string ben_out;
  ben->add_option("--epsilon", ben_eps, "weight parameter in (0, 1/2); 0 = automatic");
  ben->add_option("--horizon", ben_horizon, "averaging horizon");
  ben->add_option("--grid", ben_grid, "starts per axis over the absorbing box");
  ben->add_option("--out", ben_out, "output JSON file (default stdout)");

  std::string config_doc;
  app.add_option("--config", config_doc,
                 "key=value config file; explicit flags override file values");

  // Flat key=value config handling: strip --config from the command line,
  // then append one "--key value" pair per file entry that was not already
  // given explicitly.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string config_file;
    for (std::size_t i = 0; i < args.size();) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_file = args[i + 1];
        args.erase(args.begin() + i, args.begin() + i + 2);
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_file = args[i].substr(9);
        args.erase(args.begin() + i);
      } else {
        ++i;
      }
    }
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      if (!is) throw CLI::ValidationError("config", "cannot open config file: " + config_file);
      auto given = [&args](const std::string& flag) {
        for (const auto& a : args)
          if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
      };
      std::string line;
      while (std::getline(is, line)) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
          throw CLI::ValidationError("config", "expected key=value, got: " + line);
        auto trim = [](std::string s) {
          const auto a = s.find_first_not_of(" \t\r");
          const auto b = s.find_last_not_of(" \t\r");
          return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
          throw CLI::ValidationError("config", "expected key=value, got: " + line);
        if (!given("--" + key)) {
          args.push_back("--" + key);
          args.push_back(value);
        }
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  vopt.seed = seed;
  vopt.jobs = jobs;

  try {
    if (sim->parsed())
      return cmd_simulate(sim_params.resolve(), {x0, y0, z0}, t_end,
                          hopf::IntegratorConfig{rel_tol, abs_tol, 1.0, 20'000'000}, sim_out);
    if (eq->parsed()) return cmd_equilibria(eq_params.resolve(), eq_out);
    if (ver->parsed()) return cmd_verify(ver_params.resolve(), vopt, ver_out, timing);
    if (sw->parsed()) return cmd_sweep(k_min, k_max, k_step, sw_k3, sw_k5, sw_census, jobs, sw_out);
    if (man->parsed()) return cmd_manifold(man_params.resolve(), man_delta, man_out);
    if (orb->parsed()) return cmd_orbit(orb_params.resolve(), orb_out);
    if (ben->parsed()) return cmd_bendixson(ben_params.resolve(), ben_eps, ben_horizon, ben_grid,
                                            ben_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  return kExitConfigError;
}
