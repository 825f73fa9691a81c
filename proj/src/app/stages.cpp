// Copyright 2026 The puretherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "puretherm/app/stages.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "puretherm/app/manifest.hpp"
#include "puretherm/decoherence.hpp"
#include "puretherm/errors.hpp"
#include "puretherm/eth.hpp"
#include "puretherm/hydro.hpp"
#include "puretherm/linalg.hpp"
#include "puretherm/metrology.hpp"
#include "puretherm/propagator.hpp"
#include "puretherm/spectral.hpp"

namespace puretherm::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path out_dir(const RunConfig& cfg) { return fs::path(cfg.out); }

void log(const std::string& stage, const std::string& msg) { std::cerr << "[" << stage << "] " << msg << '\n'; }

fs::path require(const RunConfig& cfg, const std::string& producer, const std::string& relative) {
  const fs::path p = out_dir(cfg) / producer / relative;
  if (!fs::exists(p))
    throw ValidationError("missing input '" + p.string() + "': run the '" + producer + "' stage first");
  return p;
}

bool has(const RunConfig& cfg, const std::string& producer, const std::string& relative) {
  return fs::exists(out_dir(cfg) / producer / relative);
}

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  return stem + "_" + std::to_string(i) + ext;
}

std::string indexed(const std::string& stem, std::size_t i, std::size_t k, const std::string& ext) {
  return stem + "_" + std::to_string(i) + "_g" + std::to_string(k) + ext;
}

// Writes the canonical config once per run directory.
void ensure_run_dir(const RunConfig& cfg, ConfigScope scope = ConfigScope::full) {
  validate_config(cfg, scope);
  const json m = load_manifest(out_dir(cfg));
  if (!m.is_null()) {
    if (m.value("config_sha256", "") != config_hash(cfg))
      throw ValidationError("output directory '" + cfg.out + "' belongs to a run with a different config");
    return;
  }
  // Stored without the output path or thread count so that two runs of one
  // config in different directories carry byte-identical manifests.
  RunConfig stored = cfg;
  stored.out.clear();
  stored.threads = 1;
  StageWriter w(out_dir(cfg), "config");
  std::ofstream(w.file("config.ini")) << serialize_config(stored);
  w.commit(cfg, 0.0);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double json_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return kNaN;
  return j[key].get<double>();
}

StoredState load_state(const RunConfig& cfg, const std::string& producer, const std::string& name) {
  auto s = read_state(require(cfg, producer, name));
  if (s.sites != cfg.chain.sites)
    throw ValidationError("state '" + name + "' was produced for L = " + std::to_string(s.sites));
  return s;
}

CsvTable trajectory_table(const Trajectory& tr, const std::string& observable) {
  CsvTable t;
  t.add_meta("observable", observable);
  t.columns = {"t", "A", "energy", "norm"};
  for (std::size_t i = 0; i < tr.t.size(); ++i) t.add_row({tr.t[i], tr.observable[i], tr.energy[i], tr.norm[i]});
  return t;
}

std::size_t state_count(const RunConfig& cfg) { return cfg.t_prep.size() + cfg.beta_targets.size(); }

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"kpm",  "prepare",  "evolve", "correlate", "spectra",
                                                 "eth",  "decohere", "fisher", "hydro"};
  return names;
}

Model build_model(const RunConfig& cfg) {
  validate_config(cfg);
  Model m;
  m.sector = BasisSector::half_filled(cfg.chain.sites);
  m.H = build_static_hamiltonian(cfg.chain, m.sector);
  m.probe = ProbeProfile::gaussian(cfg.chain.sites, cfg.probe_site());
  m.A = build_probe_observable(m.probe, m.sector);
  m.drive_op = build_sigma_z(cfg.drive_site(), m.sector);
  return m;
}

// ---- kpm -------------------------------------------------------------------

void run_kpm(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const Model m = build_model(cfg);
  const Rescale rs = rescale_spectrum(m.H);
  KpmOptions opts;
  opts.moments = cfg.kpm_moments;
  opts.random_vectors = cfg.kpm_vectors;
  opts.seed = derive_seed(*cfg.seed, "kpm");
  opts.threads = cfg.threads;
  const auto dos_exp = chebyshev_moments_trace(m.H, rs, opts);
  const auto obs_exp = chebyshev_moments_observable(m.H, m.A, rs, opts);
  const MicrocanonicalCurve dos(dos_exp), obs(obs_exp);

  StageWriter w(out_dir(cfg), "kpm");
  CsvTable mom;
  mom.add_meta("moments", std::to_string(opts.moments));
  mom.add_meta("random_vectors", std::to_string(opts.random_vectors));
  mom.add_meta("seed", std::to_string(opts.seed));
  mom.add_meta("dim", std::to_string(m.H.dim()));
  mom.add_meta("a_scale", format_double(rs.a_scale));
  mom.add_meta("b_shift", format_double(rs.b_shift));
  mom.add_meta("margin", format_double(rs.margin));
  mom.columns = {"m", "jackson", "mu_dos", "mu_A"};
  for (std::size_t k = 0; k < dos_exp.mu.size(); ++k)
    mom.add_row({static_cast<double>(k), dos_exp.kernel[k], dos_exp.mu[k], obs_exp.mu[k]});
  write_csv(w.file("moments.csv"), mom);

  CsvTable curve;
  curve.add_meta("normalisation", "Omega_per_dim integrates to 1; entropy omits the additive ln dE");
  curve.columns = {"E", "Omega_per_dim", "A_micro", "beta", "entropy"};
  const double dim = static_cast<double>(m.H.dim());
  for (std::size_t k = 0; k < dos.energy().size(); ++k) {
    const double e = dos.energy()[k];
    double beta = kNaN, a = kNaN, s = kNaN;
    try {
      beta = microcanonical_beta(dos, e);
      a = microcanonical_average(obs, dos, e);
      s = microcanonical_entropy(dos, e);
    } catch (const std::exception&) {
    }
    curve.add_row({e, dos.value()[k] / dim, a, beta, s});
  }
  write_csv(w.file("dos.csv"), curve);

  json j = {{"moments", opts.moments},
            {"random_vectors", opts.random_vectors},
            {"seed", opts.seed},
            {"dim", m.H.dim()},
            {"a_scale", rs.a_scale},
            {"b_shift", rs.b_shift},
            {"margin", rs.margin},
            {"e_min", rs.e_min()},
            {"e_max", rs.e_max()},
            {"normalisation", dos.integral(rs.to_energy(-1.0), rs.to_energy(1.0)) / dim}};
  write_json(w.file("kpm.json"), j);
  w.commit(cfg, seconds_since(t0));
  log("kpm", "dim " + std::to_string(m.H.dim()) + ", M = " + std::to_string(opts.moments));
}

SavedKpm load_kpm(const fs::path& out) {
  const fs::path p = out / "kpm" / "moments.csv";
  if (!fs::exists(p)) throw ValidationError("missing input '" + p.string() + "': run the 'kpm' stage first");
  const CsvTable t = read_csv(p);
  auto meta = [&](const char* k) {
    const auto v = t.meta_value(k);
    if (!v) throw ValidationError(std::string("kpm/moments.csv: missing metadata '") + k + "'");
    return *v;
  };
  KpmExpansion e;
  e.rescale.a_scale = std::stod(meta("a_scale"));
  e.rescale.b_shift = std::stod(meta("b_shift"));
  e.rescale.margin = std::stod(meta("margin"));
  e.moments = std::stoi(meta("moments"));
  e.random_vectors = std::stoi(meta("random_vectors"));
  e.seed = std::stoull(meta("seed"));
  e.dim = std::stoull(meta("dim"));
  e.kernel = t.column("jackson");
  e.mu = t.column("mu_dos");
  e.kind = MomentKind::trace;
  SavedKpm s;
  s.dos = std::make_unique<MicrocanonicalCurve>(e);
  e.mu = t.column("mu_A");
  e.kind = MomentKind::observable;
  s.observable = std::make_unique<MicrocanonicalCurve>(e);
  return s;
}

// ---- prepare ---------------------------------------------------------------

void run_prepare(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const Model m = build_model(cfg);
  const EigenPair gs = ground_state(m.H);

  std::optional<SavedKpm> kpm;
  if (!cfg.beta_targets.empty() || has(cfg, "kpm", "moments.csv")) kpm = load_kpm(out_dir(cfg));

  StageWriter w(out_dir(cfg), "prepare");
  json states = json::array();
  std::size_t index = 0;
  auto run_one = [&](const std::string& mode, double t_prep, std::optional<double> beta_target) {
    DriveParams drive = cfg.drive;
    drive.site = cfg.drive_site();
    std::optional<double> stop;
    double e_target = kNaN;
    if (beta_target) {
      e_target = energy_for_beta(*kpm->dos, *beta_target);
      stop = e_target;
      drive.t_prep = cfg.max_prep_time;
    } else {
      drive.t_prep = t_prep;
    }
    const PreparedState ps =
        prepare_driven_state(m.H, gs.state, gs.energy, drive, cfg.dt, &m.A, cfg.record_stride, stop);
    write_state(w.file(indexed("state", index, ".bin")), {cfg.chain.sites, ps.t_prep, ps.psi});
    write_csv(w.file(indexed("trajectory", index, ".csv")), trajectory_table(ps.trajectory, "probe"));
    double beta_kpm = kNaN;
    if (kpm) {
      try {
        beta_kpm = microcanonical_beta(*kpm->dos, ps.moments.mean);
      } catch (const std::exception&) {
      }
    }
    states.push_back({{"index", index},
                      {"mode", mode},
                      {"t_prep", ps.t_prep},
                      {"beta_target", beta_target ? json(*beta_target) : json(nullptr)},
                      {"e_target", number_or_null(e_target)},
                      {"e_bar", ps.moments.mean},
                      {"energy_variance", ps.moments.variance},
                      {"delta_e", std::sqrt(std::max(0.0, ps.moments.variance))},
                      {"beta_kpm", number_or_null(beta_kpm)},
                      {"temperature", number_or_null(beta_kpm > 0.0 ? 1.0 / beta_kpm : kNaN)}});
    log("prepare", "state " + std::to_string(index) + ": t_prep = " + format_double(ps.t_prep) +
                       ", E_bar = " + format_double(ps.moments.mean));
    ++index;
  };
  for (double t : cfg.t_prep) run_one("t_prep", t, std::nullopt);
  for (double b : cfg.beta_targets) run_one("beta_target", 0.0, b);

  write_json(w.file("prepare.json"), {{"ground_energy", gs.energy}, {"dim", m.H.dim()}, {"states", states}});
  w.commit(cfg, seconds_since(t0));
}

// ---- evolve ----------------------------------------------------------------

void run_evolve(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const Model m = build_model(cfg);
  const json prep = read_json(require(cfg, "prepare", "prepare.json"));
  StageWriter w(out_dir(cfg), "evolve");
  json out = json::array();
  for (std::size_t i = 0; i < prep["states"].size(); ++i) {
    StoredState s = load_state(cfg, "prepare", indexed("state", i, ".bin"));
    EvolutionConfig ec;
    ec.dt = cfg.dt;
    ec.t_start = s.time;
    ec.t_end = s.time + cfg.t_relax;
    ec.record_stride = cfg.record_stride;
    const Trajectory tr = evolve(Generator(m.H), s.amps, ec, &m.A);
    write_state(w.file(indexed("relaxed", i, ".bin")), {cfg.chain.sites, ec.t_end, s.amps});
    write_csv(w.file(indexed("trajectory", i, ".csv")), trajectory_table(tr, "probe"));
    const TimeAverage avg = time_average_observable(m.H, s.amps, m.A, 0.0, cfg.average_window, cfg.dt,
                                                    cfg.record_stride);
    out.push_back({{"index", i},
                   {"t0", ec.t_end},
                   {"energy", tr.energy.back()},
                   {"mean_A", avg.mean},
                   {"samples", avg.samples},
                   {"window", cfg.average_window},
                   {"warning", avg.warning ? json(*avg.warning) : json(nullptr)}});
  }
  write_json(w.file("evolve.json"), {{"states", out}});
  w.commit(cfg, seconds_since(t0));
  log("evolve", std::to_string(out.size()) + " state(s) relaxed");
}

// ---- correlate -------------------------------------------------------------

void run_correlate(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const Model m = build_model(cfg);
  const json ev = read_json(require(cfg, "evolve", "evolve.json"));
  StageWriter w(out_dir(cfg), "correlate");
  json out = json::array();
  for (std::size_t i = 0; i < ev["states"].size(); ++i) {
    const StoredState s = load_state(cfg, "evolve", indexed("relaxed", i, ".bin"));
    const CorrelationSeries c = two_point_correlation(m.H, s.amps, m.A, cfg.tau_star, cfg.dt, 1, s.time);
    CsvTable t;
    t.add_meta("t_reference", format_double(c.t_reference));
    t.add_meta("mean_A", format_double(c.mean_A));
    t.add_meta("dt", format_double(c.dt));
    t.columns = {"tau", "re_C", "im_C"};
    for (std::size_t k = 0; k < c.tau.size(); ++k) t.add_row({c.tau[k], c.values[k].real(), c.values[k].imag()});
    write_csv(w.file(indexed("correlation", i, ".csv")), t);
    out.push_back({{"index", i}, {"t_reference", c.t_reference}, {"mean_A", c.mean_A}, {"samples", c.tau.size()}});
  }
  write_json(w.file("correlate.json"), {{"states", out}});
  w.commit(cfg, seconds_since(t0));
  log("correlate", std::to_string(out.size()) + " correlation function(s)");
}

namespace {

CorrelationSeries load_correlation(const RunConfig& cfg, std::size_t i) {
  const CsvTable t = read_csv(require(cfg, "correlate", indexed("correlation", i, ".csv")));
  CorrelationSeries c;
  c.tau = t.column("tau");
  const auto re = t.column("re_C");
  const auto im = t.column("im_C");
  for (std::size_t k = 0; k < re.size(); ++k) c.values.emplace_back(re[k], im[k]);
  c.t_reference = std::stod(t.meta_value("t_reference").value_or("0"));
  c.mean_A = std::stod(t.meta_value("mean_A").value_or("0"));
  c.dt = std::stod(t.meta_value("dt").value_or("0"));
  return c;
}

FourierOptions fourier_options(const RunConfig& cfg) {
  FourierOptions f;
  f.tau_star = cfg.tau_star;
  f.omega_max = cfg.omega_max;
  f.d_omega = cfg.d_omega;
  return f;
}

}  // namespace

// ---- spectra ---------------------------------------------------------------

void run_spectra(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const json cj = read_json(require(cfg, "correlate", "correlate.json"));
  std::optional<json> prep;
  if (has(cfg, "prepare", "prepare.json")) prep = read_json(out_dir(cfg) / "prepare" / "prepare.json");
  StageWriter w(out_dir(cfg), "spectra");
  json out = json::array();
  for (std::size_t i = 0; i < cj["states"].size(); ++i) {
    const auto c = load_correlation(cfg, i);
    const SpectralData spec = fourier_noise_response(c, fourier_options(cfg));
    CsvTable t;
    t.add_meta("tau_star", format_double(cfg.tau_star));
    t.columns = {"omega", "S_tilde", "chi_tilde", "ratio"};
    for (std::size_t k = 0; k < spec.omega.size(); ++k)
      t.add_row({spec.omega[k], spec.noise[k], spec.response[k], spec.ratio_at(k)});
    write_csv(w.file(indexed("spectrum", i, ".csv")), t);
    json rec = {{"index", i},
                {"S0", zero_frequency_noise(spec)},
                {"chi_A", thermodynamic_susceptibility(spec)},
                {"chi_A_time", thermodynamic_susceptibility_time(spec)},
                {"mean_A", c.mean_A}};
    try {
      const BetaFit fit = fit_beta_fdt(spec, cfg.fit_omega_max);
      rec["beta_fdt"] = fit.beta;
      rec["fit_omega_max"] = fit.omega_max_used;
      rec["fit_flag"] = fit.flag ? json(*fit.flag) : json(nullptr);
    } catch (const NumericalError& e) {
      rec["beta_fdt"] = nullptr;
      rec["fit_flag"] = e.what();
    }
    if (prep && i < (*prep)["states"].size()) rec["beta_kpm"] = (*prep)["states"][i]["beta_kpm"];
    out.push_back(rec);
  }
  write_json(w.file("spectra.json"), {{"states", out}});
  w.commit(cfg, seconds_since(t0));
  log("spectra", std::to_string(out.size()) + " spectrum(s)");
}

// ---- eth -------------------------------------------------------------------

void run_eth(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const Model m = build_model(cfg);
  const SavedKpm kpm = load_kpm(out_dir(cfg));
  const EigenSystem eig = exact_eigensystem(m.H);
  const auto ann = diagonal_elements(eig, m.A);
  const DiagonalStats st = diagonal_statistics(eig, ann, cfg.eth_delta_eps, cfg.eth_central_fraction);

  StageWriter w(out_dir(cfg), "eth");
  CsvTable diag;
  diag.columns = {"E", "eps", "A_nn", "running_mean"};
  for (std::size_t k = 0; k < eig.dim; ++k)
    diag.add_row({eig.energies[k], eig.normalized(eig.energies[k]), ann[k], st.running_mean[k]});
  write_csv(w.file("diagonal.csv"), diag);

  CsvTable win;
  win.add_meta("delta_eps", format_double(cfg.eth_delta_eps));
  win.columns = {"eps_center", "mean", "stddev", "count"};
  for (const auto& x : st.windows) win.add_row({x.eps_center, x.mean, x.stddev, static_cast<double>(x.count)});
  write_csv(w.file("windows.csv"), win);

  json j = {{"dim", eig.dim},
            {"central_variance", st.central_variance},
            {"central_raw_variance", st.central_raw_variance},
            {"central_count", st.central_count},
            {"empty_windows", st.empty_windows},
            {"degenerate_gap_fraction", degenerate_gap_fraction(eig)},
            {"spectral_functions", json::array()}};

  constexpr std::size_t kOffDiagonalMaxDim = 8000;
  if (eig.dim <= kOffDiagonalMaxDim && has(cfg, "prepare", "prepare.json")) {
    const json prep = read_json(out_dir(cfg) / "prepare" / "prepare.json");
    const auto amn = matrix_elements(eig, m.A, kOffDiagonalMaxDim);
    const auto beta_of = [&](double e) { return microcanonical_beta(*kpm.dos, e); };
    const auto density_of = [&](double e) { return kpm.dos->evaluate(e); };
    OffDiagonalOptions od;
    od.d_omega = cfg.eth_d_omega;
    for (std::size_t i = 0; i < prep["states"].size(); ++i) {
      const double beta = json_number(prep["states"][i], "beta_kpm");
      if (!(beta > 0.0)) continue;
      try {
        const auto grid = offdiagonal_spectral_function(eig, amn, beta, beta_of, density_of, od);
        CsvTable t;
        t.add_meta("beta", format_double(beta));
        t.add_meta("e_low", format_double(grid.e_low));
        t.add_meta("e_high", format_double(grid.e_high));
        t.columns = {"omega", "count", "mean", "mean_abs", "variance", "f2", "low_statistics"};
        for (const auto& b : grid.bins)
          t.add_row({b.omega, static_cast<double>(b.count), b.mean, b.mean_abs, b.variance, b.f2,
                     b.low_statistics ? 1.0 : 0.0});
        write_csv(w.file(indexed("spectral_function", i, ".csv")), t);
        j["spectral_functions"].push_back({{"index", i},
                                           {"beta", beta},
                                           {"e_low", grid.e_low},
                                           {"e_high", grid.e_high},
                                           {"flag", grid.flag ? json(*grid.flag) : json(nullptr)}});
      } catch (const NumericalError& e) {
        j["spectral_functions"].push_back({{"index", i}, {"beta", beta}, {"error", e.what()}});
      }
    }
  } else if (eig.dim > kOffDiagonalMaxDim) {
    j["off_diagonal_note"] = "dimension above " + std::to_string(kOffDiagonalMaxDim) + "; off-diagonal statistics skipped";
  }
  write_json(w.file("eth.json"), j);
  w.commit(cfg, seconds_since(t0));
  log("eth", "dim " + std::to_string(eig.dim) + ", central variance " + format_double(st.central_variance));
}

// ---- decohere --------------------------------------------------------------

void run_decohere(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const Model m = build_model(cfg);
  const json ev = read_json(require(cfg, "evolve", "evolve.json"));
  require(cfg, "spectra", "spectra.json");
  std::optional<json> prep;
  if (has(cfg, "prepare", "prepare.json")) prep = read_json(out_dir(cfg) / "prepare" / "prepare.json");

  StageWriter w(out_dir(cfg), "decohere");
  json out = json::array();
  for (std::size_t i = 0; i < ev["states"].size(); ++i) {
    const StoredState s = load_state(cfg, "evolve", indexed("relaxed", i, ".bin"));
    const auto c = load_correlation(cfg, i);
    const SpectralData spec = fourier_noise_response(c, fourier_options(cfg));
    for (std::size_t k = 0; k < cfg.couplings.size(); ++k) {
      const double g = cfg.couplings[k];
      DecoherenceOptions opts;
      opts.dt = cfg.dt;
      opts.record_stride = cfg.record_stride;
      const DecoherenceTrace tr = exact_decoherence(m.H, m.A, g, s.amps, cfg.decohere_t_max, opts);
      CsvTable t;
      t.add_meta("g", format_double(g));
      t.add_meta("source", "exact");
      t.columns = {"t", "re_v", "im_v", "abs_v2", "entropy"};
      for (std::size_t n = 0; n < tr.t.size(); ++n)
        t.add_row({tr.t[n], tr.v[n].real(), tr.v[n].imag(), std::norm(tr.v[n]), qubit_entropy(tr.v[n])});
      write_csv(w.file(indexed("trace", i, k, ".csv")), t);

      const CumulantTrace cu = cumulant_gamma_phi(spec, c.mean_A, g, tr.t);
      CsvTable ct;
      ct.add_meta("g", format_double(g));
      ct.add_meta("source", "cumulant");
      ct.columns = {"t", "Gamma", "Phi"};
      for (std::size_t n = 0; n < cu.t.size(); ++n) ct.add_row({cu.t[n], cu.gamma[n], cu.phi[n]});
      write_csv(w.file(indexed("cumulant", i, k, ".csv")), ct);

      const AsymptoticRates rates = asymptotic_rates(spec, c.mean_A, g);
      json rec = {{"index", i},
                  {"g", g},
                  {"gamma", rates.gamma},
                  {"phi_dot", rates.phi_dot},
                  {"S0", zero_frequency_noise(spec)},
                  {"chi_A", thermodynamic_susceptibility(spec)},
                  {"mean_A", c.mean_A},
                  {"final_entropy", qubit_entropy(tr.v.back())}};
      try {
        const RateFit fit = fit_exponential_rate(tr);
        rec["rate_fit"] = fit.rate;
        rec["fit_window"] = {fit.t_first, fit.t_last};
      } catch (const NumericalError& e) {
        rec["rate_fit"] = nullptr;
        rec["fit_note"] = e.what();
      }
      if (prep && i < (*prep)["states"].size()) {
        rec["beta_kpm"] = (*prep)["states"][i]["beta_kpm"];
        rec["temperature"] = (*prep)["states"][i]["temperature"];
      }
      out.push_back(rec);
    }
  }
  write_json(w.file("decohere.json"), {{"traces", out}});
  w.commit(cfg, seconds_since(t0));
  log("decohere", std::to_string(out.size()) + " trace(s)");
}

// ---- fisher ----------------------------------------------------------------

void run_fisher(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  const auto t0 = Clock::now();
  const json dj = read_json(require(cfg, "decohere", "decohere.json"));
  StageWriter w(out_dir(cfg), "fisher");
  json out = json::array();
  for (std::size_t k = 0; k < cfg.couplings.size(); ++k) {
    const double g = cfg.couplings[k];
    std::vector<std::array<double, 3>> pts;  // T, gamma, phi_dot
    for (const auto& r : dj["traces"]) {
      if (r["g"].get<double>() != g) continue;
      const double T = json_number(r, "temperature");
      if (!(T > 0.0)) throw ValidationError("fisher: decohere trace without a positive KPM temperature");
      pts.push_back({T, r["gamma"].get<double>(), r["phi_dot"].get<double>()});
    }
    std::sort(pts.begin(), pts.end());
    if (pts.size() < 2) throw ValidationError("fisher: need decoherence data at two or more temperatures");
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i][0] - pts[i - 1][0] < cfg.delta_T)
        throw ValidationError("fisher: temperatures " + format_double(pts[i - 1][0]) + " and " +
                              format_double(pts[i][0]) + " are closer than delta_T = " + format_double(cfg.delta_T) +
                              "; the temperature derivative is undefined at that spacing");
    std::vector<double> T, gam, phd;
    for (const auto& p : pts) {
      T.push_back(p[0]);
      gam.push_back(p[1]);
      phd.push_back(p[2]);
    }
    const ThermometryCurve curve(T, gam, phd);
    CsvTable t;
    t.add_meta("g", format_double(g));
    t.add_meta("repetitions", format_double(cfg.repetitions));
    t.columns = {"T", "t_star", "F_Q", "F_par", "F_perp", "T2F_par", "d_gamma_spline", "d_gamma_fd", "rel_error"};
    for (double Ti : T) {
      const double g_min = *std::min_element(gam.begin(), gam.end());
      std::vector<double> grid(4000);
      for (std::size_t n = 0; n < grid.size(); ++n) grid[n] = (n + 1) * (10.0 / g_min) / grid.size();
      const FisherOptimum opt = optimize_fisher(curve, Ti, grid);
      const ErrorBudget eb = error_budget(Ti * Ti * opt.at_t_star.total, cfg.repetitions);
      const double fd = std::min(cfg.delta_T, curve.t_max() - curve.t_min());
      t.add_row({Ti, opt.t_star, opt.at_t_star.total, opt.at_t_star.parallel, opt.at_t_star.perpendicular,
                 opt.t2_f_parallel, curve.d_gamma(Ti), curve.d_gamma_fd(Ti, fd), eb.relative_error});
    }
    write_csv(w.file("fisher_g" + std::to_string(k) + ".csv"), t);
    out.push_back({{"g", g}, {"temperatures", T}});
  }
  write_json(w.file("fisher.json"), {{"curves", out}});
  w.commit(cfg, seconds_since(t0));
  log("fisher", std::to_string(out.size()) + " coupling(s)");
}

// ---- hydro -----------------------------------------------------------------

void run_hydro(const RunConfig& cfg, const HydroRequest& req) {
  ensure_run_dir(cfg, ConfigScope::hydro);
  const auto t0 = Clock::now();
  const HydroParams& p = cfg.hydro;
  p.validate();
  StageWriter w(out_dir(cfg), "hydro");
  json j = {{"d", p.d}, {"D", p.D}, {"chi0", p.chi0}, {"ell", p.ell}, {"L", p.L}, {"g", p.g}, {"T", p.T},
            {"classical_noise", "coth(beta omega / 2) replaced by 2 / (beta omega)"}};
  if (const auto warn = p.warning()) j["warning"] = *warn;
  if (p.d == 3) j["gamma_3d"] = gamma_3d(p);

  if (req.sweep_L) {
    CsvTable t;
    t.columns = {"L", "gamma", "gamma_mode_sum"};
    for (double L : cfg.hydro_sweep_L) {
      HydroParams q = p;
      q.L = L;
      const double gam = q.d == 3 ? gamma_3d(q) : gamma_low_dim(q);
      const double sum = q.d == 3 ? kNaN : gamma_mode_sum(q);
      t.add_row({L, gam, sum});
    }
    write_csv(w.file("gamma_vs_L.csv"), t);
  }

  CsvTable resp;
  resp.columns = {"omega", "chi_continuum", "chi_mode_sum"};
  for (int n = 0; n <= 80; ++n) {
    const double omega = p.D / (p.ell * p.ell) * std::pow(10.0, -6.0 + 0.1 * n);
    resp.add_row({omega, diffusive_response_continuum(p, omega), p.d == 3 ? kNaN : diffusive_response(p, omega)});
  }
  write_csv(w.file("response.csv"), resp);

  if (p.d != 3) {
    const double t_th = thouless_time(p);
    std::vector<double> grid;
    for (int n = 0; n <= 120; ++n) grid.push_back(0.1 * p.ell * p.ell / p.D * std::pow(10.0, 0.05 * n));
    while (grid.back() < 100.0 * t_th) grid.push_back(grid.back() * std::pow(10.0, 0.05));
    const auto cross = dephasing_crossover(p, grid);
    CsvTable t;
    t.add_meta("thouless_time", format_double(t_th));
    t.columns = {"t", "Gamma", "local_slope", "regime"};
    for (const auto& c : cross) t.add_row({c.t, c.gamma, c.local_slope, static_cast<double>(c.regime)});
    write_csv(w.file("crossover.csv"), t);
    j["thouless_time"] = t_th;
    j["gamma_mode_sum"] = gamma_mode_sum(p);
  }
  write_json(w.file("hydro.json"), j);
  w.commit(cfg, seconds_since(t0));
  log("hydro", "d = " + std::to_string(p.d));
}

void run_pipeline(const RunConfig& cfg) {
  ensure_run_dir(cfg);
  run_kpm(cfg);
  run_prepare(cfg);
  run_evolve(cfg);
  run_correlate(cfg);
  run_spectra(cfg);
  if (cfg.eth_enabled) run_eth(cfg);
  run_decohere(cfg);
  if (state_count(cfg) >= 2) {
    try {
      run_fisher(cfg);
    } catch (const ValidationError& e) {
      log("fisher", std::string("skipped: ") + e.what());
    }
  }
  run_hydro(cfg);
}

}  // namespace puretherm::app
