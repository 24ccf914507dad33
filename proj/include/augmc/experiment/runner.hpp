#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "augmc/augmentation.hpp"
#include "augmc/chain.hpp"
#include "augmc/errors.hpp"
#include "augmc/estimators.hpp"
#include "augmc/experiment/config.hpp"
#include "augmc/kernels.hpp"
#include "augmc/models/lattice.hpp"
#include "augmc/models/morris.hpp"
#include "augmc/models/t_regression.hpp"
#include "augmc/models/toys.hpp"
#include "augmc/oracle/exact.hpp"
#include "augmc/oracle/importance.hpp"
#include "augmc/oracle/laplace.hpp"
#include "augmc/oracle/quadrature.hpp"
#include "augmc/rng.hpp"
#include "augmc/swendsen_wang.hpp"
#include "augmc/target.hpp"

namespace augmc::experiment {

using ordered_json = nlohmann::ordered_json;

struct options {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
};

namespace detail {

// Fixed stream ids per kernel/method name, independent of config order.
inline std::uint64_t stream_id_for(const std::string& kernel) {
  if (kernel == "metropolis") return 1;
  if (kernel == "gibbs") return 2;
  if (kernel == "swendsen-wang") return 3;
  if (kernel == "da") return 4;
  if (kernel == "augmented") return 5;
  if (kernel == "importance") return 10;
  if (kernel == "sir") return 11;
  throw config_error("unknown kernel '" + kernel + "'");
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class csv_writer {
 public:
  csv_writer(const std::filesystem::path& path,
             const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw error("cannot open trace file " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }
  void row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << fmt_double(values[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

class stopwatch {
 public:
  stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Diagnostics block for one scalar series.
inline ordered_json series_block(std::span<const double> series) {
  ordered_json j;
  j["mean"] = ergodic_average(series);
  j["se"] = batch_means_se(series);
  const iact_result t = iact(series);
  j["iact"] = t.tau;
  j["ess"] = t.ess;
  j["iact_reliable"] = t.reliable;
  return j;
}

inline ordered_json echo_config(const config_map& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& [key, value] : cfg.echo()) j[key] = value;
  return j;
}

inline void write_summary(const std::filesystem::path& path,
                          const ordered_json& summary) {
  std::ofstream out(path);
  if (!out) throw error("cannot open summary file " + path.string());
  out << summary.dump(2) << "\n";
}

struct run_params {
  std::uint64_t n_burn = 0;
  std::uint64_t n_keep = 0;
  std::uint64_t thin = 1;
};

inline run_params read_run_params(config_map& cfg) {
  run_params p;
  p.n_burn = cfg.get_count("run.n_burn");
  p.n_keep = cfg.get_count("run.n_keep");
  p.thin = cfg.get_count_or("run.thin", 1);
  return p;
}

// Two-column delimited text (y V), one observation per row.
inline morris_model load_morris_model(const std::string& path, double lambda,
                                      double q) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open dataset file " + path);
  std::vector<double> ys, vs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double y, v;
    if (row >> y) {
      if (!(row >> v))
        throw config_error(path + ":" + std::to_string(line_no) +
                           ": expected two columns (y V)");
      ys.push_back(y);
      vs.push_back(v);
    }
  }
  if (ys.empty()) throw config_error(path + ": no observations");
  Eigen::VectorXd y(static_cast<Eigen::Index>(ys.size()));
  Eigen::VectorXd v(static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = ys[i];
    v[static_cast<Eigen::Index>(i)] = vs[i];
  }
  return morris_model(y, v, lambda, q);
}

// Columns y x_1 ... x_p, one observation per row.
inline t_regression_model load_treg_model(const std::string& path,
                                          double dof) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open dataset file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row_in(line);
    std::vector<double> row;
    double v;
    while (row_in >> v) row.push_back(v);
    if (row.empty()) continue;
    if (row.size() < 2)
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected columns y x_1 ... x_p");
    if (!rows.empty() && row.size() != rows.front().size())
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw config_error(path + ": no observations");
  const std::size_t p = rows.front().size() - 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = rows[i][0];
    for (std::size_t j = 0; j < p; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j + 1];
  }
  return t_regression_model(x, y, dof);
}

// Built-in collinear design: x2 tracks x1 with the given correlation, true
// coefficients (1, 1), unit-scale t errors. Fixed generator stream, so the
// dataset is a pure function of (n, corr, dof).
inline t_regression_model collinear_treg_model(std::size_t n, double corr,
                                               double dof) {
  rng_stream gen(8675309, 0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  const double noise = std::sqrt(1.0 - corr * corr);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const double x1 = gen.normal();
    const double x2 = corr * x1 + noise * gen.normal();
    const double t_err = gen.normal() / std::sqrt(gen.chi_square(dof) / dof);
    x(i, 0) = x1;
    x(i, 1) = x2;
    y[i] = x1 + x2 + t_err;
  }
  return t_regression_model(x, y, dof);
}

// Log-posterior of log(A) for the Morris model (Jacobian included).
inline target_density morris_log_a_target(const morris_model& m) {
  return target_density(1, [&m](std::span<const double> u) {
    return m.log_marginal_a(std::exp(u[0])) + u[0];
  });
}

inline marginal_a_result morris_oracle(const morris_model& m) {
  // The upper edge matters: the second-moment integrand decays like a^{-3/2}
  // on the reference model, so truncation error shrinks as hi^{-1/2}.
  const std::vector<double> grid = log_grid(1e-8, 1e12, 1024);
  return quadrature_marginal_a(m, grid);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// morris: DA / two-component Gibbs on the hierarchy, against the quadrature
// oracle.

inline void run_morris(config_map& cfg, const options& opt,
                       std::ostream& log) {
  namespace fs = std::filesystem;
  const double lambda = cfg.get_real_or("model.lambda", 1.0);
  const double q = cfg.get_real_or("model.q", 1.0);
  const morris_model model =
      cfg.has("data.file")
          ? detail::load_morris_model(cfg.get_string("data.file"), lambda, q)
          : morris_reference_model();
  if (!cfg.has("data.file") && (lambda != 1.0 || q != 1.0))
    throw config_error(
        "morris: custom model.lambda / model.q need data.file as well");
  const detail::run_params rp = detail::read_run_params(cfg);
  const std::uint64_t m_slots = cfg.get_count_or("run.m", 1);
  const std::vector<std::string> kernels =
      cfg.has("kernels") ? cfg.get_string_list("kernels")
                         : std::vector<std::string>{"gibbs"};
  const std::string selection_str =
      cfg.get_string_or("da.selection", "with-replacement");
  selection_mode selection = selection_mode::with_replacement;
  if (selection_str == "without-replacement")
    selection = selection_mode::without_replacement;
  else if (selection_str != "with-replacement")
    throw config_error("morris: da.selection must be with-replacement or "
                       "without-replacement");
  const std::vector<std::uint64_t> seeds = cfg.get_count_list("seeds");
  cfg.finish();

  const morris_a_view view{&model};
  const marginal_a_result oracle = detail::morris_oracle(model);

  for (const std::uint64_t seed : seeds) {
    const detail::stopwatch total_clock;
    ordered_json summary;
    summary["experiment"] = "morris";
    summary["seed"] = seed;
    summary["oracle"] = {{"mean_a", oracle.mean},
                         {"var_a", oracle.variance}};
    ordered_json kernels_block = ordered_json::object();

    for (const std::string& kernel : kernels) {
      const detail::stopwatch clock;
      rng_stream rng(seed, detail::stream_id_for(kernel));
      std::vector<double> raw_a;      // per-iteration A (slot average for DA)
      std::vector<double> slot0_a;    // single-chain series for IACT
      std::vector<double> rb_mean;    // per-iteration E[A | theta]
      std::vector<double> rb_m2;      // per-iteration E[A^2 | theta]
      raw_a.reserve(rp.n_keep);
      slot0_a.reserve(rp.n_keep);
      rb_mean.reserve(rp.n_keep);
      rb_m2.reserve(rp.n_keep);

      const fs::path trace_path =
          fs::path(opt.out_dir) /
          ("morris_" + kernel + "_seed" + std::to_string(seed) + ".csv");

      if (kernel == "gibbs") {
        std::vector<std::string> header{"A"};
        for (std::size_t i = 0; i < model.k(); ++i)
          header.push_back("theta_" + std::to_string(i));
        detail::csv_writer trace(trace_path, header);
        std::pair<double, Eigen::VectorXd> state{1.0, model.y()};
        const std::uint64_t total = rp.n_burn + rp.n_keep * rp.thin;
        std::vector<double> row(1 + model.k());
        for (std::uint64_t it = 1; it <= total; ++it) {
          state = two_component_gibbs(view, std::move(state), rng);
          if (it > rp.n_burn && (it - rp.n_burn) % rp.thin == 0) {
            raw_a.push_back(state.first);
            slot0_a.push_back(state.first);
            rb_mean.push_back(model.a_cond_mean(state.second));
            rb_m2.push_back(model.a_cond_second_moment(state.second));
            row[0] = state.first;
            for (std::size_t i = 0; i < model.k(); ++i)
              row[1 + i] = state.second[static_cast<Eigen::Index>(i)];
            trace.row(row);
          }
        }
      } else if (kernel == "da") {
        std::vector<std::string> header;
        for (std::uint64_t s = 0; s < m_slots; ++s)
          header.push_back("A_" + std::to_string(s));
        detail::csv_writer trace(trace_path, header);
        population<double> pop;
        pop.values.assign(m_slots, 1.0);
        std::vector<Eigen::VectorXd> thetas;
        const std::uint64_t total = rp.n_burn + rp.n_keep * rp.thin;
        std::vector<double> row(m_slots);
        for (std::uint64_t it = 1; it <= total; ++it) {
          pop = da_iterate(view, pop, selection, rng, &thetas);
          if (it > rp.n_burn && (it - rp.n_burn) % rp.thin == 0) {
            double mean_a = 0.0, mean_rb = 0.0, mean_m2 = 0.0;
            for (std::size_t s = 0; s < pop.values.size(); ++s) {
              mean_a += pop.values[s];
              mean_rb += model.a_cond_mean(thetas[s]);
              mean_m2 += model.a_cond_second_moment(thetas[s]);
              row[s] = pop.values[s];
            }
            const double denom = static_cast<double>(pop.values.size());
            raw_a.push_back(mean_a / denom);
            rb_mean.push_back(mean_rb / denom);
            rb_m2.push_back(mean_m2 / denom);
            slot0_a.push_back(pop.values[0]);
            trace.row(row);
          }
        }
      } else {
        throw config_error("morris: unknown kernel '" + kernel +
                           "' (expected gibbs or da)");
      }

      ordered_json kj;
      kj["raw_a"] = detail::series_block(raw_a);
      kj["rb_mean_a"] = detail::series_block(rb_mean);
      // Variance estimate via RB moments, SE by batch means + delta method.
      const double m1 = ergodic_average(rb_mean);
      const double m2 = ergodic_average(rb_m2);
      const double var_a = m2 - m1 * m1;
      const double se_m1 = batch_means_se(rb_mean);
      const double se_m2 = batch_means_se(rb_m2);
      // Var = m2 - m1^2; |dVar| <= se_m2 + 2|m1| se_m1 (conservative).
      const double se_var = se_m2 + 2.0 * std::abs(m1) * se_m1;
      kj["rb_var_a"] = {{"value", var_a}, {"se", se_var}};
      const iact_result t0 = iact(slot0_a);
      kj["iact_chain_a"] = t0.tau;
      kj["ess_chain_a"] = t0.ess;
      kj["error_vs_oracle_mean"] = m1 - oracle.mean;
      kj["error_vs_oracle_var"] = var_a - oracle.variance;
      kj["n_kept"] = raw_a.size();
      kj["wall_clock_seconds"] = clock.seconds();
      kernels_block[kernel] = std::move(kj);
      if (!opt.quiet)
        log << "morris seed " << seed << " kernel " << kernel
            << ": rb mean A = " << m1 << " (oracle " << oracle.mean << ")\n";
    }

    summary["kernels"] = std::move(kernels_block);
    summary["config_echo"] = detail::echo_config(cfg);
    summary["wall_clock_seconds"] = total_clock.seconds();
    detail::write_summary(fs::path(opt.out_dir) /
                              ("morris_seed" + std::to_string(seed) + ".json"),
                          summary);
  }
}

// ---------------------------------------------------------------------------
// treg: collective-move augmented sampler vs component-wise Metropolis.

inline void run_treg(config_map& cfg, const options& opt, std::ostream& log) {
  namespace fs = std::filesystem;
  const double dof = cfg.get_real_or("model.dof", 4.0);
  if (dof <= 0.0) throw config_error("treg: model.dof must be > 0");
  t_regression_model model =
      cfg.has("data.file")
          ? detail::load_treg_model(cfg.get_string("data.file"), dof)
          : detail::collinear_treg_model(
                cfg.get_count_or("design.n", 50),
                cfg.get_real_or("design.corr", 0.999), dof);
  const detail::run_params rp = detail::read_run_params(cfg);
  const std::vector<std::string> kernels =
      cfg.has("kernels") ? cfg.get_string_list("kernels")
                         : std::vector<std::string>{"augmented"};
  const double step = cfg.get_real_or("metropolis.step", 0.05);
  const std::vector<std::uint64_t> seeds = cfg.get_count_list("seeds");
  cfg.finish();

  const treg_augmented_view view{&model};
  const std::size_t p = model.p();

  for (const std::uint64_t seed : seeds) {
    const detail::stopwatch total_clock;
    ordered_json summary;
    summary["experiment"] = "treg";
    summary["seed"] = seed;
    summary["n_obs"] = model.n();
    summary["n_coef"] = p;
    ordered_json kernels_block = ordered_json::object();

    for (const std::string& kernel : kernels) {
      const detail::stopwatch clock;
      rng_stream rng(seed, detail::stream_id_for(kernel));
      std::vector<std::vector<double>> beta_series(p);
      for (auto& s : beta_series) s.reserve(rp.n_keep);
      std::vector<std::string> header;
      for (std::size_t j = 0; j < p; ++j)
        header.push_back("beta_" + std::to_string(j));
      const fs::path trace_path =
          fs::path(opt.out_dir) /
          ("treg_" + kernel + "_seed" + std::to_string(seed) + ".csv");
      detail::csv_writer trace(trace_path, header);
      std::vector<double> row(p);
      std::vector<accept_counter> counters;

      if (kernel == "augmented") {
        std::pair<Eigen::VectorXd, Eigen::VectorXd> state{
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p)),
            Eigen::VectorXd::Ones(static_cast<Eigen::Index>(model.n()))};
        const std::uint64_t total = rp.n_burn + rp.n_keep * rp.thin;
        for (std::uint64_t it = 1; it <= total; ++it) {
          state = two_component_gibbs(view, std::move(state), rng);
          if (it > rp.n_burn && (it - rp.n_burn) % rp.thin == 0) {
            for (std::size_t j = 0; j < p; ++j) {
              row[j] = state.first[static_cast<Eigen::Index>(j)];
              beta_series[j].push_back(row[j]);
            }
            trace.row(row);
          }
        }
      } else if (kernel == "metropolis") {
        const target_density target = model.direct_target();
        auto log_target = [&target](const std::vector<double>& b) {
          return target(std::span<const double>(b.data(), b.size()));
        };
        std::vector<double> state(p, 0.0);
        std::vector<double> steps(p, step);
        counters.assign(p, accept_counter{});
        const std::uint64_t total = rp.n_burn + rp.n_keep * rp.thin;
        for (std::uint64_t it = 1; it <= total; ++it) {
          state = single_site_scan(log_target, std::move(state), steps, rng,
                                   counters);
          if (it > rp.n_burn && (it - rp.n_burn) % rp.thin == 0) {
            for (std::size_t j = 0; j < p; ++j) {
              row[j] = state[j];
              beta_series[j].push_back(state[j]);
            }
            trace.row(row);
          }
        }
      } else {
        throw config_error("treg: unknown kernel '" + kernel +
                           "' (expected augmented or metropolis)");
      }

      ordered_json kj;
      for (std::size_t j = 0; j < p; ++j)
        kj["beta_" + std::to_string(j)] =
            detail::series_block(beta_series[j]);
      if (!counters.empty()) {
        ordered_json rates = ordered_json::array();
        for (const auto& c : counters) rates.push_back(c.rate());
        kj["acceptance_rates"] = std::move(rates);
      }
      kj["n_kept"] = beta_series[0].size();
      kj["wall_clock_seconds"] = clock.seconds();
      kernels_block[kernel] = std::move(kj);
      if (!opt.quiet)
        log << "treg seed " << seed << " kernel " << kernel
            << ": mean beta_0 = " << ergodic_average(beta_series[0]) << "\n";
    }

    summary["kernels"] = std::move(kernels_block);
    summary["config_echo"] = detail::echo_config(cfg);
    summary["wall_clock_seconds"] = total_clock.seconds();
    detail::write_summary(fs::path(opt.out_dir) /
                              ("treg_seed" + std::to_string(seed) + ".json"),
                          summary);
  }
}

// ---------------------------------------------------------------------------
// ising / potts: single-site Metropolis vs heat-bath vs collective moves.

inline void run_lattice(config_map& cfg, const options& opt,
                        const std::string& which, std::ostream& log) {
  namespace fs = std::filesystem;
  const std::size_t side = cfg.get_count("lattice.side");
  const double coupling = cfg.get_real("lattice.coupling");
  const lattice_kind kind =
      which == "ising" ? lattice_kind::ising : lattice_kind::potts;
  const std::size_t colors =
      kind == lattice_kind::ising ? 2 : cfg.get_count_or("lattice.colors", 3);
  const lattice_model model(kind, side, coupling, colors);
  const detail::run_params rp = detail::read_run_params(cfg);
  const std::vector<std::string> kernels =
      cfg.has("kernels") ? cfg.get_string_list("kernels")
                         : std::vector<std::string>{"metropolis"};
  const std::string init = cfg.get_string_or("init", "random");
  if (init != "random" && init != "uniform")
    throw config_error(which + ": init must be random or uniform");
  const std::vector<std::uint64_t> seeds = cfg.get_count_list("seeds");
  cfg.finish();

  for (const std::uint64_t seed : seeds) {
    const detail::stopwatch total_clock;
    ordered_json summary;
    summary["experiment"] = which;
    summary["seed"] = seed;
    summary["lattice"] = {{"side", side},
                          {"coupling", coupling},
                          {"states_per_site", colors}};
    ordered_json kernels_block = ordered_json::object();
    std::vector<std::pair<std::string, double>> kernel_iact;

    for (const std::string& kernel : kernels) {
      const detail::stopwatch clock;
      rng_stream rng(seed, detail::stream_id_for(kernel));
      lattice_model::config state = init == "random"
                                        ? model.random_config(rng)
                                        : model.constant_config(model.value(
                                              colors - 1));
      accept_counter counter;
      std::vector<double> mag, abs_mag, energy;
      mag.reserve(rp.n_keep);
      abs_mag.reserve(rp.n_keep);
      energy.reserve(rp.n_keep);

      const std::uint64_t total = rp.n_burn + rp.n_keep * rp.thin;
      for (std::uint64_t it = 1; it <= total; ++it) {
        if (kernel == "metropolis") {
          for (std::size_t s = 0; s < model.n_sites(); ++s)
            model.metropolis_site_update(state, s, rng, &counter);
        } else if (kernel == "gibbs") {
          for (std::size_t s = 0; s < model.n_sites(); ++s)
            state[s] = model.full_conditional(state, s, rng);
        } else if (kernel == "swendsen-wang") {
          state = sw_step(model, std::move(state), rng);
        } else {
          throw config_error(which + ": unknown kernel '" + kernel +
                             "' (expected metropolis, gibbs, swendsen-wang)");
        }
        if (it > rp.n_burn && (it - rp.n_burn) % rp.thin == 0) {
          const double m = magnetization(model, state);
          mag.push_back(m);
          abs_mag.push_back(std::abs(m));
          energy.push_back(model.energy(state));
        }
      }

      const fs::path trace_path =
          fs::path(opt.out_dir) /
          (which + "_" + kernel + "_seed" + std::to_string(seed) + ".csv");
      detail::csv_writer trace(trace_path,
                               {"magnetization", "abs_magnetization",
                                "energy"});
      for (std::size_t i = 0; i < mag.size(); ++i)
        trace.row(std::vector<double>{mag[i], abs_mag[i], energy[i]});

      // |m| is the scalar whose mixing we benchmark on the Ising model; the
      // Potts magnetization is already nonnegative.
      const std::vector<double>& bench =
          kind == lattice_kind::ising ? abs_mag : mag;
      ordered_json kj;
      kj["abs_magnetization"] = detail::series_block(bench);
      kj["energy_mean"] = ergodic_average(energy);
      if (kernel == "metropolis") kj["acceptance_rate"] = counter.rate();
      kj["n_kept"] = mag.size();
      kj["wall_clock_seconds"] = clock.seconds();
      kernel_iact.emplace_back(kernel,
                               kj["abs_magnetization"]["iact"].get<double>());
      kernels_block[kernel] = std::move(kj);
      if (!opt.quiet)
        log << which << " seed " << seed << " kernel " << kernel
            << ": iact(|m|) = " << kernel_iact.back().second << "\n";
    }

    std::sort(kernel_iact.begin(), kernel_iact.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    ordered_json order = ordered_json::array();
    for (const auto& [name, tau] : kernel_iact) order.push_back(name);
    summary["kernels"] = std::move(kernels_block);
    summary["kernels_by_iact"] = std::move(order);
    summary["config_echo"] = detail::echo_config(cfg);
    summary["wall_clock_seconds"] = total_clock.seconds();
    detail::write_summary(
        fs::path(opt.out_dir) /
            (which + "_seed" + std::to_string(seed) + ".json"),
        summary);
  }
}

// ---------------------------------------------------------------------------
// compare-baselines: the deterministic 1980s toolkit vs DA/Gibbs on E[A|y].

inline void run_compare_baselines(config_map& cfg, const options& opt,
                                  std::ostream& log) {
  namespace fs = std::filesystem;
  const double lambda = cfg.get_real_or("model.lambda", 1.0);
  const double q = cfg.get_real_or("model.q", 1.0);
  const morris_model model =
      cfg.has("data.file")
          ? detail::load_morris_model(cfg.get_string("data.file"), lambda, q)
          : morris_reference_model();
  const std::size_t gh_degree = cfg.get_count_or("baseline.gh_degree", 20);
  const std::size_t is_draws = cfg.get_count_or("baseline.is_draws", 20000);
  const std::size_t is_rounds = cfg.get_count_or("baseline.is_rounds", 4);
  const double is_dof = cfg.get_real_or("baseline.is_dof", 5.0);
  const std::size_t sir_m_out = cfg.get_count_or("baseline.sir_m_out", 1000);
  const detail::run_params rp = detail::read_run_params(cfg);
  const std::vector<std::uint64_t> seeds = cfg.get_count_list("seeds");
  cfg.finish();
  if (is_dof <= 2.0)
    throw config_error("compare-baselines: baseline.is_dof must be > 2");

  const marginal_a_result oracle = detail::morris_oracle(model);
  const target_density log_a_target = detail::morris_log_a_target(model);
  const auto exp_u = [](std::span<const double> u) { return std::exp(u[0]); };

  for (const std::uint64_t seed : seeds) {
    const detail::stopwatch total_clock;
    struct method_row {
      std::string name;
      double estimate;
      double se;  // NaN when the method has no MC error
      double seconds;
    };
    std::vector<method_row> table;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    {
      const detail::stopwatch clock;
      const double est = laplace_moments(log_a_target, exp_u,
                                         Eigen::VectorXd::Zero(1));
      table.push_back({"laplace", est, nan, clock.seconds()});
    }
    {
      const detail::stopwatch clock;
      const gh_result adapted =
          gauss_hermite_moments(log_a_target, gh_degree, 50);
      const double est =
          gh_expectation(log_a_target, exp_u, adapted, gh_degree);
      table.push_back({"gauss-hermite", est, nan, clock.seconds()});
    }
    is_result is;
    {
      const detail::stopwatch clock;
      rng_stream rng(seed, detail::stream_id_for("importance"));
      is = importance_sampling_student_t(log_a_target, is_draws, is_rounds,
                                         is_dof, rng);
      const weighted_estimate est = is_expectation(is, exp_u);
      table.push_back({"importance", est.value, est.se, clock.seconds()});
    }
    {
      const detail::stopwatch clock;
      rng_stream rng(seed, detail::stream_id_for("sir"));
      const std::vector<Eigen::VectorXd> kept = sir_resample(
          std::span<const Eigen::VectorXd>(is.draws),
          std::span<const double>(is.log_weights), sir_m_out, rng);
      std::vector<double> a_values;
      a_values.reserve(kept.size());
      for (const auto& u : kept) a_values.push_back(std::exp(u[0]));
      const double est = ergodic_average(a_values);
      const double se = std::sqrt(sample_variance(a_values) /
                                  static_cast<double>(a_values.size()));
      table.push_back({"sir", est, se, clock.seconds()});
    }
    {
      const detail::stopwatch clock;
      rng_stream rng(seed, detail::stream_id_for("gibbs"));
      const morris_a_view view{&model};
      std::pair<double, Eigen::VectorXd> state{1.0, model.y()};
      std::vector<double> rb;
      rb.reserve(rp.n_keep);
      const std::uint64_t total = rp.n_burn + rp.n_keep * rp.thin;
      for (std::uint64_t it = 1; it <= total; ++it) {
        state = two_component_gibbs(view, std::move(state), rng);
        if (it > rp.n_burn && (it - rp.n_burn) % rp.thin == 0)
          rb.push_back(model.a_cond_mean(state.second));
      }
      table.push_back({"da-gibbs", ergodic_average(rb), batch_means_se(rb),
                       clock.seconds()});
    }

    const fs::path csv_path =
        fs::path(opt.out_dir) /
        ("compare-baselines_seed" + std::to_string(seed) + ".csv");
    std::ofstream csv(csv_path);
    if (!csv) throw error("cannot open table file " + csv_path.string());
    csv << "method,estimate,error_vs_oracle,se,time_seconds\n";
    for (const auto& row : table)
      csv << row.name << "," << detail::fmt_double(row.estimate) << ","
          << detail::fmt_double(row.estimate - oracle.mean) << ","
          << detail::fmt_double(row.se) << ","
          << detail::fmt_double(row.seconds) << "\n";

    ordered_json summary;
    summary["experiment"] = "compare-baselines";
    summary["seed"] = seed;
    summary["oracle"] = {{"mean_a", oracle.mean}, {"var_a", oracle.variance}};
    ordered_json methods = ordered_json::object();
    for (const auto& row : table) {
      ordered_json mj;
      mj["estimate"] = row.estimate;
      mj["error_vs_oracle"] = row.estimate - oracle.mean;
      if (std::isfinite(row.se)) mj["se"] = row.se;
      mj["wall_clock_seconds"] = row.seconds;
      methods[row.name] = std::move(mj);
      if (!opt.quiet)
        log << "compare-baselines seed " << seed << " " << row.name << ": "
            << row.estimate << " (oracle " << oracle.mean << ")\n";
    }
    summary["methods"] = std::move(methods);
    summary["weight_ess"] = is.weight_ess;
    summary["config_echo"] = detail::echo_config(cfg);
    summary["wall_clock_seconds"] = total_clock.seconds();
    detail::write_summary(
        fs::path(opt.out_dir) /
            ("compare-baselines_seed" + std::to_string(seed) + ".json"),
        summary);
  }
}

// ---------------------------------------------------------------------------

inline void run(config_map cfg, const options& opt,
                std::ostream& log = std::cout) {
  std::filesystem::create_directories(opt.out_dir);
  if (opt.seed_override)
    cfg.override_value("seeds", std::to_string(*opt.seed_override));
  const std::string experiment = cfg.get_string("experiment");
  if (experiment == "morris")
    run_morris(cfg, opt, log);
  else if (experiment == "treg")
    run_treg(cfg, opt, log);
  else if (experiment == "ising" || experiment == "potts")
    run_lattice(cfg, opt, experiment, log);
  else if (experiment == "compare-baselines")
    run_compare_baselines(cfg, opt, log);
  else
    throw config_error("unknown experiment '" + experiment + "'");
}

}  // namespace augmc::experiment
