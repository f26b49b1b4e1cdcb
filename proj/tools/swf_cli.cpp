// swf: generate data, fit and evaluate power-mean welfare models, run sweeps,
// property checks and bound calculations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swf/analysis.hpp"
#include "swf/datagen.hpp"
#include "swf/io.hpp"
#include "swf/learner.hpp"
#include "swf/metrics.hpp"
#include "swf/plot.hpp"
#include "swf/sweep.hpp"
#include "swf/verify.hpp"

namespace fs = std::filesystem;
using namespace swf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitProperty = 3;

struct PropertyFailure {};

void add_grid_flags(CLI::App& cmd, GridConfig& grid) {
  cmd.add_option("--p-lower", grid.p_lower, "Lowest grid value of p")->capture_default_str();
  cmd.add_option("--p-upper", grid.p_upper, "Highest grid value of p")->capture_default_str();
  cmd.add_option("--p-step", grid.step, "Grid spacing")->capture_default_str();
}

void add_gd_flags(CLI::App& cmd, GDConfig& gd) {
  cmd.add_option("--lr", gd.initial_lr, "Initial learning rate")->capture_default_str();
  cmd.add_option("--max-iters", gd.max_iters, "Iteration cap per start")->capture_default_str();
  cmd.add_option("--patience", gd.patience, "Iterations without gain before halving lr")
      ->capture_default_str();
  cmd.add_option("--min-lr", gd.min_lr, "Stop once lr drops below this")->capture_default_str();
  cmd.add_option("--loss-window", gd.loss_window, "Window for the plateau test")
      ->capture_default_str();
  cmd.add_option("--loss-tol", gd.loss_range_tol, "Plateau tolerance relative to start loss")
      ->capture_default_str();
}

Dataset load_dataset(const fs::path& csv, bool ordinal) {
  if (ordinal) return read_ordinal_csv(csv);
  return read_cardinal_csv(csv);
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning weighted power-mean social welfare functions"};
  app.require_subcommand(1);

  // gen
  GenConfig gen;
  std::string gen_kind = "cardinal";
  std::string gen_noise = "none";
  double nu = 0.0, rho = 0.0, tau = 10.0, tau_max = 50.0, p_star = 2.72;
  std::optional<std::uint64_t> gen_seed;
  fs::path gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset and its JSON sidecar");
  gen_cmd->add_option("--kind", gen_kind, "cardinal or ordinal")
      ->check(CLI::IsMember({"cardinal", "ordinal"}))
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen_noise, "none, gaussian, flip or logistic")
      ->check(CLI::IsMember({"none", "gaussian", "flip", "logistic"}))
      ->capture_default_str();
  gen_cmd->add_option("--d", gen.d, "Individuals")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Actions")->capture_default_str();
  gen_cmd->add_option("--u-min", gen.u_min)->capture_default_str();
  gen_cmd->add_option("--u-max", gen.u_max)->capture_default_str();
  gen_cmd->add_option("--pairs-per-sample", gen.pairs_per_sample)->capture_default_str();
  gen_cmd->add_option("--nu", nu, "Gaussian noise scale")->capture_default_str();
  gen_cmd->add_option("--rho", rho, "Flip probability")->capture_default_str();
  gen_cmd->add_option("--tau", tau, "Logistic temperature tau*")->capture_default_str();
  gen_cmd->add_option("--tau-max", tau_max)->capture_default_str();
  gen_cmd->add_option("--p-star", p_star, "True power")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "Master seed")->required();
  gen_cmd->add_option("--out", gen_out, "Output CSV; the sidecar goes next to it")->required();

  // fit-cardinal / fit-ordinal
  GridConfig fit_grid;
  GDConfig fit_gd;
  fs::path fit_data, fit_out, fit_report;
  std::uint64_t fit_seed = 0;
  unsigned fit_threads = 0;
  std::string ordinal_task = "logistic";
  double fit_tau_max = 50.0, fit_rho = 0.0;
  auto add_fit_common = [&](CLI::App* cmd) {
    cmd->add_option("--data", fit_data, "Dataset CSV")->required();
    cmd->add_option("--out", fit_out, "Model JSON")->required();
    cmd->add_option("--report", fit_report, "Full fit report JSON");
    cmd->add_option("--seed", fit_seed, "Seed for randomized search")->capture_default_str();
    cmd->add_option("--threads", fit_threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    add_grid_flags(*cmd, fit_grid);
    add_gd_flags(*cmd, fit_gd);
  };
  auto* fit_card = app.add_subcommand("fit-cardinal", "Fit (w, p) to welfare values");
  add_fit_common(fit_card);
  auto* fit_ord = app.add_subcommand("fit-ordinal", "Fit (w, p[, tau]) to pairwise comparisons");
  add_fit_common(fit_ord);
  fit_ord->add_option("--task", ordinal_task, "logistic or unbiased")
      ->check(CLI::IsMember({"logistic", "unbiased"}))
      ->capture_default_str();
  fit_ord->add_option("--tau-max", fit_tau_max)->capture_default_str();
  fit_ord->add_option("--rho", fit_rho, "Flip rate assumed by the unbiased loss")
      ->capture_default_str();

  // eval
  fs::path eval_model, eval_data, eval_truth, eval_out;
  double eval_rho = 0.0, eval_tau_max = 50.0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on held-out data");
  eval_cmd->add_option("--model", eval_model)->required();
  eval_cmd->add_option("--data", eval_data, "Test CSV")->required();
  eval_cmd->add_option("--truth", eval_truth, "Sidecar JSON (default: next to --data)");
  eval_cmd->add_option("--rho", eval_rho, "Flip rate for the unbiased loss")
      ->capture_default_str();
  eval_cmd->add_option("--tau-max", eval_tau_max)->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "Write the metrics JSON here");

  // sweep
  ExperimentConfig sweep_cfg;
  fs::path sweep_config, sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  std::string sweep_task = "cardinal";
  std::vector<std::size_t> sweep_d;
  std::vector<std::size_t> sweep_n;
  std::vector<double> sweep_noise;
  std::optional<int> sweep_repeats;
  std::optional<double> sweep_p_star, sweep_tau_max, sweep_test_fraction;
  GridConfig sweep_grid_flags{std::nan(""), std::nan(""), std::nan("")};
  std::optional<int> sweep_max_iters;
  std::optional<double> sweep_loss_tol;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an (n x noise x repeat) experiment");
  sweep_cmd->add_option("--config", sweep_config, "ExperimentConfig JSON");
  sweep_cmd->add_option("--task", sweep_task, "cardinal, ordinal_logistic or ordinal_unbiased")
      ->check(CLI::IsMember({"cardinal", "ordinal_logistic", "ordinal_unbiased"}));
  sweep_cmd->add_option("--d", sweep_d, "One or more dimensions; several give a collapse plot")
      ->delimiter(',');
  sweep_cmd->add_option("--n", sweep_n, "Training sizes")->delimiter(',');
  sweep_cmd->add_option("--noise", sweep_noise, "nu, tau* or rho values")->delimiter(',');
  sweep_cmd->add_option("--repeats", sweep_repeats);
  sweep_cmd->add_option("--test-fraction", sweep_test_fraction);
  sweep_cmd->add_option("--p-star", sweep_p_star);
  sweep_cmd->add_option("--tau-max", sweep_tau_max);
  sweep_cmd->add_option("--p-lower", sweep_grid_flags.p_lower);
  sweep_cmd->add_option("--p-upper", sweep_grid_flags.p_upper);
  sweep_cmd->add_option("--p-step", sweep_grid_flags.step);
  sweep_cmd->add_option("--max-iters", sweep_max_iters);
  sweep_cmd->add_option("--loss-tol", sweep_loss_tol);
  sweep_cmd->add_option("--threads", sweep_cfg.threads, "Concurrent cells (0 = all cores)");
  sweep_cmd->add_option("--seed", sweep_seed, "Master seed")->required();
  sweep_cmd->add_option("--out-dir", sweep_out, "Directory for metrics.csv and plots")
      ->required();

  // verify
  VerifyConfig verify_cfg;
  fs::path verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Run randomized property checks");
  verify_cmd->add_option("--seed", verify_cfg.seed)->capture_default_str();
  verify_cmd->add_option("--scale", verify_cfg.scale, "Multiplier on case counts")
      ->capture_default_str();
  verify_cmd->add_option("--out", verify_out, "Write the JSON report here");

  // bound
  BoundQuery bound;
  std::string theorem = "T2a";
  std::optional<double> bound_rho, bound_tau;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate an excess-risk bound");
  bound_cmd->add_option("--theorem", theorem, "T1a T1b T2a T2b T3a T3b T4a T4b")
      ->capture_default_str();
  bound_cmd->add_option("--n", bound.n)->capture_default_str();
  bound_cmd->add_option("--d", bound.d)->capture_default_str();
  bound_cmd->add_option("--delta", bound.delta)->capture_default_str();
  bound_cmd->add_option("--rho", bound_rho);
  bound_cmd->add_option("--tau-max", bound_tau);
  bound_cmd->add_option("--u-min", bound.u_min)->capture_default_str();
  bound_cmd->add_option("--u-max", bound.u_max)->capture_default_str();
  bound_cmd->add_option("--c", bound.c, "Covering-number constant")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen_cmd) {
      gen.seed = *gen_seed;
      if (gen_noise == "gaussian") gen.noise = GaussianNoise{nu};
      if (gen_noise == "flip") gen.noise = FlipNoise{rho};
      if (gen_noise == "logistic") gen.noise = LogisticNoise{tau, tau_max};
      validate(gen);
      std::optional<double> tau_star;
      if (gen_noise == "logistic") tau_star = tau;
      const GroundTruth truth = make_ground_truth(gen, p_star, tau_star);
      if (gen_kind == "cardinal") {
        write_cardinal_csv(gen_out, generate_cardinal(gen, truth));
      } else {
        write_ordinal_csv(gen_out, generate_ordinal(gen, truth));
      }
      write_sidecar(sidecar_path(gen_out), {gen, truth, gen_kind});
      std::cout << gen_out.string() << '\n' << sidecar_path(gen_out).string() << '\n';
    } else if (*fit_card || *fit_ord) {
      const bool ordinal = static_cast<bool>(*fit_ord);
      Task task = Task::cardinal();
      if (ordinal) {
        task = ordinal_task == "logistic" ? Task::ordinal_logistic(fit_tau_max)
                                          : Task::ordinal_unbiased(fit_rho);
      }
      const Dataset data = load_dataset(fit_data, ordinal);
      const FitReport report = fit(data, fit_grid, task, fit_gd, fit_seed, {fit_threads});
      const auto model = model_to_json(report.params, report.task);
      write_json(fit_out, model);
      if (!fit_report.empty()) write_json(fit_report, report_to_json(report));
      print_json(model);
    } else if (*eval_cmd) {
      TaskKind kind = TaskKind::kCardinal;
      const ModelParams model = model_from_json(read_json(eval_model), &kind);
      const DatasetMeta meta =
          read_sidecar(eval_truth.empty() ? sidecar_path(eval_data) : eval_truth);
      Task task{kind, eval_tau_max, eval_rho};
      const Dataset data = load_dataset(eval_data, kind != TaskKind::kCardinal);
      const EvaluationReport ev = evaluate(model, task, data, meta.truth);
      auto metrics = [](const Evaluation& e) {
        auto num = [](double x) { return std::isnan(x) ? nlohmann::json() : nlohmann::json(x); };
        return nlohmann::json{{"test_loss", e.loss},
                              {"noiseless_test_loss", e.noiseless_loss},
                              {"test_accuracy", num(e.accuracy)},
                              {"noiseless_test_accuracy", num(e.noiseless_accuracy)}};
      };
      const nlohmann::json out{
          {"model", metrics(ev.model)}, {"truth", metrics(ev.truth)}, {"kl_weights", ev.kl}};
      if (!eval_out.empty()) write_json(eval_out, out);
      print_json(out);
    } else if (*sweep_cmd) {
      // Task-specific defaults, then the config file, then explicit flags.
      nlohmann::json file_cfg = nlohmann::json::object();
      if (!sweep_config.empty()) file_cfg = read_json(sweep_config);
      TaskKind kind = parse_task(sweep_task);
      if (sweep_cmd->count("--task") == 0 && file_cfg.contains("task")) {
        kind = parse_task(file_cfg.at("task").get<std::string>());
      }
      ExperimentConfig cfg = experiment_config_from_json(file_cfg, default_experiment(kind));
      cfg.task.kind = kind;
      cfg.master_seed = *sweep_seed;
      if (!sweep_n.empty()) cfg.n_values = sweep_n;
      if (!sweep_noise.empty()) cfg.noise_values = sweep_noise;
      if (sweep_repeats) cfg.repeats = *sweep_repeats;
      if (sweep_test_fraction) cfg.test_fraction = *sweep_test_fraction;
      if (sweep_p_star) cfg.p_star = *sweep_p_star;
      if (sweep_tau_max) cfg.task.tau_max = *sweep_tau_max;
      if (!std::isnan(sweep_grid_flags.p_lower)) cfg.grid.p_lower = sweep_grid_flags.p_lower;
      if (!std::isnan(sweep_grid_flags.p_upper)) cfg.grid.p_upper = sweep_grid_flags.p_upper;
      if (!std::isnan(sweep_grid_flags.step)) cfg.grid.step = sweep_grid_flags.step;
      if (sweep_max_iters) cfg.gd.max_iters = *sweep_max_iters;
      if (sweep_loss_tol) cfg.gd.loss_range_tol = *sweep_loss_tol;
      if (sweep_cmd->count("--threads") > 0) cfg.threads = sweep_cfg.threads;
      if (sweep_d.empty()) sweep_d = {cfg.gen.d};

      std::error_code ec;
      fs::create_directories(sweep_out, ec);
      if (ec) throw IoError(sweep_out, ec.message());
      std::vector<MetricsRow> all;
      for (std::size_t d : sweep_d) {
        cfg.gen.d = d;
        validate(cfg);
        const auto rows = run_sweep(cfg);
        const fs::path dir = sweep_d.size() == 1 ? sweep_out : sweep_out / ("d" + std::to_string(d));
        fs::create_directories(dir, ec);
        if (ec) throw IoError(dir, ec.message());
        write_json(dir / "config.json", to_json(cfg));
        write_metrics_csv(dir / "metrics.csv", rows);
        emit_plots(rows, dir);
        all.insert(all.end(), rows.begin(), rows.end());
      }
      if (sweep_d.size() > 1) {
        write_metrics_csv(sweep_out / "metrics.csv", all);
        if (kind != TaskKind::kCardinal) {
          emit_collapse_plots(all, sweep_out);
          const CollapseSummary s = collapse_spread(all);
          write_json(sweep_out / "collapse.json", {{"spread_vs_n", s.spread_vs_n},
                                                   {"spread_vs_eta", s.spread_vs_eta},
                                                   {"reduction", s.reduction()}});
        }
      }
      std::cout << (sweep_out / "metrics.csv").string() << '\n';
    } else if (*verify_cmd) {
      const auto checks = run_property_checks(verify_cfg);
      const auto report = checks_to_json(checks);
      if (!verify_out.empty()) write_json(verify_out, report);
      print_json(report);
      if (!report.at("passed").get<bool>()) throw PropertyFailure{};
    } else if (*bound_cmd) {
      bound.theorem = parse_theorem(theorem);
      bound.rho = bound_rho;
      bound.tau_max = bound_tau;
      const double value = bound_value(bound);
      print_json({{"theorem", theorem},
                  {"n", bound.n},
                  {"d", bound.d},
                  {"delta", bound.delta},
                  {"xi", xi(bound.u_min, bound.u_max)},
                  {"kappa", kappa(bound.u_min, bound.u_max)},
                  {"value", value}});
    }
  } catch (const PropertyFailure&) {
    return kExitProperty;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid JSON content: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
