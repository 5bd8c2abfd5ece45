// Command-line front end: `all train`, `all experiment`, `all fixture`.
//
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 infeasible
// bounds, 4 iteration budget exhausted without convergence.

#include "all/dataset_io.hpp"
#include "all/experiment.hpp"
#include "all/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNotConverged = 4;

// Relative dataset paths fall back to $ALL_DATA_DIR when not found in place.
std::string resolve_data_path(const std::string& path) {
  if (fs::exists(path)) return path;
  const char* dir = std::getenv("ALL_DATA_DIR");
  if (dir != nullptr) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

struct BoundOption {
  all::BoundMode mode = all::BoundMode::TrueError;
  double value = 0.3;
};

BoundOption parse_bounds(const std::string& text) {
  if (text == "true") return {all::BoundMode::TrueError, 0.0};
  if (text.rfind("fixed:", 0) == 0) {
    const double v = std::stod(text.substr(6));
    if (!(v > 0.0 && v < 1.0)) {
      throw CLI::ValidationError("--bounds", "fixed bound must lie in (0,1)");
    }
    return {all::BoundMode::Fixed, v};
  }
  throw CLI::ValidationError("--bounds", "expected 'true' or 'fixed:<value>'");
}

struct SolverFlags {
  double step = 0.01;
  std::string schedule = "invsqrt";
  double rho = 0.1;
  int max_iters = 10000;
  double tol = 1e-6;

  void attach(CLI::App* cmd) {
    cmd->add_option("--step", step, "gradient step size alpha");
    cmd->add_option("--schedule", schedule, "step schedule")
        ->check(CLI::IsMember({"constant", "invsqrt"}));
    cmd->add_option("--rho", rho, "augmented-Lagrangian weight");
    cmd->add_option("--max-iters", max_iters, "iteration budget");
    cmd->add_option("--tol", tol, "convergence threshold");
  }

  all::SolverConfig config() const {
    all::SolverConfig cfg;
    cfg.step_size = step;
    cfg.schedule = schedule == "constant" ? all::StepSchedule::Constant
                                          : all::StepSchedule::InvSqrt;
    cfg.rho = rho;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    return cfg;
  }
};

json solver_json(const all::SolverConfig& cfg) {
  return {{"step_size", cfg.step_size},
          {"schedule",
           cfg.schedule == all::StepSchedule::Constant ? "constant" : "invsqrt"},
          {"rho", cfg.rho},
          {"max_iters", cfg.max_iters},
          {"tol", cfg.tol}};
}

const char* status_name(all::TrainStatus status) {
  switch (status) {
    case all::TrainStatus::Converged:
      return "converged";
    case all::TrainStatus::IterationLimit:
      return "iteration_limit";
    case all::TrainStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

int run_train(const std::string& data_path, const std::string& manifest_path,
              const std::string& bounds_text, int signals, unsigned seed,
              const SolverFlags& solver_flags, const std::string& out_dir) {
  const BoundOption bounds = parse_bounds(bounds_text);
  const all::DatasetManifest manifest =
      all::DatasetManifest::load_file(resolve_data_path(manifest_path));
  const all::LoadedDataset loaded =
      all::load_dataset(resolve_data_path(data_path), manifest);

  all::SplitSpec spec;
  spec.seed = seed;
  const all::SplitData split = all::split_dataset(loaded.data, spec);

  std::vector<int> features = loaded.ws_features;
  if (signals < 1 || signals > static_cast<int>(features.size())) {
    throw CLI::ValidationError("--signals", "out of range for the manifest");
  }
  features.resize(static_cast<size_t>(signals));

  const all::SignalBundle bundle = all::simulate_signals(
      split, features, bounds.mode, bounds.value, all::SupervisedConfig{});
  const all::WeakSignalSet ws = bundle.signal_set(features.size());

  fs::create_directories(out_dir);

  // Weak signals over the training split, one column per signal.
  {
    std::ofstream out(fs::path(out_dir) / "signals.csv");
    std::vector<all::Vector> columns;
    for (const auto& q : bundle.on_train) columns.push_back(q.probs());
    all::write_signals_csv(out, split.train, bundle.names, columns);
  }

  // Exact feasibility pre-check where the LP is affordable.
  bool lp_infeasible = false;
  if (split.train.n() <= 1000) {
    lp_infeasible = !all::bounds_feasible(ws);
  }

  all::AllRun run;
  if (!lp_infeasible) {
    run = all::train_all_classifier(split.train.features, ws,
                                    solver_flags.config());
  }
  const bool infeasible =
      lp_infeasible || (!lp_infeasible &&
                        run.result.status == all::TrainStatus::Infeasible);

  json record = {
      {"command", "train"},
      {"data", data_path},
      {"manifest", manifest_path},
      {"seed", seed},
      {"signals", signals},
      {"bound_mode", bounds.mode == all::BoundMode::TrueError ? "true" : "fixed"},
      {"bounds", std::vector<double>(bundle.bounds.begin(),
                                     bundle.bounds.begin() + signals)},
      {"solver", solver_json(solver_flags.config())},
  };

  if (infeasible) {
    record["status"] = "infeasible";
    record["converged"] = false;
    std::ofstream(fs::path(out_dir) / "run.jsonl", std::ios::app)
        << record.dump() << '\n';
    std::cerr << "infeasible weak-signal bounds: the constraint polytope is "
                 "empty or training diverged\n";
    return kExitInfeasible;
  }

  {
    std::ofstream out(fs::path(out_dir) / "trace.csv");
    run.result.trace.write_csv(out);
  }
  run.classifier.save_file((fs::path(out_dir) / "model.txt").string());

  const all::Vector p_train =
      run.classifier.predict_proba(split.train.features);
  record["status"] = status_name(run.result.status);
  record["converged"] = run.result.status == all::TrainStatus::Converged;
  record["iterations"] = run.result.iterations;
  record["expected_error_final"] =
      run.result.trace.records.back().expected_error;
  if (split.train.n() <= 1000) {
    record["final_primal"] =
        all::primal_value(all::LabelDistribution(p_train), ws);
  } else {
    record["final_primal"] = nullptr;
  }
  const double test_acc = split.test.true_labels
                              ? all::accuracy(run.classifier.predict_proba(
                                                  split.test.features),
                                              *split.test.true_labels)
                              : -1.0;
  record["test_accuracy"] = test_acc;
  std::ofstream(fs::path(out_dir) / "run.jsonl", std::ios::app)
      << record.dump() << '\n';

  std::cout << "status: " << status_name(run.result.status) << " after "
            << run.result.iterations << " iterations\n"
            << "test accuracy: " << test_acc << "\n"
            << "artifacts: " << out_dir << "/{model.txt,trace.csv,signals.csv,run.jsonl}\n";
  return run.result.status == all::TrainStatus::Converged ? kExitOk
                                                          : kExitNotConverged;
}

std::vector<double> parse_range(const std::string& text) {
  // lo:hi:step
  const auto a = text.find(':');
  const auto b = text.rfind(':');
  if (a == std::string::npos || b == a) {
    throw CLI::ValidationError("--values", "expected lo:hi:step");
  }
  const double lo = std::stod(text.substr(0, a));
  const double hi = std::stod(text.substr(a + 1, b - a - 1));
  const double step = std::stod(text.substr(b + 1));
  if (step <= 0.0 || lo > hi) {
    throw CLI::ValidationError("--values", "bad range");
  }
  std::vector<double> values;
  for (double v = lo; v <= hi + 1e-12; v += step) values.push_back(v);
  return values;
}

int resolve_signal_index(const std::string& text, size_t available) {
  std::string t = text;
  if (t.rfind("ws", 0) == 0) t = t.substr(2);
  const int idx = std::stoi(t);
  if (idx < 1 || idx > static_cast<int>(available)) {
    throw CLI::ValidationError("--good/--bad", "signal index out of range");
  }
  return idx - 1;
}

int run_experiment(const std::string& study, const std::string& data_path,
                   const std::string& manifest_path,
                   const std::string& bounds_text, int splits, int jobs,
                   const SolverFlags& solver_flags, const std::string& good,
                   const std::string& bad, int max_copies,
                   const std::string& values, const std::string& out_dir,
                   const std::string& dataset_name) {
  const BoundOption bounds = parse_bounds(bounds_text);
  const all::DatasetManifest manifest =
      all::DatasetManifest::load_file(resolve_data_path(manifest_path));
  const all::LoadedDataset loaded =
      all::load_dataset(resolve_data_path(data_path), manifest);

  all::GridConfig config;
  config.ws_features = loaded.ws_features;
  config.bound_mode = bounds.mode;
  config.fixed_bound = bounds.value;
  config.jobs = jobs;
  config.solver = solver_flags.config();
  config.seeds.clear();
  for (int s = 0; s < splits; ++s) config.seeds.push_back(static_cast<unsigned>(s));

  fs::create_directories(out_dir);
  const std::string name =
      dataset_name.empty() ? fs::path(data_path).stem().string() : dataset_name;

  if (study == "grid") {
    const auto rows = all::run_grid(loaded.data, config);
    {
      std::ofstream out(fs::path(out_dir) / "results.csv");
      all::write_results_csv(out, name, rows, config.seeds);
    }
    {
      std::ofstream out(fs::path(out_dir) / "summary.csv");
      all::write_summary_csv(out, name, rows);
    }
    all::write_table(std::cout, rows);
    return kExitOk;
  }

  if (study == "dependent") {
    const int gi = resolve_signal_index(good, loaded.ws_features.size());
    const int bi = resolve_signal_index(bad, loaded.ws_features.size());
    const auto curve = all::dependent_error_study(
        loaded.data, loaded.ws_features[static_cast<size_t>(gi)],
        loaded.ws_features[static_cast<size_t>(bi)], max_copies, config);
    std::ofstream out(fs::path(out_dir) / "dependent.csv");
    out << "copies,all,ge,avg,ws_good,ws_bad\n";
    for (const auto& pt : curve) {
      out << pt.copies << ',' << pt.all_acc << ',' << pt.ge_acc << ','
          << pt.avg_acc << ',' << pt.ws_good_acc << ',' << pt.ws_bad_acc
          << '\n';
      std::cout << "copies=" << pt.copies << " ALL=" << pt.all_acc
                << " GE=" << pt.ge_acc << " AVG=" << pt.avg_acc << '\n';
    }
    return kExitOk;
  }

  if (study == "bound-sweep") {
    const auto points =
        all::bound_sweep(loaded.data, parse_range(values), config);
    std::ofstream out(fs::path(out_dir) / "sweep.csv");
    out << "bound,mean_error,infeasible_splits,total_splits\n";
    for (const auto& pt : points) {
      out << pt.bound << ',' << (pt.usable() ? pt.mean_error : -1.0) << ','
          << pt.infeasible_splits << ',' << pt.total_splits << '\n';
      std::cout << "bound=" << pt.bound;
      if (pt.usable()) {
        std::cout << " error=" << pt.mean_error;
      } else {
        std::cout << " infeasible";
      }
      std::cout << " (" << pt.infeasible_splits << "/" << pt.total_splits
                << " infeasible splits)\n";
    }
    return kExitOk;
  }

  throw CLI::ValidationError("--study", "expected grid, dependent, or bound-sweep");
}

int run_fixture(int extra_signals, double noise, unsigned seed,
                bool no_constraints) {
  using all::LabelDistribution;
  all::Vector q1(2), q2(2);
  q1 << 0.3, 0.2;
  q2 << 0.6, 0.1;
  std::vector<LabelDistribution> signals{LabelDistribution(q1),
                                         LabelDistribution(q2)};

  if (no_constraints) {
    // Degenerate sanity check: an unconstrained adversary flips hard
    // predictions and drives the expected error to its ceiling.
    all::Vector p(2);
    p << 0.18, 0.0;
    const auto r = all::solve_exact(LabelDistribution(p), all::WeakSignalSet{});
    const double ceiling =
        1.0 - (std::min(p[0], 1.0 - p[0]) + std::min(p[1], 1.0 - p[1])) / 2.0;
    const bool flipped = r.labels[0] == 1.0 && r.labels[1] == 1.0;
    const bool ok = flipped && std::abs(r.value - ceiling) < 1e-9;
    std::cout << "unconstrained adversary: labels=(" << r.labels[0] << ", "
              << r.labels[1] << ") value=" << r.value << " ceiling=" << ceiling
              << (ok ? "  [pass]" : "  [FAIL]") << '\n';
    return ok ? kExitOk : kExitCheckFailed;
  }

  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-noise, noise);
  for (int c = 0; c < extra_signals; ++c) {
    all::Vector qc = q2;
    for (Eigen::Index j = 0; j < 2; ++j) {
      qc[j] = std::min(1.0, std::max(0.0, qc[j] + u(gen)));
    }
    signals.push_back(LabelDistribution(qc));
  }
  const all::WeakSignalSet ws(
      signals,
      all::Vector::Constant(static_cast<Eigen::Index>(signals.size()), 0.4));

  all::SolverConfig cfg;
  cfg.step_size = 0.1;
  cfg.schedule = all::StepSchedule::Constant;
  cfg.rho = 1.0;
  cfg.max_iters = 10000;

  const all::Matrix X = all::Matrix::Zero(2, 1);
  all::DirectModel model(2);
  const auto result = all::train(X, ws, model, cfg);
  const all::Vector p = model.predict(X);
  const auto inner = all::solve_exact(LabelDistribution(p), ws);

  std::cout << "learned probabilities: (" << p[0] << ", " << p[1] << ")\n";
  std::cout << "adversarial labels (inner maximizer): (" << inner.labels[0]
            << ", " << inner.labels[1] << ")\n";
  std::cout << "solver's final labels: (" << result.adversarial[0] << ", "
            << result.adversarial[1] << ")\n";
  std::cout << "primal value: " << inner.value << "\n";

  bool ok = true;
  if (extra_signals == 0) {
    ok = std::abs(p[0] - 0.18) < 0.02 && std::abs(p[1]) < 0.02 &&
         std::abs(inner.labels[0] - 0.41) < 0.02 &&
         std::abs(inner.labels[1] - 0.23) < 0.02;
    const all::Vector slack = all::feasibility(ws, inner.labels);
    ok = ok && std::abs(slack[0]) < 0.01 && std::abs(slack[1]) < 0.01;
    std::cout << "targets: p=(0.18, 0.00) +/- 0.02, labels=(0.41, 0.23) +/- "
                 "0.02, both constraints active within 0.01\n";
  } else {
    // Redundancy check: the optimum must not move materially.
    std::vector<LabelDistribution> base{LabelDistribution(q1),
                                        LabelDistribution(q2)};
    const all::WeakSignalSet base_ws(base, all::Vector::Constant(2, 0.4));
    all::DirectModel base_model(2);
    all::train(X, base_ws, base_model, cfg);
    const all::Vector p0 = base_model.predict(X);
    const double dp =
        std::max(std::abs(p[0] - p0[0]), std::abs(p[1] - p0[1]));
    std::cout << "optimum drift vs base fixture: " << dp << " (limit 0.02)\n";
    ok = dp < 0.02;
  }
  std::cout << (ok ? "fixture check: pass\n" : "fixture check: FAIL\n");
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial label learning: train binary classifiers from "
               "weak supervision signals and error bounds"};
  app.require_subcommand(1);

  // train
  auto* train_cmd =
      app.add_subcommand("train", "train on one split and write artifacts");
  std::string data_path, manifest_path, bounds_text = "true", out_dir = "out";
  int signals = 3;
  unsigned seed = 0;
  SolverFlags solver_flags;
  train_cmd->add_option("--data", data_path, "dataset CSV")->required();
  train_cmd->add_option("--manifest", manifest_path, "dataset manifest")
      ->required();
  train_cmd->add_option("--bounds", bounds_text, "true | fixed:<value>");
  train_cmd->add_option("--signals", signals, "number of weak signals");
  train_cmd->add_option("--seed", seed, "split seed");
  train_cmd->add_option("--out", out_dir, "output directory");
  solver_flags.attach(train_cmd);

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run the evaluation studies");
  std::string study = "grid", good = "ws1", bad = "ws2", values = "0.05:0.95:0.05";
  std::string dataset_name;
  int splits = 10, jobs = 1, max_copies = 6;
  exp_cmd->add_option("--study", study, "grid | dependent | bound-sweep");
  exp_cmd->add_option("--data", data_path, "dataset CSV")->required();
  exp_cmd->add_option("--manifest", manifest_path, "dataset manifest")
      ->required();
  exp_cmd->add_option("--bounds", bounds_text, "true | fixed:<value>");
  exp_cmd->add_option("--splits", splits, "number of random splits");
  exp_cmd->add_option("--jobs", jobs, "parallel split workers");
  exp_cmd->add_option("--good", good, "good signal (dependent study)");
  exp_cmd->add_option("--bad", bad, "bad signal (dependent study)");
  exp_cmd->add_option("--max-copies", max_copies, "bad-signal copies");
  exp_cmd->add_option("--values", values, "bound sweep range lo:hi:step");
  exp_cmd->add_option("--out", out_dir, "output directory");
  exp_cmd->add_option("--name", dataset_name, "dataset name in result rows");
  solver_flags.attach(exp_cmd);

  // fixture
  auto* fix_cmd =
      app.add_subcommand("fixture", "two-example geometry self-check");
  int extra_signals = 0;
  double noise = 0.05;
  unsigned fixture_seed = 1;
  bool no_constraints = false;
  fix_cmd->add_option("--extra-signals", extra_signals,
                      "noisy copies of the second signal");
  fix_cmd->add_option("--noise", noise, "copy noise amplitude");
  fix_cmd->add_option("--seed", fixture_seed, "copy noise seed");
  fix_cmd->add_flag("--no-constraints", no_constraints,
                    "unconstrained-adversary sanity check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      return run_train(data_path, manifest_path, bounds_text, signals, seed,
                       solver_flags, out_dir);
    }
    if (exp_cmd->parsed()) {
      return run_experiment(study, data_path, manifest_path, bounds_text,
                            splits, jobs, solver_flags, good, bad, max_copies,
                            values, out_dir, dataset_name);
    }
    if (fix_cmd->parsed()) {
      return run_fixture(extra_signals, noise, fixture_seed, no_constraints);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const all::infeasibility_error& e) {
    std::cerr << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}
