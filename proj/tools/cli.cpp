#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "swid/dataset_io.hpp"
#include "swid/errors.hpp"
#include "swid/serialization.hpp"

namespace swid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

double median(std::vector<double> v) {
  if (v.empty()) throw ValidationError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SweepCell sweep_cell(double noise_var, const SweepSettings& s) {
  if (s.eval_trajectories < 1) throw ValidationError("eval_trajectories must be >= 1");
  SweepCell cell;
  cell.noise_var = noise_var;
  BenchmarkSpec spec;
  spec.T = s.T;
  spec.noise_var = noise_var;
  spec.seed = s.data_seed;
  const Dataset train = simulate_benchmark(spec);
  cell.fit = run_restarts(train, s.K, s.em, s.restarts);
  cell.train = evaluate(cell.fit.model, train, s.em.window);
  for (int i = 0; i < s.eval_trajectories; ++i) {
    spec.seed = s.eval_seed + static_cast<std::uint64_t>(i);
    const EvalResult r = evaluate(cell.fit.model, simulate_benchmark(spec), s.em.window);
    cell.eval_mse.push_back(r.mse);
    cell.eval_bfr.push_back(r.bfr);
    cell.eval_mode_match.push_back(r.mode_match->percent);
  }
  cell.median_mse = median(cell.eval_mse);
  cell.median_bfr = median(cell.eval_bfr);
  cell.median_mode_match = median(cell.eval_mode_match);
  return cell;
}

namespace {

// ---------------------------------------------------------------------------
// Option groups shared by several subcommands.
// ---------------------------------------------------------------------------

struct WindowOptions {
  WindowConfig window;
  bool greedy_start = false;

  void add(CLI::App* sc) {
    sc->add_option("--tw", window.length, "moving-window length T_w")->capture_default_str();
    sc->add_option("--candidate-cap", window.candidate_cap, "largest K^T_w allowed")
        ->capture_default_str();
    sc->add_option("--p0-state", window.p0_state, "initial state covariance scale")
        ->capture_default_str();
    sc->add_flag("--greedy-start", greedy_start, "choose s_1 by the one-step score");
  }
  WindowConfig get() const {
    WindowConfig w = window;
    w.lookahead_start = !greedy_start;
    return w;
  }
};

struct EmOptions {
  EmConfig em;
  WindowOptions window;
  int k = 2;
  int restarts = 1;
  std::string hidden_activation{to_string(em.arch.hidden_activation)};
  std::string output_activation{to_string(em.arch.output_activation)};

  void add(CLI::App* sc) {
    window.add(sc);
    sc->add_option("--k", k, "number of modes")->capture_default_str();
    sc->add_option("--restarts", restarts, "random restarts; the lowest final J wins")
        ->capture_default_str();
    sc->add_option("--iters", em.max_iterations, "maximum EM iterations")->capture_default_str();
    sc->add_option("--epochs", em.ekf.epochs, "EKF sweeps per M-step")->capture_default_str();
    sc->add_option("--seed", em.seed, "initialization seed")->capture_default_str();
    sc->add_option("--tol", em.tol_rel_cost, "relative cost tolerance")->capture_default_str();
    sc->add_option("--dirichlet-floor", em.dirichlet_floor, "transition count smoothing")
        ->capture_default_str();
    sc->add_option("--init-std", em.init_weight_std, "initial weight standard deviation")
        ->capture_default_str();
    sc->add_option("--sigma1", em.sigma1, "process noise variance")->capture_default_str();
    sc->add_option("--sigma2", em.sigma2, "measurement noise variance")->capture_default_str();
    sc->add_option("--n-x", em.arch.n_x, "state dimension")->capture_default_str();
    sc->add_option("--state-hidden", em.arch.state_hidden, "hidden widths of the state net")
        ->delimiter(',');
    sc->add_option("--output-hidden", em.arch.output_hidden, "hidden widths of the output net")
        ->delimiter(',');
    sc->add_option("--activation", hidden_activation, "hidden activation")->capture_default_str();
    sc->add_option("--output-activation", output_activation, "output net final activation")
        ->capture_default_str();
    sc->add_option("--sigma-theta0", em.ekf.sigma_theta0, "parameter random-walk variance")
        ->capture_default_str();
    sc->add_option("--sigma-theta-decay", em.ekf.sigma_theta_decay, "per-epoch decay")
        ->capture_default_str();
    sc->add_option("--p0-param", em.ekf.p0_param, "initial parameter covariance scale")
        ->capture_default_str();
    sc->add_option("--jitter", em.ekf.jitter, "covariance diagonal floor")->capture_default_str();
    sc->add_flag("--joseph", em.ekf.joseph_form, "Joseph-form covariance update");
  }

  EmConfig get() const {
    EmConfig c = em;
    c.window = window.get();
    c.ekf.p0_state = c.window.p0_state;
    c.arch.hidden_activation = parse_activation(hidden_activation);
    c.arch.output_activation = parse_activation(output_activation);
    if (k < 1) throw ValidationError("--k must be >= 1");
    if (restarts < 1) throw ValidationError("--restarts must be >= 1");
    c.validate();
    return c;
  }
};

void add_config(CLI::App* sc) {
  sc->set_config("--config", "", "INI file of option values; flags override it");
  sc->allow_config_extras(CLI::config_extras_mode::error);
}

void add_out_dir(CLI::App* sc, std::string& dir) {
  sc->add_option("--out-dir", dir, "output directory")
      ->envname("SWID_OUTPUT_DIR")
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// Output helpers.
// ---------------------------------------------------------------------------

class Lines {
 public:
  explicit Lines(std::ostream& out) : out_(out) {}
  void emit(const json& j) {
    std::lock_guard lock(mutex_);
    out_ << dump_json(j, 0) << std::flush;
  }

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

json cost_json(const CostBreakdown& c) {
  return {{"total", c.total}, {"data_nll", c.data_nll}, {"param_prior", c.param_prior},
          {"mode_cost", c.mode_cost}};
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json report_json(const EmReport& r) {
  json its = json::array();
  for (const auto& rec : r.iterations)
    its.push_back({{"iteration", rec.iteration},
                   {"seed", rec.seed},
                   {"cost", cost_json(rec.cost)},
                   {"modes_changed", rec.modes_changed},
                   {"params_accepted", rec.params_accepted},
                   {"transitions_accepted", rec.transitions_accepted},
                   {"pi", matrix_json(rec.pi)},
                   {"pi0", vector_json(rec.pi0)},
                   {"e_step_seconds", rec.e_step_seconds},
                   {"m_step_seconds", rec.m_step_seconds}});
  return {{"iterations", its},
          {"stop", to_string(r.stop)},
          {"degraded", r.degraded},
          {"seconds", r.seconds}};
}

std::vector<double> one_based(const ModeSequence& s) {
  std::vector<double> v(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) v[t] = s[t] + 1;
  return v;
}

std::vector<double> time_column(Index T) {
  std::vector<double> v(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) v[static_cast<std::size_t>(t)] = static_cast<double>(t + 1);
  return v;
}

std::vector<double> column(const MatrixXd& m, Index c) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Index t = 0; t < m.rows(); ++t) v[static_cast<std::size_t>(t)] = m(t, c);
  return v;
}

std::string series_name(const std::string& base, Index i, Index n) {
  return n == 1 ? base : base + std::to_string(i + 1);
}

CsvTable prediction_table(const Predictions& p) {
  CsvTable tab;
  tab.add("t", time_column(p.y_pred.rows()), true);
  for (Index i = 0; i < p.y_pred.cols(); ++i)
    tab.add("y_pred" + std::to_string(i + 1), column(p.y_pred, i));
  tab.add("mode", one_based(p.modes), true);
  return tab;
}

json eval_json(const EvalResult& r, PredictionKind kind) {
  json j = {{"mse", r.mse},
            {"bfr", r.bfr},
            {"prediction", kind == PredictionKind::OneStep ? "one_step" : "rollout"},
            {"T", r.squared_error.size()}};
  if (r.mode_match) {
    j["mode_match_percent"] = r.mode_match->percent;
    json perm = json::array();
    for (int p : r.mode_match->permutation) perm.push_back(p + 1);
    j["permutation"] = perm;
  }
  return j;
}

fs::path meta_path(const fs::path& p) {
  fs::path m = p;
  m += ".meta.json";
  return m;
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string benchmark = "standard";
  std::string model;
  Index T = 1000;
  double noise = 1e-3;
  std::uint64_t seed = 0;
  double input_lo = 0.0, input_hi = 1.0;
  std::string out = "dataset.csv";
  std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& a, Lines& lines) {
  const InputLaw input{a.input_lo, a.input_hi};
  Dataset d;
  json meta = {{"format_version", kModelFormatVersion},
               {"T", a.T},
               {"seed", a.seed},
               {"input", {{"lo", a.input_lo}, {"hi", a.input_hi}}}};
  if (!a.model.empty()) {
    const SwitchingModel m = load_model(a.model);
    d = simulate_model(m, a.T, input, a.seed, a.noise);
    meta["generator"] = "model";
    meta["model"] = a.model;
    meta["noise_scale"] = a.noise;
  } else {
    BenchmarkSpec spec;
    spec.T = a.T;
    spec.noise_var = a.noise;
    spec.seed = a.seed;
    spec.input = input;
    d = simulate_benchmark(spec);
    meta["generator"] = "benchmark";
    meta["benchmark"] = a.benchmark;
    meta["noise_var"] = a.noise;
  }
  const fs::path path = fs::path(a.out_dir) / a.out;
  write_dataset(d, path);
  write_file_atomic(meta_path(path), dump_json(meta));
  lines.emit({{"event", "simulated"}, {"path", path.string()}, {"T", d.T()}});
  return kOk;
}

struct IdentifyArgs {
  std::string data;
  EmOptions em;
  std::string out_dir = ".";
};

/// Progress callback printing one line per iteration with ΔJ per restart seed.
std::function<void(const IterationRecord&)> progress(Lines& lines, json tag) {
  auto prev = std::make_shared<std::map<std::uint64_t, double>>();
  auto mutex = std::make_shared<std::mutex>();
  return [&lines, tag, prev, mutex](const IterationRecord& rec) {
    json j = tag;
    j["event"] = "iteration";
    j["seed"] = rec.seed;
    j["iteration"] = rec.iteration;
    j["J"] = rec.cost.total;
    {
      std::lock_guard lock(*mutex);
      auto it = prev->find(rec.seed);
      j["delta_J"] = it == prev->end() ? json(nullptr) : json(rec.cost.total - it->second);
      (*prev)[rec.seed] = rec.cost.total;
    }
    j["modes_changed"] = rec.modes_changed;
    j["params_accepted"] = rec.params_accepted;
    j["seconds"] = rec.e_step_seconds + rec.m_step_seconds;
    lines.emit(j);
  };
}

int cmd_identify(const IdentifyArgs& a, Lines& lines) {
  EmConfig config = a.em.get();
  const Dataset data = read_dataset(a.data);
  config.window.validate(data.T());
  config.on_iteration = progress(lines, json::object());
  const EmResult res = run_restarts(data, a.em.k, config, a.em.restarts);

  const fs::path dir(a.out_dir);
  CsvTable modes;
  modes.add("t", time_column(data.T()), true);
  modes.add("mode", one_based(res.modes), true);
  json report = report_json(res.report);
  report["dataset"] = a.data;
  report["K"] = a.em.k;
  report["restarts"] = a.em.restarts;
  report["seed"] = res.report.iterations.empty() ? config.seed : res.report.iterations[0].seed;
  if (data.true_modes) {
    int K = a.em.k;
    for (int s : *data.true_modes) K = std::max(K, s + 1);
    report["mode_match_percent"] = mode_match(*data.true_modes, res.modes, K).percent;
  }
  save_model(res.model, dir / "model.json");
  write_file_atomic(dir / "report.json", dump_json(report));
  write_file_atomic(dir / "modes.csv", modes.to_text());

  const double J = res.report.iterations.empty() ? std::numeric_limits<double>::infinity()
                                                 : res.report.iterations.back().cost.total;
  lines.emit({{"event", "identified"},
              {"J", J},
              {"stop", to_string(res.report.stop)},
              {"degraded", res.report.degraded},
              {"out_dir", dir.string()}});
  return res.report.degraded ? kDegraded : kOk;
}

struct EvaluateArgs {
  std::string model, data;
  WindowOptions window;
  bool rollout = false;
  std::string out_dir = ".";
};

int cmd_evaluate(const EvaluateArgs& a, Lines& lines) {
  const SwitchingModel model = load_model(a.model);
  const Dataset data = read_dataset(a.data);
  const PredictionKind kind = a.rollout ? PredictionKind::Rollout : PredictionKind::OneStep;
  const EvalResult r = evaluate(model, data, a.window.get(), kind);

  const Index T = data.T(), ny = data.n_y();
  CsvTable outputs;
  outputs.add("t", time_column(T), true);
  for (Index i = 0; i < ny; ++i) {
    outputs.add(series_name("y_true", i, ny), column(data.y, i));
    outputs.add(series_name("y_pred", i, ny), column(r.predictions.y_pred, i));
  }
  CsvTable error;
  error.add("t", time_column(T), true);
  error.add("squared_error", r.squared_error);
  CsvTable modes;
  modes.add("t", time_column(T), true);
  if (r.mode_match) {
    modes.add("s_true", one_based(*data.true_modes), true);
    modes.add("s_est", one_based(relabel(r.predictions.modes, r.mode_match->permutation)), true);
  } else {
    modes.add("s_est", one_based(r.predictions.modes), true);
  }
  json report = eval_json(r, kind);
  report["model"] = a.model;
  report["dataset"] = a.data;

  const fs::path dir(a.out_dir);
  write_file_atomic(dir / "evaluation.json", dump_json(report));
  write_file_atomic(dir / "plot_output.csv", outputs.to_text());
  write_file_atomic(dir / "plot_error.csv", error.to_text());
  write_file_atomic(dir / "plot_modes.csv", modes.to_text());
  report["event"] = "evaluated";
  lines.emit(report);
  return kOk;
}

struct PredictArgs {
  std::string model, data;
  WindowOptions window;
  bool rollout = false;
  int batch = 0;
  Index T = 1000;
  double noise = 1e-3;
  std::uint64_t seed = 0;
  std::string out = "predictions.csv";
  std::string out_dir = ".";
};

int cmd_predict(const PredictArgs& a, Lines& lines) {
  const SwitchingModel model = load_model(a.model);
  const PredictionKind kind = a.rollout ? PredictionKind::Rollout : PredictionKind::OneStep;
  const WindowConfig window = a.window.get();
  const fs::path dir(a.out_dir);

  if (a.batch == 0) {
    if (a.data.empty()) throw ValidationError("predict needs --data or --batch");
    const Dataset data = read_dataset(a.data);
    const Predictions p = predict(model, data, window, kind);
    write_file_atomic(dir / a.out, prediction_table(p).to_text());
    lines.emit({{"event", "predicted"}, {"path", (dir / a.out).string()}, {"T", data.T()}});
    return kOk;
  }
  if (a.batch < 0) throw ValidationError("--batch must be >= 0");

  // fresh benchmark trajectories, one per seed
  std::vector<double> mses, bfrs;
  json runs = json::array();
  for (int i = 0; i < a.batch; ++i) {
    BenchmarkSpec spec;
    spec.T = a.T;
    spec.noise_var = a.noise;
    spec.seed = a.seed + static_cast<std::uint64_t>(i);
    const Dataset data = simulate_benchmark(spec);
    const EvalResult r = evaluate(model, data, window, kind);
    const std::string name = "predictions_" + std::to_string(spec.seed) + ".csv";
    write_file_atomic(dir / name, prediction_table(r.predictions).to_text());
    mses.push_back(r.mse);
    bfrs.push_back(r.bfr);
    json j = eval_json(r, kind);
    j["seed"] = spec.seed;
    j["file"] = name;
    runs.push_back(j);
  }
  const json summary = {{"model", a.model},
                        {"noise_var", a.noise},
                        {"trajectories", a.batch},
                        {"median_mse", median(mses)},
                        {"median_bfr", median(bfrs)},
                        {"runs", runs}};
  write_file_atomic(dir / "summary.json", dump_json(summary));
  lines.emit({{"event", "predicted_batch"},
              {"trajectories", a.batch},
              {"median_mse", summary["median_mse"]},
              {"median_bfr", summary["median_bfr"]}});
  return kOk;
}

struct SweepArgs {
  EmOptions em;
  std::vector<double> noise_levels{1e-3, 1e-2, 1e-1, 2e-1};
  Index T = 1000;
  std::uint64_t data_seed = 1;
  int eval_trajectories = 10;
  std::uint64_t eval_seed = 1000;
  std::string out_dir = ".";
};

int cmd_sweep(const SweepArgs& a, Lines& lines) {
  SweepSettings s;
  s.T = a.T;
  s.data_seed = a.data_seed;
  s.K = a.em.k;
  s.restarts = a.em.restarts;
  s.em = a.em.get();
  s.eval_trajectories = a.eval_trajectories;
  s.eval_seed = a.eval_seed;
  if (a.noise_levels.empty()) throw ValidationError("--noise-levels is empty");

  std::vector<std::future<SweepCell>> jobs;
  for (double noise : a.noise_levels) {
    SweepSettings cs = s;
    cs.em.on_iteration = progress(lines, {{"noise_var", noise}});
    jobs.push_back(std::async(std::launch::async, [noise, cs] { return sweep_cell(noise, cs); }));
  }
  const fs::path dir(a.out_dir);
  json cells = json::array();
  bool degraded = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const SweepCell c = jobs[i].get();
    std::ostringstream name;
    name << "noise_" << format_double(c.noise_var);
    save_model(c.fit.model, dir / name.str() / "model.json");
    degraded = degraded || c.fit.report.degraded;
    json j = {{"noise_var", c.noise_var},
              {"model", (fs::path(name.str()) / "model.json").string()},
              {"stop", to_string(c.fit.report.stop)},
              {"degraded", c.fit.report.degraded},
              {"train_bfr", c.train.bfr},
              {"train_mode_match_percent", c.train.mode_match->percent},
              {"median_mse", c.median_mse},
              {"median_bfr", c.median_bfr},
              {"median_mode_match_percent", c.median_mode_match},
              {"eval_mse", c.eval_mse},
              {"eval_bfr", c.eval_bfr}};
    cells.push_back(j);
    json line = j;
    line["event"] = "sweep_cell";
    line.erase("eval_mse");
    line.erase("eval_bfr");
    lines.emit(line);
  }
  write_file_atomic(dir / "sweep.json", dump_json({{"T", a.T}, {"cells", cells}}));
  return degraded ? kDegraded : kOk;
}

template <class Args>
int dispatch(CLI::App& app, Args& args, int (*cmd)(const Args&, Lines&), int argc,
             const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  Lines lines(out);
  try {
    return cmd(args, lines);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FilterDivergence& e) {
    err << "error: " << e.what() << '\n';
    return kDegraded;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

constexpr const char* kOverview =
    "Identification of switching nonlinear state-space systems.\n\n"
    "usage: swid <command> [options]   (swid <command> --help for details)\n\n"
    "commands:\n"
    "  simulate   simulate a dataset\n"
    "  identify   identify a switching model\n"
    "  evaluate   score a model and write plot data\n"
    "  predict    predict outputs and modes\n"
    "  sweep      identify and evaluate across noise levels\n";

}  // namespace

// Each command gets its own App so that --config files hold flat key=value
// pairs for that command's options.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    err << kOverview;
    return kUsage;
  }
  const std::string name = argv[1];
  if (name == "--help" || name == "-h") {
    out << kOverview;
    return kOk;
  }
  CLI::App app;
  app.name("swid " + name);
  add_config(&app);
  const int n = argc - 1;
  const char* const* args = argv + 1;

  if (name == "simulate") {
    app.description("Simulate a dataset from the built-in benchmark or a saved model.");
    SimulateArgs a;
    app.add_option("--benchmark", a.benchmark, "built-in benchmark system")
        ->check(CLI::IsMember({"standard"}))
        ->capture_default_str();
    app.add_option("--model", a.model, "simulate a saved model instead");
    app.add_option("--t", a.T, "number of samples")->capture_default_str();
    app.add_option("--noise", a.noise, "noise variance (benchmark) or noise scale (model)")
        ->capture_default_str();
    app.add_option("--seed", a.seed, "simulation seed")->capture_default_str();
    app.add_option("--input-lo", a.input_lo, "input lower bound")->capture_default_str();
    app.add_option("--input-hi", a.input_hi, "input upper bound")->capture_default_str();
    app.add_option("--out", a.out, "dataset file name")->capture_default_str();
    add_out_dir(&app, a.out_dir);
    return dispatch(app, a, &cmd_simulate, n, args, out, err);
  }
  if (name == "identify") {
    app.description("Identify a switching model from a dataset.");
    IdentifyArgs a;
    app.add_option("--data", a.data, "training dataset CSV")->required();
    a.em.add(&app);
    add_out_dir(&app, a.out_dir);
    return dispatch(app, a, &cmd_identify, n, args, out, err);
  }
  if (name == "evaluate") {
    app.description("Score a model on a dataset and write plot data.");
    EvaluateArgs a;
    app.add_option("--model", a.model, "model file")->required();
    app.add_option("--data", a.data, "dataset CSV with outputs")->required();
    a.window.add(&app);
    app.add_flag("--rollout", a.rollout, "free-run simulation instead of one-step-ahead");
    add_out_dir(&app, a.out_dir);
    return dispatch(app, a, &cmd_evaluate, n, args, out, err);
  }
  if (name == "predict") {
    app.description("Predict outputs and modes for a dataset or a batch of fresh trajectories.");
    PredictArgs a;
    app.add_option("--model", a.model, "model file")->required();
    auto* data = app.add_option("--data", a.data, "dataset CSV (outputs optional)");
    auto* batch = app.add_option("--batch", a.batch, "predict N fresh benchmark trajectories");
    data->excludes(batch);
    a.window.add(&app);
    app.add_flag("--rollout", a.rollout, "free-run simulation instead of one-step-ahead");
    app.add_option("--t", a.T, "batch trajectory length")->capture_default_str();
    app.add_option("--noise", a.noise, "batch noise variance")->capture_default_str();
    app.add_option("--seed", a.seed, "first batch seed")->capture_default_str();
    app.add_option("--out", a.out, "prediction file name")->capture_default_str();
    add_out_dir(&app, a.out_dir);
    return dispatch(app, a, &cmd_predict, n, args, out, err);
  }
  if (name == "sweep") {
    app.description("Identify and evaluate the benchmark across noise levels.");
    SweepArgs a;
    a.em.restarts = 3;
    a.em.add(&app);
    app.add_option("--noise-levels", a.noise_levels, "benchmark noise variances")
        ->delimiter(',');
    app.add_option("--t", a.T, "trajectory length")->capture_default_str();
    app.add_option("--data-seed", a.data_seed, "training trajectory seed")->capture_default_str();
    app.add_option("--eval-trajectories", a.eval_trajectories, "evaluation trajectories")
        ->capture_default_str();
    app.add_option("--eval-seed", a.eval_seed, "first evaluation seed")->capture_default_str();
    add_out_dir(&app, a.out_dir);
    return dispatch(app, a, &cmd_sweep, n, args, out, err);
  }
  err << "unknown command '" << name << "'\n\n" << kOverview;
  return kUsage;
}

}  // namespace swid::cli
