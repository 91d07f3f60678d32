#include "hplb/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hplb/errors.hpp"
#include "hplb/estimators.hpp"
#include "hplb/experiments.hpp"
#include "hplb/io.hpp"

namespace hplb {

namespace {

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double alpha = 0.05;
  std::string method;
  std::string band;
  int sims = 1000;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output;
  std::string config;
  std::string input;
  std::string example;
  int n = 0;
  std::optional<double> gamma;
  std::optional<double> c;
  std::optional<double> strength;
  double balance = 0.5;
  std::string layout = "two-sample";
  double change = 0.5;
  int reps = 0;
  double epsilon = 1.0;
  std::vector<double> gammas{-0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9};
  std::vector<int> ns{500, 1000, 2000, 4000, 8000, 16000};
  std::vector<double> splits{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

void add_bound_flags(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.alpha, "Level in (0,1)")->capture_default_str();
  sub->add_option("--band", o.band, "analytic | simulated")
      ->check(CLI::IsMember({"analytic", "simulated"}));
  sub->add_option("--sims", o.sims, "Null simulations for the simulated band")->capture_default_str();
  sub->add_option("--seed", o.seed, "Root seed")->capture_default_str();
  sub->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--output", o.output, "Output path (default: standard output)");
  sub->add_option("--config", o.config, "Flat key=value file; flags take precedence");
}

void add_method_flag(CLI::App* sub, Options& o, std::string fallback) {
  o.method = std::move(fallback);
  sub->add_option("--method", o.method, "c | bayes | adapt")
      ->check(CLI::IsMember({"c", "bayes", "adapt", "oracle_t"}))
      ->capture_default_str();
}

// Fills options the command line left unset from a key=value file.
void apply_config(CLI::App* sub, const std::string& path) {
  std::istringstream text(read_text_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(text, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (strip(line).empty()) continue;
    if (eq == std::string::npos) {
      throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "config") throw ParameterError(path + ": nested config files are not supported");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw ParameterError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ParameterError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

BoundSpec bound_spec(const Options& o, BandKind fallback) {
  BoundSpec spec;
  spec.alpha = o.alpha;
  spec.band = o.band.empty() ? fallback : band_from_string(o.band);
  spec.sims = o.sims;
  spec.seed = o.seed;
  spec.validate();
  return spec;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.output, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot write '" + o.output + "'");
  file << text;
  if (!file) throw OutputError("write to '" + o.output + "' failed");
}

ExampleSpec example_spec(const Options& o, ExampleId id, int default_n) {
  ExampleSpec spec;
  spec.id = id;
  spec.gamma = o.gamma;
  spec.c = o.c.value_or(default_scale(id));
  spec.N = o.n > 0 ? o.n : default_n;
  spec.balance = o.balance;
  spec.strength = o.strength;
  spec.validate();
  return spec;
}

int dispatch(CLI::App& app, Options& o, std::ostream& out, std::ostream& err) {
  CLI::App* sub = app.get_subcommands().front();
  if (!o.config.empty()) apply_config(sub, o.config);
  const std::string name = sub->get_name();
  const bool json = o.format == "json";

  if (name == "estimate") {
    std::istringstream in(read_text_file(o.input));
    const LabeledScores data = parse_two_sample(in, o.seed);
    err << "read " << data.size() << " rows (m=" << data.m() << ", n=" << data.n() << ")\n";
    const Method method = method_from_string(o.method);
    if (method == Method::oracle_t) throw ParameterError("oracle_t needs a known sigma; not available here");
    const HPLBResult r = estimate(method, data, bound_spec(o, BandKind::simulated));
    emit(o, json ? to_json(r) : to_csv(r), out);
    return 0;
  }
  if (name == "scan") {
    std::istringstream in(read_text_file(o.input));
    const auto data = parse_ordered(in);
    err << "read " << data.size() << " rows\n";
    const SplitScanResult r = split_scan(data, o.splits, bound_spec(o, BandKind::simulated));
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    emit(o, json ? to_json(r) : to_csv(r), out);
    return 0;
  }
  if (name == "pairwise") {
    std::istringstream in(read_text_file(o.input));
    const MulticlassTable table = parse_multiclass(in);
    err << "read " << table.labels.size() << " rows, " << table.K << " classes\n";
    const auto matrix = pairwise_matrix(table, bound_spec(o, BandKind::simulated));
    emit(o, json ? matrix_to_json(matrix) : matrix_to_csv(matrix), out);
    return 0;
  }
  if (name == "simulate") {
    const ExampleId id = example_from_string(o.example);
    const ExampleSpec spec = example_spec(o, id, 1000);
    RngStream rng(o.seed, 0);
    if (o.output.empty()) throw ParameterError("simulate needs --output for the dataset");
    const MixtureModel model = example_model(spec);
    if (o.layout == "ordered") {
      if (model.p.dim() != 1) throw ParameterError("the ordered layout needs a one-dimensional example");
      if (!(o.change > 0.0 && o.change < 1.0)) throw ParameterError("--change must lie in (0,1)");
      emit(o, ordered_to_csv(ordered_stream(model, spec.N, o.change, rng)), out);
    } else if (o.layout == "multiclass") {
      // classes P, Q, P: pairs (1,2) and (2,3) differ, (1,3) is a null pair
      emit(o, multiclass_to_csv(multiclass_sample({model.p, model.q, model.p}, spec.N / 3, rng)), out);
    } else {
      emit(o, dataset_to_csv(gen_example(spec, rng).data), out);
    }
    SimulateRecord rec{id,
                       spec.N,
                       spec.gamma.value_or(std::numeric_limits<double>::quiet_NaN()),
                       spec.c,
                       spec.leading_parameter(),
                       example_true_lambda(spec)};
    out << (json ? to_json(rec) : to_csv(rec));
    return 0;
  }
  if (name == "powergrid") {
    const ExampleId id = example_from_string(o.example);
    if (id != ExampleId::one && id != ExampleId::two) {
      throw ParameterError("powergrid supports examples 1 and 2");
    }
    const PowerGridResult r =
        run_power_grid(id, method_from_string(o.method), o.gammas, o.ns, o.reps > 0 ? o.reps : 100,
                       o.epsilon, bound_spec(o, BandKind::analytic), o.seed, o.c);
    emit(o, json ? to_json(r) : to_csv(r), out);
    return 0;
  }
  if (name == "level") {
    const ExampleId id = example_from_string(o.example);
    Options with_default = o;
    if (!o.strength && !o.gamma) with_default.strength = 0.0;
    const ExampleSpec spec = example_spec(with_default, id, 600);
    const Method method = method_from_string(o.method);
    const BoundSpec bound = bound_spec(o, BandKind::simulated);
    const int reps = o.reps > 0 ? o.reps : 1000;
    const LevelRecord rec{id,          method, example_true_lambda(spec), spec.N,
                          bound.alpha, reps,   run_level_study(spec, method, bound, reps, o.seed)};
    emit(o, json ? to_json(rec) : to_csv(rec), out);
    return 0;
  }
  throw InternalError("unhandled subcommand " + name);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-probability lower bounds on total variation distance"};
  app.name("hplb");
  app.require_subcommand(1, 1);
  Options o;

  CLI::App* est = app.add_subcommand("estimate", "HPLB from a two-sample score file");
  est->add_option("--input", o.input, "CSV with columns score,label")->required();
  add_method_flag(est, o, "adapt");
  add_bound_flags(est, o);

  CLI::App* scan = app.add_subcommand("scan", "lambda_adapt at each split of an ordered stream");
  scan->add_option("--input", o.input, "CSV with columns t,score")->required();
  scan->add_option("--splits", o.splits, "Split points")->delimiter(',');
  add_bound_flags(scan, o);

  CLI::App* pair = app.add_subcommand("pairwise", "Pairwise HPLB matrix for multi-class scores");
  pair->add_option("--input", o.input, "CSV with columns label,p_1,...,p_K")->required();
  add_bound_flags(pair, o);

  auto add_example = [&](CLI::App* sub, std::string fallback) {
    o.example = std::move(fallback);
    sub->add_option("--example", o.example, "0 | 1 | 2 | toy")->capture_default_str();
    sub->add_option("--c", o.c, "Scale constant of c N^gamma");
    sub->add_option("--gamma", o.gamma, "Rate exponent in (-1,0)");
    sub->add_option("--strength", o.strength, "Leading parameter set directly");
    sub->add_option("--balance", o.balance, "Fraction of points drawn from P")->capture_default_str();
  };

  CLI::App* sim = app.add_subcommand("simulate", "Generate an example dataset with oracle scores");
  add_example(sim, "1");
  sim->add_option("--n", o.n, "Total sample size (default 1000)");
  sim->add_option("--layout", o.layout, "two-sample | ordered | multiclass")
      ->check(CLI::IsMember({"two-sample", "ordered", "multiclass"}))
      ->capture_default_str();
  sim->add_option("--change", o.change, "Change point of the ordered layout")->capture_default_str();
  add_bound_flags(sim, o);

  CLI::App* grid = app.add_subcommand("powergrid", "Detection frequencies over a (gamma, N) grid");
  grid->add_option("--example", o.example, "1 | 2")->capture_default_str();
  grid->add_option("--c", o.c, "Scale constant of c N^gamma");
  add_method_flag(grid, o, "adapt");
  grid->add_option("--gammas", o.gammas, "Rate exponents")->delimiter(',');
  grid->add_option("--ns", o.ns, "Total sample sizes")->delimiter(',');
  grid->add_option("--reps", o.reps, "Replications per cell (default 100)");
  grid->add_option("--epsilon", o.epsilon, "Detect lambda_hat > (1-epsilon) lambda")->capture_default_str();
  add_bound_flags(grid, o);

  CLI::App* level = app.add_subcommand("level", "Frequency of lambda_hat exceeding the true TV");
  add_example(level, "1");
  level->add_option("--n", o.n, "Total sample size (default 600)");
  add_method_flag(level, o, "adapt");
  level->add_option("--reps", o.reps, "Replications (default 1000)");
  add_bound_flags(level, o);
  o.example = "1";

  std::vector<const char*> argv{"hplb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(app, o, out, err);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace hplb
