#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lipgrad/bench.hpp"
#include "lipgrad/gkls.hpp"
#include "lipgrad/smoothd.hpp"

namespace fs = std::filesystem;
using namespace lipgrad;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEvaluation = 3;
constexpr int kExitBudget = 4;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment. Keys may use '_' or '-'.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(number) + ": empty key");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Splices config-file entries in front of the user's options so that flags
// typed on the command line win. Leading words name the subcommand.
std::vector<std::string> merge_config(std::vector<std::string> args, std::optional<std::uint64_t>& file_seed) {
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (!path) return args;

  std::size_t insert_at = 1;
  while (insert_at < args.size() && !args[insert_at].empty() && args[insert_at][0] != '-') ++insert_at;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(*path)) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    if (key == "seed") {
      try {
        file_seed = std::stoull(value, nullptr, 0);
      } catch (const std::exception&) {
        throw ConfigError("seed must be an unsigned integer, got '" + value + "'");
      }
      continue;
    }
    if (given_on_command_line(args, key)) continue;
    injected.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + static_cast<long>(insert_at), injected.begin(), injected.end());
  return args;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number in ") + what + ": '" + cell + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + " is empty");
  return out;
}

// "1-3,5" -> {1, 2, 3, 5}
std::vector<int> parse_ranges(const std::string& text, int lo, int hi, const char* what) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    int a = 0, b = 0;
    try {
      const auto dash = cell.find('-');
      if (dash == std::string::npos) {
        a = b = std::stoi(cell);
      } else {
        a = std::stoi(cell.substr(0, dash));
        b = std::stoi(cell.substr(dash + 1));
      }
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " list '" + text + "'");
    }
    if (a > b || a < lo || b > hi) {
      throw ConfigError(std::string(what) + " must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
    }
    for (int v = a; v <= b; ++v) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + " list is empty");
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

struct Seed {
  std::optional<std::uint64_t> cli;
  std::optional<std::uint64_t> file;

  // command line, then LIPGRAD_SEED, then config file, then built-in default
  std::uint64_t resolve() const {
    if (cli) return *cli;
    const char* env = std::getenv("LIPGRAD_SEED");
    if (env && *env) return gkls::seed_from_environment();
    if (file) return *file;
    return gkls::kDefaultSeed;
  }
};

gkls::GklsFunction parse_gkls_ref(const std::string& ref, std::uint64_t seed) {
  const auto colon = ref.find(':');
  if (colon == std::string::npos) throw ConfigError("--gkls expects <class>:<index>, got '" + ref + "'");
  int cls = 0, index = 0;
  try {
    cls = std::stoi(ref.substr(0, colon));
    index = std::stoi(ref.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--gkls expects <class>:<index>, got '" + ref + "'");
  }
  return gkls::generate_function(gkls::standard_class(cls, seed), index);
}

struct SolveArgs {
  std::string function;
  std::size_t dim = 0;
  std::string gkls_ref;
  double rbar = 2.0;
  double c = 0.0;
  double xi = 1e-6;
  double eps = 1e-4;
  std::uint64_t max_trials = 1'000'000;
  std::string ladder;
  std::string out;
  bool verbose = false;
};

int run_solve(const SolveArgs& a, std::uint64_t seed) {
  if (a.function.empty() == a.gkls_ref.empty()) throw ConfigError("give exactly one of --function or --gkls");
  std::optional<Problem> problem;
  if (!a.gkls_ref.empty()) {
    problem = parse_gkls_ref(a.gkls_ref, seed).as_problem();
  } else {
    std::size_t n = a.dim;
    if (n == 0) n = (a.function == "well" || a.function == "bimodal") ? 1 : 2;
    problem = builtin_problem(a.function, n);
  }

  SolverConfig cfg;
  cfg.r_bar = a.rbar;
  cfg.c = a.c;
  cfg.xi = a.xi;
  cfg.eps = a.eps;
  cfg.max_trials = a.max_trials;
  if (!a.ladder.empty()) cfg.r_ladder = parse_doubles(a.ladder, "--ladder");
  cfg.validate();

  SolveHooks hooks;
  if (a.verbose) {
    hooks.on_iteration = [](const IterationReport& r) {
      std::cerr << "k=" << r.k << " p=" << r.p << " M=" << r.M << " r=" << r.r << " m=" << r.m << " t=" << r.t
                << " R=" << r.R_t << " delta=" << r.delta_t << " new=" << r.new_trials;
      if (r.stop) std::cerr << " stop=" << to_string(*r.stop);
      std::cerr << '\n';
    };
  }
  const RunResult result = solve(*problem, cfg, hooks);
  const std::string summary = summary_line(result);
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw Error("cannot open " + a.out + " for writing");
    write_trial_log(out, result.trial_log(), summary);
    if (!out) throw Error("write failed: " + a.out);
  }
  std::cout << summary << '\n';
  return result.stop_reason == StopReason::Budget ? kExitBudget : 0;
}

struct BenchArgs {
  std::string classes = "1-8";
  std::string methods = "smoothd,direct,directl";
  std::uint64_t budget = bench::kDefaultBudget;
  std::string out = "bench_out";
  std::string problems = "1-100";
  unsigned workers = 1;
  std::optional<double> rbar;
  std::optional<double> c;
  std::string ladder;
  double eps = 1e-4;
  double xi = 1e-6;
  double eps_bal = 1e-4;
  bool verbose = false;
};

int run_bench(const BenchArgs& a, std::uint64_t seed) {
  const auto classes = parse_ranges(a.classes, 1, gkls::kStandardClassCount, "classes");
  const auto problems = parse_ranges(a.problems, 1, gkls::kFunctionsPerClass, "problems");
  if (problems.back() - problems.front() + 1 != static_cast<int>(problems.size())) {
    throw ConfigError("--problems must be one contiguous range");
  }
  std::vector<bench::MethodSpec> methods;
  for (const auto& name : split_words(a.methods)) {
    bench::MethodSpec m = bench::parse_method(name);
    m.eps = a.eps;
    m.xi = a.xi;
    m.eps_bal = a.eps_bal;
    m.c = a.c;
    if (a.rbar) {
      m.use_ladder = false;
      m.r_bar = *a.rbar;
    }
    if (!a.ladder.empty()) {
      m.use_ladder = true;
      m.ladder = parse_doubles(a.ladder, "--ladder");
    }
    methods.push_back(m);
  }
  if (methods.empty()) throw ConfigError("no methods given");
  if (a.budget < 2) throw ConfigError("--budget must be at least 2");

  fs::create_directories(a.out);
  std::vector<bench::RunRecord> all;
  std::vector<bench::ClassSummary> summaries;
  for (int cls : classes) {
    const gkls::ClassParams params = gkls::standard_class(cls, seed);
    std::vector<bench::OperatingCharacteristic> curves;
    for (const auto& m : methods) {
      bench::ClassRunOptions opt;
      opt.budget = a.budget;
      opt.workers = a.workers;
      opt.first = problems.front();
      opt.last = problems.back();
      if (a.verbose) {
        opt.on_record = [](const bench::RunRecord& r) {
          std::cerr << r.method << " class " << r.class_id << " problem " << r.problem << ": "
                    << (r.solved ? "solved" : "unsolved") << " trials=" << r.trials;
          if (!r.error.empty()) std::cerr << " error=" << r.error;
          std::cerr << '\n';
        };
      }
      const auto records = bench::run_class(m, params, opt);
      for (const auto& r : records) {
        if (!r.error.empty()) std::cerr << "warning: " << r.method << " class " << cls << " problem " << r.problem
                                        << " failed: " << r.error << '\n';
      }
      all.insert(all.end(), records.begin(), records.end());
      const auto oc = bench::operating_characteristic(records);
      bench::write_characteristic_csv(fs::path(a.out) / ("oc_" + m.name() + "_class" + std::to_string(cls) + ".csv"),
                                      oc);
      curves.push_back(oc);
      const auto s = bench::summarize(records);
      summaries.push_back(s);
      std::cout << "class " << cls << " " << m.name() << ": S=" << s.solved;
      std::cout << " p*=" << (s.p_star ? std::to_string(*s.p_star) : "-");
      if (s.p_avg) {
        std::ostringstream avg;
        avg.precision(2);
        avg << std::fixed << *s.p_avg;
        std::cout << " p_avg=" << avg.str();
      } else {
        std::cout << " p_avg=-";
      }
      std::cout << std::endl;
    }
    bench::write_plot_svg(fs::path(a.out) / ("oc_class" + std::to_string(cls) + ".svg"), curves,
                          "class " + std::to_string(cls));
    // rewritten after every class so a long run leaves partial results behind
    bench::write_records_csv(fs::path(a.out) / "records.csv", all);
    std::ofstream sum(fs::path(a.out) / "summary.csv", std::ios::binary);
    bench::write_summary_csv(sum, summaries);
  }
  return 0;
}

struct PlotArgs {
  std::string in;
  std::string out = "oc.svg";
  std::optional<int> cls;
  std::string title;
};

int run_plot(const PlotArgs& a) {
  fs::path in = a.in;
  if (fs::is_directory(in)) in /= "records.csv";
  auto records = bench::read_records_csv(in);
  if (a.cls) {
    std::erase_if(records, [&](const bench::RunRecord& r) { return r.class_id != *a.cls; });
  }
  if (records.empty()) throw ConfigError("no records to plot in " + in.string());
  const auto groups = bench::group_records(records);
  bool several_classes = false;
  for (const auto& g : groups) several_classes |= g.front().class_id != groups.front().front().class_id;
  std::vector<bench::OperatingCharacteristic> curves;
  for (const auto& g : groups) {
    auto oc = bench::operating_characteristic(g);
    if (several_classes) oc.method += " (class " + std::to_string(oc.class_id) + ")";
    curves.push_back(std::move(oc));
  }
  std::string title = a.title;
  if (title.empty()) {
    title = several_classes ? "operating characteristics" : "class " + std::to_string(groups.front().front().class_id);
  }
  bench::write_plot_svg(fs::path(a.out), curves, title);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  std::optional<std::uint64_t> file_seed;
  std::vector<std::string> args;
  try {
    args = merge_config(raw, file_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App app{"Derivative-based Lipschitz global optimization toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Seed seed;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed.cli, "GKLS generator seed (LIPGRAD_SEED overrides the config file)");
  };

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Minimize one problem with SmoothD");
  solve_cmd->add_option("--function", solve_args.function, "Built-in function name");
  solve_cmd->add_option("--dim", solve_args.dim, "Dimension of the built-in function");
  solve_cmd->add_option("--gkls", solve_args.gkls_ref, "GKLS function as <class>:<index>");
  solve_cmd->add_option("--rbar", solve_args.rbar, "Reliability parameter (> 1)");
  solve_cmd->add_option("--c", solve_args.c, "Adaptive reliability term, r = rbar + c/k");
  solve_cmd->add_option("--xi", solve_args.xi, "Floor of the Lipschitz estimate");
  solve_cmd->add_option("--eps", solve_args.eps, "Stopping tolerance relative to the box diagonal");
  solve_cmd->add_option("--max-trials", solve_args.max_trials, "Trial budget");
  solve_cmd->add_option("--ladder", solve_args.ladder, "Restart ladder v1,v2,... (overrides --rbar)");
  solve_cmd->add_option("--out", solve_args.out, "Trial log CSV");
  solve_cmd->add_flag("--verbose", solve_args.verbose, "Print every iteration to stderr");
  add_seed(solve_cmd);

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run methods over GKLS classes");
  bench_cmd->add_option("--classes", bench_args.classes, "Classes, e.g. 1-8 or 1,2");
  bench_cmd->add_option("--methods", bench_args.methods, "smoothd,direct,directl");
  bench_cmd->add_option("--budget", bench_args.budget, "Trials per problem");
  bench_cmd->add_option("--out", bench_args.out, "Output directory");
  bench_cmd->add_option("--problems", bench_args.problems, "Problem index range within each class");
  bench_cmd->add_option("--workers", bench_args.workers, "Worker threads");
  bench_cmd->add_option("--rbar", bench_args.rbar, "Fixed SmoothD reliability (disables the restart ladder)");
  bench_cmd->add_option("--c", bench_args.c, "SmoothD adaptive term (default by dimension)");
  bench_cmd->add_option("--ladder", bench_args.ladder, "SmoothD restart ladder v1,v2,...");
  bench_cmd->add_option("--eps", bench_args.eps, "SmoothD stopping tolerance");
  bench_cmd->add_option("--xi", bench_args.xi, "SmoothD Lipschitz floor");
  bench_cmd->add_option("--eps-bal", bench_args.eps_bal, "DIRECT balancing parameter");
  bench_cmd->add_flag("--verbose", bench_args.verbose, "Print every problem to stderr");
  add_seed(bench_cmd);

  int gkls_class = 1, gkls_index = 1;
  std::string gkls_point;
  auto* gkls_cmd = app.add_subcommand("gkls", "Inspect generated test functions");
  gkls_cmd->require_subcommand(1);
  auto* describe_cmd = gkls_cmd->add_subcommand("describe", "Print the construction of one function");
  auto* eval_cmd = gkls_cmd->add_subcommand("eval", "Evaluate value and gradient at a point");
  for (auto* sub : {describe_cmd, eval_cmd}) {
    sub->add_option("--class", gkls_class, "Class 1..8")->required();
    sub->add_option("--index", gkls_index, "Function 1..100")->required();
    add_seed(sub);
  }
  eval_cmd->add_option("--point", gkls_point, "x1,...,xN")->required();

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "Draw operating characteristics from bench records");
  plot_cmd->add_option("--in", plot_args.in, "bench output directory or records CSV")->required();
  plot_cmd->add_option("--out", plot_args.out, "SVG file");
  plot_cmd->add_option("--class", plot_args.cls, "Only this class");
  plot_cmd->add_option("--title", plot_args.title, "Plot title");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  seed.file = file_seed;

  try {
    if (*solve_cmd) return run_solve(solve_args, seed.resolve());
    if (*bench_cmd) return run_bench(bench_args, seed.resolve());
    if (*describe_cmd || *eval_cmd) {
      const auto fn = gkls::generate_function(gkls::standard_class(gkls_class, seed.resolve()), gkls_index);
      if (*describe_cmd) {
        fn.describe(std::cout);
      } else {
        const auto x = parse_doubles(gkls_point, "--point");
        if (x.size() != fn.dimension()) throw ConfigError("--point needs " + std::to_string(fn.dimension()) + " values");
        const auto e = fn.evaluate(x);
        std::cout.precision(17);
        std::cout << "value " << e.value << "\ngradient";
        for (double g : e.gradient) std::cout << ' ' << g;
        std::cout << '\n';
      }
      return 0;
    }
    if (*plot_cmd) return run_plot(plot_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "evaluation failed: " << e.what() << '\n';
    return kExitEvaluation;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation failed: " << e.what() << '\n';
    return kExitEvaluation;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
