#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipgrad/direct.hpp"
#include "lipgrad/gkls.hpp"
#include "lipgrad/objective.hpp"
#include "lipgrad/smoothd.hpp"

namespace lipgrad::bench {

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

/// Largest reliability value per standard class, used as the last restart rung.
double class_r_max(int class_id);

/// Adaptive term C by dimension: 50 (N=2), 100, 150, 200 (N=5); 50*(N-1) otherwise.
double default_c(std::size_t dimension);

/// True iff |x_j - x*_j| <= eps^(1/N) |upper_j - lower_j| for every j.
/// Throws ConfigError unless 0 < eps < 1 and all sizes agree.
bool solved_check(std::span<const double> point, std::span<const double> x_star, std::span<const double> lower,
                  std::span<const double> upper, double eps);

enum class MethodKind { SmoothD, Direct, DirectL };

struct MethodSpec {
  MethodKind kind = MethodKind::SmoothD;
  std::string label;  ///< name in records and plots; defaults to the kind name

  // SmoothD only. An empty ladder with use_ladder set means "class default".
  double r_bar = 2.0;
  std::optional<double> c;  ///< unset: by dimension
  double xi = 1e-6;
  double eps = 1e-4;
  bool use_ladder = true;
  std::vector<double> ladder;

  // DIRECT family only.
  double eps_bal = 1e-4;

  std::string name() const;
};

/// "smoothd", "direct" or "directl"; throws ConfigError otherwise.
MethodSpec parse_method(const std::string& name);

struct RunRecord {
  std::string method;
  int class_id = 0;
  int problem = 0;             ///< 1..100
  std::uint64_t trials = 0;    ///< trials to solve, or trials spent when unsolved
  bool solved = false;
  double best_value = 0.0;
  double wall_time = 0.0;      ///< seconds
  std::string error;           ///< set when the run failed; not serialized

  bool operator==(const RunRecord& other) const;
};

/// Pairs (p, S(p)): S(p) problems solved with at most p trials.
struct OperatingCharacteristic {
  std::string method;
  int class_id = 0;
  std::vector<std::pair<std::uint64_t, int>> points;

  /// Step-function value at p.
  int solved_within(std::uint64_t p) const;
};

struct ClassSummary {
  std::string method;
  int class_id = 0;
  int solved = 0;
  std::optional<std::uint64_t> p_star;  ///< unset when nothing was solved
  std::optional<double> p_avg;
};

/// One problem. Never throws for solver failures; they come back with
/// `error` set and solved = false.
RunRecord run_problem(const MethodSpec& method, const gkls::GklsFunction& fn, std::uint64_t budget);

struct ClassRunOptions {
  std::uint64_t budget = kDefaultBudget;
  unsigned workers = 1;
  int first = 1;
  int last = gkls::kFunctionsPerClass;
  std::function<void(const RunRecord&)> on_record;  ///< serialized, completion order
};

/// Records ordered by problem index regardless of worker scheduling.
std::vector<RunRecord> run_class(const MethodSpec& method, const gkls::ClassParams& params,
                                 const ClassRunOptions& options = {});

OperatingCharacteristic operating_characteristic(std::span<const RunRecord> records);
ClassSummary summarize(std::span<const RunRecord> records);

extern const char* const kRecordHeader;

void write_records_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_records_csv(std::istream& in);
void write_characteristic_csv(std::ostream& out, const OperatingCharacteristic& oc);
void write_summary_csv(std::ostream& out, std::span<const ClassSummary> summaries);

/// Path wrappers; I/O failures throw lipgrad::Error naming the path.
void write_records_csv(const std::filesystem::path& path, std::span<const RunRecord> records);
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path);
void write_characteristic_csv(const std::filesystem::path& path, const OperatingCharacteristic& oc);

/// Step curves on a log p axis. `curves` must not be empty. Output bytes
/// depend only on the input.
void write_plot_svg(std::ostream& out, std::span<const OperatingCharacteristic> curves, const std::string& title);
void write_plot_svg(const std::filesystem::path& path, std::span<const OperatingCharacteristic> curves,
                    const std::string& title);

/// Groups records by (method, class) keeping first-appearance order.
std::vector<std::vector<RunRecord>> group_records(std::span<const RunRecord> records);

}  // namespace lipgrad::bench
