#include "lipgrad/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace lipgrad::bench {

namespace {

struct Solved {};

std::string fixed2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  T v{};
  in >> v;
  if (!in || !in.eof()) throw ConfigError(std::string("bad ") + what + " field '" + text + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.imbue(std::locale::classic());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

double class_r_max(int class_id) {
  static constexpr double kMax[gkls::kStandardClassCount] = {2.80, 5.80, 3.60, 4.30, 5.80, 6.60, 4.10, 7.80};
  if (class_id < 1 || class_id > gkls::kStandardClassCount) {
    throw ConfigError("no default reliability ladder for class " + std::to_string(class_id));
  }
  return kMax[class_id - 1];
}

double default_c(std::size_t dimension) {
  return 50.0 * static_cast<double>(dimension < 2 ? 1 : dimension - 1);
}

bool solved_check(std::span<const double> point, std::span<const double> x_star, std::span<const double> lower,
                  std::span<const double> upper, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("accuracy coefficient must lie in (0, 1)");
  const std::size_t n = x_star.size();
  if (point.size() != n || lower.size() != n || upper.size() != n) throw ConfigError("dimension mismatch");
  const double scale = std::pow(eps, 1.0 / static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    if (!(std::abs(point[j] - x_star[j]) <= scale * std::abs(upper[j] - lower[j]))) return false;
  }
  return true;
}

std::string MethodSpec::name() const {
  if (!label.empty()) return label;
  switch (kind) {
    case MethodKind::SmoothD: return "smoothd";
    case MethodKind::Direct: return "direct";
    case MethodKind::DirectL: return "directl";
  }
  return "unknown";
}

MethodSpec parse_method(const std::string& name) {
  MethodSpec m;
  if (name == "smoothd") m.kind = MethodKind::SmoothD;
  else if (name == "direct") m.kind = MethodKind::Direct;
  else if (name == "directl") m.kind = MethodKind::DirectL;
  else throw ConfigError("unknown method '" + name + "' (expected smoothd, direct or directl)");
  return m;
}

bool RunRecord::operator==(const RunRecord& o) const {
  return method == o.method && class_id == o.class_id && problem == o.problem && trials == o.trials &&
         solved == o.solved && best_value == o.best_value && wall_time == o.wall_time;
}

int OperatingCharacteristic::solved_within(std::uint64_t p) const {
  int s = 0;
  for (const auto& [q, count] : points) {
    if (q > p) break;
    s = count;
  }
  return s;
}

RunRecord run_problem(const MethodSpec& method, const gkls::GklsFunction& fn, std::uint64_t budget) {
  RunRecord rec;
  rec.method = method.name();
  rec.class_id = fn.params().class_id;
  rec.problem = fn.index();

  const Problem problem = fn.as_problem();
  const Point x_star = fn.global_minimizer().first;
  const double eps = fn.params().eps;
  auto target = [&](const TrialRecord& t) {
    return solved_check(t.point, x_star, problem.lower(), problem.upper(), eps);
  };

  const auto start = std::chrono::steady_clock::now();
  try {
    if (method.kind == MethodKind::SmoothD) {
      SolverConfig cfg;
      cfg.r_bar = method.r_bar;
      cfg.c = method.c ? *method.c : default_c(fn.dimension());
      cfg.xi = method.xi;
      cfg.eps = method.eps;
      cfg.max_trials = budget;
      if (method.use_ladder) {
        cfg.r_ladder = method.ladder.empty() ? default_ladder(class_r_max(rec.class_id)) : method.ladder;
      }
      SolveHooks hooks;
      hooks.target = target;
      const RunResult r = solve(problem, cfg, hooks);
      rec.trials = r.trials;
      rec.solved = r.stop_reason == StopReason::Target;
      rec.best_value = r.incumbent_value;
    } else {
      direct::DirectConfig cfg;
      cfg.variant = method.kind == MethodKind::Direct ? direct::Variant::Standard : direct::Variant::LocallyBiased;
      cfg.eps_bal = method.eps_bal;
      cfg.max_trials = budget;
      cfg.keep_log = false;
      const direct::DirectResult r = direct::run_direct(problem, cfg, target);
      rec.trials = r.trials;
      rec.solved = r.stop_reason == StopReason::Target;
      rec.best_value = r.incumbent_value;
    }
  } catch (const std::exception& e) {
    rec.solved = false;
    rec.error = e.what();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<RunRecord> run_class(const MethodSpec& method, const gkls::ClassParams& params,
                                 const ClassRunOptions& options) {
  params.validate();
  if (options.first < 1 || options.last > gkls::kFunctionsPerClass || options.first > options.last) {
    throw ConfigError("problem range must lie in 1..100");
  }
  if (options.budget < 2) throw ConfigError("budget must be at least 2");
  const int count = options.last - options.first + 1;
  std::vector<RunRecord> records(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::mutex report_mutex;

  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      const int index = options.first + i;
      RunRecord rec;
      try {
        rec = run_problem(method, gkls::generate_function(params, index), options.budget);
      } catch (const std::exception& e) {
        rec.method = method.name();
        rec.class_id = params.class_id;
        rec.problem = index;
        rec.error = e.what();
      }
      records[static_cast<std::size_t>(i)] = rec;
      if (options.on_record) {
        std::lock_guard lock(report_mutex);
        options.on_record(rec);
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

OperatingCharacteristic operating_characteristic(std::span<const RunRecord> records) {
  OperatingCharacteristic oc;
  if (!records.empty()) {
    oc.method = records.front().method;
    oc.class_id = records.front().class_id;
  }
  std::vector<std::uint64_t> trials;
  for (const auto& r : records) {
    if (r.solved) trials.push_back(r.trials);
  }
  std::sort(trials.begin(), trials.end());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (i + 1 < trials.size() && trials[i + 1] == trials[i]) continue;
    oc.points.emplace_back(trials[i], static_cast<int>(i + 1));
  }
  return oc;
}

ClassSummary summarize(std::span<const RunRecord> records) {
  ClassSummary s;
  if (!records.empty()) {
    s.method = records.front().method;
    s.class_id = records.front().class_id;
  }
  std::uint64_t max_trials = 0;
  double total = 0.0;
  for (const auto& r : records) {
    if (!r.solved) continue;
    ++s.solved;
    max_trials = std::max(max_trials, r.trials);
    total += static_cast<double>(r.trials);
  }
  if (s.solved > 0) {
    s.p_star = max_trials;
    s.p_avg = total / s.solved;
  }
  return s;
}

const char* const kRecordHeader = "method,class,problem,trials,solved,best_value,wall_time";

void write_records_csv(std::ostream& out, std::span<const RunRecord> records) {
  const auto old_precision = out.precision(17);
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.class_id << ',' << r.problem << ',' << r.trials << ',' << (r.solved ? 1 : 0) << ','
        << r.best_value << ',' << r.wall_time << '\n';
  }
  out.precision(old_precision);
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) throw ConfigError("not a records file (bad header)");
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7) throw ConfigError("records row needs 7 fields: " + line);
    RunRecord r;
    r.method = cells[0];
    r.class_id = parse_number<int>(cells[1], "class");
    r.problem = parse_number<int>(cells[2], "problem");
    r.trials = parse_number<std::uint64_t>(cells[3], "trials");
    const int solved = parse_number<int>(cells[4], "solved");
    if (solved != 0 && solved != 1) throw ConfigError("solved must be 0 or 1: " + line);
    r.solved = solved == 1;
    r.best_value = parse_number<double>(cells[5], "best_value");
    r.wall_time = parse_number<double>(cells[6], "wall_time");
    records.push_back(std::move(r));
  }
  return records;
}

void write_characteristic_csv(std::ostream& out, const OperatingCharacteristic& oc) {
  out << "p,S\n";
  for (const auto& [p, s] : oc.points) out << p << ',' << s << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const ClassSummary> summaries) {
  const auto old_precision = out.precision(17);
  out << "method,class,S,p_star,p_avg\n";
  for (const auto& s : summaries) {
    out << s.method << ',' << s.class_id << ',' << s.solved << ',';
    if (s.p_star) out << *s.p_star;
    out << ',';
    if (s.p_avg) out << *s.p_avg;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_records_csv(const std::filesystem::path& path, std::span<const RunRecord> records) {
  auto out = open_out(path);
  write_records_csv(out, records);
  finish(out, path);
}

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_records_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_characteristic_csv(const std::filesystem::path& path, const OperatingCharacteristic& oc) {
  auto out = open_out(path);
  write_characteristic_csv(out, oc);
  finish(out, path);
}

void write_plot_svg(std::ostream& out, std::span<const OperatingCharacteristic> curves, const std::string& title) {
  if (curves.empty()) throw ContractError("plot needs at least one curve");
  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  constexpr double W = 720, H = 440, left = 70, right = 170, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  std::uint64_t p_lo = 0, p_hi = 0;
  for (const auto& c : curves) {
    for (const auto& [p, s] : c.points) {
      if (p_lo == 0 || p < p_lo) p_lo = p;
      p_hi = std::max(p_hi, p);
    }
  }
  int d_lo = 0, d_hi = 1;
  if (p_lo > 0) {
    d_lo = static_cast<int>(std::floor(std::log10(static_cast<double>(p_lo))));
    d_hi = static_cast<int>(std::ceil(std::log10(static_cast<double>(p_hi))));
    if (d_hi <= d_lo) d_hi = d_lo + 1;
  }
  auto px = [&](double p) { return left + (std::log10(p) - d_lo) / (d_hi - d_lo) * pw; };
  auto py = [&](double s) { return top + (100.0 - s) / 100.0 * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";
  out << "<rect x=\"" << fixed2(left) << "\" y=\"" << fixed2(top) << "\" width=\"" << fixed2(pw) << "\" height=\""
      << fixed2(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = d_lo; d <= d_hi; ++d) {
    const double x = px(std::pow(10.0, d));
    out << "<line x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(x) << "\" y2=\""
        << fixed2(top + ph) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(top + ph + 16) << "\" text-anchor=\"middle\">1e" << d
        << "</text>\n";
  }
  for (int s = 0; s <= 100; s += 20) {
    const double y = py(s);
    out << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(y) << "\" x2=\"" << fixed2(left + pw) << "\" y2=\""
        << fixed2(y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(y + 4) << "\" text-anchor=\"end\">" << s
        << "</text>\n";
  }
  out << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(H - 16)
      << "\" text-anchor=\"middle\">trials p (log scale)</text>\n";
  out << "<text x=\"18\" y=\"" << fixed2(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fixed2(top + ph / 2) << ")\">solved S(p)</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      const double p = static_cast<double>(c.points[k].first);
      if (k > 0) pts.emplace_back(p, c.points[k - 1].second);
      pts.emplace_back(p, c.points[k].second);
    }
    out << "<polyline class=\"curve\" data-method=\"" << xml_escape(c.method) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k) out << ' ';
      out << fixed2(px(pts[k].first)) << ',' << fixed2(py(pts[k].second));
    }
    out << "\"/>\n";
    const double ly = top + 14 + 20.0 * static_cast<double>(i);
    const double lx = left + pw + 14;
    out << "<line class=\"legend\" x1=\"" << fixed2(lx) << "\" y1=\"" << fixed2(ly) << "\" x2=\"" << fixed2(lx + 24)
        << "\" y2=\"" << fixed2(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed2(lx + 30) << "\" y=\"" << fixed2(ly + 4) << "\">" << xml_escape(c.method)
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_plot_svg(const std::filesystem::path& path, std::span<const OperatingCharacteristic> curves,
                    const std::string& title) {
  auto out = open_out(path);
  write_plot_svg(out, curves, title);
  finish(out, path);
}

std::vector<std::vector<RunRecord>> group_records(std::span<const RunRecord> records) {
  std::vector<std::vector<RunRecord>> groups;
  std::map<std::pair<std::string, int>, std::size_t> where;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.method, r.class_id);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, groups.size()).first;
      groups.emplace_back();
    }
    groups[it->second].push_back(r);
  }
  return groups;
}

}  // namespace lipgrad::bench
