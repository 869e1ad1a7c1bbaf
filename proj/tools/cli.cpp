#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fibdisc/checks.hpp"
#include "fibdisc/discrepancy.hpp"
#include "fibdisc/lattice.hpp"
#include "fibdisc/study.hpp"

namespace fibdisc::cli {

namespace {

/// Practical ceiling for commands that materialize F_n (b_40 is about 1.7e8 points).
constexpr int kMaxCliIndex = kMaxExhaustiveIndex;

int parse_int(const std::string& text) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument("not an integer: '" + text + "'");
  return value;
}

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size() || std::isnan(value)) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return value;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::pair<int, int> checked_range(const std::string& text, int lo, int hi) {
  const auto [a, b] = parse_range(text);
  require(a >= lo && b <= hi,
          "n must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + text);
  return {a, b};
}

nlohmann::ordered_json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

// ---------------------------------------------------------------------------
// Config file: "key = value" per line, '#' starts a comment. Entries become
// "--key=value" arguments unless the command line already names that flag.

std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read config file '" + path + "'");
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0 || (key == "output" && a == "-o");
    });
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    if (!given(key)) args.push_back("--" + key + "=" + value);
  }
  return args;
}

// ---------------------------------------------------------------------------

struct Options {
  std::string n;
  int r = 2;
  std::string p = "2";
  std::string v = "0.25";
  int shapes = 33;
  int shifts = 0;
  int centers = 64;
  std::int64_t K = 0;
  double tail = 1e-6;
  std::string method = "auto";
  bool periodic = true;
  bool refine = false;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  std::string format;
  double proportional = 0.0;
  bool gamma = false;
  bool profile = false;
  bool constants = false;
  int v_count = 9;
  int d = 2;
  int samples = 200;
  std::vector<std::string> suites;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      require(file_->good(), "cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

int cmd_points(const Options& o, std::ostream& out) {
  require(!o.n.empty(), "--n is required");
  const int n = parse_int(o.n);
  require(n >= 2 && n <= kMaxCliIndex, "n must lie in [2, " + std::to_string(kMaxCliIndex) + "]");
  const auto ps = fibonacci_point_set(FibIndex(n));
  Output dest(o.output, out);
  auto& os = dest.stream();
  os << "mu,x1,x2\n";
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    os << (i + 1) << ',' << format_double(ps.points[i].x1) << ',' << format_double(ps.points[i].x2)
       << '\n';
  }
  return kExitOk;
}

PeriodicOptions periodic_options(const Options& o) {
  PeriodicOptions opts;
  opts.shapes = o.shapes;
  opts.shift_grid = o.shifts;
  if (o.K > 0) opts.max_K = o.K;
  opts.relative_tail = o.tail;
  using Route = PeriodicOptions::L2Route;
  static const std::map<std::string, Route> routes{{"auto", Route::Auto},
                                                   {"spectral", Route::Spectral},
                                                   {"autocorrelation", Route::Autocorrelation},
                                                   {"grid", Route::Grid}};
  const auto it = routes.find(o.method);
  require(it != routes.end(), "--method must be auto, spectral, autocorrelation or grid");
  opts.l2_route = it->second;
  return opts;
}

void validate_common(const Options& o) {
  require(o.r >= 1 && o.r <= kMaxSmoothness,
          "r must lie in [1, " + std::to_string(kMaxSmoothness) + "]");
  require(o.shapes >= 1 && o.shapes % 2 == 1, "--shapes must be a positive odd integer");
  require(o.shifts == 0 || o.shifts >= 2, "--shifts must be 0 (auto) or >= 2");
  require(o.centers >= 1, "--centers must be >= 1");
  require(o.K >= 0, "--K must be >= 0");
  require(o.tail > 0.0, "--tail must be positive");
}

int cmd_discrepancy(const Options& o, std::ostream& out) {
  require(!o.n.empty(), "--n is required");
  validate_common(o);
  const int n = parse_int(o.n);
  require(n >= 2 && n <= kMaxCliIndex, "n must lie in [2, " + std::to_string(kMaxCliIndex) + "]");
  const double p = parse_p(o.p);
  const double v = parse_real(o.v);
  require(o.format.empty() || o.format == "json", "discrepancy supports --format json only");
  const PointSet ps = fibonacci_point_set(FibIndex(n));

  DiscrepancyResult res;
  if (o.periodic) {
    const auto opts = periodic_options(o);
    res = o.refine ? refine_periodic(ps, o.r, v, p, opts)
                   : fixed_volume_discrepancy_periodic(ps, o.r, v, p, opts);
  } else {
    const NonperiodicOptions opts{o.shapes, o.centers};
    res = o.refine ? refine_nonperiodic(ps, o.r, v, opts)
                   : fixed_volume_discrepancy_nonperiodic(ps, o.r, v, opts);
  }

  nlohmann::ordered_json j;
  j["n"] = n;
  j["b_n"] = ps.index.b();
  j["r"] = o.r;
  j["p"] = o.periodic ? number_or_inf(p) : nlohmann::ordered_json("inf");
  j["v"] = v;
  j["periodic"] = o.periodic;
  j["value"] = res.value;
  j["method"] = std::string(to_string(res.method));
  j["tail_bound"] = number_or_inf(res.tail_bound);
  j["shape_samples"] = res.shape_samples;
  j["shift_grid"] = res.grid;
  j["center_grid"] = res.center_grid;
  j["K"] = res.K;
  j["argmax_shape"] = res.argmax_shape;
  Output dest(o.output, out);
  dest.stream() << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_study(const Options& o, std::ostream& out) {
  const int selected = int{o.gamma} + int{o.profile} + int{o.constants};
  require(selected <= 1, "--gamma, --profile and --constants are mutually exclusive");

  if (o.gamma) {
    const auto [a, b] = checked_range(o.n.empty() ? "3..20" : o.n, 3, kMaxExhaustiveIndex);
    require(o.format.empty() || o.format == "csv", "--gamma writes csv only");
    Output dest(o.output, out);
    write_gamma_csv(dest.stream(), gamma_table(a, b));
    return kExitOk;
  }

  if (o.constants) {
    require(o.r >= 1 && o.r <= kMaxSmoothness,
            "r must lie in [1, " + std::to_string(kMaxSmoothness) + "]");
    require(o.d >= 1 && o.d <= 6, "--d must lie in [1, 6]");
    require(o.samples >= 50, "--samples must be >= 50");
    require(o.format.empty() || o.format == "json", "--constants writes json only");
    Output dest(o.output, out);
    write_constants_json(dest.stream(), bound_constants_report(o.r, o.d, o.samples, o.seed));
    return kExitOk;
  }

  validate_common(o);
  const double p = parse_p(o.p);

  if (o.profile) {
    const auto [a, b] = checked_range(o.n.empty() ? "12" : o.n, 2, kMaxCliIndex);
    require(a == b, "--profile takes a single n");
    require(o.periodic, "--profile is defined for the periodic discrepancy");
    require(o.v_count >= 1, "--v-count must be >= 1");
    require(o.format.empty() || o.format == "csv", "--profile writes csv only");
    const double bn = static_cast<double>(fib(a));
    const double lo = std::min(16.0 / bn, 0.25);
    const auto grid = log_spaced(lo, 0.25, o.v_count);
    const auto rows = worst_box_profile(a, o.r, p, grid, periodic_options(o));
    Output dest(o.output, out);
    write_profile_csv(dest.stream(), a, o.r, p, rows);
    return kExitOk;
  }

  StudyConfig cfg;
  cfg.r = o.r;
  cfg.p = p;
  cfg.periodic = o.periodic;
  std::tie(cfg.n_first, cfg.n_last) = checked_range(o.n.empty() ? "8..16" : o.n, 2, kMaxCliIndex);
  if (o.proportional > 0.0) {
    cfg.volumes = ProportionalVolume{o.proportional, 0.0};
  } else {
    const auto vs = parse_real_list(o.v);
    cfg.volumes = vs.size() == 1 ? VolumePolicy(FixedVolume{vs[0]}) : VolumePolicy(VolumeList{vs});
  }
  cfg.periodic_opts = periodic_options(o);
  cfg.nonperiodic_opts = NonperiodicOptions{o.shapes, o.centers};
  require(o.format.empty() || o.format == "csv" || o.format == "json",
          "--format must be csv or json");
  const auto rows = scaling_table(cfg);

  Output dest(o.output, out);
  if (o.format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      arr.push_back({{"n", row.n},
                     {"b_n", row.b},
                     {"r", row.r},
                     {"p", number_or_inf(row.p)},
                     {"v", row.v},
                     {"value", row.value},
                     {"normalizer", row.normalizer},
                     {"ratio", row.ratio},
                     {"method", std::string(to_string(row.result.method))},
                     {"S", row.result.shape_samples},
                     {"M", row.result.grid > 0 ? row.result.grid : row.result.center_grid},
                     {"K", row.result.K},
                     {"tail", number_or_inf(row.result.tail_bound)}});
    }
    dest.stream() << arr.dump(2) << '\n';
  } else {
    write_scaling_csv(dest.stream(), rows);
  }
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  std::vector<std::string> suites = o.suites.empty() ? suite_names() : o.suites;
  for (const auto& s : suites) {
    require(std::find(suite_names().begin(), suite_names().end(), s) != suite_names().end(),
            "unknown suite '" + s + "'");
  }
  Output dest(o.output, out);
  bool all = true;
  for (const auto& s : suites) {
    const auto result = run_suite(s, o.seed);
    dest.stream() << summary_line(result) << '\n';
    all = all && result.passed();
  }
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int a = parse_int(text);
    return {a, a};
  }
  const int a = parse_int(text.substr(0, dots));
  const int b = parse_int(text.substr(dots + 2));
  require(a <= b, "empty range '" + text + "'");
  return {a, b};
}

double parse_p(const std::string& text) {
  if (text == "inf") return kInfinity;
  const double p = parse_real(text);
  require(p >= 1.0 && std::isfinite(p), "p must be >= 1 or inf");
  return p;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth fixed-volume discrepancy of Fibonacci lattices", "fibdisc"};
  app.require_subcommand(1);
  Options o;

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", o.output, "Output path (stdout if omitted)");
    sub->add_option("--format", o.format, "Output format: csv or json");
  };
  auto add_grids = [&](CLI::App* sub) {
    sub->add_option("--r", o.r, "Smoothness order r");
    sub->add_option("--p", o.p, "Norm exponent (real >= 1 or inf)");
    sub->add_option("--shapes", o.shapes, "Aspect ratios scanned (odd)");
    sub->add_option("--shifts", o.shifts, "Shift grid M (0 = 256, or 512 for p = inf)");
    sub->add_option("--centers", o.centers, "Center grid M_c (non-periodic)");
    sub->add_option("--K", o.K, "Largest spectral cutoff for p = 2");
    sub->add_option("--tail", o.tail, "Relative certified tail target for p = 2");
    sub->add_option("--method", o.method, "p = 2 route: auto, spectral, autocorrelation, grid");
    sub->add_option("--periodic", o.periodic, "Periodic L_p (true) or non-periodic sup (false)");
  };

  auto* points = app.add_subcommand("points", "Write the Fibonacci point set as CSV");
  points->add_option("--n", o.n, "Fibonacci index");
  add_output(points);

  auto* disc = app.add_subcommand("discrepancy", "Fixed-volume discrepancy of F_n as JSON");
  disc->add_option("--n", o.n, "Fibonacci index");
  disc->add_option("--v", o.v, "Box volume in (0, 1]");
  disc->add_flag("--refine", o.refine, "Refine grids until the value settles");
  add_grids(disc);
  add_output(disc);

  auto* study = app.add_subcommand("study", "Scaling tables, gamma table, profiles, constants");
  study->add_option("--n", o.n, "Index range a..b");
  study->add_option("--v", o.v, "Volume or comma-separated volumes");
  study->add_option("--proportional", o.proportional, "Use v = min(1, c0 / b_n)");
  study->add_flag("--gamma", o.gamma, "Minimum hyperbolic norm table");
  study->add_flag("--profile", o.profile, "Worst-box profile over v at a single n");
  study->add_option("--v-count", o.v_count, "Volumes in the profile grid");
  study->add_flag("--constants", o.constants, "Measured bound constants as JSON");
  study->add_option("--d", o.d, "Dimension for --constants");
  study->add_option("--samples", o.samples, "Random inputs for --constants");
  study->add_option("--seed", o.seed, "Random seed");
  add_grids(study);
  add_output(study);

  auto* check = app.add_subcommand("check", "Run the invariant suites");
  check->add_option("--suite", o.suites, "Suite to run (repeatable): lattice, splines, discrepancy, study");
  check->add_option("--seed", o.seed, "Random seed");
  check->add_option("-o,--output", o.output, "Output path (stdout if omitted)");

  try {
    auto args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "fibdisc: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "fibdisc: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (points->parsed()) return cmd_points(o, out);
    if (disc->parsed()) return cmd_discrepancy(o, out);
    if (study->parsed()) return cmd_study(o, out);
    return cmd_check(o, out);
  } catch (const InfeasibleVolume& e) {
    err << "fibdisc: infeasible volume: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "fibdisc: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << "fibdisc: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "fibdisc: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace fibdisc::cli
