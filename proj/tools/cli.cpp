#include "cli.hpp"

#include "cca/detection.hpp"
#include "cca/lindblad.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace cca::cli {

namespace {

constexpr double kPi = std::numbers::pi;

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.push_back("");
  return out;
}

// list values accept both comma and whitespace separators, so config files
// may write 'fock=1 0 0' and flags may write --fock 1,0,0
std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(std::move(item));
  return out;
}

// Reads 'key=value' lines (blank lines and '#' comments skipped) and appends
// '--key value' for every key not already given explicitly, so command-line
// flags take precedence over file values.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string() : s.substr(from, to - from + 1);
  };
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line without key: '" + line + "'");

    const std::string flag = "--" + key;
    bool already_given = false;
    for (const auto& arg : args)
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) already_given = true;
    if (!already_given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

// ---------------------------------------------------------------------------
// scenario plumbing

struct ModelFlags {
  int n = 3;
  double omega = 1.0;
  double hopping = 0.5;

  ModelParamsd params() const { return {n, omega, hopping}; }
};

struct StateFlags {
  std::string fock;
  std::string coherent;
  std::string pair;
};

struct GridFlags {
  double start = 0.0;
  double stop = -1.0;  // negative: default to the revival period
  int points = 2001;
};

void add_model_flags(CLI::App* cmd, ModelFlags& model) {
  cmd->add_option("--n", model.n, "number of cavities")->capture_default_str();
  cmd->add_option("--omega", model.omega, "cavity frequency (units with hbar = 1)")
      ->capture_default_str();
  cmd->add_option("--j", model.hopping, "nearest-neighbour coupling J")->capture_default_str();
}

void add_state_flags(CLI::App* cmd, StateFlags& state) {
  auto* fock = cmd->add_option("--fock", state.fock, "Fock occupations, e.g. 1,0,0");
  auto* coherent = cmd->add_option("--coherent", state.coherent,
                                   "weak coherent amplitudes, e.g. 0.1i,0.1i,0.1i");
  auto* pair = cmd->add_option("--pair", state.pair,
                               "entangled pair 'theta,first|last', e.g. 0.7854,first");
  fock->excludes(coherent)->excludes(pair);
  coherent->excludes(pair);
}

void add_grid_flags(CLI::App* cmd, GridFlags& grid) {
  cmd->add_option("--tstart", grid.start, "grid start time")->capture_default_str();
  cmd->add_option("--tstop", grid.stop, "grid stop time (default: one revival period)");
  cmd->add_option("--points", grid.points, "number of grid points")->capture_default_str();
}

PureStated build_state(const StateFlags& flags, int n) {
  const int given =
      int(!flags.fock.empty()) + int(!flags.coherent.empty()) + int(!flags.pair.empty());
  if (given != 1)
    throw std::invalid_argument("specify exactly one of --fock, --coherent, --pair");
  if (!flags.fock.empty()) return fock_product_state(n, parse_occupation(flags.fock));
  if (!flags.coherent.empty()) {
    std::vector<std::complex<double>> alphas;
    for (const auto& part : split_list(flags.coherent)) alphas.push_back(parse_complex(part));
    return weak_coherent_product(n, alphas);
  }
  const auto parts = split_list(flags.pair);
  if (parts.size() != 2) throw std::invalid_argument("--pair expects 'theta,first|last'");
  const double theta = parse_double(parts[0]);
  PairPlacement placement;
  if (parts[1] == "first")
    placement = PairPlacement::first_two;
  else if (parts[1] == "last")
    placement = PairPlacement::last_two;
  else
    throw std::invalid_argument("pair placement must be 'first' or 'last'");
  return entangled_pair_state(n, EntangledPairSpecd{theta}, placement);
}

Eigen::VectorXd make_grid(const GridFlags& flags, const ModelParamsd& params) {
  double stop = flags.stop;
  if (stop < 0) {
    const auto period = evolution_period(build_spectral(params));
    if (!period || *period == 0.0)
      throw std::invalid_argument("no revival period at these parameters; give --tstop");
    stop = *period;
  }
  if (flags.points < 2) throw std::invalid_argument("need at least two grid points");
  if (!(stop > flags.start) || flags.start < 0)
    throw std::invalid_argument("need stop > start >= 0");
  return Eigen::VectorXd::LinSpaced(flags.points, flags.start, stop);
}

// ---------------------------------------------------------------------------
// artifacts

std::filesystem::path resolve_output(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  const char* dir = std::getenv("CCA_OUTPUT_DIR");
  return std::filesystem::path(dir ? dir : ".") / fallback;
}

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    std::cout << "wrote " << path_.string() << "\n";
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string kind_name(EventKind kind) { return kind == EventKind::w ? "W" : "NOON"; }

void write_event_rows(CsvFile& csv, const std::vector<std::string>& prefix,
                      const DetectionReportd& report) {
  auto with_prefix = [&](std::initializer_list<std::string> tail) {
    std::vector<std::string> cells = prefix;
    cells.insert(cells.end(), tail);
    return cells;
  };
  if (report.empty()) {
    csv.row(
        with_prefix({kind_name(report.kind), std::to_string(report.photon_number), "none", ""}));
    return;
  }
  for (std::size_t i = 0; i < report.times.size(); ++i)
    csv.row(with_prefix({kind_name(report.kind), std::to_string(report.photon_number),
                         format_number(report.times[i]), format_number(report.probabilities[i])}));
}

void write_wnoon_csv(
    const std::filesystem::path& path, const std::vector<std::string>& prefix_header,
    const std::vector<std::pair<std::vector<std::string>, DetectionReportd>>& blocks) {
  CsvFile csv(path);
  std::vector<std::string> header = prefix_header;
  header.insert(header.end(), {"kind", "photons", "time", "probability"});
  csv.row(header);
  for (const auto& [prefix, report] : blocks) write_event_rows(csv, prefix, report);
  csv.close();
}

// the three weak-coherent scenarios used throughout: equal edge amplitudes
// with the middle amplitude equal, dominant or suppressed
PureStated coherent_scenario(int which) {
  const std::complex<double> strong(0, 0.1), weak(0, 0.01);
  switch (which) {
    case 1: return weak_coherent_product<double>(3, {strong, strong, strong});
    case 2: return weak_coherent_product<double>(3, {weak, strong, weak});
    case 3: return weak_coherent_product<double>(3, {strong, weak, strong});
    default: throw std::invalid_argument("scenario index out of range");
  }
}

// ---------------------------------------------------------------------------
// subcommands

void run_spectrum(const ModelFlags& model, bool with_period, const std::string& output) {
  const auto spec = build_spectral(model.params());
  std::cout << "k,frequency\n";
  for (int k = 0; k < model.n; ++k)
    std::cout << k + 1 << ',' << format_number(spec.frequencies(k)) << "\n";
  if (with_period) {
    const auto period = evolution_period(spec);
    if (!period)
      std::cout << "period,incommensurable\n";
    else
      std::cout << "period," << format_number(*period) << "\n";
  }
  if (!output.empty()) {
    CsvFile csv(output);
    csv.row({"k", "frequency"});
    for (int k = 0; k < model.n; ++k)
      csv.row({std::to_string(k + 1), format_number(spec.frequencies(k))});
    csv.close();
  }
}

void run_period(const ModelFlags& model, const PeriodOptions& opts, const std::string& output) {
  const auto period = evolution_period(build_spectral(model.params()), opts);
  std::string status, value;
  if (!period) {
    status = "incommensurable";
  } else if (*period == 0.0) {
    status = "stationary";
    value = "0";
  } else {
    status = "periodic";
    value = format_number(*period);
  }
  std::cout << "status,period\n" << status << ',' << value << "\n";
  if (!output.empty()) {
    CsvFile csv(output);
    csv.row({"status", "period"});
    csv.row({status, value});
    csv.close();
  }
}

void run_evolve(const ModelFlags& model, const StateFlags& state_flags, const GridFlags& grid_flags,
                const std::string& labels_flag, const std::string& output) {
  const auto params = model.params();
  const auto state = build_state(state_flags, model.n);
  const auto times = make_grid(grid_flags, params);

  std::vector<Occupation> labels;
  if (!labels_flag.empty()) {
    for (const auto& item : split(labels_flag, ';')) labels.push_back(parse_occupation(item));
  } else {
    for (const auto& [photons, amplitudes] : state.sectors) {
      if (amplitudes.squaredNorm() == 0.0) continue;
      const auto basis = enumerate_sector(model.n, photons);
      labels.insert(labels.end(), basis.states.begin(), basis.states.end());
    }
  }

  const auto series = probability_series(state, params, times, labels);
  CsvFile csv(resolve_output(output, "evolve.csv"));
  std::vector<std::string> header{"t"};
  for (const auto& label : labels) header.push_back(format_occupation(label));
  csv.row(header);
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    std::vector<std::string> cells{format_number(times(i))};
    for (Eigen::Index j = 0; j < series.probabilities.cols(); ++j)
      cells.push_back(format_number(series.probabilities(i, j)));
    csv.row(cells);
  }
  csv.close();
}

void run_survival(const ModelFlags& model, const std::string& fock, const GridFlags& grid_flags,
                  const std::string& output) {
  if (fock.empty()) throw std::invalid_argument("survival needs --fock");
  const auto params = model.params();
  const auto initial = parse_occupation(fock);
  const auto times = make_grid(grid_flags, params);
  const auto values = survival_series(initial, params, times);
  CsvFile csv(resolve_output(output, "survival.csv"));
  csv.row({"t", format_occupation(initial)});
  for (Eigen::Index i = 0; i < times.size(); ++i)
    csv.row({format_number(times(i)), format_number(values(i))});
  csv.close();
}

void run_wnoon(const ModelFlags& model, const StateFlags& state_flags,
               const std::string& photons_flag, const DetectionOptions& opts,
               const std::string& output) {
  const auto params = model.params();
  const auto state = build_state(state_flags, model.n);
  std::vector<std::pair<std::vector<std::string>, DetectionReportd>> blocks;
  for (const auto& item : split_list(photons_flag)) {
    const int photons = static_cast<int>(parse_double(item));
    blocks.emplace_back(std::vector<std::string>{}, find_w_times(state, params, photons, opts));
    blocks.emplace_back(std::vector<std::string>{}, find_noon_times(state, params, photons, opts));
  }
  write_wnoon_csv(resolve_output(output, "wnoon.csv"), {}, blocks);
}

void run_transfer(const ModelFlags& model, double theta_start, double theta_stop, int theta_points,
                  const GridFlags& grid_flags, const std::string& output) {
  const auto params = model.params();
  GridFlags grid = grid_flags;
  if (grid.stop < 0) grid.stop = 120.0;  // window covering the transmission peak
  const auto times = make_grid(grid, params);

  if (theta_points < 1) throw std::invalid_argument("need at least one theta");
  std::vector<double> thetas;
  for (int i = 0; i < theta_points; ++i)
    thetas.push_back(theta_points == 1
                         ? theta_start
                         : theta_start + (theta_stop - theta_start) * i / (theta_points - 1));

  CsvFile csv(resolve_output(output, "transfer.csv"));
  csv.row({"t", "theta", "C", "p"});
  for (double theta : thetas) {
    for (Eigen::Index i = 0; i < times.size(); ++i) {
      const auto result = transfer_probability_numeric(theta, params, times(i));
      csv.row({format_number(times(i)), format_number(theta), format_number(result.concurrence),
               format_number(result.probability)});
    }
  }
  csv.close();
}

void run_lindblad(const ModelFlags& model, double gamma, const std::string& times_flag,
                  int theta_points, const IntegrationOptions& opts, const std::string& output) {
  const auto params = model.params();
  const LossParamsd loss{gamma};
  std::vector<double> times;
  for (const auto& item : split_list(times_flag)) times.push_back(parse_double(item));
  if (theta_points < 2) throw std::invalid_argument("need at least two theta points");
  std::vector<double> thetas;
  for (int i = 0; i < theta_points; ++i) thetas.push_back(kPi / 2 * i / (theta_points - 1));

  const auto sweep = dissipative_transfer_sweep(params, loss, thetas, times, opts);

  const auto csv_path = resolve_output(output, "lindblad.csv");
  CsvFile csv(csv_path);
  csv.row({"t", "theta", "gamma", "p"});
  for (std::size_t it = 0; it < times.size(); ++it)
    for (std::size_t ia = 0; ia < thetas.size(); ++ia)
      csv.row({format_number(times[it]), format_number(thetas[ia]), format_number(gamma),
               format_number(sweep.probabilities(static_cast<Eigen::Index>(ia),
                                                 static_cast<Eigen::Index>(it)))});
  csv.close();

  nlohmann::json diag{{"gamma", gamma},
                      {"dt", opts.dt},
                      {"max_trace_error", sweep.max_trace_error},
                      {"max_hermiticity_error", sweep.max_hermiticity_error},
                      {"min_eigenvalue", sweep.min_eigenvalue}};
  auto json_path = csv_path;
  json_path.replace_extension(".diagnostics.json");
  std::ofstream json_out(json_path);
  json_out << diag.dump(2) << "\n";
  json_out.close();
  std::cout << "wrote " << json_path.string() << "\n";
}

// ---------------------------------------------------------------------------
// canned reproductions

Eigen::VectorXd default_period_grid() {
  const ModelParamsd params{3, 1.0, 0.5};
  const double period = *evolution_period(build_spectral(params));
  return Eigen::VectorXd::LinSpaced(2001, 0.0, period);
}

void reproduce_survival_family(const std::filesystem::path& path) {
  const ModelParamsd params{3, 1.0, 0.5};
  const auto times = default_period_grid();
  CsvFile csv(path);
  csv.row({"t", "m1", "m2", "m3", "m4"});
  std::vector<Eigen::VectorXd> curves;
  for (int m = 1; m <= 4; ++m) curves.push_back(survival_series({m, 0, 0}, params, times));
  for (Eigen::Index i = 0; i < times.size(); ++i)
    csv.row({format_number(times(i)), format_number(curves[0](i)), format_number(curves[1](i)),
             format_number(curves[2](i)), format_number(curves[3](i))});
  csv.close();
}

void reproduce_survival_extreme(const std::filesystem::path& path) {
  const ModelParamsd params{3, 1.0, 0.5};
  const auto times = default_period_grid();
  CsvFile csv(path);
  csv.row({"t", "m3000"});
  for (Eigen::Index i = 0; i < times.size(); ++i)
    csv.row({format_number(times(i)), format_number(closed_form_survival(3000, params, times(i)))});
  csv.close();
}

void reproduce_coherent_sites(const std::filesystem::path& path, int photons) {
  const ModelParamsd params{3, 1.0, 0.5};
  const auto times = default_period_grid();
  Occupation edge(3, 0), middle(3, 0);
  edge[0] = photons;
  middle[1] = photons;

  CsvFile csv(path);
  std::vector<std::string> header{"t"};
  for (int c = 1; c <= 3; ++c) {
    header.push_back("case" + std::to_string(c) + "_p" + format_occupation(edge));
    header.push_back("case" + std::to_string(c) + "_p" + format_occupation(middle));
  }
  csv.row(header);
  std::vector<ProbabilitySeriesd> series;
  for (int c = 1; c <= 3; ++c)
    series.push_back(probability_series(coherent_scenario(c), params, times, {edge, middle}));
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    std::vector<std::string> cells{format_number(times(i))};
    for (const auto& s : series) {
      cells.push_back(format_number(s.probabilities(i, 0)));
      cells.push_back(format_number(s.probabilities(i, 1)));
    }
    csv.row(cells);
  }
  csv.close();
}

void reproduce_amplitude_comparison(const std::filesystem::path& path) {
  const ModelParamsd params{3, 1.0, 0.5};
  const auto times = default_period_grid();
  auto uniform = [](double a) {
    const std::complex<double> alpha(0, a);
    return weak_coherent_product<double>(3, {alpha, alpha, alpha});
  };
  const std::vector<Occupation> labels{{1, 0, 0}, {0, 1, 0}};
  const auto weak = probability_series(uniform(0.1), params, times, labels);
  const auto strong = probability_series(uniform(0.5), params, times, labels);
  CsvFile csv(path);
  csv.row({"t", "weak_p100", "weak_p010", "strong_p100", "strong_p010"});
  for (Eigen::Index i = 0; i < times.size(); ++i)
    csv.row({format_number(times(i)), format_number(weak.probabilities(i, 0)),
             format_number(weak.probabilities(i, 1)), format_number(strong.probabilities(i, 0)),
             format_number(strong.probabilities(i, 1))});
  csv.close();
}

void reproduce_middle_fock(const std::filesystem::path& path, int photons) {
  const ModelParamsd params{3, 1.0, 0.5};
  const auto times = default_period_grid();
  Occupation initial(3, 0);
  initial[1] = photons;
  std::vector<Occupation> labels;
  if (photons == 1)
    labels = {{1, 0, 0}, {0, 1, 0}};
  else
    labels = {{2, 0, 0}, {0, 2, 0}, {1, 1, 0}, {1, 0, 1}};
  const auto series = probability_series(fock_product_state(3, initial), params, times, labels);
  CsvFile csv(path);
  std::vector<std::string> header{"t"};
  for (const auto& label : labels) header.push_back("p" + format_occupation(label));
  csv.row(header);
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    std::vector<std::string> cells{format_number(times(i))};
    for (Eigen::Index j = 0; j < series.probabilities.cols(); ++j)
      cells.push_back(format_number(series.probabilities(i, j)));
    csv.row(cells);
  }
  csv.close();
}

void reproduce_transfer_surface(const std::filesystem::path& path) {
  CsvFile csv(path);
  csv.row({"t", "theta", "C", "p"});
  const auto times = Eigen::VectorXd::LinSpaced(1201, 0.0, 120.0);
  for (int ic = 0; ic <= 20; ++ic) {
    const double c = ic / 20.0;
    const double theta = 0.5 * std::asin(c);
    for (Eigen::Index i = 0; i < times.size(); ++i)
      csv.row({format_number(times(i)), format_number(theta), format_number(c),
               format_number(transfer_probability_closed_form(times(i), c))});
  }
  csv.close();
}

void reproduce_transfer_slice(const std::filesystem::path& path) {
  CsvFile csv(path);
  csv.row({"t", "theta", "C", "p"});
  const double t = 106.7957;
  for (int ic = 0; ic <= 200; ++ic) {
    const double c = ic / 200.0;
    csv.row({format_number(t), format_number(0.5 * std::asin(c)), format_number(c),
             format_number(transfer_probability_closed_form(t, c))});
  }
  csv.close();
}

void reproduce_lossy_sweep(const std::filesystem::path& path) {
  const ModelParamsd params{3, 1.0, 0.5};
  const LossParamsd loss{0.1};
  std::vector<double> thetas;
  for (int i = 0; i < 181; ++i) thetas.push_back(kPi / 2 * i / 180.0);
  const std::vector<double> times{10.0, 100.0};
  const auto sweep = dissipative_transfer_sweep(params, loss, thetas, times);

  CsvFile csv(path);
  csv.row({"t", "theta", "gamma", "p"});
  for (std::size_t it = 0; it < times.size(); ++it)
    for (std::size_t ia = 0; ia < thetas.size(); ++ia)
      csv.row({format_number(times[it]), format_number(thetas[ia]), format_number(0.1),
               format_number(sweep.probabilities(static_cast<Eigen::Index>(ia),
                                                 static_cast<Eigen::Index>(it)))});
  csv.close();

  nlohmann::json diag{{"gamma", 0.1},
                      {"max_trace_error", sweep.max_trace_error},
                      {"max_hermiticity_error", sweep.max_hermiticity_error},
                      {"min_eigenvalue", sweep.min_eigenvalue}};
  auto json_path = path;
  json_path.replace_extension(".diagnostics.json");
  std::ofstream json_out(json_path);
  json_out << diag.dump(2) << "\n";
  std::cout << "wrote " << json_path.string() << "\n";
}

void reproduce_coherent_table(const std::filesystem::path& path) {
  const ModelParamsd params{3, 1.0, 0.5};
  std::vector<std::pair<std::vector<std::string>, DetectionReportd>> blocks;
  for (int c = 1; c <= 3; ++c) {
    const auto state = coherent_scenario(c);
    for (int photons = 1; photons <= 3; ++photons) {
      blocks.emplace_back(std::vector<std::string>{"case" + std::to_string(c)},
                          find_w_times(state, params, photons));
      blocks.emplace_back(std::vector<std::string>{"case" + std::to_string(c)},
                          find_noon_times(state, params, photons));
    }
  }
  write_wnoon_csv(path, {"case"}, blocks);
}

void reproduce_fock_table(const std::filesystem::path& path, int photons) {
  const ModelParamsd params{3, 1.0, 0.5};
  Occupation initial(3, 0);
  initial[1] = photons;
  const auto state = fock_product_state(3, initial);
  std::vector<std::pair<std::vector<std::string>, DetectionReportd>> blocks;
  blocks.emplace_back(std::vector<std::string>{}, find_w_times(state, params, photons));
  blocks.emplace_back(std::vector<std::string>{}, find_noon_times(state, params, photons));
  write_wnoon_csv(path, {}, blocks);
}

void run_reproduce(const std::string& target, const std::string& output) {
  const auto path = resolve_output(output, target + ".csv");
  if (target == "fig1") reproduce_survival_family(path);
  else if (target == "fig2") reproduce_survival_extreme(path);
  else if (target == "fig3") reproduce_coherent_sites(path, 1);
  else if (target == "fig4") reproduce_coherent_sites(path, 2);
  else if (target == "fig5") reproduce_coherent_sites(path, 3);
  else if (target == "fig6") reproduce_amplitude_comparison(path);
  else if (target == "fig7") reproduce_middle_fock(path, 1);
  else if (target == "fig8") reproduce_middle_fock(path, 2);
  else if (target == "fig9") reproduce_transfer_surface(path);
  else if (target == "fig10") reproduce_transfer_slice(path);
  else if (target == "fig11") reproduce_lossy_sweep(path);
  else if (target == "table1") reproduce_coherent_table(path);
  else if (target == "table2") reproduce_fock_table(path, 1);
  else if (target == "table3") reproduce_fock_table(path, 2);
  else throw std::invalid_argument("unknown reproduce target '" + target + "'");
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 40> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                    std::chars_format::general, 12);
  return std::string(buffer.data(), result.ptr);
}

std::complex<double> parse_complex(std::string text) {
  std::erase(text, ' ');
  if (text.empty()) throw std::invalid_argument("empty complex literal");
  if (text.back() != 'i') return {parse_double(text), 0.0};

  text.pop_back();
  // split 'a+b' at the sign separating real and imaginary parts
  std::size_t sign_pos = std::string::npos;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E')
      sign_pos = i;
  }
  auto parse_imag = [](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_double(part);
  };
  if (sign_pos == std::string::npos) return {0.0, parse_imag(text)};
  return {parse_double(text.substr(0, sign_pos)), parse_imag(text.substr(sign_pos))};
}

Occupation parse_occupation(const std::string& text) {
  Occupation occ;
  for (const auto& part : split_list(text)) {
    const double value = parse_double(part);
    const int m = static_cast<int>(value);
    if (m != value || m < 0)
      throw std::invalid_argument("occupations must be non-negative integers");
    occ.push_back(m);
  }
  if (occ.empty()) throw std::invalid_argument("empty occupation list");
  return occ;
}

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"coupled-cavity chain simulator"};
  app.require_subcommand(1);

  ModelFlags model;
  StateFlags state;
  GridFlags grid;
  std::string output, labels, photons = "1", times_flag = "10,100", target;
  bool with_period = false;
  PeriodOptions period_opts;
  DetectionOptions detection_opts;
  IntegrationOptions integration_opts;
  double theta_start = kPi / 4, theta_stop = kPi / 4;
  int theta_points = 1;
  double gamma = 0.1;

  std::string config_path;
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", output, "output file (default: $CCA_OUTPUT_DIR/<name>.csv)");
    cmd->add_option("--config", config_path,
                    "key=value file of flag defaults; explicit flags win");
  };

  auto* spectrum = app.add_subcommand("spectrum", "mode frequencies of the chain");
  add_model_flags(spectrum, model);
  spectrum->add_flag("--period", with_period, "also report the revival period");
  add_output(spectrum);
  spectrum->callback([&] { run_spectrum(model, with_period, output); });

  auto* period = app.add_subcommand("period", "revival-period analysis");
  add_model_flags(period, model);
  period->add_option("--tol", period_opts.tol, "accepted gap-multiple residual")
      ->capture_default_str();
  period->add_option("--max-multiple", period_opts.max_multiple, "integer multiple bound")
      ->capture_default_str();
  add_output(period);
  period->callback([&] { run_period(model, period_opts, output); });

  auto* evolve_cmd = app.add_subcommand("evolve", "occupation probabilities over a time grid");
  add_model_flags(evolve_cmd, model);
  add_state_flags(evolve_cmd, state);
  add_grid_flags(evolve_cmd, grid);
  evolve_cmd->add_option("--labels", labels, "occupations to track, e.g. '1,0,0;0,1,0'");
  add_output(evolve_cmd);
  evolve_cmd->callback([&] { run_evolve(model, state, grid, labels, output); });

  auto* survival = app.add_subcommand("survival", "return probability of a Fock state");
  add_model_flags(survival, model);
  survival->add_option("--fock", state.fock, "initial Fock occupations, e.g. 1,0,0");
  add_grid_flags(survival, grid);
  add_output(survival);
  survival->callback([&] { run_survival(model, state.fock, grid, output); });

  auto* wnoon = app.add_subcommand("wnoon", "W/NOON event detection over one period");
  add_model_flags(wnoon, model);
  add_state_flags(wnoon, state);
  wnoon->add_option("--photons", photons, "photon numbers to scan, e.g. 1,2,3")
      ->capture_default_str();
  wnoon->add_option("--scan-points", detection_opts.scan_points, "coarse grid points per period")
      ->capture_default_str();
  wnoon->add_option("--equality-tol", detection_opts.equality_tol, "relative equality tolerance")
      ->capture_default_str();
  wnoon->add_option("--vanish-ratio", detection_opts.vanish_ratio,
                    "NOON middle-site suppression ratio")
      ->capture_default_str();
  add_output(wnoon);
  wnoon->callback([&] { run_wnoon(model, state, photons, detection_opts, output); });

  auto* transfer =
      app.add_subcommand("transfer", "entangled-pair transfer probability (4 cavities)");
  ModelFlags transfer_model;
  transfer_model.n = 4;
  add_model_flags(transfer, transfer_model);
  add_grid_flags(transfer, grid);
  transfer->add_option("--theta", theta_start, "pair mixing angle")->capture_default_str();
  transfer->add_option("--theta-stop", theta_stop, "sweep end angle");
  transfer->add_option("--theta-points", theta_points, "sweep points")->capture_default_str();
  add_output(transfer);
  transfer->callback([&] {
    if (theta_points == 1) theta_stop = theta_start;
    run_transfer(transfer_model, theta_start, theta_stop, theta_points, grid, output);
  });

  auto* lindblad = app.add_subcommand("lindblad", "lossy transfer probability sweep");
  ModelFlags lindblad_model;
  add_model_flags(lindblad, lindblad_model);
  lindblad->add_option("--gamma", gamma, "cavity damping rate")->capture_default_str();
  lindblad->add_option("--times", times_flag, "sample times, e.g. 10,100")->capture_default_str();
  int lindblad_theta_points = 181;
  lindblad->add_option("--theta-points", lindblad_theta_points, "theta grid size")
      ->capture_default_str();
  lindblad->add_option("--dt", integration_opts.dt, "integration step")->capture_default_str();
  add_output(lindblad);
  lindblad->callback([&] {
    run_lindblad(lindblad_model, gamma, times_flag, lindblad_theta_points, integration_opts,
                 output);
  });

  auto* reproduce = app.add_subcommand("reproduce", "canned scenario datasets");
  reproduce->add_option("target", target, "fig1..fig11 or table1..table3")->required();
  add_output(reproduce);
  reproduce->callback([&] { run_reproduce(target, output); });

  try {
    const std::vector<std::string> expanded = apply_config_file(args);
    std::vector<const char*> argv{"cca"};
    for (const auto& arg : expanded) argv.push_back(arg.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dimension_cap_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const trace_drift_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cca::cli
