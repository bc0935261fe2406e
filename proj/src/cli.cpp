#include "daqc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "daqc/algorithms.hpp"
#include "daqc/compiler.hpp"
#include "daqc/error.hpp"
#include "daqc/simulator.hpp"

namespace daqc {

namespace {

constexpr int kMaxSimulatedQubits = 12;
constexpr int kMaxScheduledQubits = 50;

ShortBlockPolicy short_block_policy(const std::string& s) {
  if (s == "allow") return ShortBlockPolicy::Allow;
  if (s == "reject") return ShortBlockPolicy::Reject;
  throw ConfigError("short_blocks must be allow or reject (got '" + s + "')");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot read " + what + " from '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot read " + what + " from '" + s + "'");
  }
}

std::pair<int, int> parse_n_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int n = parse_int(s, "N");
    return {n, n};
  }
  return {parse_int(s.substr(0, dots), "N"), parse_int(s.substr(dots + 2), "N")};
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// -- Tabular output -------------------------------------------------------------

struct Table {
  std::string command;
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> summary;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json cell_json(const std::string& s) {
  if (s.empty()) return nullptr;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end && *end == '\0') return v;
  return s;
}

void emit(const Table& t, bool json, std::ostream& out) {
  if (json) {
    nlohmann::json j;
    j["command"] = t.command;
    j["provenance"] = nlohmann::json::object();
    for (const auto& [k, v] : t.provenance) j["provenance"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : t.rows) {
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t c = 0; c < t.columns.size() && c < r.size(); ++c) row[t.columns[c]] = cell_json(r[c]);
      j["rows"].push_back(row);
    }
    j["summary"] = t.summary;
    for (const auto& [k, v] : t.extra.items()) j[k] = v;
    out << j.dump(2) << "\n";
    return;
  }
  out << "# daqc " << t.command << "\n";
  for (const auto& [k, v] : t.provenance) out << "# " << k << " = " << v << "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
    out << "\n";
  }
  for (const auto& s : t.summary) out << "# " << s << "\n";
}

void flatten(const nlohmann::json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) flatten(v, key, out);
    else if (v.is_string()) out[key] = v.get<std::string>();
    else out[key] = v.dump();
  }
}

std::vector<std::pair<std::string, std::string>> provenance_of(const ExperimentConfig& c) {
  std::map<std::string, std::string> now, defaults;
  flatten(to_json(c), "", now);
  flatten(to_json(ExperimentConfig{}), "", defaults);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : now) out.emplace_back(k, v + (defaults[k] == v ? "" : "  (override)"));
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot write '" + path + "'");
    out_ = &file_;
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

// -- Config overrides shared by sweep / durations / tradeoff ---------------------

struct ConfigFlags {
  std::string config_path;
  std::string noise_path;
  std::string algorithm;
  std::string paradigms;
  std::string n;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<double> gbar_mhz;
  std::optional<double> sqg_ns;
  std::optional<double> tqg_ns;
  std::optional<int> threads;
  std::string short_blocks;
  std::string output;
  bool json = false;

  void add_to(CLI::App* app, bool with_mc, bool with_tqg = true) {
    app->add_option("--config", config_path, "JSON experiment configuration");
    app->add_option("--algorithm", algorithm, "ata-qft, star-qft or star-ghz");
    app->add_option("--paradigms", paradigms, "comma-separated subset of dqc,sdaqc,bdaqc");
    app->add_option("--n", n, "qubit range, e.g. 3..8");
    app->add_option("--gbar-mhz", gbar_mhz, "resource coupling in MHz (1 MHz = 1e6 rad/s)");
    app->add_option("--sqg-ns", sqg_ns, "single-qubit gate time in ns");
    if (with_tqg) app->add_option("--tqg-ns", tqg_ns, "two-qubit gate time in ns");
    app->add_option("--short-blocks", short_blocks, "bDAQC blocks shorter than their correction: allow or reject");
    if (with_mc) {
      app->add_option("--noise", noise_path, "JSON noise targets");
      app->add_option("--iterations", iterations, "Monte-Carlo iterations per point");
      app->add_option("--seed", seed, "Monte-Carlo seed");
      app->add_option("--threads", threads, "worker threads (0 = all cores)");
    }
    app->add_option("-o,--output", output, "output file (default stdout)");
    app->add_flag("--json", json, "emit JSON instead of CSV");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) c = experiment_config_from_json(read_json_file(config_path));
    if (!noise_path.empty()) c.noise = noise_targets_from_json(read_json_file(noise_path));
    if (!algorithm.empty()) c.algorithm = algorithm;
    if (!paradigms.empty()) c.paradigms = split(paradigms, ',');
    if (!n.empty()) std::tie(c.n_min, c.n_max) = parse_n_range(n);
    if (iterations) c.iterations = *iterations;
    if (seed) c.seed = *seed;
    if (gbar_mhz) c.gbar_mhz = *gbar_mhz;
    if (sqg_ns) c.sqg_time_ns = *sqg_ns;
    if (tqg_ns) c.tqg_time_ns = *tqg_ns;
    if (threads) c.threads = *threads;
    if (!short_blocks.empty()) c.short_blocks = short_blocks;
    return c;
  }
};

// -- Subcommands -------------------------------------------------------------------

void cmd_sweep(const ConfigFlags& flags, std::ostream& out) {
  const ExperimentConfig c = flags.resolve();
  c.validate(kMaxSimulatedQubits);
  const ExperimentSettings settings = c.settings();
  const Algorithm a = algorithm_from_string(c.algorithm);
  NoiseModel model = calibrate(c.noise);
  model.seed = c.seed;

  Table t{"sweep", provenance_of(c), split(csv_header(), ','), {}, {}, {}};
  for (int n = c.n_min; n <= c.n_max; ++n)
    for (Paradigm p : c.paradigm_list())
      t.rows.push_back(split(to_csv(sweep_row(a, p, n, settings, model, c.iterations, c.threads)), ','));
  t.extra["noise_model"] = to_json(model);
  Output o(flags.output, out);
  emit(t, flags.json, o.stream());
}

void cmd_durations(const ConfigFlags& flags, std::ostream& out) {
  const ExperimentConfig c = flags.resolve();
  c.validate(kMaxScheduledQubits);
  const ExperimentSettings settings = c.settings();
  const Algorithm a = algorithm_from_string(c.algorithm);
  Table t{"durations", provenance_of(c), {"algorithm", "paradigm", "N", "duration_s", "n_ab", "n_tqt", "n_sqg", "note"},
          {}, {}, {}};
  for (int n = c.n_min; n <= c.n_max; ++n)
    for (Paradigm p : c.paradigm_list()) {
      const RunRow r = duration_row(a, p, n, settings);
      if (r.skipped) {
        t.rows.push_back({r.algorithm, r.paradigm, std::to_string(n), "", "", "", "", r.note});
        continue;
      }
      t.rows.push_back({r.algorithm, r.paradigm, std::to_string(n), format_double(r.duration), std::to_string(r.n_ab),
                        std::to_string(r.n_tqt), std::to_string(r.n_sqg), r.note});
    }
  Output o(flags.output, out);
  emit(t, flags.json, o.stream());
}

struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError("input CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
};

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  CsvData d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (d.columns.empty()) d.columns = split(line, ',');
    else d.rows.push_back(split(line, ','));
  }
  if (d.columns.empty()) throw ConfigError("'" + path + "' holds no CSV header");
  return d;
}

void cmd_fit(const std::string& input, const std::string& what, int n_from, const std::string& output, bool json,
             std::ostream& out) {
  if (what != "fidelity" && what != "duration") throw ConfigError("--what must be fidelity or duration");
  const CsvData d = read_csv(input);
  const std::size_t ca = d.column("algorithm"), cp = d.column("paradigm"), cn = d.column("N");
  const std::size_t cy = d.column(what == "fidelity" ? "mean_fidelity" : "duration_s");
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> series;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : d.rows) {
    if (r.size() <= std::max({ca, cp, cn, cy}) || r[cy].empty()) continue;
    const int n = parse_int(r[cn], "N");
    if (n < n_from) continue;
    const auto key = std::make_pair(r[ca], r[cp]);
    if (!series.count(key)) order.push_back(key);
    series[key].first.push_back(n);
    series[key].second.push_back(parse_double(r[cy], what));
  }
  Table t{"fit", {{"input", input}, {"what", what}, {"n_from", std::to_string(n_from)}}, {}, {}, {}, {}};
  if (what == "fidelity") {
    t.columns = {"algorithm", "paradigm", "f", "a", "b", "c", "residual", "points"};
    for (const auto& key : order) {
      const auto& [n, y] = series[key];
      if (n.size() < 4) {
        t.summary.push_back(key.first + "/" + key.second + ": fewer than 4 points, not fitted");
        continue;
      }
      const FitResult f = fit_signomial(n, y);
      t.rows.push_back({key.first, key.second, format_double(f.f), format_double(f.a), format_double(f.b),
                        format_double(f.c), format_double(f.residual), std::to_string(n.size())});
    }
  } else {
    t.columns = {"algorithm", "paradigm", "prefactor", "exponent", "residual", "points"};
    for (const auto& key : order) {
      const auto& [n, y] = series[key];
      if (n.size() < 2) {
        t.summary.push_back(key.first + "/" + key.second + ": fewer than 2 points, not fitted");
        continue;
      }
      const PowerLawFit f = fit_power_law(n, y);
      t.rows.push_back({key.first, key.second, format_double(f.prefactor), format_double(f.exponent),
                        format_double(f.residual), std::to_string(n.size())});
    }
  }
  Output o(output, out);
  emit(t, json, o.stream());
}

std::map<Paradigm, FitResult> read_fits(const std::string& path) {
  std::map<Paradigm, FitResult> fits;
  if (path.empty()) {
    for (Paradigm p : {Paradigm::DQC, Paradigm::sDAQC, Paradigm::bDAQC}) fits[p] = table2_fit(p);
    return fits;
  }
  const CsvData d = read_csv(path);
  const std::size_t cp = d.column("paradigm"), cf = d.column("f"), ca = d.column("a"), cb = d.column("b"),
                    cc = d.column("c");
  for (const auto& r : d.rows) {
    FitResult f;
    f.f = parse_double(r.at(cf), "f");
    f.a = parse_double(r.at(ca), "a");
    f.b = parse_double(r.at(cb), "b");
    f.c = parse_double(r.at(cc), "c");
    fits[paradigm_from_string(r.at(cp))] = f;
  }
  if (fits.empty()) throw ConfigError("'" + path + "' holds no fits");
  return fits;
}

void cmd_tradeoff(const ConfigFlags& flags, const std::string& fits_path, const std::string& t1_list,
                  const std::string& tqg_list, std::ostream& out) {
  ExperimentConfig c = flags.resolve();
  if (flags.n.empty() && flags.config_path.empty()) std::tie(c.n_min, c.n_max) = std::make_pair(3, 40);
  c.algorithm = "star-qft";
  c.validate(kMaxScheduledQubits);
  const auto fits = read_fits(fits_path);
  std::vector<double> t1s, tqgs;
  for (const auto& s : split(t1_list, ',')) t1s.push_back(parse_double(s, "T1"));
  for (const auto& s : split(tqg_list, ',')) tqgs.push_back(parse_double(s, "t_TQG"));
  for (double v : t1s)
    if (!(v > 0)) throw ConfigError("T1 values must be positive");
  for (double v : tqgs)
    if (!(v > 0)) throw ConfigError("t_TQG values must be positive");

  auto prov = provenance_of(c);
  prov.emplace_back("fits", fits_path.empty() ? "table2" : fits_path);
  prov.emplace_back("t1_us", t1_list);
  prov.emplace_back("t_tqg_ns", tqg_list);
  Table t{"tradeoff", prov, {"t1_us", "t_tqg_ns", "N"}, {}, {}, {}};
  for (const auto& [p, f] : fits) t.columns.push_back("F_" + to_string(p));
  t.extra["crossovers"] = nlohmann::json::array();
  for (double t1 : t1s)
    for (double tqg : tqgs) {
      ExperimentSettings s = c.settings();
      s.durations.tqg_time = tqg * 1e-9;
      const TradeoffResult r = total_fidelity_tradeoff(fits, star_qft_durations(s), t1 * 1e-6, c.n_min, c.n_max);
      for (const auto& pt : r.series) {
        std::vector<std::string> row{format_double(t1), format_double(tqg), std::to_string(pt.num_qubits)};
        for (const auto& [p, f] : pt.total_fidelity) row.push_back(format_double(f));
        t.rows.push_back(std::move(row));
      }
      std::ostringstream line;
      line << "crossover t1_us=" << t1 << " t_tqg_ns=" << tqg << ": ";
      if (r.crossover) line << "N=" << format_double(*r.crossover);
      else line << "none";
      t.summary.push_back(line.str());
      t.extra["crossovers"].push_back({{"t1_us", t1},
                                       {"t_tqg_ns", tqg},
                                       {"crossover", r.crossover ? nlohmann::json(*r.crossover) : nullptr}});
    }
  Output o(flags.output, out);
  emit(t, flags.json, o.stream());
}

struct GenerateFlags {
  std::string algorithm;
  int n = 0;
  std::string paradigm;
  double gbar_mhz = 10.0;
  double sqg_ns = 5.0;
  std::string short_blocks = "allow";
  std::string output;
};

void cmd_generate(const GenerateFlags& g, std::ostream& out) {
  if (g.n < 2 || g.n > kMaxScheduledQubits)
    throw ConfigError("--n must lie in 2.." + std::to_string(kMaxScheduledQubits));
  if (!(g.gbar_mhz > 0) || !(g.sqg_ns > 0)) throw ConfigError("--gbar-mhz and --sqg-ns must be positive");
  CompileOptions opts;
  opts.sqg_time = g.sqg_ns * 1e-9;
  opts.short_blocks = short_block_policy(g.short_blocks);
  const Circuit c =
      build_algorithm_circuit(algorithm_from_string(g.algorithm), paradigm_from_string(g.paradigm), g.n,
                              g.gbar_mhz * 1e6, opts);
  Output o(g.output, out);
  o.stream() << to_json(c).dump(2) << "\n";
}

struct CompileFlags {
  std::string input;
  std::string protocol;
  std::string paradigm = "sdaqc";
  double sqg_ns = 5.0;
  std::string short_blocks = "reject";
  bool no_peephole = false;
  bool strict = false;
  std::string output;
};

void cmd_compile(const CompileFlags& f, std::ostream& out, std::ostream& err) {
  const nlohmann::json j = read_json_file(f.input);
  if (!j.contains("resource") || !j.contains("target"))
    throw ConfigError("compile input needs \"resource\" and \"target\" objects");
  const IsingHamiltonian resource = hamiltonian_from_json(j.at("resource"), HamiltonianRole::Resource);
  const IsingHamiltonian target = hamiltonian_from_json(j.at("target"), HamiltonianRole::Target);
  double t_f = 0.0;
  if (j.contains("t_f")) t_f = j.at("t_f").get<double>();
  else if (j.contains("t_f_us")) t_f = j.at("t_f_us").get<double>() * 1e-6;
  else throw ConfigError("compile input needs \"t_f\" (seconds) or \"t_f_us\"");
  if (!(t_f > 0)) throw ConfigError("t_f must be positive");

  const Protocol protocol = f.protocol.empty()
                                ? (resource.connectivity().is_tree() ? Protocol::Star : Protocol::General)
                                : protocol_from_string(f.protocol);
  const Paradigm paradigm = paradigm_from_string(f.paradigm);
  if (paradigm == Paradigm::DQC) throw ConfigError("--paradigm must be sdaqc or bdaqc");
  CompileOptions opts;
  opts.sqg_time = f.sqg_ns * 1e-9;
  opts.peephole = !f.no_peephole;
  opts.short_blocks = short_block_policy(f.short_blocks);
  const CompileResult r = compile_target(target, resource, t_f, protocol, paradigm, opts);
  if (f.strict && r.solve.diagnostics.negative_times)
    throw CompileError("negative analog block times (rerun without --strict to keep them)");
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";

  nlohmann::json o;
  o["circuit"] = to_json(r.circuit);
  o["times_s"] = std::vector<double>(r.solve.t.data(), r.solve.t.data() + r.solve.t.size());
  o["negative_times"] = r.solve.diagnostics.negative_times;
  o["dropped_blocks"] = r.solve.diagnostics.dropped;
  o["x_gates_before_peephole"] = r.x_gates_before_peephole;
  if (!std::isnan(r.solve.diagnostics.min_singular_value))
    o["min_singular_value"] = r.solve.diagnostics.min_singular_value;
  o["warnings"] = r.warnings;
  Output sink(f.output, out);
  sink.stream() << o.dump(2) << "\n";
}

struct SimulateFlags {
  std::string circuit;
  std::string reference;
  std::string noise;
  bool state = false;
  std::string target_state;
  int iterations = 1000;
  std::uint64_t seed = 2024;
  int threads = 0;
  std::string output;
};

void cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const Circuit c = circuit_from_json(read_json_file(f.circuit));
  if (c.num_qubits() > kMaxSimulatedQubits)
    throw NumericalError("dense simulation is capped at " + std::to_string(kMaxSimulatedQubits) + " qubits");
  if (f.iterations < 1) throw ConfigError("--iterations must be positive");
  const Matrix ideal = unitary_of_ideal(c);
  const Matrix reference = f.reference.empty() ? ideal : unitary_of_ideal(circuit_from_json(read_json_file(f.reference)));
  if (reference.rows() != ideal.rows()) throw ConfigError("reference circuit has a different qubit count");

  nlohmann::json o;
  o["num_qubits"] = c.num_qubits();
  o["paradigm"] = to_string(c.paradigm());
  o["duration_s"] = schedule(c, DurationModel{}).total_duration;
  o["unitarity_error"] = unitarity_error(ideal);
  Experiment e{c, Experiment::Kind::Unitary, reference, {}, {}};
  if (f.state || !f.target_state.empty()) {
    e.kind = Experiment::Kind::State;
    e.initial = basis_state(c.num_qubits(), 0);
    if (f.target_state == "ghz") e.ideal_state = ghz_state(c.num_qubits());
    else if (f.target_state.empty()) e.ideal_state = reference * e.initial;
    else throw ConfigError("--target-state must be ghz");
    o["ideal_fidelity"] = state_fidelity(ideal * e.initial, e.ideal_state);
  } else {
    o["ideal_fidelity"] = average_unitary_fidelity(ideal, reference);
  }
  if (!f.noise.empty()) {
    const NoiseTargets targets = noise_targets_from_json(read_json_file(f.noise));
    NoiseModel model = calibrate(targets);
    model.seed = f.seed;
    const MonteCarloResult mc = run_monte_carlo(e, model, f.iterations, f.threads);
    o["mean_fidelity"] = mc.mean;
    o["std_error"] = mc.std_error;
    o["iterations"] = mc.iterations;
    o["seed"] = f.seed;
  }
  Output sink(f.output, out);
  sink.stream() << o.dump(2) << "\n";
}

}  // namespace

// -- ExperimentConfig -----------------------------------------------------------

void ExperimentConfig::validate(int max_n) const {
  algorithm_from_string(algorithm);
  if (paradigms.empty()) throw ConfigError("paradigms must not be empty");
  paradigm_list();
  const int lowest = algorithm == "star-ghz" ? 2 : (algorithm == "star-qft" ? 2 : 1);
  if (n_min < lowest || n_max < n_min)
    throw ConfigError("N range " + std::to_string(n_min) + ".." + std::to_string(n_max) + " is invalid for " +
                      algorithm + " (smallest N is " + std::to_string(lowest) + ")");
  if (n_max > max_n)
    throw ConfigError("N = " + std::to_string(n_max) + " exceeds the limit " + std::to_string(max_n) +
                      " for this command");
  if (!(gbar_mhz > 0)) throw ConfigError("gbar_mhz must be positive");
  if (!(sqg_time_ns > 0)) throw ConfigError("sqg_time_ns must be positive");
  if (!(tqg_time_ns > 0)) throw ConfigError("tqg_time_ns must be positive");
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  short_block_policy(short_blocks);
}

ExperimentSettings ExperimentConfig::settings() const {
  ExperimentSettings s;
  s.gbar = gbar_mhz * 1e6;
  s.durations.sqg_time = sqg_time_ns * 1e-9;
  s.durations.tqg_time = tqg_time_ns * 1e-9;
  s.compile.sqg_time = sqg_time_ns * 1e-9;
  s.compile.short_blocks = short_block_policy(short_blocks);
  return s;
}

std::vector<Paradigm> ExperimentConfig::paradigm_list() const {
  std::vector<Paradigm> out;
  for (const auto& p : paradigms) out.push_back(paradigm_from_string(p));
  return out;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError("experiment configuration must be a JSON object");
  static const std::vector<std::string> known = {"algorithm",   "paradigms",   "n_min",      "n_max",
                                                 "gbar_mhz",    "sqg_time_ns", "tqg_time_ns", "iterations",
                                                 "seed",        "short_blocks", "threads",    "noise"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError("unknown configuration key '" + k + "'");
  try {
    c.algorithm = j.value("algorithm", c.algorithm);
    c.paradigms = j.value("paradigms", c.paradigms);
    c.n_min = j.value("n_min", c.n_min);
    c.n_max = j.value("n_max", c.n_max);
    c.gbar_mhz = j.value("gbar_mhz", c.gbar_mhz);
    c.sqg_time_ns = j.value("sqg_time_ns", c.sqg_time_ns);
    c.tqg_time_ns = j.value("tqg_time_ns", c.tqg_time_ns);
    c.iterations = j.value("iterations", c.iterations);
    c.seed = j.value("seed", c.seed);
    c.short_blocks = j.value("short_blocks", c.short_blocks);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid experiment configuration: ") + e.what());
  }
  if (j.contains("noise")) c.noise = noise_targets_from_json(j.at("noise"));
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"algorithm", c.algorithm},   {"paradigms", c.paradigms},       {"n_min", c.n_min},
          {"n_max", c.n_max},           {"gbar_mhz", c.gbar_mhz},         {"sqg_time_ns", c.sqg_time_ns},
          {"tqg_time_ns", c.tqg_time_ns}, {"iterations", c.iterations},   {"seed", c.seed},
          {"short_blocks", c.short_blocks}, {"threads", c.threads},       {"noise", to_json(c.noise)}};
}

std::vector<int> parse_n_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    const auto [lo, hi] = parse_n_range(part);
    if (hi < lo) throw ConfigError("empty N range '" + part + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  }
  return out;
}

// -- Entry point ------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Digital-analog quantum computing compiler and simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "algorithm circuit as JSON");
  generate->add_option("--algorithm", gen.algorithm, "ata-qft, star-qft or star-ghz")->required();
  generate->add_option("--n", gen.n, "number of qubits")->required();
  generate->add_option("--paradigm", gen.paradigm, "dqc, sdaqc or bdaqc")->required();
  generate->add_option("--gbar-mhz", gen.gbar_mhz, "resource coupling in MHz");
  generate->add_option("--sqg-ns", gen.sqg_ns, "single-qubit gate time in ns");
  generate->add_option("--short-blocks", gen.short_blocks, "allow or reject");
  generate->add_option("-o,--output", gen.output, "output file");

  CompileFlags comp;
  auto* compile = app.add_subcommand("compile", "compile one target Hamiltonian");
  compile->add_option("--input", comp.input, "JSON with resource, target and t_f")->required();
  compile->add_option("--protocol", comp.protocol, "general or star (default: star on star devices)");
  compile->add_option("--paradigm", comp.paradigm, "sdaqc or bdaqc");
  compile->add_option("--sqg-ns", comp.sqg_ns, "single-qubit gate time in ns");
  compile->add_option("--short-blocks", comp.short_blocks, "allow or reject");
  compile->add_flag("--no-peephole", comp.no_peephole, "keep every X sandwich");
  compile->add_flag("--strict", comp.strict, "treat negative block times as an error");
  compile->add_option("-o,--output", comp.output, "output file");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "ideal and noisy simulation of a circuit JSON");
  simulate->add_option("--circuit", sim.circuit, "circuit JSON")->required();
  simulate->add_option("--reference", sim.reference, "circuit JSON whose ideal unitary is the reference");
  simulate->add_option("--noise", sim.noise, "JSON noise targets; enables Monte Carlo");
  simulate->add_flag("--state", sim.state, "compare output states from |0...0> instead of unitaries");
  simulate->add_option("--target-state", sim.target_state, "ghz");
  simulate->add_option("--iterations", sim.iterations, "Monte-Carlo iterations");
  simulate->add_option("--seed", sim.seed, "Monte-Carlo seed");
  simulate->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
  simulate->add_option("-o,--output", sim.output, "output file");

  ConfigFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo fidelity versus N");
  sweep_flags.add_to(sweep, true);

  ConfigFlags dur_flags;
  auto* durations = app.add_subcommand("durations", "scheduled durations versus N");
  dur_flags.add_to(durations, false);

  std::string fit_input, fit_what = "fidelity", fit_output;
  int fit_from = 1;
  bool fit_json = false;
  auto* fit = app.add_subcommand("fit", "fit sweep or durations output");
  fit->add_option("--input", fit_input, "CSV from sweep or durations")->required();
  fit->add_option("--what", fit_what, "fidelity (f^(a N^b) + c) or duration (A N^b)");
  fit->add_option("--n-from", fit_from, "ignore points below this N");
  fit->add_option("-o,--output", fit_output, "output file");
  fit->add_flag("--json", fit_json, "emit JSON instead of CSV");

  ConfigFlags trade_flags;
  std::string fits_path, t1_list = "50,500", tqg_list = "50,150,300";
  auto* tradeoff = app.add_subcommand("tradeoff", "control errors versus decoherence for star-QFT");
  trade_flags.add_to(tradeoff, false, false);
  tradeoff->add_option("--fits", fits_path, "CSV from fit (default: published star-QFT parameters)");
  tradeoff->add_option("--t1-us", t1_list, "comma-separated T1 values in microseconds");
  tradeoff->add_option("--tqg-ns", tqg_list, "comma-separated two-qubit gate times in ns");

  std::vector<std::string> argv_store{"daqc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) cmd_generate(gen, out);
    else if (compile->parsed()) cmd_compile(comp, out, err);
    else if (simulate->parsed()) cmd_simulate(sim, out);
    else if (sweep->parsed()) cmd_sweep(sweep_flags, out);
    else if (durations->parsed()) cmd_durations(dur_flags, out);
    else if (fit->parsed()) cmd_fit(fit_input, fit_what, fit_from, fit_output, fit_json, out);
    else if (tradeoff->parsed()) cmd_tradeoff(trade_flags, fits_path, t1_list, tqg_list, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const CompileError& e) {
    err << "compile error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace daqc
