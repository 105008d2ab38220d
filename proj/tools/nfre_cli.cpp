// Command-line front end: parameterized sweeps of the ambiguity functions
// and range CRBs, the effective near-field range, and the Monte Carlo
// RMSE-vs-CRB harness. Emits CSV (with '#' reproducibility headers) or JSON
// (with a "meta" object).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfre/nfre.hpp"

namespace {

using nfre::GridSpec;
using nfre::MetaList;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

struct ScenarioArgs {
  std::string fc = "24G";
  std::string bandwidth = "100M";
  double energy = 1.0;
  std::string waveform = "sinc";
  std::string range = "30";
  std::string aperture = "1.5";
  int nt = 1;
  int nr = 25;
  std::string target = "et";
  std::string config_tag = "simo";
  std::string array_file;
  double snr_db = 10.0;
  std::string gamma_n;  // overrides --snr-db when given
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--fc", args.fc, "Carrier frequency in Hz (SI suffixes ok)");
  cmd->add_option("--bandwidth", args.bandwidth, "Waveform bandwidth B in Hz");
  cmd->add_option("--energy", args.energy, "Waveform energy E_c");
  cmd->add_option("--waveform", args.waveform,
                  "'sinc' (cardinal sine) or path to a two-column |S(f)|^2 file");
  cmd->add_option("--range", args.range, "True target range R in m");
  cmd->add_option("--aperture", args.aperture, "Array aperture D in m");
  cmd->add_option("--nt", args.nt, "Transmit antenna count");
  cmd->add_option("--nr", args.nr, "Receive antenna count");
  cmd->add_option("--target", args.target, "Target model: pt | et")
      ->check(CLI::IsMember({"pt", "et"}));
  cmd->add_option("--config-tag", args.config_tag, "Array layout: simo | mimo | custom")
      ->check(CLI::IsMember({"simo", "mimo", "custom"}));
  cmd->add_option("--array-file", args.array_file, "Custom layout file ([tx]/[rx] sections)");
  cmd->add_option("--snr-db", args.snr_db, "SNR |xi|^2 E_c / gamma_n in dB");
  cmd->add_option("--gamma-n", args.gamma_n, "Noise PSD gamma_n (overrides --snr-db)");
  std::string config_placeholder;
  cmd->add_option("--config", config_placeholder,
                  "Read options from a key=value file (flags override)");
}

// Applies a key=value config file by appending the pairs as options the
// user did not give explicitly, so command-line flags always win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw nfre::io_error("cannot open config file: " + config_path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string text) {
      const auto begin = text.find_first_not_of(" \t\r");
      const auto end = text.find_last_not_of(" \t\r");
      return begin == std::string::npos ? std::string{} : text.substr(begin, end - begin + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") continue;
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    }
    if (!given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

nfre::Scenario build_scenario(const ScenarioArgs& args) {
  nfre::Scenario s;
  s.carrier_hz = nfre::parse_si_number(args.fc);
  s.range = nfre::parse_si_number(args.range);
  if (args.waveform == "sinc") {
    s.waveform = nfre::Waveform::cardinal_sine(nfre::parse_si_number(args.bandwidth),
                                               args.energy);
  } else {
    s.waveform = nfre::Waveform::from_spectrum_file(args.waveform);
  }
  const double aperture = nfre::parse_si_number(args.aperture);
  if (args.config_tag == "simo") {
    s.array = nfre::ArrayConfig::simo(args.nr, aperture);
  } else if (args.config_tag == "mimo") {
    s.array = nfre::ArrayConfig::mimo(args.nt, args.nr, aperture);
  } else {
    if (args.array_file.empty()) {
      throw nfre::invalid_parameter("custom config-tag needs --array-file");
    }
    s.array = nfre::ArrayConfig::from_file(args.array_file);
  }
  s.target.kind = args.target == "pt" ? nfre::TargetKind::point : nfre::TargetKind::extended;
  s.target.mode = nfre::DistanceMode::exact;
  s.gain = {1.0, 0.0};
  s.noise_psd = args.gamma_n.empty()
                    ? nfre::noise_psd_for_snr_db(args.snr_db, s.gain, s.waveform)
                    : nfre::parse_si_number(args.gamma_n);
  return s;
}

void append_scenario_meta(MetaList& meta, const ScenarioArgs& args) {
  meta.emplace_back("fc", args.fc);
  meta.emplace_back("bandwidth", args.bandwidth);
  meta.emplace_back("energy", std::to_string(args.energy));
  meta.emplace_back("waveform", args.waveform);
  meta.emplace_back("range", args.range);
  meta.emplace_back("aperture", args.aperture);
  meta.emplace_back("nt", std::to_string(args.nt));
  meta.emplace_back("nr", std::to_string(args.nr));
  meta.emplace_back("target", args.target);
  meta.emplace_back("config_tag", args.config_tag);
  if (!args.array_file.empty()) meta.emplace_back("array_file", args.array_file);
  if (args.gamma_n.empty()) {
    meta.emplace_back("snr_db", std::to_string(args.snr_db));
  } else {
    meta.emplace_back("gamma_n", args.gamma_n);
  }
}

std::string cell_text(const ordered_json& value) {
  if (value.is_null()) return "nan";
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

// Rows share the key set of the first row; CSV derives its header from it.
void write_output(const std::string& path, const std::string& format, const MetaList& meta,
                  const ordered_json& rows, const ordered_json& summary) {
  std::ostringstream body;
  if (format == "json") {
    ordered_json doc;
    doc["meta"] = ordered_json::object();
    for (const auto& [key, value] : meta) doc["meta"][key] = value;
    if (!summary.is_null()) doc["summary"] = summary;
    doc["rows"] = rows;
    body << doc.dump(2) << '\n';
  } else {
    nfre::write_csv_meta(body, meta);
    if (!summary.is_null()) {
      for (const auto& [key, value] : summary.items()) {
        body << "# summary." << key << " = " << cell_text(value) << '\n';
      }
    }
    if (!rows.empty()) {
      bool first = true;
      for (const auto& [key, value] : rows.front().items()) {
        (void)value;
        body << (first ? "" : ",") << key;
        first = false;
      }
      body << '\n';
      for (const auto& row : rows) {
        first = true;
        for (const auto& [key, value] : row.items()) {
          (void)key;
          body << (first ? "" : ",") << cell_text(value);
          first = false;
        }
        body << '\n';
      }
    }
  }
  if (path == "-" || path.empty()) {
    std::cout << body.str();
    return;
  }
  std::ofstream out(path);
  if (!out) throw nfre::io_error("cannot open output file: " + path);
  out << body.str();
  if (!out.good()) throw nfre::io_error("write failed: " + path);
}

MetaList base_meta(const std::string& command) {
  MetaList meta;
  meta.emplace_back("tool", "nfre");
  meta.emplace_back("version", kVersion);
  meta.emplace_back("command", command);
  return meta;
}

// --- ambiguity ------------------------------------------------------------

int run_ambiguity(const ScenarioArgs& args, const std::string& sweep, const std::string& grid_text,
                  const std::string& out, const std::string& format) {
  GridSpec grid = nfre::parse_grid(grid_text);
  MetaList meta = base_meta("ambiguity");
  meta.emplace_back("sweep", sweep);
  meta.emplace_back("grid", grid_text);
  ordered_json rows = ordered_json::array();

  if (sweep == "beta") {
    for (double beta : grid.values()) {
      ordered_json row;
      row["beta"] = beta;
      row["pt_simo"] = nfre::chi_phase_analytic(nfre::NfCase::pt_simo, beta);
      row["pt_mimo"] = nfre::chi_phase_analytic(nfre::NfCase::pt_mimo, beta);
      row["et_simo"] = nfre::chi_phase_analytic(nfre::NfCase::et_simo, beta);
      row["et_mimo"] = nfre::chi_phase_analytic(nfre::NfCase::et_mimo, beta);
      rows.push_back(std::move(row));
    }
    write_output(out, format, meta, rows, nullptr);
    return 0;
  }

  const nfre::Scenario s = build_scenario(args);
  append_scenario_meta(meta, args);
  const bool mismatch = s.target.kind == nfre::TargetKind::extended &&
                        s.array.tag == nfre::ArrayTag::simo;
  const auto grid_values = grid.values();
  const auto exact = nfre::ambiguity_surface(s, grid_values, nfre::AmbiguityMethod::exact_sum);
  const auto product = nfre::ambiguity_surface(s, grid_values, nfre::AmbiguityMethod::product);
  for (size_t i = 0; i < grid_values.size(); ++i) {
    ordered_json row;
    row["rho"] = grid_values[i];
    row["chi_exact"] = exact[i].chi_total;
    row["chi_product"] = product[i].chi_total;
    row["chi_waveform"] = product[i].chi_waveform;
    row["chi_phase"] = product[i].chi_phase;
    if (mismatch) row["chi_mismatch"] = nfre::chi_mismatch(s, grid_values[i]).chi_total;
    rows.push_back(std::move(row));
  }
  write_output(out, format, meta, rows, nullptr);
  return 0;
}

// --- crb-sweep --------------------------------------------------------------

int run_crb_sweep(const ScenarioArgs& args, const std::string& grid_text, const std::string& out,
                  const std::string& format) {
  const GridSpec grid = nfre::parse_grid(grid_text);
  MetaList meta = base_meta("crb-sweep");
  append_scenario_meta(meta, args);
  meta.emplace_back("grid", grid_text);

  nfre::Scenario s = build_scenario(args);
  ordered_json rows = ordered_json::array();
  for (double r : grid.values()) {
    s.range = r;
    ordered_json row;
    row["r"] = r;
    std::string note;
    const auto add = [&](const char* name, nfre::CrbMethod method, bool breakdown) {
      try {
        const nfre::CrbBreakdown b = nfre::crb_range(s, method);
        row[name] = b.crb;
        if (breakdown) {
          row["eta"] = b.eta;
          row["beta"] = b.beta;
          row["nf_term"] = b.nf_geometry_term;
          row["phase_term"] = b.phase_term;
          row["waveform_term"] = b.waveform_term;
        }
      } catch (const nfre::degenerate_scenario&) {
        row[name] = nullptr;
        note = "degenerate-scenario";
      } catch (const nfre::unsupported_configuration&) {
        row[name] = nullptr;
        note = "unsupported-configuration";
      }
    };
    add("crb_exact", nfre::CrbMethod::exact_sum, true);
    add("crb_analytic", nfre::CrbMethod::analytic, false);
    add("crb_taylor", nfre::CrbMethod::taylor, false);
    row["note"] = note;
    rows.push_back(std::move(row));
  }

  ordered_json summary;
  try {
    const nfre::NfCase config = nfre::classify(s.target.kind, s.array.tag);
    summary["r_nf_eff"] = nfre::effective_nf_range(config, s.array.aperture, s.carrier_hz,
                                                   s.waveform.central_frequency(),
                                                   s.waveform.rms_bandwidth());
    summary["alpha"] = nfre::alpha_factor(config);
  } catch (const nfre::error& e) {
    summary["r_nf_eff"] = nullptr;
    summary["reason"] = e.what();
  }
  write_output(out, format, meta, rows, summary);
  return 0;
}

// --- nf-term ---------------------------------------------------------------

int run_nf_term(const std::string& grid_text, const std::string& out,
                const std::string& format) {
  const GridSpec grid = nfre::parse_grid(grid_text);
  MetaList meta = base_meta("nf-term");
  meta.emplace_back("grid", grid_text);
  const std::vector<nfre::NfCase> cases = {nfre::NfCase::pt_simo, nfre::NfCase::pt_mimo,
                                           nfre::NfCase::et_simo, nfre::NfCase::et_mimo};
  ordered_json rows = ordered_json::array();
  for (double u : grid.values()) {
    ordered_json row;
    row["u"] = u;
    for (nfre::NfCase c : cases) {
      const auto eb = nfre::eta_beta_analytic(c, u);
      const double alpha = nfre::alpha_factor(c);
      row[nfre::to_string(c)] = eb.eta - eb.beta * eb.beta;
      row[std::string(nfre::to_string(c)) + "_taylor"] = alpha / 11520.0 / (u * u * u * u);
    }
    rows.push_back(std::move(row));
  }
  write_output(out, format, meta, rows, nullptr);
  return 0;
}

// --- effective-range ---------------------------------------------------------

int run_effective_range(const ScenarioArgs& args, const std::string& out,
                        const std::string& format) {
  MetaList meta = base_meta("effective-range");
  append_scenario_meta(meta, args);
  const nfre::Scenario s = build_scenario(args);
  const std::vector<nfre::NfCase> cases = {nfre::NfCase::pt_simo, nfre::NfCase::pt_mimo,
                                           nfre::NfCase::et_simo, nfre::NfCase::et_mimo};
  ordered_json rows = ordered_json::array();
  for (nfre::NfCase c : cases) {
    ordered_json row;
    row["config"] = nfre::to_string(c);
    row["alpha"] = nfre::alpha_factor(c);
    row["r_nf_eff"] = nfre::effective_nf_range(c, s.array.aperture, s.carrier_hz,
                                               s.waveform.central_frequency(),
                                               s.waveform.rms_bandwidth());
    rows.push_back(std::move(row));
  }
  write_output(out, format, meta, rows, nullptr);
  return 0;
}

// --- monte-carlo --------------------------------------------------------------

int run_monte_carlo(const ScenarioArgs& args, const std::string& grid_text, size_t trials,
                    std::uint64_t seed, const std::string& out, const std::string& format) {
  const nfre::Scenario s = build_scenario(args);
  nfre::SearchSpec search;
  MetaList meta = base_meta("monte-carlo");
  append_scenario_meta(meta, args);
  if (grid_text.empty()) {
    search.rho_min = std::max(0.5 * s.range, s.range - 2.0);
    search.rho_max = s.range + 2.0;
  } else {
    const GridSpec grid = nfre::parse_grid(grid_text);
    search.rho_min = grid.min;
    search.rho_max = grid.max;
    search.coarse_step = (grid.max - grid.min) / static_cast<double>(grid.points - 1);
    meta.emplace_back("grid", grid_text);
  }
  meta.emplace_back("trials", std::to_string(trials));
  meta.emplace_back("seed", std::to_string(seed));

  const double sample_rate = 8.0 * s.waveform.bandwidth();
  const nfre::MonteCarloResult mc = nfre::monte_carlo(s, trials, sample_rate, search, seed);
  const nfre::CrbBreakdown crb = nfre::crb_range(s, nfre::CrbMethod::exact_sum);

  ordered_json summary;
  summary["rmse"] = mc.rmse;
  summary["bias"] = mc.bias;
  summary["crb"] = crb.crb;
  summary["sqrt_crb"] = std::sqrt(crb.crb);
  summary["ratio"] = mc.rmse / std::sqrt(crb.crb);
  summary["outlier_fraction"] = mc.outlier_fraction;
  summary["outlier_gate_m"] = mc.outlier_gate;
  summary["boundary_failures"] = mc.boundary_failures;
  summary["trials_kept"] = mc.trials_kept;

  ordered_json rows = ordered_json::array();
  for (size_t t = 0; t < mc.estimates.size(); ++t) {
    ordered_json row;
    row["trial"] = t;
    row["r_hat"] = mc.estimates[t];
    row["error"] = mc.estimates[t] - s.range;
    rows.push_back(std::move(row));
  }

  if (format == "json") {
    write_output(out, format, meta, rows, summary);
  } else {
    if (out == "-" || out.empty()) {
      throw nfre::io_error("monte-carlo csv output needs --out FILE (summary goes to FILE.summary.json)");
    }
    write_output(out, "csv", meta, rows, summary);
    ordered_json doc;
    doc["meta"] = ordered_json::object();
    for (const auto& [key, value] : meta) doc["meta"][key] = value;
    doc["summary"] = summary;
    const std::string summary_path = out + ".summary.json";
    std::ofstream sf(summary_path);
    if (!sf) throw nfre::io_error("cannot open output file: " + summary_path);
    sf << doc.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-field multi-antenna range estimation toolkit"};
  app.set_version_flag("--version", std::string("nfre ") + kVersion);
  app.require_subcommand(1);

  std::string out = "-";
  std::string format = "csv";
  const auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Output path ('-' for stdout)");
    cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  };

  ScenarioArgs args;

  auto* amb = app.add_subcommand("ambiguity", "Ambiguity-function sweeps");
  std::string amb_sweep = "beta";
  std::string amb_grid;
  add_scenario_options(amb, args);
  amb->add_option("--sweep", amb_sweep, "beta (closed forms) | rho (scenario curves)")
      ->check(CLI::IsMember({"beta", "rho"}));
  amb->add_option("--grid", amb_grid, "min:max:points[:log]");
  add_output(amb);

  auto* crb = app.add_subcommand("crb-sweep", "CRB vs range sweep");
  std::string crb_grid = "2:200:400:log";
  add_scenario_options(crb, args);
  crb->add_option("--grid", crb_grid, "range grid min:max:points[:log]");
  add_output(crb);

  auto* nf = app.add_subcommand("nf-term", "Geometry term (eta - beta^2) vs R/D");
  std::string nf_grid = "1:100:400:log";
  nf->add_option("--grid", nf_grid, "u grid min:max:points[:log]");
  add_output(nf);

  auto* eff = app.add_subcommand("effective-range", "Effective near-field range per config");
  add_scenario_options(eff, args);
  add_output(eff);

  auto* mc = app.add_subcommand("monte-carlo", "Monte Carlo RMSE vs CRB harness");
  std::string mc_grid;
  std::uint64_t mc_seed = 1;
  size_t mc_trials = 500;
  add_scenario_options(mc, args);
  mc->add_option("--grid", mc_grid, "search interval min:max:points (sets the coarse step)");
  mc->add_option("--trials", mc_trials, "Trial count");
  mc->add_option("--seed", mc_seed, "Master seed; trial t uses seed xor t");
  add_output(mc);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse expects reversed args
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const nfre::error& e) {
    std::cerr << "nfre: error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (amb->parsed()) {
      if (amb_grid.empty()) amb_grid = (amb_sweep == "beta") ? "0:8:801" : "";
      if (amb_grid.empty()) {
        throw nfre::invalid_parameter("ambiguity --sweep rho needs --grid over rho");
      }
      return run_ambiguity(args, amb_sweep, amb_grid, out, format);
    }
    if (crb->parsed()) return run_crb_sweep(args, crb_grid, out, format);
    if (nf->parsed()) return run_nf_term(nf_grid, out, format);
    if (eff->parsed()) return run_effective_range(args, out, format);
    if (mc->parsed()) return run_monte_carlo(args, mc_grid, mc_trials, mc_seed, out, format);
  } catch (const nfre::error& e) {
    std::cerr << "nfre: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
