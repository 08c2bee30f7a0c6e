// SPDX-License-Identifier: Apache-2.0
//
// isac-arrays: joint beamforming simulation for dissimilar mono-static arrays
// Copyright (C) 2026 The isac-arrays authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: JSON configuration, CSV outputs and run manifests.
//
// Needs the single-header CLI11 and nlohmann/json on the include path.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isac/angular.hpp"
#include "isac/beamsynth.hpp"
#include "isac/detection.hpp"
#include "isac/errors.hpp"
#include "isac/geometry.hpp"
#include "isac/imaging.hpp"
#include "isac/montecarlo.hpp"
#include "isac/rng.hpp"
#include "isac/windowing.hpp"

namespace isac::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kConvergence = 3 };

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

/// Everything any command may read. Sweep uses `experiment`; the single-setup
/// commands use experiment.comms together with `sensing`.
struct RunConfig {
  ExperimentConfig experiment = table1_config(1000, 1);
  ArraySpec sensing{3, 2.0};
  NafPoint scan{0.0, 0.0};
  std::vector<Target> targets;
  std::optional<double> delta; ///< random two-target scene for `image` when no targets are listed
  bool noiseless = false;
  std::string psf_kind = "joint"; ///< joint | coarray | comms | sensing
  bool psf_cut = false;           ///< only the l-axis cut through the scan direction
};

// ---- configuration -------------------------------------------------------

namespace detail {

inline ArraySpec array_from_json(const json& j, const char* what) {
  if (!j.is_object()) throw config_error(std::string(what) + ": expected an object {n_1d, spacing}");
  ArraySpec a;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "n_1d" && it.key() != "spacing")
      throw config_error(std::string(what) + ": unknown key '" + it.key() + "'");
  if (!j.contains("n_1d") || !j.at("n_1d").is_number_integer())
    throw config_error(std::string(what) + ".n_1d must be an integer");
  if (!j.contains("spacing") || !j.at("spacing").is_number())
    throw config_error(std::string(what) + ".spacing must be a number");
  a.n_1d = j.at("n_1d").get<int>();
  a.spacing = j.at("spacing").get<double>();
  if (a.n_1d < 1 || !(a.spacing > 0.0)) throw config_error(std::string(what) + ": n_1d >= 1 and spacing > 0 required");
  return a;
}

inline json array_to_json(ArraySpec a) { return {{"n_1d", a.n_1d}, {"spacing", a.spacing}}; }

inline double number(const json& j, const char* key) {
  if (!j.is_number()) throw config_error(std::string(key) + " must be a number");
  return j.get<double>();
}

inline long long integer(const json& j, const char* key) {
  if (!j.is_number_integer()) throw config_error(std::string(key) + " must be an integer");
  return j.get<long long>();
}

} // namespace detail

/// Parses "N@d", e.g. "3@2.0".
inline ArraySpec parse_array(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) throw config_error("array '" + text + "': expected N@spacing");
  try {
    std::size_t used = 0;
    ArraySpec a;
    a.n_1d = std::stoi(text.substr(0, at), &used);
    if (used != at) throw config_error("array '" + text + "': bad element count");
    const auto rest = text.substr(at + 1);
    a.spacing = std::stod(rest, &used);
    if (used != rest.size()) throw config_error("array '" + text + "': bad spacing");
    if (a.n_1d < 1 || !(a.spacing > 0.0)) throw config_error("array '" + text + "': n >= 1 and spacing > 0 required");
    return a;
  } catch (const std::logic_error&) {
    throw config_error("array '" + text + "': expected N@spacing");
  }
}

inline void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw config_error("config: top level must be an object");
  auto& e = cfg.experiment;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "comms") {
      e.comms = detail::array_from_json(v, "comms");
    } else if (k == "sensing") {
      cfg.sensing = detail::array_from_json(v, "sensing");
    } else if (k == "sensing_variants") {
      if (!v.is_array()) throw config_error("sensing_variants must be an array");
      e.sensing_variants.clear();
      for (const auto& s : v) e.sensing_variants.push_back(detail::array_from_json(s, "sensing_variants[]"));
    } else if (k == "delta_grid") {
      if (!v.is_array()) throw config_error("delta_grid must be an array");
      e.delta_grid.clear();
      for (const auto& d : v) e.delta_grid.push_back(detail::number(d, "delta_grid[]"));
    } else if (k == "noise_db") {
      if (v.is_null()) cfg.noiseless = true;
      else e.noise_db = detail::number(v, "noise_db");
    } else if (k == "trials") {
      e.trials = static_cast<int>(detail::integer(v, "trials"));
    } else if (k == "seed") {
      if (!v.is_number_unsigned()) throw config_error("seed must be a non-negative integer");
      e.seed = v.get<std::uint64_t>();
    } else if (k == "taper_db") {
      try {
        e.taper = TaperSpec(detail::number(v, "taper_db"));
      } catch (const invalid_argument& ex) {
        throw config_error(ex.what());
      }
    } else if (k == "pfa") {
      e.pfa = detail::number(v, "pfa");
    } else if (k == "max_targets") {
      e.max_targets = static_cast<int>(detail::integer(v, "max_targets"));
    } else if (k == "oversampling") {
      e.oversampling = static_cast<int>(detail::integer(v, "oversampling"));
    } else if (k == "factorization_tol") {
      e.factorization_tol = detail::number(v, "factorization_tol");
    } else if (k == "q_max") {
      e.q_max = static_cast<int>(detail::integer(v, "q_max"));
    } else if (k == "threads") {
      e.threads = static_cast<int>(detail::integer(v, "threads"));
    } else if (k == "scan") {
      if (!v.is_object() || !v.contains("l") || !v.contains("eta")) throw config_error("scan: expected {l, eta}");
      cfg.scan = {detail::number(v.at("l"), "scan.l"), detail::number(v.at("eta"), "scan.eta")};
    } else if (k == "targets") {
      if (!v.is_array()) throw config_error("targets must be an array");
      cfg.targets.clear();
      for (const auto& t : v) {
        if (!t.is_object() || !t.contains("l") || !t.contains("eta")) throw config_error("targets[]: expected {l, eta}");
        const double mag = t.contains("magnitude") ? detail::number(t.at("magnitude"), "magnitude") : 1.0;
        const double ph = t.contains("phase") ? detail::number(t.at("phase"), "phase") : 0.0;
        cfg.targets.push_back({wrap({detail::number(t.at("l"), "l"), detail::number(t.at("eta"), "eta")}),
                               std::polar(mag, ph)});
      }
    } else if (k == "delta") {
      cfg.delta = detail::number(v, "delta");
    } else if (k == "psf") {
      if (!v.is_object()) throw config_error("psf: expected {kind, cut}");
      if (v.contains("kind")) {
        if (!v.at("kind").is_string()) throw config_error("psf.kind must be a string");
        cfg.psf_kind = v.at("kind").get<std::string>();
      }
      if (v.contains("cut")) {
        if (!v.at("cut").is_boolean()) throw config_error("psf.cut must be a boolean");
        cfg.psf_cut = v.at("cut").get<bool>();
      }
    } else {
      throw config_error("config: unknown key '" + k + "'");
    }
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  RunConfig cfg;
  try {
    apply_json(cfg, json::parse(in));
  } catch (const json::exception& ex) {
    throw config_error("config '" + path + "': " + ex.what());
  }
  return cfg;
}

inline json to_json(const RunConfig& cfg) {
  const auto& e = cfg.experiment;
  json variants = json::array();
  for (const auto& s : e.sensing_variants) variants.push_back(detail::array_to_json(s));
  json targets = json::array();
  for (const auto& t : cfg.targets)
    targets.push_back({{"l", t.position.l}, {"eta", t.position.eta}, {"magnitude", std::abs(t.coefficient)},
                       {"phase", std::arg(t.coefficient)}});
  json j{{"comms", detail::array_to_json(e.comms)},
         {"sensing", detail::array_to_json(cfg.sensing)},
         {"sensing_variants", variants},
         {"delta_grid", e.delta_grid},
         {"noise_db", cfg.noiseless ? json(nullptr) : json(e.noise_db)},
         {"trials", e.trials},
         {"seed", e.seed},
         {"taper_db", e.taper.sidelobe_attenuation_db()},
         {"pfa", e.pfa},
         {"max_targets", e.max_targets},
         {"oversampling", e.oversampling},
         {"factorization_tol", e.factorization_tol},
         {"q_max", e.q_max},
         {"scan", {{"l", cfg.scan.l}, {"eta", cfg.scan.eta}}},
         {"targets", targets},
         {"psf", {{"kind", cfg.psf_kind}, {"cut", cfg.psf_cut}}}};
  if (cfg.delta) j["delta"] = *cfg.delta;
  return j;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of the canonical (key-sorted, compact) JSON form, as 16 hex digits.
inline std::string config_hash(const json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

// ---- CSV ------------------------------------------------------------------

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw internal_error("CsvTable: row width does not match header");
    rows_.push_back(row);
  }

  std::size_t rows() const noexcept { return rows_.size(); }

  std::string str() const {
    std::string out;
    for (std::size_t c = 0; c < header_.size(); ++c) out += (c ? "," : "") + header_[c];
    out += '\n';
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) out += ',';
        out += format_number(r[c]);
      }
      out += '\n';
    }
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot write '" + path + "'");
    f << str();
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
  }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Re-reads a CSV file: exact header, one numeric field per column on every
/// record, newline-terminated. Returns the record count or throws.
inline std::size_t verify_csv(const std::string& path, const std::vector<std::string>& header) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("verify: cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (text.empty() || text.back() != '\n') throw std::runtime_error("verify: file must end with a newline");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::string expect;
  for (std::size_t c = 0; c < header.size(); ++c) expect += (c ? "," : "") + header[c];
  if (line != expect) throw std::runtime_error("verify: header '" + line + "' != '" + expect + "'");
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0' || !std::isfinite(v))
        throw std::runtime_error("verify: record " + std::to_string(n) + " has a non-numeric field '" + cell + "'");
      ++fields;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields != header.size())
      throw std::runtime_error("verify: record " + std::to_string(n) + " has " + std::to_string(fields) + " fields");
  }
  return n;
}

// ---- manifests --------------------------------------------------------------

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

inline void write_manifest(const std::string& out, const std::string& command, const RunConfig& cfg,
                           const json& results, std::chrono::system_clock::time_point started) {
  const json params = to_json(cfg);
  json m{{"tool", "isac"},
         {"version", kVersion},
         {"command", command},
         {"config_hash", config_hash(params)},
         {"seed", cfg.experiment.seed},
         {"params", params},
         {"output", out},
         {"results", results},
         {"timestamps",
          {{"started", utc_timestamp(started)}, {"finished", utc_timestamp(std::chrono::system_clock::now())}}}};
  std::ofstream f(manifest_path(out));
  if (!f) throw config_error("cannot write '" + manifest_path(out) + "'");
  f << m.dump(2) << '\n';
}

// ---- commands -------------------------------------------------------------

struct Options {
  std::string out;
  bool verify = false;
};

inline ArrayPair single_pair(const RunConfig& cfg) {
  const auto& c = cfg.experiment.comms;
  return validate_pair(make_ura(c.n_1d, c.spacing), make_ura(cfg.sensing.n_1d, cfg.sensing.spacing));
}

inline AcquisitionSet synthesize(const RunConfig& cfg, const ArrayPair& pair) {
  const auto dims = coarray_dims(pair);
  const auto& e = cfg.experiment;
  return factorize(pair, chebyshev_2d(dims.n_1d, e.taper, dims.spacing), e.q_max, e.factorization_tol,
                   FactorizeOptions{derive_seed(e.seed, {0xfac7ULL})});
}

inline void finish_csv(const CsvTable& table, const std::vector<std::string>& header, const Options& opt,
                       std::ostream& out) {
  table.save(opt.out);
  out << "wrote " << table.rows() << " rows to " << opt.out << '\n';
  if (opt.verify) out << "verified " << verify_csv(opt.out, header) << " rows\n";
}

inline int cmd_coarray(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto started = std::chrono::system_clock::now();
  const auto pair = single_pair(cfg);
  const auto co = sum_coarray(pair);
  out << "coarray n_1d=" << co.n_1d << " spacing=" << format_number(co.spacing) << " ratio=" << pair.ratio
      << " pairs=" << co.total() << '\n';
  for (int i = 0; i < co.n_1d; ++i) {
    for (int j = 0; j < co.n_1d; ++j) out << (j ? " " : "") << co.multiplicity(i, j);
    out << '\n';
  }
  if (opt.out.empty()) return kOk;
  const std::vector<std::string> header{"i", "j", "x", "z", "multiplicity"};
  CsvTable t(header);
  for (int i = 0; i < co.n_1d; ++i)
    for (int j = 0; j < co.n_1d; ++j) t.add({double(i), double(j), i * co.spacing, j * co.spacing,
                                              double(co.multiplicity(i, j))});
  finish_csv(t, header, opt, out);
  write_manifest(opt.out, "coarray", cfg, {{"n_1d", co.n_1d}, {"spacing", co.spacing}, {"pairs", co.total()}},
                 started);
  return kOk;
}

inline int cmd_psf(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto started = std::chrono::system_clock::now();
  const auto pair = single_pair(cfg);
  const auto dims = coarray_dims(pair);
  const auto grid = make_grid(default_bins(dims.n_1d, cfg.experiment.oversampling));
  const auto uniform = [](int n, double spacing) {
    return WeightGrid{Eigen::MatrixXcd::Constant(n, n, cplx{1.0 / (n * n), 0.0}), spacing};
  };

  json results{{"kind", cfg.psf_kind}, {"bins_per_axis", grid.bins_per_axis}, {"coarray_n_1d", dims.n_1d}};
  PsfMap psf;
  if (cfg.psf_kind == "joint" || cfg.psf_kind == "coarray") {
    const auto acq = synthesize(cfg, pair);
    psf = cfg.psf_kind == "joint" ? joint_psf(pair, acq, cfg.scan, grid) : coarray_psf(pair, acq, cfg.scan, grid);
    results["q_count"] = acq.q_count();
    results["residual"] = acq.residual;
    results["noise_gain"] = acq.noise_gain();
  } else if (cfg.psf_kind == "comms") {
    psf = single_psf(pair.comms, uniform(pair.comms.n_1d, pair.comms.spacing), cfg.scan, grid, dims.spacing);
  } else if (cfg.psf_kind == "sensing") {
    psf = single_psf(pair.sensing, uniform(pair.sensing.n_1d, pair.sensing.spacing), cfg.scan, grid, dims.spacing);
  } else {
    throw config_error("psf.kind must be one of joint, coarray, comms, sensing");
  }
  const double peak = psf.values.cwiseAbs2().maxCoeff();
  const auto db = power_db(psf.values, peak);
  results["peak_sidelobe_db"] = peak_sidelobe_db(psf);

  const std::vector<std::string> header{"l", "eta", "power_db"};
  CsvTable t(header);
  const int b = grid.bins_per_axis;
  if (cfg.psf_cut) {
    const int j = grid.nearest(cfg.scan.eta);
    for (int i = 0; i < b; ++i) t.add({grid.coord(i), grid.coord(j), db(i, j)});
  } else {
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) t.add({grid.coord(i), grid.coord(j), db(i, j)});
  }
  finish_csv(t, header, opt, out);
  write_manifest(opt.out, "psf", cfg, results, started);
  return kOk;
}

inline int cmd_image(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto started = std::chrono::system_clock::now();
  const auto& e = cfg.experiment;
  const auto pair = single_pair(cfg);
  const auto dims = coarray_dims(pair);
  const auto acq = synthesize(cfg, pair);
  const auto grid = make_grid(default_bins(dims.n_1d, e.oversampling));
  const Imager imager(pair, acq, grid);

  Scenario scene{cfg.targets};
  if (scene.targets.empty() && cfg.delta) {
    auto rng = make_engine(e.seed, {0x5ceeULL});
    scene = place_targets(*cfg.delta, rng);
  }
  const NoiseModel noise = cfg.noiseless ? NoiseModel{0.0, 0} : NoiseModel::from_db(e.noise_db, derive_seed(e.seed, {0x401eULL}));
  const auto image = imager.reconstruct(scene, noise);

  const auto cfar = default_cfar(dims.n_1d, e.taper, grid.bins_per_axis, e.pfa);
  const PsfModel model(pair, acq, grid, cfar.guard_cells);
  const auto dets = detect_all(image, cfar, model, e.max_targets);
  const double rho = resolution(half_mainlobe_width(dims.n_1d, e.taper));
  const auto match = match_truth(dets, scene, rho);

  json truth = json::array(), found = json::array();
  for (const auto& t : scene.targets) truth.push_back({{"l", t.position.l}, {"eta", t.position.eta}});
  for (const auto& d : dets) found.push_back({{"l", d.position.l}, {"eta", d.position.eta}, {"power", d.power}});
  json results{{"bins_per_axis", grid.bins_per_axis}, {"q_count", acq.q_count()}, {"noise_gain", acq.noise_gain()},
               {"noise_variance", noise.variance}, {"rho", rho}, {"targets", truth}, {"detections", found},
               {"hits", match.hits}, {"misses", match.misses}, {"false_alarms", match.false_alarms}};

  const std::vector<std::string> header{"l", "eta", "power_db"};
  CsvTable t(header);
  const auto db = power_db(image.values, 1.0);
  for (int i = 0; i < grid.bins_per_axis; ++i)
    for (int j = 0; j < grid.bins_per_axis; ++j) t.add({grid.coord(i), grid.coord(j), db(i, j)});
  out << "detections=" << dets.size() << " hits=" << match.hits << " misses=" << match.misses << '\n';
  finish_csv(t, header, opt, out);
  write_manifest(opt.out, "image", cfg, results, started);
  return kOk;
}

inline const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h{"variant_n", "variant_d", "delta", "pmd", "ci_lo", "ci_hi", "trials"};
  return h;
}

inline int cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto started = std::chrono::system_clock::now();
  const auto curves = sweep(cfg.experiment);
  CsvTable t(sweep_header());
  json meta = json::array();
  for (const auto& c : curves) {
    json pts = json::array();
    for (const auto& p : c.points) {
      t.add({double(c.variant.n_1d), c.variant.spacing, p.delta, p.pmd, p.ci.lo, p.ci.hi, double(p.trials)});
      pts.push_back({{"delta", p.delta}, {"pmd_trial", p.pmd_trial}, {"false_alarms_per_trial", p.false_alarms_per_trial}});
    }
    meta.push_back({{"variant_n", c.variant.n_1d}, {"variant_d", c.variant.spacing}, {"coarray_n_1d", c.coarray_n_1d},
                    {"rho", c.rho}, {"q_count", c.q_count}, {"noise_gain", c.noise_gain}, {"points", pts}});
  }
  finish_csv(t, sweep_header(), opt, out);
  write_manifest(opt.out, "sweep", cfg,
                 {{"pmd_normalization", "missed targets / (2 * trials)"},
                  {"pmd_trial_normalization", "trials with at least one missed target / trials"},
                  {"curves", meta}},
                 started);
  return kOk;
}

// ---- entry point ----------------------------------------------------------

/// Parses argv and runs one command. Never throws; returns an ExitCode.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Joint beamforming simulation for dissimilar mono-static arrays"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, trials;
  std::optional<double> noise_db, delta;
  std::string comms, sensing, kind;
  std::vector<std::string> variants;
  bool noiseless = false, cut = false;
  Options opt;

  auto common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "root RNG seed (overrides config)");
    auto* o = sub->add_option("--out", opt.out, "output CSV; a .manifest.json is written next to it");
    if (needs_out) o->required();
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--verify", opt.verify, "re-read and validate the CSV after writing");
    sub->add_option("--comms", comms, "communications array as N@spacing");
  };

  auto* co = app.add_subcommand("coarray", "sum co-array of a Tx/Rx pair");
  common(co, false);
  co->add_option("--sensing", sensing, "sensing array as N@spacing");

  auto* psf = app.add_subcommand("psf", "single or joint point spread function");
  common(psf, true);
  psf->add_option("--sensing", sensing, "sensing array as N@spacing");
  psf->add_option("--kind", kind, "joint | coarray | comms | sensing")
      ->check(CLI::IsMember({"joint", "coarray", "comms", "sensing"}));
  psf->add_flag("--cut", cut, "only the l-axis cut through the scan direction");

  auto* img = app.add_subcommand("image", "one noisy reconstruction");
  common(img, true);
  img->add_option("--sensing", sensing, "sensing array as N@spacing");
  img->add_option("--noise-db", noise_db, "noise variance in dB");
  img->add_flag("--noiseless", noiseless, "no receiver noise");
  img->add_option("--delta", delta, "random two-target scene at this NAF separation (when no targets are configured)");

  auto* sw = app.add_subcommand("sweep", "missed-detection curves");
  common(sw, true);
  sw->add_option("--sensing", variants, "sensing variants as N@spacing (repeatable)");
  sw->add_option("--trials", trials, "trials per point");
  sw->add_option("--noise-db", noise_db, "noise variance in dB");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    auto& e = cfg.experiment;
    if (seed) e.seed = *seed;
    if (threads) e.threads = *threads;
    if (trials) e.trials = *trials;
    if (noise_db) {
      e.noise_db = *noise_db;
      cfg.noiseless = false;
    }
    if (noiseless) cfg.noiseless = true;
    if (delta) cfg.delta = *delta;
    if (!comms.empty()) e.comms = parse_array(comms);
    if (!sensing.empty()) cfg.sensing = parse_array(sensing);
    if (!variants.empty()) {
      e.sensing_variants.clear();
      for (const auto& v : variants) e.sensing_variants.push_back(parse_array(v));
    }
    if (!kind.empty()) cfg.psf_kind = kind;
    if (cut) cfg.psf_cut = true;

    if (*co) return cmd_coarray(cfg, opt, out);
    if (*psf) return cmd_psf(cfg, opt, out);
    if (*img) return cmd_image(cfg, opt, out);
    return cmd_sweep(cfg, opt, out);
  } catch (const config_error& ex) {
    err << "config error: " << ex.what() << '\n';
    return kUsage;
  } catch (const constraint_violation& ex) {
    err << "constraint violation: " << ex.what() << '\n';
    return kUsage;
  } catch (const invalid_argument& ex) {
    err << "invalid argument: " << ex.what() << '\n';
    return kUsage;
  } catch (const convergence_failure& ex) {
    err << "factorization did not converge: " << ex.what() << '\n';
    return kConvergence;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
}

} // namespace isac::cli
