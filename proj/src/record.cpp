#include "ikzm/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ikzm/errors.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ikzm {

RecordSnapshot RecordSnapshot::make(const RunConfig& cfg, double tau_Q, RunConfig::Backend which) {
  if (which == RunConfig::Backend::both)
    throw ConfigError("a record belongs to one concrete backend");
  ChainSpec spec = cfg.chain();
  QuenchProtocol ramp = cfg.protocol(tau_Q);
  RecordSnapshot snap;
  snap.L = spec.L;
  snap.q = spec.q;
  snap.alpha = spec.alpha;
  snap.J0 = spec.J0;
  snap.tau_Q = tau_Q;
  snap.dt = ramp.dt;
  snap.samples = cfg.samples;
  snap.backend = which;
  if (which == RunConfig::Backend::mps) {
    snap.chi = cfg.chi;
    snap.trunc_budget = cfg.trunc_budget;
    snap.seed = cfg.seed;
    snap.trotter_order = cfg.trotter_order;
  }
  return snap;
}

RunConfig RecordSnapshot::to_config() const {
  RunConfig cfg;
  cfg.L = L;
  cfg.q = q;
  cfg.alpha = alpha;  // resolved value, never the end-ratio form
  cfg.end_ratio.reset();
  cfg.J0 = J0;
  cfg.tau_min = cfg.tau_max = tau_Q;
  cfg.tau_count = 1;
  cfg.dt = dt;
  cfg.samples = samples;
  cfg.backend = backend;
  if (backend == RunConfig::Backend::mps) {
    cfg.chi = chi;
    cfg.trunc_budget = trunc_budget;
    cfg.seed = seed;
    cfg.trotter_order = trotter_order;
  }
  return cfg;
}

std::string RecordSnapshot::canonical() const {
  return to_config().canonical_snapshot(tau_Q, backend);
}

namespace {

ordered_json snapshot_json(const RecordSnapshot& s) {
  ordered_json j;
  j["L"] = s.L;
  j["q"] = s.q;
  j["alpha"] = s.alpha;
  j["J0"] = s.J0;
  j["tau_Q"] = s.tau_Q;
  j["dt"] = s.dt;
  j["samples"] = s.samples;
  j["backend"] = backend_name(s.backend);
  j["chi"] = s.chi;
  j["trunc_budget"] = s.trunc_budget;
  j["seed"] = s.seed;
  j["trotter_order"] = s.trotter_order;
  return j;
}

RecordSnapshot snapshot_from_json(const ordered_json& j) {
  RecordSnapshot s;
  s.L = j.at("L").get<int>();
  s.q = j.at("q").get<double>();
  s.alpha = j.at("alpha").get<double>();
  s.J0 = j.at("J0").get<double>();
  s.tau_Q = j.at("tau_Q").get<double>();
  s.dt = j.at("dt").get<double>();
  s.samples = j.at("samples").get<int>();
  s.backend = backend_from_name(j.at("backend").get<std::string>());
  s.chi = j.at("chi").get<int>();
  s.trunc_budget = j.at("trunc_budget").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.trotter_order = j.at("trotter_order").get<int>();
  return s;
}

}  // namespace

std::string QuenchRecord::to_json() const {
  ordered_json j;
  j["schema"] = 1;
  j["snapshot"] = snapshot_json(snapshot);
  j["hash"] = hash_hex(snapshot.hash());
  j["times"] = times;
  j["density"] = density;
  j["final_density"] = final_density;
  ordered_json diag;
  diag["purity_drift"] = purity_drift;
  diag["trunc_err"] = trunc_err;
  diag["max_bond"] = max_bond;
  diag["ground_energy"] = ground_energy;
  j["diagnostics"] = diag;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

QuenchRecord QuenchRecord::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw SimulationError(std::string("record parse failure: ") + e.what());
  }
  try {
    if (j.at("schema").get<int>() != 1)
      throw SimulationError("unsupported record schema");
    QuenchRecord rec;
    rec.snapshot = snapshot_from_json(j.at("snapshot"));
    if (j.at("hash").get<std::string>() != hash_hex(rec.snapshot.hash()))
      throw SimulationError("record hash does not match its snapshot");
    rec.times = j.at("times").get<std::vector<double>>();
    rec.density = j.at("density").get<std::vector<double>>();
    rec.final_density = j.at("final_density").get<double>();
    const auto& diag = j.at("diagnostics");
    rec.purity_drift = diag.at("purity_drift").get<double>();
    rec.trunc_err = diag.at("trunc_err").get<double>();
    rec.max_bond = diag.at("max_bond").get<int>();
    rec.ground_energy = diag.at("ground_energy").get<double>();
    rec.wall_seconds = j.at("wall_seconds").get<double>();
    return rec;
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(std::string("record field failure: ") + e.what());
  }
}

void validate_record(const QuenchRecord& rec) {
  const RecordSnapshot& s = rec.snapshot;
  RunConfig cfg = s.to_config();
  cfg.validate();  // model-layer range checks via ChainSpec / protocol
  if (rec.times.size() != static_cast<size_t>(s.samples) || rec.density.size() != rec.times.size())
    throw SimulationError("record sample arrays do not match snapshot sample count");
  double span = 2.0 * s.tau_Q;
  if (std::abs(rec.times.front() + s.tau_Q) > 1e-9 * span ||
      std::abs(rec.times.back() - s.tau_Q) > 1e-9 * span)
    throw SimulationError("record time grid does not span [-tau_Q, tau_Q]");
  double dmax = double(s.L - 1) / double(s.L) + 1e-9;
  for (double d : rec.density)
    if (!(d >= -1e-9 && d <= dmax))
      throw SimulationError("record contains an out-of-range kink density");
  if (rec.final_density != rec.density.back())
    throw SimulationError("record final density disagrees with its last sample");
}

std::string record_filename(const RecordSnapshot& snap) {
  return hash_hex(snap.hash()) + ".json";
}

std::string save_record(const QuenchRecord& rec, const std::string& dir) {
  fs::create_directories(dir);
  fs::path target = fs::path(dir) / record_filename(rec.snapshot);
  fs::path tmp = fs::path(dir) / (".tmp-" + record_filename(rec.snapshot));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SimulationError("cannot write record file " + tmp.string());
    out << rec.to_json();
    if (!out.flush()) throw SimulationError("short write on record file " + tmp.string());
  }
  fs::rename(tmp, target);
  return target.string();
}

std::optional<QuenchRecord> load_cached_record(const std::string& dir, const RecordSnapshot& snap,
                                               std::string* why) {
  fs::path path = fs::path(dir) / record_filename(snap);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (why) *why = "unreadable record " + path.string();
    return std::nullopt;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    QuenchRecord rec = QuenchRecord::from_json(text);
    if (rec.snapshot.canonical() != snap.canonical()) {
      if (why) *why = "snapshot mismatch in " + path.string();
      return std::nullopt;
    }
    validate_record(rec);
    return rec;
  } catch (const std::exception& e) {
    if (why) *why = path.string() + ": " + e.what();
    return std::nullopt;
  }
}

std::vector<QuenchRecord> load_record_dir(const std::string& dir) {
  std::vector<QuenchRecord> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() == ".json" && p.filename().string().rfind(".tmp-", 0) != 0)
      paths.push_back(p);
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) continue;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    QuenchRecord rec = QuenchRecord::from_json(text);
    validate_record(rec);
    out.push_back(std::move(rec));
  }
  std::stable_sort(out.begin(), out.end(), [](const QuenchRecord& a, const QuenchRecord& b) {
    if (a.snapshot.tau_Q != b.snapshot.tau_Q) return a.snapshot.tau_Q < b.snapshot.tau_Q;
    return a.snapshot.hash() < b.snapshot.hash();
  });
  return out;
}

}  // namespace ikzm
