#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gflow/errors.hpp"

#ifndef GFLOW_VERSION
#define GFLOW_VERSION "unknown"
#endif

namespace gflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kRayStatuses{"ok", "completed", "blown_up", "radius_exhausted", "failed"};
const std::vector<std::string> kNormKeys{"l2", "sobolev_r", "gevrey", "gevrey_quarter", "wiener", "beta_effective"};
const std::string kCsvHeader = "sample,source,seed,beta,r,lhs,lhs_spectral,rhs_without_C,ratio,norm,norm_quarter";

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json manifest(const RunConfig& cfg, const std::string& command, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  return {{"tool", "gevrey-flow"},
          {"version", GFLOW_VERSION},
          {"command", command},
          {"config", cfg.merged},
          {"config_hash", cfg.hash()},
          {"seeds",
           {{"data", cfg.data_seed},
            {"ensemble", cfg.ensemble.seed},
            {"calibration", cfg.calibration.seed},
            {"lemmas", cfg.lemmas.seed}}},
          {"files", files}};
}

std::string ray_file_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rays/ray_%03zu.jsonl", j);
  return buf;
}

json norms_json(const RaySample& smp, const std::vector<std::string>& names) {
  json members = json::object();
  for (std::size_t i = 0; i < smp.members.size() && i < names.size(); ++i) members[names[i]] = smp.members[i].to_json();
  return {{"combined", smp.combined.to_json()}, {"members", members}};
}

std::string ray_jsonl(const RayTrajectory& t, const std::vector<std::string>& names, double beta0) {
  std::ostringstream out;
  const std::string model = to_string(t.model);
  if (t.samples.empty()) {
    json rec{{"model", model}, {"theta", t.theta}, {"s", t.s_end}, {"beta_effective", beta0},
             {"norms", nullptr}, {"status", to_string(t.status)}, {"message", t.message}};
    out << rec.dump() << '\n';
    return out.str();
  }
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto& smp = t.samples[i];
    const bool last = i + 1 == t.samples.size();
    json rec{{"model", model},
             {"theta", t.theta},
             {"s", smp.s},
             {"beta_effective", smp.combined.beta_effective},
             {"norms", norms_json(smp, names)},
             {"status", last ? to_string(t.status) : "ok"}};
    if (smp.rejected > 0) rec["rejected"] = smp.rejected;
    out << rec.dump() << '\n';
  }
  return out.str();
}

double max_step_ratio(const RayTrajectory& t) {
  double worst = 0.0;
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    const double a = t.samples[i - 1].combined.gevrey;
    const double b = t.samples[i].combined.gevrey;
    if (a > 0.0 && std::isfinite(a) && std::isfinite(b)) worst = std::max(worst, b / a);
  }
  return worst;
}

struct ResolvedConstant {
  double C = 1.0;
  std::string policy = "explicit";
  std::optional<Calibration> calibration;
};

ResolvedConstant resolve_constant(const RunConfig& cfg, const ModelState& state) {
  ResolvedConstant rc;
  if (cfg.constant) {
    rc.C = *cfg.constant;
    return rc;
  }
  rc.policy = "empirical";
  rc.calibration = calibrate_constant(state, cfg.gevrey(1.0), cfg.calibration);
  rc.C = rc.calibration->constant.C_emp;
  return rc;
}

json calibration_json(const Calibration& cal) {
  auto j = cal.constant.to_json();
  j["random_C"] = cal.random_C;
  j["probe_radius"] = cal.probe_radius;
  return j;
}

void write_state(const fs::path& dir, const ModelState& state, std::vector<std::string>& files) {
  fs::create_directories(dir / "initial");
  const auto names = state.member_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::ostringstream buf(std::ios::binary);
    write_gfld(buf, state.field(i));
    const std::string rel = "initial/" + names[i] + ".gfld";
    write_atomic(dir / rel, buf.str());
    files.push_back(rel);
  }
  write_atomic(dir / "initial/state.json", dump(state.sidecar()));
  files.push_back("initial/state.json");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

std::string check_norms(const json& n, const std::string& where) {
  if (!n.is_object()) return where + " must be an object";
  for (const auto& k : kNormKeys) {
    if (!n.contains(k)) return where + " missing '" + k + "'";
    if (!n.at(k).is_number() && !n.at(k).is_null()) return where + "." + k + " must be a number or null";
  }
  return "";
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("output: cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("output: write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.output);
  fs::create_directories(dir);
  std::vector<std::string> files;

  const auto state = initial_data(cfg.catalog_request());
  write_state(dir, state, files);

  const auto constant = resolve_constant(cfg, state);
  if (constant.calibration) {
    std::ostringstream csv;
    constant.calibration->constant.write_csv(csv);
    write_atomic(dir / "calibration.csv", csv.str());
    write_atomic(dir / "calibration.json", dump(calibration_json(*constant.calibration)));
    files.insert(files.end(), {"calibration.csv", "calibration.json"});
  }

  GevreyParams p = cfg.gevrey(constant.C);
  const auto predicted = certified_radius(state, p);
  p.delta = cfg.delta.value_or(predicted.delta_used);
  const double s_max = cfg.s_max.value_or(cfg.s_max_scale * predicted.s_certified);
  RaySpec ray;
  ray.theta = cfg.theta;
  ray.s_max = s_max;
  ray.ds = cfg.ds.value_or(s_max / 400.0);
  ray.integrator = cfg.integrator;
  ray.atol = cfg.atol;
  ray.rtol = cfg.rtol;
  ray.sample_stride = cfg.sample_stride;
  ray.validate();

  SweepResult sweep;
  if (cfg.n_theta >= 4) {
    sweep = sweep_theta(state, p, cfg.n_theta, ray, cfg.blowup_factor);
  } else {
    sweep.region = predicted;
    RayTrajectory t;
    try {
      t = integrate_ray(state, p, ray, cfg.blowup_factor);
    } catch (const Error& e) {
      t.model = state.kind();
      t.theta = ray.theta;
      t.status = RayStatus::failed;
      t.message = e.what();
    }
    RayResult r{t.theta, t.s_end, t.status == RayStatus::blown_up, t.status, false};
    r.flagged = r.blew_up && r.s_empirical < predicted.s_certified;
    sweep.region.rays.push_back(r);
    sweep.trajectories.push_back(std::move(t));
  }

  const auto names = state.member_names();
  json trajs = json::array();
  for (std::size_t j = 0; j < sweep.trajectories.size(); ++j) {
    const auto& t = sweep.trajectories[j];
    const std::string rel = ray_file_name(j);
    write_atomic(dir / rel, ray_jsonl(t, names, p.beta0));
    files.push_back(rel);
    json tj{{"theta", t.theta},       {"status", to_string(t.status)}, {"s_end", t.s_end},
            {"samples", t.samples.size()}, {"max_step_ratio", max_step_ratio(t)}, {"file", rel}};
    if (!t.message.empty()) tj["message"] = t.message;
    trajs.push_back(tj);
  }

  json summary = sweep.region.to_json();
  summary["run"] = {{"data", cfg.data},
                    {"constant_policy", constant.policy},
                    {"C", constant.C},
                    {"delta", p.delta},
                    {"s_max", s_max},
                    {"ds", ray.ds},
                    {"n_theta", cfg.n_theta},
                    {"integrator", to_string(ray.integrator)},
                    {"blowup_factor", cfg.blowup_factor}};
  if (constant.calibration) {
    auto cj = calibration_json(*constant.calibration);
    cj.erase("histogram");
    summary["calibration"] = cj;
  }
  summary["trajectories"] = trajs;
  write_atomic(dir / "summary.json", dump(summary));
  files.push_back("summary.json");
  write_atomic(dir / "manifest.json", dump(manifest(cfg, "simulate", files)));

  const int flags = sweep.region.flag_count();
  log << to_string(state.kind()) << " " << cfg.data << ": s_certified=" << std::setprecision(10)
      << sweep.region.s_certified << " C=" << constant.C << " rays=" << sweep.trajectories.size()
      << " flags=" << flags << "\n";
  return flags > 0 ? kExitViolation : kExitOk;
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
  const auto state = initial_data(cfg.catalog_request());
  const auto constant = resolve_constant(cfg, state);
  auto j = certified_radius(state, cfg.gevrey(constant.C)).to_json();
  j.erase("rays");
  j.erase("flags");
  j.erase("s_empirical_min");
  j["constant_policy"] = constant.policy;
  j["data"] = cfg.data;
  out << dump(j);
  return kExitOk;
}

int cmd_verify_estimates(const RunConfig& cfg, bool exhaustive_lemmas, std::ostream& log) {
  const fs::path dir(cfg.output);
  fs::create_directories(dir);
  std::vector<std::string> files;
  const auto c = empirical_constant(cfg.ensemble);
  std::ostringstream csv;
  c.write_csv(csv);
  write_atomic(dir / "estimates.csv", csv.str());
  write_atomic(dir / "constant.json", dump(c.to_json()));
  files.insert(files.end(), {"estimates.csv", "constant.json"});
  log << to_string(c.model) << ": rows=" << c.rows.size() << " max_ratio=" << std::setprecision(10) << c.max_ratio
      << " C_emp=" << c.C_emp << (c.degenerate ? " (degenerate)" : "") << "\n";

  int code = kExitOk;
  if (exhaustive_lemmas) {
    const auto rep = verify_wavenumber_lemmas(cfg.lemmas);
    write_atomic(dir / "lemmas.json", dump(rep.to_json()));
    files.push_back("lemmas.json");
    log << "lemmas: violations=" << rep.total_violations() << "\n";
    if (rep.total_violations() > 0) code = kExitViolation;
  }
  write_atomic(dir / "manifest.json", dump(manifest(cfg, "verify-estimates", files)));
  return code;
}

std::vector<ScheduleEntry> read_schedule(std::istream& in) {
  std::vector<ScheduleEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto parts = split(t, ',');
    if (out.empty() && lineno == 1 && !parts.empty() && trim(parts[0]) == "t") continue;  // header
    double v[3];
    if (parts.size() != 3 || !parse_double(parts[0], v[0]) || !parse_double(parts[1], v[1]) ||
        !parse_double(parts[2], v[2])) {
      throw ConfigError("schedule line " + std::to_string(lineno) + ": expected 't,beta,M', got '" + t + "'");
    }
    if (!out.empty() && !(v[0] > out.back().t)) {
      throw ConfigError("schedule line " + std::to_string(lineno) + ": times must increase");
    }
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

int cmd_chain_disks(const RunConfig& cfg, const std::string& schedule_path, std::ostream& out) {
  std::ifstream in(schedule_path);
  if (!in) throw ConfigError("schedule: cannot open '" + schedule_path + "'");
  const auto schedule = read_schedule(in);
  const double C = cfg.constant ? *cfg.constant : empirical_constant(cfg.ensemble).C_emp;
  auto j = chain_disks(schedule, cfg.gevrey(C), cfg.grid.dim).to_json();
  j["C"] = C;
  out << dump(j);
  return kExitOk;
}

int cmd_catalog(bool as_json, std::ostream& out) {
  if (as_json) {
    json arr = json::array();
    for (const auto& e : catalog()) {
      json models = json::array();
      for (auto m : e.models) models.push_back(to_string(m));
      arr.push_back({{"name", e.name}, {"models", models}, {"description", e.description}});
    }
    out << dump(arr);
    return kExitOk;
  }
  for (const auto& e : catalog()) {
    std::string models;
    for (auto m : e.models) models += (models.empty() ? "" : ",") + to_string(m);
    out << std::left << std::setw(25) << e.name << std::setw(34) << models << e.description << "\n";
  }
  return kExitOk;
}

std::string check_ray_record(const json& rec) {
  if (!rec.is_object()) return "record is not an object";
  for (const char* k : {"model", "theta", "s", "beta_effective", "norms", "status"}) {
    if (!rec.contains(k)) return std::string("missing '") + k + "'";
  }
  if (!rec.at("model").is_string()) return "model must be a string";
  try {
    (void)parse_model(rec.at("model").get<std::string>());
  } catch (const Error&) {
    return "unknown model " + rec.at("model").dump();
  }
  for (const char* k : {"theta", "s", "beta_effective"}) {
    if (!rec.at(k).is_number()) return std::string(k) + " must be a number";
  }
  if (!rec.at("status").is_string() ||
      std::find(kRayStatuses.begin(), kRayStatuses.end(), rec.at("status").get<std::string>()) == kRayStatuses.end()) {
    return "bad status " + rec.at("status").dump();
  }
  const auto& n = rec.at("norms");
  if (n.is_null()) return rec.at("status") == "failed" ? "" : "norms may be null only for failed rays";
  if (!n.is_object() || !n.contains("combined") || !n.contains("members")) return "norms needs combined and members";
  if (auto e = check_norms(n.at("combined"), "norms.combined"); !e.empty()) return e;
  if (!n.at("members").is_object() || n.at("members").empty()) return "norms.members must be a non-empty object";
  for (const auto& [name, m] : n.at("members").items()) {
    if (auto e = check_norms(m, "norms.members." + name); !e.empty()) return e;
  }
  return "";
}

std::vector<std::string> self_check(const fs::path& dir) {
  std::vector<std::string> problems;
  const auto load = [&](const std::string& rel) -> json {
    try {
      return json::parse(read_text(dir / rel));
    } catch (const std::exception& e) {
      problems.push_back(rel + ": " + e.what());
      return nullptr;
    }
  };
  const auto mf = load("manifest.json");
  if (mf.is_null()) return problems;
  for (const char* k : {"tool", "version", "command", "config", "config_hash", "seeds", "files"}) {
    if (!mf.contains(k)) problems.push_back(std::string("manifest.json: missing '") + k + "'");
  }
  if (!problems.empty()) return problems;
  for (const auto& f : mf.at("files")) {
    if (!fs::exists(dir / f.get<std::string>())) problems.push_back("manifest lists missing file " + f.dump());
  }

  const auto command = mf.at("command").get<std::string>();
  if (command == "simulate") {
    const auto s = load("summary.json");
    if (!s.is_null()) {
      for (const char* k : {"model", "s_certified", "delta_used", "C_used", "rays", "flags", "run", "trajectories"}) {
        if (!s.contains(k)) problems.push_back(std::string("summary.json: missing '") + k + "'");
      }
      if (s.contains("trajectories")) {
        for (const auto& t : s.at("trajectories")) {
          const auto rel = t.at("file").get<std::string>();
          std::istringstream in(read_text(dir / rel));
          std::string line;
          int lineno = 0;
          std::size_t count = 0;
          while (std::getline(in, line)) {
            ++lineno;
            json rec;
            try {
              rec = json::parse(line);
            } catch (const std::exception& e) {
              problems.push_back(rel + ":" + std::to_string(lineno) + ": " + e.what());
              continue;
            }
            if (auto e = check_ray_record(rec); !e.empty()) {
              problems.push_back(rel + ":" + std::to_string(lineno) + ": " + e);
            }
            ++count;
          }
          if (count == 0) problems.push_back(rel + ": empty trajectory file");
          if (t.at("samples").get<std::size_t>() != count && t.at("samples").get<std::size_t>() != 0) {
            problems.push_back(rel + ": record count differs from summary");
          }
        }
      }
    }
  } else if (command == "verify-estimates") {
    std::istringstream in(read_text(dir / "estimates.csv"));
    std::string line;
    std::getline(in, line);
    if (line != kCsvHeader) problems.push_back("estimates.csv: bad header '" + line + "'");
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      const auto parts = split(line, ',');
      double x = 0.0;
      bool ok = parts.size() == 11 && (parts[1] == "random" || parts[1] == "orbit");
      for (std::size_t i = 3; ok && i < parts.size(); ++i) ok = parse_double(parts[i], x) || parts[i] == "inf";
      if (!ok) problems.push_back("estimates.csv:" + std::to_string(lineno) + ": malformed row");
    }
    const auto c = load("constant.json");
    if (!c.is_null()) {
      for (const char* k : {"model", "C_emp", "max_ratio", "safety", "degenerate", "seed", "samples", "histogram"}) {
        if (!c.contains(k)) problems.push_back(std::string("constant.json: missing '") + k + "'");
      }
    }
  }
  return problems;
}

}  // namespace gflow::cli
