#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcawalk/errors.hpp"
#include "qcawalk/experiment.hpp"

namespace qcaw {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_stem(const std::string& id) {
  std::string s;
  for (const char c : id) s += (c == '/') ? std::string("__") : std::string(1, c);
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ResourceError("cannot write " + tmp);
    f << text;
  }
  std::filesystem::rename(tmp, path);
}

// Per-step series worth plotting, in a fixed order.
const char* const kSeriesMetrics[] = {
    "marked_probability",           "hellinger_fidelity",   "l1_distance",
    "hellinger_fidelity_empirical", "l1_distance_empirical", "hellinger_fidelity_bitstring",
    "l1_distance_bitstring"};

}  // namespace

ReportFiles emit_report(const std::filesystem::path& dir) {
  const auto path = dir / "results.json";
  std::ifstream in(path);
  if (!in) throw ConfigError("no results.json in " + dir.string());
  json res;
  try {
    res = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!res.contains("runs") || !res["runs"].is_array() || res["runs"].empty()) {
    throw ConfigError(path.string() + ": no run records");
  }

  ReportFiles files;
  std::filesystem::create_directories(dir / "series");
  std::ostringstream summary;
  summary << "experiment " << res.value("name", std::string("?")) << "  config "
          << res.value("config_hash", std::string("?")) << "  seed " << res.value("seed", 0ULL) << "\n\n";

  for (const auto& run : res["runs"]) {
    const std::string id = run.at("id").get<std::string>();
    std::ostringstream csv;
    csv << "step,metric,value\n";
    const auto& steps = run.at("per_step");
    for (const auto& s : steps) {
      csv << s.at("step").get<int>() << ",leakage," << num(s.at("leakage").get<double>()) << "\n";
    }
    const auto& m = run.at("metrics");
    for (const char* name : kSeriesMetrics) {
      if (!m.contains(name)) continue;
      const auto& vals = m[name];
      for (std::size_t t = 0; t < vals.size(); ++t) {
        csv << t << "," << name << "," << num(vals[t].get<double>()) << "\n";
      }
    }
    const auto f = dir / "series" / (file_stem(id) + ".csv");
    write_text(f, csv.str());
    files.series.push_back(f);

    summary << id << "\n";
    summary << "  steps " << run.at("steps").get<int>() << ", shots " << run.at("shots").get<std::uint64_t>()
            << ", 2q gates/step " << run.at("step_two_qubit_gates").get<int>() << ", init 2q gates "
            << run.at("init").at("two_qubit_gates").get<int>() << "\n";
    if (m.contains("success_probability")) {
      summary << "  success probability " << num(m["success_probability"].get<double>())
              << " at step " << m["hitting_time"].get<int>();
      if (m.contains("degraded_ratio")) summary << ", degraded ratio " << num(m["degraded_ratio"].get<double>());
      if (m["selectivity_infinite"].get<bool>()) {
        summary << ", selectivity +inf";
      } else {
        summary << ", selectivity " << num(m["selectivity"].get<double>());
      }
      summary << "\n";
    }
    if (m.contains("hellinger_fidelity")) {
      const auto& h = m["hellinger_fidelity"];
      const auto& l = m["l1_distance"];
      summary << "  final Hellinger fidelity " << num(h.back().get<double>()) << ", l1 "
              << num(l.back().get<double>()) << "\n";
    }
    summary << "  final leakage " << num(steps.back().at("leakage").get<double>()) << "\n";
  }

  std::ostringstream sweep;
  sweep << "run,backend,size,vertices,hitting_time,success_probability,hitting_time_slope,"
           "hitting_time_intercept,hitting_time_r_squared,success_c,success_residual\n";
  if (res.contains("sweeps")) {
    for (const auto& sw : res["sweeps"]) {
      const auto& lf = sw.at("hitting_time_fit");
      const auto& inv = sw.at("success_probability_fit");
      const auto& pts = sw.at("points");
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto& p = pts[k];
        sweep << sw.at("run").get<std::string>() << "," << sw.at("backend").get<std::string>() << ","
              << p.at("size").get<int>() << "," << p.at("vertices").get<int>() << ","
              << p.at("hitting_time").get<int>() << "," << num(p.at("success_probability").get<double>())
              << "," << num(lf.at("slope").get<double>()) << "," << num(lf.at("intercept").get<double>())
              << "," << num(lf.at("r_squared").get<double>()) << "," << num(inv.at("c").get<double>())
              << "," << num(inv.at("residuals")[k].get<double>()) << "\n";
      }
      summary << "\nsweep " << sw.at("run").get<std::string>() << " [" << sw.at("backend").get<std::string>()
              << "]: hitting time = " << num(lf.at("intercept").get<double>()) << " + "
              << num(lf.at("slope").get<double>()) << " N (R^2 " << num(lf.at("r_squared").get<double>())
              << "); success probability ~ " << num(inv.at("c").get<double>()) << " / N (rms residual "
              << num(inv.at("rms_residual").get<double>()) << ")\n";
    }
  }
  files.sweep = dir / "sweep.csv";
  write_text(files.sweep, sweep.str());
  files.summary = dir / "summary.txt";
  write_text(files.summary, summary.str());
  return files;
}

}  // namespace qcaw
