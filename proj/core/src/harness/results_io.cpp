#include "estim/harness/results_io.hpp"

#include <charconv>
#include <limits>
#include <fstream>
#include <sstream>

#include "estim/error.hpp"
#include "estim/neural/serialize.hpp"
#include "estim/sequential/trace_io.hpp"
#include "json.hpp"

namespace estim::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

// Free text as one CSV cell: commas and line breaks become spaces.
std::string csv_text(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string hash_line(const std::string& hash) { return "# config_hash: " + hash + "\n"; }

double parse_double(const std::string& s, const fs::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error(Errc::IoError, path.string() + ": '" + s + "' is not a number");
  }
  return v;
}

std::size_t parse_size(const std::string& s, const fs::path& path) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::IoError, path.string() + ": '" + s + "' is not a count");
  }
  return v;
}

std::string samples_csv(const ResultBundle& b, bool training) {
  std::string out = hash_line(b.config_hash) + "replicate,stage,parameter,value\n";
  for (const auto& st : b.stages) {
    const Tensor& t = training ? st.training_targets : st.summary.samples;
    if (t.empty()) continue;
    const std::string prefix = std::to_string(st.replicate) + "," + st.stage + ",";
    for (std::size_t n = 0; n < t.dim(0); ++n) {
      for (std::size_t p = 0; p < t.dim(1); ++p) {
        out += prefix + b.param_names[p] + "," + format_double(t(n, p)) + "\n";
      }
    }
  }
  return out;
}

std::string trace_ndjson(const ResultBundle& b) {
  std::string out;
  if (!b.replicates.empty() && !b.replicates.front().trace.empty()) {
    for (const auto& r : b.replicates) {
      seq::TraceContext ctx{b.config_hash, r.replicate, b.param_names};
      for (const auto& rec : r.trace) out += seq::to_ndjson(rec, ctx) + "\n";
    }
    return out;
  }
  for (const auto& st : b.stages) {
    const auto& s = st.summary;
    json j{{"config_hash", b.config_hash},
           {"replicate", st.replicate},
           {"stage", st.stage},
           {"parameters", b.param_names},
           {"plan",
            {{"T", st.plan.T},
             {"T_k", st.plan.T_k},
             {"m", st.plan.m},
             {"r", st.plan.r},
             {"offset", st.plan.offset},
             {"chunks", st.plan.chunks}}},
           {"theta_hat", st.theta_hat},
           {"bootstrap",
            {{"B", s.B()},
             {"median", s.median},
             {"sd", s.sd},
             {"bias", s.bias},
             {"lo", s.lo},
             {"hi", s.hi},
             {"rescale", s.rescale}}}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string timings_ndjson(const ResultBundle& b) {
  std::string out;
  for (const auto& st : b.stages) {
    json j{{"config_hash", b.config_hash},
           {"replicate", st.replicate},
           {"stage", st.stage},
           {"wall_seconds", st.wall_seconds}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  return s;
}

std::string metrics_csv(const std::string& config_hash, const std::vector<MetricRow>& rows) {
  std::string out = hash_line(config_hash) + "stage,parameter,estimate,n,bias,sd,rmse\n";
  for (const auto& r : rows) {
    out += r.stage + "," + r.parameter + "," + r.estimate + "," + std::to_string(r.n) + "," +
           format_double(r.value.bias) + "," + format_double(r.value.sd) + "," +
           format_double(r.value.rmse) + "\n";
  }
  return out;
}

std::string estimates_csv(const std::string& config_hash, const std::vector<EstimateRow>& rows) {
  std::string out = hash_line(config_hash) + "replicate,stage,final,parameter,truth,fitted,median,sd,lo,hi\n";
  for (const auto& r : rows) {
    out += std::to_string(r.replicate) + "," + r.stage + "," + (r.final ? "1" : "0") + "," +
           r.parameter + "," + format_double(r.truth) + "," + format_double(r.fitted) + "," +
           format_double(r.median) + "," + format_double(r.sd) + "," + format_double(r.lo) + "," +
           format_double(r.hi) + "\n";
  }
  return out;
}

void write_bundle(const ResultBundle& b, const fs::path& dir, bool samples) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());

  json cfg{{"config_hash", b.config_hash}, {"config", json::parse(to_json(b.config))}};
  write_file(dir / "config.json", cfg.dump(2) + "\n");
  write_file(dir / "trace.ndjson", trace_ndjson(b));
  write_file(dir / "timings.ndjson", timings_ndjson(b));
  write_file(dir / "estimates.csv", estimates_csv(b.config_hash, estimate_rows(b)));
  write_file(dir / "metrics.csv", metrics_csv(b.config_hash, b.metrics));

  std::string reps = hash_line(b.config_hash) + "replicate,run_seed,status,stages,error\n";
  for (const auto& r : b.replicates) {
    std::size_t n = 0;
    for (const auto& st : b.stages) n += st.replicate == r.replicate;
    reps += std::to_string(r.replicate) + "," + std::to_string(r.run_seed) + "," + r.status + "," +
            std::to_string(n) + "," + csv_text(r.error) + "\n";
  }
  write_file(dir / "replicates.csv", reps);

  if (samples) {
    write_file(dir / "training.csv", samples_csv(b, true));
    write_file(dir / "bootstrap.csv", samples_csv(b, false));
  }
  if (b.has_shared_network) nn::save(b.shared_network, dir / "network.json");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash: ";
      if (line.rfind(key, 0) == 0) t.config_hash = line.substr(key.size());
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw Error(Errc::IoError, path.string() + ": row has " + std::to_string(row.size()) +
                                     " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(Errc::IoError, path.string() + " has no header");
  return t;
}

std::vector<EstimateRow> read_estimates(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::vector<std::string> expected{"replicate", "stage", "final", "parameter", "truth",
                                          "fitted", "median", "sd", "lo", "hi"};
  if (t.header != expected) throw Error(Errc::IoError, path.string() + " is not an estimates table");
  std::vector<EstimateRow> rows;
  for (const auto& r : t.rows) {
    EstimateRow e;
    e.replicate = parse_size(r[0], path);
    e.stage = r[1];
    e.final = r[2] == "1";
    e.parameter = r[3];
    e.truth = parse_double(r[4], path);
    e.fitted = parse_double(r[5], path);
    e.median = parse_double(r[6], path);
    e.sd = parse_double(r[7], path);
    e.lo = parse_double(r[8], path);
    e.hi = parse_double(r[9], path);
    rows.push_back(std::move(e));
  }
  return rows;
}

ExperimentConfig read_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, path.string() + " is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("config_hash")) return config_from_json(j["config"].dump());
  return config_from_json(j.dump());
}

}  // namespace estim::harness
