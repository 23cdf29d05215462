#include "estim/harness/plotdata.hpp"

#include <fstream>
#include <map>
#include <tuple>

#include "estim/error.hpp"

namespace estim::harness {

namespace fs = std::filesystem;

namespace {

using Key = std::tuple<std::size_t, std::string, std::string>;

std::map<Key, std::vector<std::string>> index_samples(const CsvTable& t) {
  std::map<Key, std::vector<std::string>> out;
  for (const auto& r : t.rows) {
    if (r.size() != 4) throw Error(Errc::IoError, "sample table rows need four cells");
    out[{std::stoul(r[0]), r[1], r[2]}].push_back(r[3]);
  }
  return out;
}

void add(std::vector<PlotRow>& out, const EstimateRow& e, const char* role, double v) {
  out.push_back({e.replicate, e.stage, e.parameter, role, format_double(v)});
}

}  // namespace

std::vector<PlotRow> boxplot_rows(const std::vector<EstimateRow>& estimates, const CsvTable& training,
                                  const CsvTable& bootstrap) {
  const auto train = index_samples(training);
  const auto boot = index_samples(bootstrap);
  std::vector<PlotRow> out;
  for (const auto& e : estimates) {
    const Key key{e.replicate, e.stage, e.parameter};
    if (auto it = train.find(key); it != train.end()) {
      for (const auto& v : it->second) out.push_back({e.replicate, e.stage, e.parameter, "train", v});
    }
    if (auto it = boot.find(key); it != boot.end()) {
      for (const auto& v : it->second) out.push_back({e.replicate, e.stage, e.parameter, "bootstrap", v});
    }
    add(out, e, "fitted", e.fitted);
    add(out, e, "truth", e.truth);
  }
  return out;
}

std::vector<PlotRow> scatter_rows(const std::vector<EstimateRow>& estimates) {
  bool sequential = false;
  for (const auto& e : estimates) sequential = sequential || e.final;
  std::vector<PlotRow> out;
  for (const auto& e : estimates) {
    if (sequential && !e.final) continue;
    add(out, e, "fitted", e.fitted);
    add(out, e, "truth", e.truth);
  }
  return out;
}

std::vector<PlotRow> interval_rows(const std::vector<EstimateRow>& estimates) {
  std::vector<PlotRow> out;
  for (const auto& e : estimates) {
    add(out, e, "lo", e.lo);
    add(out, e, "hi", e.hi);
    add(out, e, "fitted", e.fitted);
    add(out, e, "truth", e.truth);
  }
  return out;
}

std::string plot_csv(const std::string& config_hash, const std::vector<PlotRow>& rows) {
  std::string out = "# config_hash: " + config_hash + "\nreplicate,iteration,parameter,role,value\n";
  for (const auto& r : rows) {
    out += std::to_string(r.replicate) + "," + r.iteration + "," + r.parameter + "," + r.role + "," +
           r.value + "\n";
  }
  return out;
}

void emit_plotdata(const fs::path& dir) {
  const auto est_table = read_csv(dir / "estimates.csv");
  const auto estimates = read_estimates(dir / "estimates.csv");
  CsvTable training, bootstrap;
  if (fs::exists(dir / "training.csv")) training = read_csv(dir / "training.csv");
  if (fs::exists(dir / "bootstrap.csv")) bootstrap = read_csv(dir / "bootstrap.csv");
  const std::string& hash = est_table.config_hash;
  auto write = [&](const char* name, const std::vector<PlotRow>& rows) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + (dir / name).string());
    out << plot_csv(hash, rows);
    if (!out) throw Error(Errc::IoError, "write failed for " + (dir / name).string());
  };
  write("plot_boxplot.csv", boxplot_rows(estimates, training, bootstrap));
  write("plot_scatter.csv", scatter_rows(estimates));
  write("plot_intervals.csv", interval_rows(estimates));
}

}  // namespace estim::harness
