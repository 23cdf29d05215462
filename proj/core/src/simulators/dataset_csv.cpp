#include "estim/simulators/dataset_csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "estim/error.hpp"

namespace estim::sim {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b == e) return false;
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

}  // namespace

void write_dataset_csv(const std::filesystem::path& path, const DatasetMeta& meta,
                       const std::vector<Tensor>& replicates) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  const std::size_t width = replicates.empty() ? shape_product(meta.shape) : replicates[0].size();
  out << "# model: " << meta.model << "; shape: " << shape_string(meta.shape) << '\n';
  out << "replicate,seed";
  for (const auto& [name, value] : meta.params) out << ',' << name;
  for (std::size_t i = 0; i < width; ++i) out << ",x" << i;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < replicates.size(); ++r) {
    if (replicates[r].size() != width) {
      throw Error(Errc::ShapeMismatch, "replicates differ in size");
    }
    out << r << ',' << meta.seed;
    for (const auto& [name, value] : meta.params) out << ',' << value;
    for (double v : replicates[r].values()) out << ',' << v;
    out << '\n';
  }
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  Dataset ds;
  std::string line;
  std::vector<std::string> header;
  std::size_t first_x = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto m = line.find("model: ");
      const auto s = line.find("shape: ");
      if (m != std::string::npos) {
        ds.meta.model = line.substr(m + 7, line.find(';', m) - (m + 7));
      }
      if (s != std::string::npos) {
        for (const auto& e : split(line.substr(s + 7), 'x')) {
          ds.meta.shape.push_back(std::stoul(e));
        }
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (header.empty()) {
      header = cells;
      if (header.size() < 3 || header[0] != "replicate" || header[1] != "seed") {
        throw Error(Errc::IoError, path.string() + ": not a dataset CSV");
      }
      first_x = 2;
      while (first_x < header.size() && header[first_x].rfind("x", 0) != 0) {
        ds.meta.params.emplace_back(header[first_x], 0.0);
        ++first_x;
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(Errc::IoError, path.string() + ": row width differs from header");
    }
    std::vector<double> values(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!parse_double(cells[i], values[i])) {
        throw Error(Errc::IoError, path.string() + ": non-numeric cell '" + cells[i] + "'");
      }
    }
    ds.meta.seed = std::stoull(cells[1]);
    for (std::size_t p = 0; p < ds.meta.params.size(); ++p) {
      ds.meta.params[p].second = values[2 + p];
    }
    std::vector<double> x(values.begin() + static_cast<std::ptrdiff_t>(first_x), values.end());
    std::vector<std::size_t> shape = ds.meta.shape;
    if (shape_product(shape) != x.size()) shape = {x.size()};
    ds.replicates.emplace_back(shape, std::move(x));
  }
  return ds;
}

Tensor read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cell = split(line, ',').front();
    double v = 0.0;
    if (!parse_double(cell, v)) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(Errc::IoError, path.string() + ": non-numeric value '" + cell + "'");
    }
    first = false;
    values.push_back(v);
  }
  if (values.empty()) throw Error(Errc::EmptySample, path.string() + " holds no values");
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

}  // namespace estim::sim
