#include "estim/sequential/trace_io.hpp"

#include <fstream>

#include "estim/error.hpp"
#include "json.hpp"

namespace estim::seq {

using nlohmann::json;

namespace {

json bounds_json(const ParamBounds& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

ParamBounds bounds_from(const json& j) {
  return {j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>()};
}

}  // namespace

std::string to_ndjson(const IterationTrace& rec, const TraceContext& ctx) {
  const auto& s = rec.summary;
  json j;
  j["config_hash"] = ctx.config_hash;
  j["replicate"] = ctx.replicate;
  j["iteration"] = rec.iteration;
  j["parameters"] = ctx.param_names;
  j["bounds"] = bounds_json(rec.bounds);
  j["n_fresh"] = rec.n_fresh;
  j["n_replay"] = rec.n_replay;
  j["train_seed"] = rec.train_seed;
  j["learning_rate"] = rec.learning_rate;
  j["lr_retry"] = rec.lr_retry;
  j["final_loss"] = rec.final_loss;
  j["theta_hat"] = rec.theta_hat;
  j["bootstrap"] = {{"B", s.B()},        {"median", s.median}, {"sd", s.sd},
                    {"bias", s.bias},    {"lo", s.lo},         {"hi", s.hi},
                    {"alpha_lo", s.alpha_lo}, {"alpha_hi", s.alpha_hi},
                    {"rescale", s.rescale}};
  std::vector<bool> within(rec.decision.within.begin(), rec.decision.within.end());
  j["within_tolerance"] = within;
  j["stopped"] = rec.stopped;
  if (!rec.stopped && !rec.next.bounds.lo.empty()) {
    j["next_bounds"] = bounds_json(rec.next.bounds);
    j["widened"] = std::vector<bool>(rec.next.widened.begin(), rec.next.widened.end());
    j["degenerate_bootstrap"] = rec.next.degenerate;
  }
  return j.dump();
}

TraceRecord parse_trace_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    TraceRecord r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.replicate = j.at("replicate").get<std::size_t>();
    r.iteration = j.at("iteration").get<std::size_t>();
    r.bounds = bounds_from(j.at("bounds"));
    r.n_fresh = j.at("n_fresh").get<std::size_t>();
    r.n_replay = j.at("n_replay").get<std::size_t>();
    r.theta_hat = j.at("theta_hat").get<std::vector<double>>();
    const auto& b = j.at("bootstrap");
    r.B = b.at("B").get<std::size_t>();
    r.median = b.at("median").get<std::vector<double>>();
    r.sd = b.at("sd").get<std::vector<double>>();
    r.bias = b.at("bias").get<std::vector<double>>();
    r.lo = b.at("lo").get<std::vector<double>>();
    r.hi = b.at("hi").get<std::vector<double>>();
    r.stopped = j.at("stopped").get<bool>();
    if (j.contains("next_bounds")) r.next_bounds = bounds_from(j.at("next_bounds"));
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::IoError, std::string("malformed trace line: ") + e.what());
  }
}

std::vector<TraceRecord> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_trace_line(line));
  }
  return out;
}

}  // namespace estim::seq
