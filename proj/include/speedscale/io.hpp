#pragma once

#include <speedscale/error.hpp>
#include <speedscale/model.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace speedscale {

struct RatioRecord {
  std::string instance_id;
  std::string family;
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  std::string algorithm;
  double energy = 0.0;
  double preemptive_lb = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool within_bound = false;
};

// Optional provenance written next to generated instances.
struct InstanceMeta {
  std::string generator;
  std::string family;
  std::uint64_t seed = 0;
};

namespace detail {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// DOM builder that keeps floating-point literals as their source text so
// decimals can be converted to rationals exactly.
class ExactNumberSax {
 public:
  explicit ExactNumberSax(json& root) : dom_(root) {}

  bool null() { return dom_.null(); }
  bool boolean(bool v) { return dom_.boolean(v); }
  bool number_integer(json::number_integer_t v) { return dom_.number_integer(v); }
  bool number_unsigned(json::number_unsigned_t v) { return dom_.number_unsigned(v); }
  bool number_float(json::number_float_t, const json::string_t& text) {
    json::string_t copy = text;
    return dom_.string(copy);
  }
  bool string(json::string_t& v) { return dom_.string(v); }
  bool binary(json::binary_t& v) { return dom_.binary(v); }
  bool start_object(std::size_t size) { return dom_.start_object(size); }
  bool key(json::string_t& v) { return dom_.key(v); }
  bool end_object() { return dom_.end_object(); }
  bool start_array(std::size_t size) { return dom_.start_array(size); }
  bool end_array() { return dom_.end_array(); }
  bool parse_error(std::size_t position, const std::string& token, const nlohmann::detail::exception& ex) {
    return dom_.parse_error(position, token, ex);
  }

 private:
  nlohmann::detail::json_sax_dom_parser<json> dom_;
};

inline json parse_json(const std::string& text) {
  json root;
  ExactNumberSax sax(root);
  try {
    json::sax_parse(text, &sax);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return root;
}

inline const json& field(const json& object, const char* name, const std::string& where) {
  if (!object.is_object()) throw Error(ErrorKind::ParseError, where + ": expected an object");
  auto it = object.find(name);
  if (it == object.end()) throw Error(ErrorKind::ParseError, where + ": missing field '" + name + "'");
  return *it;
}

inline Rational rational_field(const json& object, const char* name, const std::string& where) {
  const json& v = field(object, name, where);
  std::optional<Rational> q;
  if (v.is_string()) {
    q = parse_rational(v.get<std::string>());
  } else if (v.is_number_integer()) {
    q = Rational(mpz_class(v.dump(), 10));
  }
  if (!q) throw Error(ErrorKind::ParseError, where + "." + name + ": expected a rational (\"p/q\" or decimal)");
  return *q;
}

inline double real_field(const json& object, const char* name, const std::string& where) {
  const json& v = field(object, name, where);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return d;
  }
  throw Error(ErrorKind::ParseError, where + "." + name + ": expected a number");
}

inline long integer_field(const json& object, const char* name, const std::string& where) {
  const json& v = field(object, name, where);
  if (!v.is_number_integer()) throw Error(ErrorKind::ParseError, where + "." + name + ": expected an integer");
  return v.get<long>();
}

inline std::string string_field(const json& object, const char* name, const std::string& where) {
  const json& v = field(object, name, where);
  if (!v.is_string()) throw Error(ErrorKind::ParseError, where + "." + name + ": expected a string");
  return v.get<std::string>();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances

inline Instance parse_instance(const std::string& text) {
  const detail::json root = detail::parse_json(text);
  Instance instance;
  instance.alpha = detail::real_field(root, "alpha", "instance");
  instance.machines = static_cast<int>(detail::integer_field(root, "machines", "instance"));
  const detail::json& jobs = detail::field(root, "jobs", "instance");
  if (!jobs.is_array()) throw Error(ErrorKind::ParseError, "instance.jobs: expected an array");
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const std::string where = "jobs[" + std::to_string(k) + "]";
    instance.jobs.push_back({detail::string_field(jobs[k], "id", where), detail::rational_field(jobs[k], "work", where),
                             detail::rational_field(jobs[k], "release", where),
                             detail::rational_field(jobs[k], "deadline", where)});
  }
  validate(instance);
  return instance;
}

inline std::string write_instance(const Instance& instance, const std::optional<InstanceMeta>& meta = std::nullopt) {
  detail::ordered_json root;
  root["alpha"] = instance.alpha;
  root["machines"] = instance.machines;
  root["jobs"] = detail::ordered_json::array();
  for (const Job& job : instance.jobs) {
    detail::ordered_json j;
    j["id"] = job.id;
    j["work"] = to_string(job.work);
    j["release"] = to_string(job.release);
    j["deadline"] = to_string(job.deadline);
    root["jobs"].push_back(std::move(j));
  }
  if (meta) {
    root["meta"] = {{"generator", meta->generator}, {"family", meta->family}, {"seed", meta->seed}};
  }
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Schedules

/// Pieces are emitted in (machine, start) order with rationals as "p/q";
/// energies are per job (instance order) and in total.
inline std::string write_schedule(const Instance& instance, const Schedule& schedule, Mode mode) {
  Schedule ordered = schedule;
  sort_pieces(ordered);
  detail::ordered_json root;
  root["mode"] = mode == Mode::Preemptive ? "preemptive" : "nonpreemptive";
  root["pieces"] = detail::ordered_json::array();
  for (const ExecutionPiece& p : ordered.pieces) {
    detail::ordered_json j;
    j["job"] = p.job;
    j["machine"] = p.machine;
    j["start"] = to_string(p.start);
    j["end"] = to_string(p.end);
    j["speed"] = to_string(p.speed);
    root["pieces"].push_back(std::move(j));
  }
  const std::vector<double> per_job = job_energies(instance, ordered);
  root["jobs"] = detail::ordered_json::array();
  double total = 0.0;
  for (std::size_t k = 0; k < instance.jobs.size(); ++k) {
    root["jobs"].push_back({{"id", instance.jobs[k].id}, {"energy", per_job[k]}});
    total += per_job[k];
  }
  root["energy"] = total;
  return root.dump(2) + "\n";
}

struct ScheduleFile {
  Mode mode = Mode::NonPreemptive;
  Schedule schedule;
  double energy = 0.0;
};

inline ScheduleFile parse_schedule(const std::string& text) {
  const detail::json root = detail::parse_json(text);
  ScheduleFile file;
  const std::string mode = detail::string_field(root, "mode", "schedule");
  if (mode == "preemptive") {
    file.mode = Mode::Preemptive;
  } else if (mode == "nonpreemptive") {
    file.mode = Mode::NonPreemptive;
  } else {
    throw Error(ErrorKind::ParseError, "schedule.mode: expected \"preemptive\" or \"nonpreemptive\"");
  }
  const detail::json& pieces = detail::field(root, "pieces", "schedule");
  if (!pieces.is_array()) throw Error(ErrorKind::ParseError, "schedule.pieces: expected an array");
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const std::string where = "pieces[" + std::to_string(k) + "]";
    file.schedule.pieces.push_back({detail::string_field(pieces[k], "job", where),
                                    static_cast<int>(detail::integer_field(pieces[k], "machine", where)),
                                    detail::rational_field(pieces[k], "start", where),
                                    detail::rational_field(pieces[k], "end", where),
                                    detail::rational_field(pieces[k], "speed", where)});
  }
  if (root.contains("energy")) file.energy = detail::real_field(root, "energy", "schedule");
  return file;
}

// ---------------------------------------------------------------------------
// Benchmark reports

inline constexpr const char* kReportHeader =
    "instance_id,family,n,m,alpha,algorithm,energy,preemptive_lb,ratio,bound,within_bound";

inline bool within_bound(double ratio, double bound) { return ratio <= bound * (1.0 + 1e-9); }

inline std::string write_report(const std::vector<RatioRecord>& rows) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const RatioRecord& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", detail::csv_field(r.instance_id), detail::csv_field(r.family),
                       r.n, r.m, r.alpha, detail::csv_field(r.algorithm), r.energy, r.preemptive_lb, r.ratio, r.bound,
                       r.within_bound ? "true" : "false");
  }
  return out;
}

}  // namespace speedscale
