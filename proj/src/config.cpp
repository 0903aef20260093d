#include "svlift/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "svlift/csv.hpp"

namespace svlift {

ValidationError::ValidationError(std::vector<Violation> v)
    : std::runtime_error("model violates the structural assumptions\n" + describe(v)), violations_(std::move(v)) {}

namespace toml {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Document run() {
    Document doc;
    std::string section;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        section = read_key();
        skip_spaces();
        expect(']');
        end_of_line();
        continue;
      }
      const int key_line = line_;
      const std::string key = read_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      Value v = read_value();
      end_of_line();
      const std::string full = section.empty() ? key : section + "." + key;
      if (doc.count(full)) fail(key_line, "duplicate key '" + full + "'");
      v.line = key_line;
      doc.emplace(full, std::move(v));
    }
    return doc;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(line_, msg); }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  // Inside arrays newlines and comments are whitespace.
  void skip_all() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      return;
    }
  }

  void skip_blank_lines() { skip_all(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
    ++line_;
  }

  std::string read_key() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  Value read_value() {
    if (eof()) fail("missing value");
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      ++pos_;
      v.kind = Value::Kind::String;
      while (!eof() && peek() != '"') {
        if (peek() == '\n') fail("unterminated string");
        v.text.push_back(peek());
        ++pos_;
      }
      expect('"');
      return v;
    }
    if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::Array;
      skip_all();
      while (!eof() && peek() != ']') {
        v.items.push_back(read_value());
        skip_all();
        if (!eof() && peek() == ',') {
          ++pos_;
          skip_all();
        } else {
          break;
        }
      }
      skip_all();
      expect(']');
      return v;
    }
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '-' ||
                      peek() == '+' || peek() == '_'))
      ++pos_;
    const std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("expected a value");
    if (tok == "true" || tok == "false") {
      v.kind = Value::Kind::Bool;
      v.boolean = tok == "true";
      return v;
    }
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits.push_back(ch);
    v.kind = Value::Kind::Number;
    v.text = digits;
    const char* first = digits.data();
    const char* last = first + digits.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v.number);
    if (res.ec != std::errc() || res.ptr != last) fail("'" + tok + "' is not a number");
    return v;
  }
};

}  // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

}  // namespace toml

namespace {

using toml::Document;
using toml::Value;

class Reader {
 public:
  explicit Reader(const Document& doc) : doc_(doc) {}

  bool has(const std::string& key) const { return doc_.count(key) > 0; }

  const Value& get(const std::string& key) {
    used_.insert(key);
    const auto it = doc_.find(key);
    if (it == doc_.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
  }

  [[noreturn]] static void fail(const Value& v, const std::string& msg) {
    throw ConfigError("line " + std::to_string(v.line) + ": " + msg);
  }

  static double number(const Value& v, const std::string& what) {
    if (v.kind != Value::Kind::Number) fail(v, what + " must be a number");
    return v.number;
  }

  static std::uint64_t unsigned_int(const Value& v, const std::string& what) {
    if (v.kind != Value::Kind::Number) fail(v, what + " must be an integer");
    std::uint64_t out = 0;
    const char* last = v.text.data() + v.text.size();
    const auto res = std::from_chars(v.text.data(), last, out);
    if (res.ec != std::errc() || res.ptr != last) fail(v, what + " must be a nonnegative integer");
    return out;
  }

  static std::vector<double> vector(const Value& v, const std::string& what) {
    if (v.kind == Value::Kind::Number) return {v.number};
    if (v.kind != Value::Kind::Array) fail(v, what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& item : v.items) out.push_back(number(item, what));
    return out;
  }

  void read(const std::string& key, double& out) {
    if (has(key)) out = number(get(key), key);
  }
  void read(const std::string& key, std::size_t& out) {
    if (has(key)) out = static_cast<std::size_t>(unsigned_int(get(key), key));
  }
  void read(const std::string& key, std::vector<double>& out) {
    if (has(key)) out = vector(get(key), key);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : doc_)
      if (!used_.count(key)) fail(value, "unknown key '" + key + "'");
  }

 private:
  const Document& doc_;
  std::set<std::string> used_;
};

void fill_tensor(const Value& v, std::vector<double>& out, std::size_t d, std::size_t m, std::size_t d2,
                 const std::string& what) {
  auto bad = [&] {
    Reader::fail(v, what + " must have shape " + std::to_string(d) + " x " + std::to_string(m) + " x " +
                        std::to_string(d2));
  };
  if (v.kind != Value::Kind::Array || v.items.size() != d) bad();
  out.assign(d * m * d2, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& vi = v.items[i];
    if (vi.kind != Value::Kind::Array || vi.items.size() != m) bad();
    for (std::size_t j = 0; j < m; ++j) {
      const auto& vij = vi.items[j];
      if (vij.kind != Value::Kind::Array || vij.items.size() != d2) bad();
      for (std::size_t k = 0; k < d2; ++k) out[(i * m + j) * d2 + k] = Reader::number(vij.items[k], what);
    }
  }
}

}  // namespace

RunConfig parse_config_unchecked(std::string_view text) {
  const Document doc = toml::parse(text);
  Reader r(doc);
  RunConfig cfg;
  AffineModel& model = cfg.model;

  const Value& v0 = r.get("model.V0");
  model.initial.v0 = Reader::vector(v0, "model.V0");
  const std::size_t d = model.initial.v0.size();
  if (d == 0) Reader::fail(v0, "model.V0 must be nonempty");
  model.d = d;
  model.d_tilde = static_cast<std::size_t>(Reader::unsigned_int(r.get("model.d_tilde"), "model.d_tilde"));

  const Value& beta = r.get("model.beta");
  if (beta.kind != Value::Kind::Array || beta.items.size() != d)
    Reader::fail(beta, "model.beta must be a " + std::to_string(d) + " x " + std::to_string(d) + " matrix");
  for (const auto& row : beta.items) {
    const auto vals = Reader::vector(row, "model.beta");
    if (row.kind != Value::Kind::Array || vals.size() != d)
      Reader::fail(row, "model.beta rows must have " + std::to_string(d) + " entries");
    model.beta.insert(model.beta.end(), vals.begin(), vals.end());
  }

  const Value& sigma = r.get("model.sigma");
  if (sigma.kind != Value::Kind::Array || sigma.items.empty() || sigma.items[0].kind != Value::Kind::Array)
    Reader::fail(sigma, "model.sigma must be a d x m x d array");
  model.m = sigma.items[0].items.size();
  if (model.m == 0) Reader::fail(sigma, "model.sigma needs at least one Brownian driver");
  fill_tensor(sigma, model.sigma, d, model.m, d, "model.sigma");
  if (r.has("model.c")) fill_tensor(r.get("model.c"), model.c, d, model.m, d, "model.c");
  else model.c.assign(d * model.m * d, 0.0);

  if (r.has("model.initial")) {
    const Value& init = r.get("model.initial");
    if (init.kind != Value::Kind::String) Reader::fail(init, "model.initial must be a string");
    if (init.text == "dirac_at_zero") model.initial.kind = InitialKind::DiracAtZero;
    else if (init.text == "dirac_plus_power") model.initial.kind = InitialKind::DiracPlusPower;
    else Reader::fail(init, "model.initial must be \"dirac_at_zero\" or \"dirac_plus_power\"");
  }
  r.read("model.mu", model.initial.mu_exponent);

  const Value& alpha = r.get("kernel.alpha");
  model.kernel.alpha = Reader::vector(alpha, "kernel.alpha");
  if (alpha.kind == Value::Kind::Number) model.kernel.alpha.assign(d, alpha.number);
  if (model.kernel.alpha.size() != d)
    Reader::fail(alpha, "kernel.alpha needs " + std::to_string(d) + " entries");
  model.kernel.delta = Reader::number(r.get("kernel.delta"), "kernel.delta");

  SimConfig& sim = cfg.sim;
  r.read("sim.dt", sim.dt);
  r.read("sim.horizon", sim.horizon);
  r.read("sim.n_paths", sim.n_paths);
  r.read("sim.record_grid", sim.record_grid);
  r.read("sim.n_nodes", sim.n_nodes);
  r.read("sim.tail_width", sim.tail_width);
  if (r.has("sim.threads")) sim.threads = static_cast<int>(Reader::unsigned_int(r.get("sim.threads"), "sim.threads"));
  if (r.has("sim.seed")) cfg.seed = Reader::unsigned_int(r.get("sim.seed"), "sim.seed");

  ExperimentParams& e = cfg.experiment;
  r.read("experiment.check_nodes", e.check_nodes);
  r.read("experiment.check_points", e.check_points);
  r.read("experiment.kernel_tol", e.kernel_tol);
  r.read("experiment.mean_times", e.mean_times);
  r.read("experiment.z_gate", e.z_gate);
  r.read("experiment.u", e.u);
  r.read("experiment.laplace_times", e.laplace_times);
  r.read("experiment.riccati_steps", e.riccati_steps);
  r.read("experiment.mu", e.mu);
  r.read("experiment.bound_times", e.bound_times);
  r.read("experiment.bound_tol", e.bound_tol);
  r.read("experiment.bound_from", e.bound_from);
  r.read("experiment.kb_T", e.kb_T);
  r.read("experiment.kb_samples", e.kb_samples);
  r.read("experiment.offset_h", e.offset_h);
  r.read("experiment.w1_factor", e.w1_factor);
  r.read("experiment.power_factor", e.power_factor);

  r.reject_unknown();
  return cfg;
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg = parse_config_unchecked(text);
  auto violations = validate(cfg.model);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  try {
    check_config(cfg.sim);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("[sim]: ") + ex.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace {

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + csv::fmt(v[i]);
  return s + "]";
}

std::string tensor(const std::vector<double>& t, std::size_t d, std::size_t m, std::size_t d2) {
  std::string s = "[";
  for (std::size_t i = 0; i < d; ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < m; ++j)
      s += (j ? ", " : "") + list(std::vector<double>(t.begin() + (i * m + j) * d2, t.begin() + (i * m + j + 1) * d2));
    s += "]";
  }
  return s + "]";
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  const AffineModel& m = cfg.model;
  const ExperimentParams& e = cfg.experiment;
  std::ostringstream os;
  os << "[kernel]\n"
     << "alpha = " << list(m.kernel.alpha) << "\n"
     << "delta = " << csv::fmt(m.kernel.delta) << "\n\n";
  os << "[model]\n"
     << "d_tilde = " << m.d_tilde << "\n"
     << "beta = [";
  for (std::size_t i = 0; i < m.d; ++i)
    os << (i ? ", " : "") << list(std::vector<double>(m.beta.begin() + i * m.d, m.beta.begin() + (i + 1) * m.d));
  os << "]\n"
     << "sigma = " << tensor(m.sigma, m.d, m.m, m.d) << "\n"
     << "c = " << tensor(m.c, m.d, m.m, m.d) << "\n"
     << "V0 = " << list(m.initial.v0) << "\n"
     << "initial = \"" << (m.initial.kind == InitialKind::DiracAtZero ? "dirac_at_zero" : "dirac_plus_power") << "\"\n"
     << "mu = " << csv::fmt(m.initial.mu_exponent) << "\n\n";
  os << "[sim]\n"
     << "dt = " << csv::fmt(cfg.sim.dt) << "\n"
     << "horizon = " << csv::fmt(cfg.sim.horizon) << "\n"
     << "n_paths = " << cfg.sim.n_paths << "\n"
     << "record_grid = " << list(cfg.sim.record_grid) << "\n"
     << "n_nodes = " << cfg.sim.n_nodes << "\n"
     << "tail_width = " << csv::fmt(cfg.sim.tail_width) << "\n"
     << "threads = " << cfg.sim.threads << "\n"
     << "seed = " << cfg.seed << "\n\n";
  os << "[experiment]\n"
     << "check_nodes = " << e.check_nodes << "\n"
     << "check_points = " << e.check_points << "\n"
     << "kernel_tol = " << csv::fmt(e.kernel_tol) << "\n"
     << "mean_times = " << list(e.mean_times) << "\n"
     << "z_gate = " << csv::fmt(e.z_gate) << "\n"
     << "u = " << csv::fmt(e.u) << "\n"
     << "laplace_times = " << list(e.laplace_times) << "\n"
     << "riccati_steps = " << e.riccati_steps << "\n"
     << "mu = " << csv::fmt(e.mu) << "\n"
     << "bound_times = " << list(e.bound_times) << "\n"
     << "bound_tol = " << csv::fmt(e.bound_tol) << "\n"
     << "bound_from = " << csv::fmt(e.bound_from) << "\n"
     << "kb_T = " << csv::fmt(e.kb_T) << "\n"
     << "kb_samples = " << e.kb_samples << "\n"
     << "offset_h = " << csv::fmt(e.offset_h) << "\n"
     << "w1_factor = " << csv::fmt(e.w1_factor) << "\n"
     << "power_factor = " << csv::fmt(e.power_factor) << "\n";
  return os.str();
}

}  // namespace svlift
