#include "rollbot/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rollbot {
namespace {

/// A value token and where it starts (1-based).
struct Token {
  std::string_view text;
  std::size_t line = 0;
  std::size_t column = 0;

  Token sub(std::size_t offset, std::size_t len) const {
    return {text.substr(offset, len), line, column + offset};
  }
};

Token trim(Token t) {
  std::size_t b = 0;
  while (b < t.text.size() && (t.text[b] == ' ' || t.text[b] == '\t' || t.text[b] == '\r')) ++b;
  std::size_t e = t.text.size();
  while (e > b && (t.text[e - 1] == ' ' || t.text[e - 1] == '\t' || t.text[e - 1] == '\r')) --e;
  return t.sub(b, e - b);
}

std::vector<Token> split(const Token& t, char sep) {
  std::vector<Token> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.text.size(); ++i) {
    if (i == t.text.size() || t.text[i] == sep) {
      parts.push_back(trim(t.sub(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

[[noreturn]] void fail(const Token& t, const std::string& what) {
  throw ParseError(t.line, t.column, what);
}

double to_number(const Token& t) {
  double v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.text.empty() || ec != std::errc() || ptr != last) {
    fail(t, "expected a number, got '" + std::string(t.text) + "'");
  }
  return v;
}

long long to_integer(const Token& t) {
  long long v = 0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.text.empty() || ec != std::errc() || ptr != last) {
    fail(t, "expected an integer, got '" + std::string(t.text) + "'");
  }
  return v;
}

std::vector<double> to_list(const Token& t) {
  std::vector<double> out;
  for (const Token& part : split(t, ',')) out.push_back(to_number(part));
  return out;
}

Schedule to_schedule(const Token& t) {
  std::vector<Segment> segs;
  for (const Token& triple : split(t, ';')) {
    if (triple.text.empty()) fail(triple, "empty schedule entry");
    const std::vector<Token> fields = split(triple, ':');
    if (fields.size() != 3) {
      fail(triple, "schedule entry '" + std::string(triple.text) + "' is not t0:t1:value");
    }
    segs.push_back({to_number(fields[0]), to_number(fields[1]), to_number(fields[2])});
  }
  return Schedule(std::move(segs));
}

VectorX<double> to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorX<double>>(v.data(), Eigen::Index(v.size()));
}

using Setter = std::function<void(const Token&)>;
using Section = std::map<std::string, Setter, std::less<>>;

Setter number(double& dst) {
  return [&dst](const Token& t) { dst = to_number(t); };
}

struct Pending {
  std::optional<std::vector<double>> centers_a, widths_a, centers_b, widths_b, consequents;
  std::optional<Schedule> reference, damping;
};

ControllerMode to_mode(const Token& t) {
  const auto m = parse_mode(t.text);
  if (!m) fail(t, "mode must be one of PD, PID, PD+FNN, PID+FNN");
  return *m;
}

void override_params(FnnParams<double>& p, const Pending& pend) {
  const Eigen::Index i = p.size_a();
  const Eigen::Index j = p.size_b();
  auto assign = [](VectorX<double>& dst, const std::optional<std::vector<double>>& src,
                   Eigen::Index n, const char* name) {
    if (!src) return;
    if (Eigen::Index(src->size()) != n) {
      throw ValidationError(std::string("fnn: ") + name + " needs " + std::to_string(n) +
                            " entries");
    }
    dst = to_vector(*src);
  };
  assign(p.centers_a, pend.centers_a, i, "centers_a");
  assign(p.widths_a, pend.widths_a, i, "widths_a");
  assign(p.centers_b, pend.centers_b, j, "centers_b");
  assign(p.widths_b, pend.widths_b, j, "widths_b");
  if (pend.consequents) {
    if (Eigen::Index(pend.consequents->size()) != i * j) {
      throw ValidationError("fnn: consequents needs I*J = " + std::to_string(i * j) + " entries");
    }
    p.consequents = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(pend.consequents->data(), i, j);
  }
}

}  // namespace

SimulationConfig parse_config(std::string_view text) {
  SimulationConfig cfg;
  Pending pend;

  std::map<std::string, Section, std::less<>> sections;
  PlantParams<double>& pl = cfg.plant;
  sections["plant"] = {
      {"sphere_mass", number(pl.sphere_mass)},
      {"pendulum_mass", number(pl.pendulum_mass)},
      {"sphere_radius", number(pl.sphere_radius)},
      {"pendulum_offset", number(pl.pendulum_offset)},
      {"gravity", number(pl.gravity)},
      {"sphere_inertia", number(pl.sphere_inertia)},
      {"pendulum_inertia", number(pl.pendulum_inertia)},
      {"damping", number(pl.damping)},
  };
  ControllerConfig& ct = cfg.controller;
  sections["controller"] = {
      {"kp", number(ct.kp)},
      {"kd", number(ct.kd)},
      {"pi_alpha", number(ct.pi_alpha)},
      {"pi_beta", number(ct.pi_beta)},
      {"integrator_limit", number(ct.integrator_limit)},
      {"mode", [&ct](const Token& t) { ct.mode = to_mode(t); }},
  };
  FnnConfig& fc = cfg.fnn;
  sections["fnn"] = {
      {"num_mf_input1", [&fc](const Token& t) { fc.num_mf_input1 = int(to_integer(t)); }},
      {"num_mf_input2", [&fc](const Token& t) { fc.num_mf_input2 = int(to_integer(t)); }},
      {"range_input1", number(fc.range_input1)},
      {"range_input2", number(fc.range_input2)},
      {"centers_a", [&pend](const Token& t) { pend.centers_a = to_list(t); }},
      {"widths_a", [&pend](const Token& t) { pend.widths_a = to_list(t); }},
      {"centers_b", [&pend](const Token& t) { pend.centers_b = to_list(t); }},
      {"widths_b", [&pend](const Token& t) { pend.widths_b = to_list(t); }},
      {"consequents", [&pend](const Token& t) { pend.consequents = to_list(t); }},
  };
  LearningConfig& lc = cfg.learning;
  sections["learning"] = {
      {"learning_rate", number(lc.learning_rate)},
      {"smoothing", number(lc.smoothing)},
      {"guard", number(lc.guard)},
      {"width_floor", number(lc.width_floor)},
      {"bound_x", number(lc.bound_x)},
      {"bound_x_dot", number(lc.bound_x_dot)},
      {"bound_tau_dot", number(lc.bound_tau_dot)},
      {"sign_mode",
       [&lc](const Token& t) {
         if (t.text == "hard") lc.sign_mode = SignMode::hard;
         else if (t.text == "smoothed") lc.sign_mode = SignMode::smoothed;
         else fail(t, "sign_mode must be hard or smoothed");
       }},
      {"width_normalization",
       [&lc](const Token& t) {
         if (t.text == "shared") lc.width_normalization = WidthNormalization::shared;
         else if (t.text == "per_membership") lc.width_normalization = WidthNormalization::per_membership;
         else fail(t, "width_normalization must be shared or per_membership");
       }},
  };
  Scenario& sc = cfg.scenario;
  sections["scenario"] = {
      {"name", [&sc](const Token& t) {
         if (t.text.empty()) fail(t, "name must not be empty");
         sc.name = std::string(t.text);
       }},
      {"duration", number(sc.duration)},
      {"dt", number(sc.dt)},
      {"snr_db", [&sc](const Token& t) { sc.snr_db = to_number(t); }},
      {"seed", [&sc](const Token& t) {
         const long long v = to_integer(t);
         if (v < 0) fail(t, "seed must be non-negative");
         sc.seed = std::uint64_t(v);
       }},
      {"reference", [&pend](const Token& t) { pend.reference = to_schedule(t); }},
      {"damping", [&pend](const Token& t) { pend.damping = to_schedule(t); }},
      {"mode", [&ct](const Token& t) { ct.mode = to_mode(t); }},
  };

  Section* current = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::string_view raw = text.substr(pos, eol - pos);
    if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const Token line = trim({raw, line_no, 1});
    pos = eol + 1;
    if (line.text.empty()) continue;

    if (line.text.front() == '[') {
      if (line.text.back() != ']') fail(line, "unterminated section header");
      const Token name = trim(line.sub(1, line.text.size() - 2));
      auto it = sections.find(name.text);
      if (it == sections.end()) fail(name, "unknown section '" + std::string(name.text) + "'");
      current = &it->second;
      continue;
    }

    const std::size_t eq = line.text.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key = value");
    const Token key = trim(line.sub(0, eq));
    const Token value = trim(line.sub(eq + 1, line.text.size() - eq - 1));
    if (!current) fail(key, "key outside of any section");
    if (key.text.empty()) fail(key, "missing key");
    auto it = current->find(key.text);
    if (it == current->end()) fail(key, "unknown key '" + std::string(key.text) + "'");
    if (value.text.empty()) fail(value, "missing value for '" + std::string(key.text) + "'");
    it->second(value);
  }

  if (pend.reference) sc.reference = *pend.reference;
  sc.damping = pend.damping ? *pend.damping : Schedule::constant(pl.damping, sc.duration);

  pl.validate();
  ct.validate();
  fc.validate();
  lc.validate();
  sc.validate();
  cfg.fnn_initial = FnnParams<double>::initial(fc);
  override_params(cfg.fnn_initial, pend);
  cfg.fnn_initial.validate();
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace rollbot
