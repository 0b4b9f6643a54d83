#include "rabctl/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rabctl/errors.hpp"
#include "rabctl/io.hpp"

namespace rabctl {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double to_number(std::string_view key, std::string_view value, std::size_t line) {
  double v = 0.0;
  if (!parse_double(value, v)) {
    throw ConfigError("value for '" + std::string(key) + "' is not a number: '" +
                          std::string(value) + "'",
                      line);
  }
  if (!std::isfinite(v)) {
    throw ConfigError("value for '" + std::string(key) + "' must be finite", line);
  }
  return v;
}

template <typename Fn>
void rethrow_as_config(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  rethrow_as_config([&] { params.validate(); });
  if (!s0.allFinite()) throw ConfigError("initial state (x0, y0, z0) must be finite");
  rethrow_as_config([&] { controller.validate(); });
  if (std::isfinite(grid.dt) && grid.dt > 0.0) {
    rethrow_as_config([&] { controller.delay_samples(grid.dt); });
  }
  rethrow_as_config([&] { grid.validate(); });
  if (!(std::isfinite(analysis.capture_radius) && analysis.capture_radius > 0.0)) {
    throw ConfigError("capture_radius must be a finite positive number");
  }
  if (!(std::isfinite(analysis.tail) && analysis.tail > 0.0)) {
    throw ConfigError("tail must be a finite positive number");
  }
  if (!(analysis.tail < grid.t_end - grid.t0)) {
    throw ConfigError("tail must be shorter than t_end - t0");
  }
  if (out_csv.empty()) throw ConfigError("out_csv must not be empty");
  if (out_report.empty()) throw ConfigError("out_report must not be empty");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  using Setter = std::function<void(std::string_view, std::string_view, std::size_t)>;
  const auto num = [](double& field) -> Setter {
    return [&field](std::string_view key, std::string_view v, std::size_t line) {
      field = to_number(key, v, line);
    };
  };
  const std::map<std::string, Setter, std::less<>> setters = {
      {"a", num(cfg.params.a)},
      {"b", num(cfg.params.b)},
      {"d", num(cfg.params.d)},
      {"h", num(cfg.params.h)},
      {"x0", num(cfg.s0(0))},
      {"y0", num(cfg.s0(1))},
      {"z0", num(cfg.s0(2))},
      {"t0", num(cfg.grid.t0)},
      {"t_end", num(cfg.grid.t_end)},
      {"dt", num(cfg.grid.dt)},
      {"K", num(cfg.controller.K)},
      {"epsilon", num(cfg.controller.epsilon)},
      {"t_on", num(cfg.controller.t_on)},
      {"tau", num(cfg.controller.tau)},
      {"capture_radius", num(cfg.analysis.capture_radius)},
      {"tail", num(cfg.analysis.tail)},
      {"mode",
       [&cfg](std::string_view, std::string_view v, std::size_t line) {
         const auto m = parse_prediction_mode(v);
         if (!m) throw ConfigError("mode must be 'literal' or 'euler'", line);
         cfg.controller.mode = *m;
       }},
      {"out_csv",
       [&cfg](std::string_view, std::string_view v, std::size_t) { cfg.out_csv = std::string(v); }},
      {"out_report",
       [&cfg](std::string_view, std::string_view v, std::size_t) { cfg.out_report = std::string(v); }},
  };

  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("duplicate key '" + std::string(key) + "'", line_no);
    }
    if (value.empty()) throw ConfigError("missing value for '" + std::string(key) + "'", line_no);
    it->second(key, value, line_no);
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto put = [&out](const char* key, double v) {
    out << key << " = " << format_double(v) << '\n';
  };
  put("a", cfg.params.a);
  put("b", cfg.params.b);
  put("d", cfg.params.d);
  put("h", cfg.params.h);
  put("x0", cfg.s0(0));
  put("y0", cfg.s0(1));
  put("z0", cfg.s0(2));
  put("t0", cfg.grid.t0);
  put("t_end", cfg.grid.t_end);
  put("dt", cfg.grid.dt);
  put("K", cfg.controller.K);
  put("epsilon", cfg.controller.epsilon);
  put("t_on", cfg.controller.t_on);
  out << "mode = " << to_string(cfg.controller.mode) << '\n';
  put("tau", cfg.controller.tau);
  put("capture_radius", cfg.analysis.capture_radius);
  put("tail", cfg.analysis.tail);
  out << "out_csv = " << cfg.out_csv << '\n';
  out << "out_report = " << cfg.out_report << '\n';
  return out.str();
}

}  // namespace rabctl
