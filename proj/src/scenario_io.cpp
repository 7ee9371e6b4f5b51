#include "ecspade/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace ecspade {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidScenario, msg); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::string_view key) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    bad("cannot parse value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<double> default_betas() {
  std::vector<double> betas;
  for (int i = 3; i <= 10; ++i) betas.push_back(i / 10.0);
  return betas;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_number<double>(part, "list"));
  if (out.empty()) bad("empty list");
  return out;
}

std::vector<DetectorId> parse_detector_list(std::string_view text) {
  std::vector<DetectorId> out;
  for (auto part : split(text, ',')) {
    const auto id = parse_detector(part);
    if (!id) bad("unknown detector '" + std::string(part) + "'");
    out.push_back(*id);
  }
  return out;
}

RunSpec parse_scenario(std::string_view text) {
  RunSpec spec;
  spec.betas = default_betas();
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) bad("line " + std::to_string(line_no) + ": duplicate key " + std::string(key));

    Scenario& s = spec.scenario;
    if (key == "d") s.d = parse_number<int>(value, key);
    else if (key == "nu") s.nu = parse_number<double>(value, key);
    else if (key == "mu_fill") s.mu_fill = parse_number<double>(value, key);
    else if (key == "target_T") s.target_T = parse_number<double>(value, key);
    else if (key == "alpha") s.alpha = parse_number<double>(value, key);
    else if (key == "beta") spec.betas = parse_double_list(value);
    else if (key == "n_pairs") s.n_pairs = parse_number<std::int64_t>(value, key);
    else if (key == "n_trials") s.n_trials = parse_number<int>(value, key);
    else if (key == "seed") s.seed = parse_number<std::uint64_t>(value, key);
    else if (key == "detectors") s.detectors = parse_detector_list(value);
    else if (key == "constrained_alpha") {
      if (value == "true") s.constrained_alpha = true;
      else if (value == "false") s.constrained_alpha = false;
      else bad("constrained_alpha must be true or false");
    } else {
      bad("line " + std::to_string(line_no) + ": unknown key " + std::string(key));
    }
  }
  for (double beta : spec.betas) {
    if (!(beta > 0.0 && beta <= 1.0)) bad("beta values must lie in (0, 1]");
  }
  spec.scenario.beta = spec.betas.front();
  spec.scenario.validate();
  return spec;
}

RunSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

RunSpec preset(std::string_view name) {
  RunSpec spec;
  spec.betas = default_betas();
  spec.scenario.d = 10;
  spec.scenario.nu = 10.0;
  spec.scenario.mu_fill = 2.0;
  if (name == "fig1") {
    spec.scenario.alpha = 0.2;
    spec.scenario.target_T = 15.0;
  } else if (name == "fig2") {
    spec.scenario.alpha = 0.6;
    spec.scenario.target_T = 5.0;
  } else {
    bad("unknown preset '" + std::string(name) + "' (expected fig1 or fig2)");
  }
  spec.scenario.beta = spec.betas.front();
  return spec;
}

}  // namespace ecspade
