#include "cmwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

namespace cmwave {

namespace {

struct Token {
  std::string_view key;
  std::string_view value;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t value_column = 1;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1, column = 1, i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const std::size_t start = i, tok_line = line, tok_col = column;
    while (i < text.size() && !is_space(text[i]) && text[i] != '#') advance(1);
    const std::string_view word = text.substr(start, i - start);
    const auto eq = word.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError(ErrorCode::ParseError, std::string(word), tok_line, tok_col,
                        "expected key=value, got '" + std::string(word) + "'");
    }
    tokens.push_back({word.substr(0, eq), word.substr(eq + 1), tok_line, tok_col, tok_col + eq + 1});
  }
  return tokens;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

class Reader {
 public:
  explicit Reader(const Token& tok) : tok_(tok) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(ErrorCode::ParseError, std::string(tok_.key), tok_.line, tok_.value_column,
                      message);
  }

  double number(std::string_view s) const {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) fail("invalid number '" + std::string(s) + "'");
    return v;
  }

  double number() const { return number(tok_.value); }

  std::size_t count() const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok_.value.data(), tok_.value.data() + tok_.value.size(), v);
    if (ec != std::errc() || ptr != tok_.value.data() + tok_.value.size() || tok_.value.empty()) {
      fail("invalid count '" + std::string(tok_.value) + "'");
    }
    return v;
  }

  bool boolean() const {
    if (tok_.value == "true" || tok_.value == "1" || tok_.value == "yes") return true;
    if (tok_.value == "false" || tok_.value == "0" || tok_.value == "no") return false;
    fail("invalid boolean '" + std::string(tok_.value) + "'");
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    if (tok_.value.empty()) return out;
    for (auto part : split(tok_.value, ',')) out.push_back(number(part));
    return out;
  }

  Table table(std::span<const std::string_view> args) const {
    if (args.empty() || args.size() % 2 != 0) fail("table needs t:value pairs");
    std::vector<Knot> knots;
    for (std::size_t i = 0; i < args.size(); i += 2) knots.push_back({number(args[i]), number(args[i + 1])});
    try {
      return Table(std::move(knots));
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  FrequencySchedule frequency() const {
    const auto parts = split(tok_.value, ':');
    const auto kind = parts.front();
    const std::span<const std::string_view> args(parts.data() + 1, parts.size() - 1);
    if (kind == "constant" && args.size() == 1) return ConstantFrequency{number(args[0])};
    if (kind == "cosine" && args.size() == 3) {
      return CosineModulatedFrequency{number(args[0]), number(args[1]), number(args[2])};
    }
    if (kind == "table") return table(args);
    fail("unknown frequency schedule '" + std::string(tok_.value) +
         "' (constant:w | cosine:w0:eps:wd | table:t:w:...)");
  }

  DriveSchedule drive() const {
    const auto parts = split(tok_.value, ':');
    const auto kind = parts.front();
    const std::span<const std::string_view> args(parts.data() + 1, parts.size() - 1);
    if (kind == "zero" && args.empty()) return ZeroDrive{};
    if (kind == "constant" && args.size() == 1) return ConstantDrive{number(args[0])};
    if ((kind == "sin" || kind == "sinusoid") && args.size() == 3) {
      return SinusoidDrive{number(args[0]), number(args[1]), number(args[2])};
    }
    if (kind == "table") return table(args);
    fail("unknown drive schedule '" + std::string(tok_.value) +
         "' (zero | constant:x | sin:A:w:phase | table:t:x:...)");
  }

  std::vector<Output> outputs() const {
    std::vector<Output> out;
    if (tok_.value.empty()) return out;
    for (auto part : split(tok_.value, ',')) {
      std::optional<Output> o;
      for (auto cand : {Output::Envelope, Output::Packet, Output::Trajectories, Output::Residuals,
                        Output::FourierCheck}) {
        if (part == to_string(cand)) o = cand;
      }
      if (!o) fail("unknown output '" + std::string(part) + "'");
      if (std::find(out.begin(), out.end(), *o) == out.end()) out.push_back(*o);
    }
    return out;
  }

 private:
  const Token& tok_;
};

void check_times(const std::vector<double>& times, double t_end, const char* field) {
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0 || t > t_end) {
      throw Error(ErrorCode::InvalidArgument, field, "time " + format_number(t) + " outside [0, t_end]");
    }
  }
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_number(xs[i]);
  }
  return out;
}

std::string format_table(const Table& table) {
  std::string out = "table";
  for (const auto& k : table.knots()) out += ":" + format_number(k.t) + ":" + format_number(k.value);
  return out;
}

}  // namespace

FrequencySchedule parse_frequency(std::string_view text) {
  const Token tok{"omega", text, 1, 1, 1};
  return Reader(tok).frequency();
}

DriveSchedule parse_drive(std::string_view text) {
  const Token tok{"drive", text, 1, 1, 1};
  return Reader(tok).drive();
}

std::string_view to_string(Output output) {
  switch (output) {
    case Output::Envelope: return "envelope";
    case Output::Packet: return "packet";
    case Output::Trajectories: return "trajectories";
    case Output::Residuals: return "residuals";
    case Output::FourierCheck: return "fourier_check";
  }
  return "unknown";
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_schedule(const FrequencySchedule& schedule) {
  if (const auto* c = std::get_if<ConstantFrequency>(&schedule)) return "constant:" + format_number(c->omega0);
  if (const auto* c = std::get_if<CosineModulatedFrequency>(&schedule)) {
    return "cosine:" + format_number(c->omega0) + ":" + format_number(c->epsilon) + ":" +
           format_number(c->omega_d);
  }
  return format_table(std::get<Table>(schedule));
}

std::string format_schedule(const DriveSchedule& schedule) {
  if (std::holds_alternative<ZeroDrive>(schedule)) return "zero";
  if (const auto* c = std::get_if<ConstantDrive>(&schedule)) return "constant:" + format_number(c->x_c);
  if (const auto* s = std::get_if<SinusoidDrive>(&schedule)) {
    return "sin:" + format_number(s->amplitude) + ":" + format_number(s->omega_x) + ":" +
           format_number(s->phase);
  }
  return format_table(std::get<Table>(schedule));
}

bool ExperimentConfig::wants(Output o) const {
  return std::find(outputs.begin(), outputs.end(), o) != outputs.end();
}

SolverControls ExperimentConfig::controls() const {
  SolverControls c;
  c.rtol = rtol;
  c.atol = atol;
  c.delta_min = delta_min;
  c.uniform_samples = samples;
  return c;
}

std::vector<double> ExperimentConfig::effective_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<double> out;
  for (int j = -2; j <= 2; ++j) out.push_back(ic.x0 + j * ic.a0);
  return out;
}

std::vector<double> ExperimentConfig::effective_packet_times() const {
  return packet_times.empty() ? std::vector<double>{0.0, t_end} : packet_times;
}

std::vector<double> ExperimentConfig::effective_residual_times() const {
  return residual_times.empty() ? std::vector<double>{t_end / 2} : residual_times;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  bool a0_given = false;
  std::map<std::string, std::size_t, std::less<>> seen;
  for (const Token& tok : tokenize(text)) {
    const Reader r(tok);
    if (seen.contains(tok.key)) {
      throw ConfigError(ErrorCode::ParseError, std::string(tok.key), tok.line, tok.column,
                        "duplicate key '" + std::string(tok.key) + "'");
    }
    seen.emplace(std::string(tok.key), tok.line);
    const auto k = tok.key;
    if (k == "m") cfg.params.m = r.number();
    else if (k == "hbar") cfg.params.hbar = r.number();
    else if (k == "tau") cfg.params.tau = r.number();
    else if (k == "measurement_off") cfg.params.measurement_off = r.boolean();
    else if (k == "lambda") cfg.params.lambda = r.number();
    else if (k == "omega") cfg.params.omega = r.frequency();
    else if (k == "drive") cfg.params.drive = r.drive();
    else if (k == "x0") cfg.ic.x0 = r.number();
    else if (k == "v0") cfg.ic.v0 = r.number();
    else if (k == "a0") { cfg.ic.a0 = r.number(); a0_given = true; }
    else if (k == "b0") cfg.ic.b0 = r.number();
    else if (k == "t_end") cfg.t_end = r.number();
    else if (k == "samples") cfg.samples = r.count();
    else if (k == "window") cfg.window = r.number();
    else if (k == "grid_points") cfg.grid_points = r.count();
    else if (k == "rtol") cfg.rtol = r.number();
    else if (k == "atol") cfg.atol = r.number();
    else if (k == "delta_min") cfg.delta_min = r.number();
    else if (k == "outputs") cfg.outputs = r.outputs();
    else if (k == "seeds") cfg.seeds = r.numbers();
    else if (k == "packet_times") cfg.packet_times = r.numbers();
    else if (k == "residual_times") cfg.residual_times = r.numbers();
    else if (k == "output_dir") cfg.output_dir = std::string(tok.value);
    else {
      throw ConfigError(ErrorCode::UnknownKey, std::string(k), tok.line, tok.column,
                        "unknown key '" + std::string(k) + "'");
    }
  }

  if (!a0_given) cfg.ic.a0 = steady_width(cfg.params).value_or(1.0);
  validate(cfg.params, cfg.ic);

  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end", "t_end must be finite and > 0");
  }
  if (cfg.samples < 2) throw Error(ErrorCode::InvalidArgument, "samples", "need at least 2 samples");
  if (cfg.outputs.empty()) throw Error(ErrorCode::InvalidArgument, "outputs", "no outputs requested");
  if (!(cfg.window > 0.0) || !std::isfinite(cfg.window)) {
    throw Error(ErrorCode::InvalidArgument, "window", "window must be finite and > 0");
  }
  if (cfg.grid_points < 8) throw Error(ErrorCode::InvalidGrid, "grid_points", "need at least 8 points");
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rtol", "tolerances must be > 0");
  }
  if (!(cfg.delta_min > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta_min", "must be > 0");
  for (double s : cfg.seeds) {
    if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteParameter, "seeds", "seeds must be finite");
  }
  check_times(cfg.packet_times, cfg.t_end, "packet_times");
  check_times(cfg.residual_times, cfg.t_end, "residual_times");
  if (cfg.wants(Output::FourierCheck) && !cfg.params.is_free()) {
    throw Error(ErrorCode::InvalidArgument, "outputs",
                "fourier_check needs omega=constant:0, lambda=0 and measurement_off=true");
  }
  if (cfg.output_dir.empty()) throw Error(ErrorCode::InvalidArgument, "output_dir", "must not be empty");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "m=" << format_number(c.params.m) << "\n";
  out << "hbar=" << format_number(c.params.hbar) << "\n";
  out << "tau=" << format_number(c.params.tau) << "\n";
  out << "measurement_off=" << (c.params.measurement_off ? "true" : "false") << "\n";
  out << "lambda=" << format_number(c.params.lambda) << "\n";
  out << "omega=" << format_schedule(c.params.omega) << "\n";
  out << "drive=" << format_schedule(c.params.drive) << "\n";
  out << "x0=" << format_number(c.ic.x0) << "\n";
  out << "v0=" << format_number(c.ic.v0) << "\n";
  out << "a0=" << format_number(c.ic.a0) << "\n";
  out << "b0=" << format_number(c.ic.b0) << "\n";
  out << "t_end=" << format_number(c.t_end) << "\n";
  out << "samples=" << c.samples << "\n";
  out << "window=" << format_number(c.window) << "\n";
  out << "grid_points=" << c.grid_points << "\n";
  out << "rtol=" << format_number(c.rtol) << "\n";
  out << "atol=" << format_number(c.atol) << "\n";
  out << "delta_min=" << format_number(c.delta_min) << "\n";
  out << "outputs=";
  for (std::size_t i = 0; i < c.outputs.size(); ++i) out << (i ? "," : "") << to_string(c.outputs[i]);
  out << "\n";
  if (!c.seeds.empty()) out << "seeds=" << join(c.seeds) << "\n";
  if (!c.packet_times.empty()) out << "packet_times=" << join(c.packet_times) << "\n";
  if (!c.residual_times.empty()) out << "residual_times=" << join(c.residual_times) << "\n";
  out << "output_dir=" << c.output_dir << "\n";
  return out.str();
}

std::string default_config_text() {
  return "# cmwave experiment configuration (defaults)\n"
         "# physical parameters; measurement_off=true removes every 1/tau term\n" +
         serialize_config(parse_config("")) +
         "# optional: seeds=<x,...> packet_times=<t,...> residual_times=<t,...>\n";
}

}  // namespace cmwave
