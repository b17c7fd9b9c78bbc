#include "udsp/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "udsp/errors.hpp"

namespace udsp {

auto format_double(double v) -> std::string {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  (void)ec;
  return {buf.data(), end};
}

void atomic_write(const std::filesystem::path &path, const std::string &content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out)
      throw ConfigError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

namespace {

auto csv_rows(double t0, double dt, const std::vector<cplx> &values) -> std::string {
  std::string s = "t,re,im\n";
  s.reserve(values.size() * 64);
  for (std::size_t j = 0; j < values.size(); ++j) {
    s += format_double(t0 + static_cast<double>(j) * dt);
    s += ',';
    s += format_double(values[j].real());
    s += ',';
    s += format_double(values[j].imag());
    s += '\n';
  }
  return s;
}

} // namespace

auto samples_csv(const SampledSignal &x) -> std::string { return csv_rows(x.t0, x.dt, x.values); }
auto kernel_csv(const Kernel &k) -> std::string { return csv_rows(k.t0, k.dt, k.values); }

void write_csv(const std::filesystem::path &path, const SampledSignal &x) {
  atomic_write(path, samples_csv(x));
}

void write_csv(const std::filesystem::path &path, const Kernel &k) {
  atomic_write(path, kernel_csv(k));
}

void write_json(const std::filesystem::path &path, const nlohmann::json &j) {
  atomic_write(path, j.dump(2) + "\n");
}

auto read_text(const std::filesystem::path &path) -> std::string {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

auto read_json(const std::filesystem::path &path) -> nlohmann::json {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

auto read_signal(const std::filesystem::path &path) -> SymbolicSignal {
  const auto j = read_json(path);
  try {
    return j.get<SymbolicSignal>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("invalid signal in '" + path.string() + "': " + e.what());
  }
}

auto read_sampled_csv(const std::filesystem::path &path) -> SampledSignal {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,re,im", 0) != 0)
    throw ConfigError("'" + path.string() + "' lacks the t,re,im header");
  std::vector<double> ts;
  std::vector<cplx> vs;
  auto parse = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw ConfigError("bad number '" + std::string(s) + "' in '" + path.string() + "'");
    return v;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ConfigError("malformed row '" + line + "' in '" + path.string() + "'");
    const std::string_view sv(line);
    ts.push_back(parse(sv.substr(0, c1)));
    vs.emplace_back(parse(sv.substr(c1 + 1, c2 - c1 - 1)), parse(sv.substr(c2 + 1)));
  }
  if (ts.size() < 2)
    throw ConfigError("'" + path.string() + "' needs at least two samples");
  const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  for (std::size_t j = 1; j < ts.size(); ++j)
    if (std::abs(ts[j] - ts[0] - static_cast<double>(j) * dt) > 1e-9 * (1.0 + std::abs(ts[j])))
      throw ConfigError("'" + path.string() + "' is not on a uniform grid");
  return SampledSignal(ts.front(), dt, std::move(vs));
}

} // namespace udsp
