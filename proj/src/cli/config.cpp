#include <openssl/evp.h>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "thermo/cli.hpp"
#include "thermo/error.hpp"

namespace thermo::cli {

namespace {

std::vector<std::string> split(const std::string& text, const std::string& seps) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(seps));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<std::vector<double>> parse_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ";")) rows.push_back(parse_numbers(row));
  return rows;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  const auto rows = split(text, ",");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto vals = parse_numbers(rows[i]);
    if (i == 0) m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(vals.size()));
    if (static_cast<Eigen::Index>(vals.size()) != m.cols()) throw ConfigError("ragged matrix '" + text + "'");
    for (std::size_t j = 0; j < vals.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[j];
  }
  return m;
}

}  // namespace

double parse_number(const std::string& raw) {
  std::string t = boost::trim_copy(raw);
  if (t.empty()) throw ConfigError("empty number");
  if (t[0] == '-' && t.size() > 1 && !std::isdigit(static_cast<unsigned char>(t[1])) && t[1] != '.')
    return -parse_number(t.substr(1));
  if (boost::starts_with(t, "log(") && boost::ends_with(t, ")")) {
    const double x = parse_number(t.substr(4, t.size() - 5));
    if (!(x > 0.0)) throw ConfigError("log of a non-positive number in '" + raw + "'");
    return std::log(x);
  }
  if (const auto slash = t.find('/'); slash != std::string::npos)
    return parse_number(t.substr(0, slash)) / parse_number(t.substr(slash + 1));
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size()) throw ConfigError("not a number: '" + raw + "'");
  return v;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, " \t,")) out.push_back(parse_number(tok));
  return out;
}

RunConfig RunConfig::load(const std::string& path, Overrides overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), overrides);
}

RunConfig RunConfig::parse(const std::string& text, Overrides overrides) {
  RunConfig c;
  c.text_ = text;
  c.overrides_ = overrides;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const bool sft = c.has_section("sft"), ifs = c.has_section("ifs");
  if (sft == ifs) throw ConfigError("the config needs exactly one of [sft] and [ifs]");
  return c;
}

std::string RunConfig::digest() const {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text_.data(), text_.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

bool RunConfig::has_section(const std::string& name) const { return tree_.find(name) != tree_.not_found(); }

std::optional<std::string> RunConfig::find(const std::string& path) const {
  if (auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.'))) {
    return boost::trim_copy(*v);
  }
  return std::nullopt;
}

std::string RunConfig::get(const std::string& path) const {
  auto v = find(path);
  if (!v) throw ConfigError("missing key '" + path + "'");
  return *v;
}

SftPtr RunConfig::sft() const {
  if (has_section("ifs")) return ifs()->sft();
  if (auto m = find("sft.m")) return std::make_shared<const Sft>(Sft::full_shift(static_cast<int>(parse_number(*m))));
  Sft::Matrix a;
  for (const auto& row : parse_rows(get("sft.matrix"))) {
    std::vector<int> r;
    for (double v : row) {
      if (v != 0.0 && v != 1.0) throw ConfigError("transition matrix entries must be 0 or 1");
      r.push_back(static_cast<int>(v));
    }
    a.push_back(r);
  }
  for (const auto& r : a)
    if (r.size() != a.size()) throw ConfigError("transition matrix must be square");
  return build_sft(a, integer("sft.p_cap", 0));
}

std::optional<SelfSimilarIFS> RunConfig::ifs() const {
  if (!has_section("ifs")) return std::nullopt;
  const bool sosc = flag("ifs.sosc", false);
  if (auto b = find("ifs.base")) return SelfSimilarIFS::base(static_cast<int>(parse_number(*b)));
  if (auto n = find("ifs.carpet")) {
    std::vector<std::pair<int, int>> cells;
    for (const auto& row : parse_rows(get("ifs.cells"))) {
      if (row.size() != 2) throw ConfigError("carpet cells are integer pairs");
      cells.emplace_back(static_cast<int>(row[0]), static_cast<int>(row[1]));
    }
    return SelfSimilarIFS::grid_carpet(static_cast<int>(parse_number(*n)), cells);
  }
  auto offsets = parse_rows(get("ifs.offsets"));
  const auto ratios = numbers("ifs.ratios");
  return SelfSimilarIFS(ratios, std::move(offsets), sosc);
}

ScalarPotential RunConfig::scalar(const std::string& section) const {
  if (find(section + ".kind").value_or("kstep") == "cocycle") {
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& m : split(get(section + ".matrices"), "|")) mats.push_back(parse_matrix(m));
    return ScalarPotential(MatrixCocyclePotential(sft(), std::move(mats)));
  }
  const KStepPotential p = kstep(section);
  if (p.dim() != 1) throw ConfigError("[" + section + "] must be scalar");
  return ScalarPotential(p);
}

KStepPotential RunConfig::kstep(const std::string& section) const {
  if (!has_section(section)) throw ConfigError("missing section [" + section + "]");
  const std::string kind = find(section + ".kind").value_or("kstep");
  const SftPtr base = sft();
  if (kind == "constant") return KStepPotential::constant(base, parse_number(get(section + ".value")));
  if (kind != "kstep") throw ConfigError("[" + section + "] kind must be kstep, constant or cocycle here");
  const int k = integer(section + ".k", 1), d = integer(section + ".d", 1);
  if (k < 1 || d < 1) throw ConfigError("[" + section + "] needs k >= 1 and d >= 1");
  const WordIndex index(*base, k);
  std::vector<double> table;
  if (auto values = find(section + ".values")) {
    table = parse_numbers(*values);
    if (table.size() != index.size() * static_cast<std::size_t>(d))
      throw ConfigError(fmt::format("[{}] lists {} values; {} admissible {}-words × d={} need {}", section, table.size(),
                                    index.size(), k, d, index.size() * static_cast<std::size_t>(d)));
  } else {
    table.assign(index.size() * static_cast<std::size_t>(d), std::nan(""));
    for (const auto& entry : split(get(section + ".map"), ";")) {
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw ConfigError("map entries look like 01: 0.5");
      const Word w = parse_word(boost::trim_copy(entry.substr(0, colon)));
      const auto vals = parse_numbers(entry.substr(colon + 1));
      if (static_cast<int>(w.size()) != k || static_cast<int>(vals.size()) != d)
        throw ConfigError("map entry '" + entry + "' has the wrong shape");
      const auto i = index.index_of(w);
      if (i < 0) throw ConfigError("map entry '" + entry + "' is not admissible");
      for (int c = 0; c < d; ++c) table[static_cast<std::size_t>(i) * d + c] = vals[c];
    }
    for (double v : table)
      if (std::isnan(v)) throw ConfigError("[" + section + "] map misses admissible words");
  }
  return KStepPotential(base, k, d, std::move(table));
}

PotentialBundle RunConfig::bundle(const std::string& section) const {
  if (find(section + ".kind").value_or("kstep") == "cocycle") return PotentialBundle({scalar(section)});
  return PotentialBundle(kstep(section));
}

WeakGibbsMetric RunConfig::metric() const {
  if (!has_section("psi") && has_section("ifs")) {
    const auto f = *ifs();
    std::vector<double> logs;
    for (int j = 0; j < f.size(); ++j) logs.push_back(std::log(f.ratio(j)));
    return WeakGibbsMetric(ScalarPotential(KStepPotential::one_step(f.sft(), logs)));
  }
  return WeakGibbsMetric(scalar("psi"));
}

double RunConfig::number(const std::string& key, double fallback) const {
  auto v = find(key);
  return v ? parse_number(*v) : fallback;
}

std::vector<double> RunConfig::numbers(const std::string& key) const { return parse_numbers(get(key)); }

std::vector<double> RunConfig::numbers(const std::string& key, std::vector<double> fallback) const {
  auto v = find(key);
  return v ? parse_numbers(*v) : fallback;
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const double v = number(key, fallback);
  if (v != std::floor(v)) throw ConfigError("'" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  const std::string s = boost::to_lower_copy(*v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("'" + key + "' must be true or false");
}

std::uint64_t RunConfig::seed() const {
  if (overrides_.seed) return *overrides_.seed;
  auto v = find("run.seed");
  return v ? std::stoull(*v, nullptr, 0) : 0x5EED;
}

int RunConfig::threads() const {
  if (overrides_.threads) return std::max(1, *overrides_.threads);
  if (auto v = find("run.threads")) return std::max(1, static_cast<int>(parse_number(*v)));
  if (const char* env = std::getenv("THERMOSPEC_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError("THERMOSPEC_THREADS must be an integer");
    }
  }
  return 1;
}

SpectrumOptions RunConfig::spectrum_options() const {
  SpectrumOptions o;
  o.root_tol = overrides_.tol.value_or(number("run.tol", o.root_tol));
  o.min_tol = number("run.min_tol", o.min_tol);
  o.z_cap = number("run.z_cap", o.z_cap);
  o.grid_points = integer("run.grid_points", o.grid_points);
  o.grid_side = integer("run.grid_side", o.grid_side);
  o.cycle_cap = integer("run.cycle_cap", o.cycle_cap);
  o.hull_samples = integer("run.hull_samples", o.hull_samples);
  o.seed = seed();
  o.threads = threads();
  o.ball_cap = static_cast<std::uint64_t>(number("run.ball_cap", static_cast<double>(o.ball_cap)));
  return o;
}

}  // namespace thermo::cli
