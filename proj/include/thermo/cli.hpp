#pragma once

#include <boost/property_tree/ptree.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thermo/geometry.hpp"
#include "thermo/spectrum.hpp"

namespace thermo::cli {

inline constexpr const char* kVersion = "1.0.0";

// Command-line values that take precedence over the [run] section.
struct Overrides {
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

// INI-style run description: [sft] or [ifs], potentials in [phi] / [psi] / [xi],
// command parameters in [run].
class RunConfig {
 public:
  static RunConfig load(const std::string& path, Overrides overrides = {});
  static RunConfig parse(const std::string& text, Overrides overrides = {});

  const std::string& text() const { return text_; }
  std::string digest() const;  // SHA-256 of the config bytes, hex

  bool has_section(const std::string& name) const;
  SftPtr sft() const;
  std::optional<SelfSimilarIFS> ifs() const;
  ScalarPotential scalar(const std::string& section) const;
  KStepPotential kstep(const std::string& section) const;
  PotentialBundle bundle(const std::string& section) const;
  WeakGibbsMetric metric() const;

  double number(const std::string& key, double fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::uint64_t seed() const;
  int threads() const;
  SpectrumOptions spectrum_options() const;

 private:
  std::string get(const std::string& path) const;
  std::optional<std::string> find(const std::string& path) const;

  std::string text_;
  boost::property_tree::ptree tree_;
  Overrides overrides_;
};

double parse_number(const std::string& token);
std::vector<double> parse_numbers(const std::string& text);

struct Artifacts {
  std::string csv;
  std::string svg;  // empty when the command has no plot
  bool ok = true;   // false when `check` finds a violated invariant
};

// Runs one command; throws thermo::Error (or ConfigError) on failure.
Artifacts run(const std::string& command, const RunConfig& config);

const std::vector<std::string>& commands();

// Exit code and JSON error record for an exception escaping run().
int report_error(const std::exception& e, std::ostream& diag);

}  // namespace thermo::cli
