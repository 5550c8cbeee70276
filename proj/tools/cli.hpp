#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNumericalFailure = 1;
inline constexpr int kUsage = 2;

struct KeySpec {
  std::string name;
  std::string fallback;  // empty: no default
  std::string help;      // includes units
  bool required = false;
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::string format;  // default output format
  std::vector<KeySpec> keys;
};

const std::vector<CommandSpec>& commands();
const CommandSpec& command(std::string_view name);

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public UsageError {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> params;  // every schema key with a value
  std::string output;                         // empty: stdout
  std::string format = "csv";
  int threads = 0;
  bool emit_fig = false;

  bool has(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
};

double parse_number(std::string_view text, const std::string& key);
std::vector<double> parse_list(std::string_view text, const std::string& key);

struct ConfigEntry {
  std::string key, value;
  int line = 0;
};

// `key = value` lines, `#` comments, blank lines ignored.
std::vector<ConfigEntry> read_config(std::istream& in, const std::string& source = "config");
std::map<std::string, std::string> parse_config_text(std::istream& in, const std::string& source = "config");

// Flags override the config file (--config path). --help output goes to `out`;
// returns false in that case.
bool parse_config(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out);

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// parse + dispatch with the exit-code convention, JSON diagnostics on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string format_double(double v);  // 17 significant digits

}  // namespace scg::cli
