#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roughlab {

// Schema or syntax problem; line is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

struct ConfigEntry {
    std::string value;
    std::size_t line = 0;
};

// key = value lines; '#' starts a comment; keys are unique.
struct RawConfig {
    std::string source;
    std::map<std::string, ConfigEntry> entries;
};

RawConfig parse_config(std::istream& is, const std::string& source = "<config>");
RawConfig parse_config_file(const std::string& path);

enum class ParamType { integer, real, text, real_list, integer_list };

struct ParamSpec {
    std::string key;
    ParamType type = ParamType::real;
    std::string default_value;
    std::string help;
    std::vector<std::string> choices;  // text only; empty means free text
    double min = -1e300;               // numeric bounds, inclusive
    double max = 1e300;
};

struct ExperimentSchema {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
};

// All experiments in catalogue order.
const std::vector<ExperimentSchema>& experiment_schemas();
const ExperimentSchema& schema_for(const std::string& experiment);

class RunConfig {
  public:
    std::string experiment;
    std::uint64_t seed = 1;

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    // Sorted key=value lines, defaults filled in, seed included.
    std::string canonical() const;

  private:
    std::map<std::string, std::string> values_;
};

// Checks keys, types, bounds and choices; fills defaults.
RunConfig validate_config(const RawConfig& raw);

std::uint64_t fnv1a64(std::string_view bytes);

std::vector<std::string> split_list(const std::string& text, char sep);
std::string trim(std::string_view s);

}  // namespace roughlab
