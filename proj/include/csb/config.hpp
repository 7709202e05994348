#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csb/errors.hpp"

// Experiment configuration files: a flat key-value text format with
// dotted keys and INI-style section headers (see README for the
// grammar). Parsing is strict: duplicate keys, malformed lines and -- at
// resolution time -- unknown keys all raise ConfigInvalid.

namespace csb {

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    // Inserts or replaces a key (used for command-line overrides).
    void set(const std::string& key, const std::string& raw);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    // Raw string lookup; marks the key as consumed.
    std::optional<std::string> get_raw(const std::string& key) const;

    // Keys present in the file but never consumed by the resolver.
    std::vector<std::string> unused_keys() const;

    const std::string& origin() const { return origin_; }

  private:
    struct Entry {
        std::string raw;
        int line = 0;
        mutable bool used = false;
    };
    std::map<std::string, Entry> values_;
    std::string origin_;
};

// Typed access layer that records every resolved value (including
// defaults) so the full effective configuration can be echoed back out as
// a reparseable file. Numeric echoes use 17 significant digits.
class Resolver {
  public:
    explicit Resolver(Config& cfg) : cfg_(cfg) {}

    std::string token(const std::string& key);                             // required
    std::string token_or(const std::string& key, const std::string& def);  // with default
    double number(const std::string& key);
    double number_or(const std::string& key, double def);
    long long integer(const std::string& key);
    long long integer_or(const std::string& key, long long def);
    std::uint64_t u64_or(const std::string& key, std::uint64_t def);
    bool flag_or(const std::string& key, bool def);
    std::vector<double> number_list(const std::string& key);  // required, >= 1 entry
    std::optional<std::vector<double>> number_list_opt(const std::string& key);
    bool present(const std::string& key) const { return cfg_.has(key); }

    // After resolution: rejects any keys the experiment never consumed.
    void finish() const;

    // One "key = value" line per resolved entry, in resolution order.
    std::string echo_text() const;
    const std::vector<std::pair<std::string, std::string>>& echo() const { return echo_; }

    static std::string format_number(double v);

  private:
    std::string fetch(const std::string& key, const std::optional<std::string>& def);
    void record(const std::string& key, const std::string& value);

    Config& cfg_;
    std::vector<std::pair<std::string, std::string>> echo_;
};

// Atomic file write: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace csb
