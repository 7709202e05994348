#include "csb/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace csb {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-') {
            return false;
        }
    }
    return k.front() != '.' && k.back() != '.';
}

// Strips an unquoted trailing comment.
std::string strip_comment(const std::string& s) {
    bool in_quote = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_quote = !in_quote;
        if (s[i] == '#' && !in_quote) return s.substr(0, i);
    }
    return s;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigInvalid(origin + ":" + std::to_string(lineno) +
                                    ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section)) {
                throw ConfigInvalid(origin + ":" + std::to_string(lineno) +
                                    ": invalid section name '" + section + "'");
            }
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigInvalid(origin + ":" + std::to_string(lineno) +
                                ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": invalid key '" + key +
                                "'");
        }
        if (!section.empty()) key = section + "." + key;
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (cfg.values_.count(key)) {
            throw ConfigInvalid(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                key + "'");
        }
        cfg.values_[key] = Entry{value, lineno, false};
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

void Config::set(const std::string& key, const std::string& raw) {
    values_[key] = Entry{raw, 0, false};
}

std::optional<std::string> Config::get_raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.raw;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        if (!v.used) out.push_back(k);
    }
    return out;
}

std::string Resolver::format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Resolver::record(const std::string& key, const std::string& value) {
    echo_.emplace_back(key, value);
}

std::string Resolver::fetch(const std::string& key, const std::optional<std::string>& def) {
    const auto raw = cfg_.get_raw(key);
    if (raw) return *raw;
    if (def) return *def;
    throw ConfigInvalid("missing required key '" + key + "' in " + cfg_.origin());
}

std::string Resolver::token(const std::string& key) {
    const std::string v = fetch(key, std::nullopt);
    record(key, v);
    return v;
}

std::string Resolver::token_or(const std::string& key, const std::string& def) {
    const std::string v = fetch(key, def);
    record(key, v);
    return v;
}

double Resolver::number(const std::string& key) {
    const std::string v = fetch(key, std::nullopt);
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigInvalid("key '" + key + "': '" + v + "' is not a number");
    }
    record(key, format_number(d));
    return d;
}

double Resolver::number_or(const std::string& key, double def) {
    if (!cfg_.has(key)) {
        record(key, format_number(def));
        return def;
    }
    return number(key);
}

long long Resolver::integer(const std::string& key) {
    const std::string v = fetch(key, std::nullopt);
    char* end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigInvalid("key '" + key + "': '" + v + "' is not an integer");
    }
    record(key, std::to_string(i));
    return i;
}

long long Resolver::integer_or(const std::string& key, long long def) {
    if (!cfg_.has(key)) {
        record(key, std::to_string(def));
        return def;
    }
    return integer(key);
}

std::uint64_t Resolver::u64_or(const std::string& key, std::uint64_t def) {
    if (!cfg_.has(key)) {
        record(key, std::to_string(def));
        return def;
    }
    const std::string v = fetch(key, std::nullopt);
    char* end = nullptr;
    const unsigned long long i = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigInvalid("key '" + key + "': '" + v + "' is not an unsigned integer");
    }
    record(key, std::to_string(i));
    return i;
}

bool Resolver::flag_or(const std::string& key, bool def) {
    const std::string v = fetch(key, def ? "true" : "false");
    if (v != "true" && v != "false") {
        throw ConfigInvalid("key '" + key + "': expected true or false, got '" + v + "'");
    }
    record(key, v);
    return v == "true";
}

std::vector<double> Resolver::number_list(const std::string& key) {
    const std::string v = fetch(key, std::nullopt);
    std::istringstream in(v);
    std::vector<double> out;
    std::string item;
    while (in >> item) {
        char* end = nullptr;
        const double d = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') {
            throw ConfigInvalid("key '" + key + "': '" + item + "' is not a number");
        }
        out.push_back(d);
    }
    if (out.empty()) throw ConfigInvalid("key '" + key + "': empty list");
    std::string echo;
    for (size_t i = 0; i < out.size(); ++i) {
        if (i) echo += ' ';
        echo += format_number(out[i]);
    }
    record(key, echo);
    return out;
}

std::optional<std::vector<double>> Resolver::number_list_opt(const std::string& key) {
    if (!cfg_.has(key)) return std::nullopt;
    return number_list(key);
}

void Resolver::finish() const {
    const auto unused = cfg_.unused_keys();
    if (!unused.empty()) {
        std::string msg = "unknown key(s) in " + cfg_.origin() + ":";
        for (const auto& k : unused) msg += " '" + k + "'";
        throw ConfigInvalid(msg);
    }
}

std::string Resolver::echo_text() const {
    std::string out;
    out += "# resolved configuration (all defaults applied); reparseable as-is\n";
    for (const auto& [k, v] : echo_) {
        const bool needs_quotes = v.empty() || v.find(' ') != std::string::npos ||
                                  v.find('#') != std::string::npos;
        // Number lists contain spaces but must stay unquoted; only quote
        // values that are not pure numeric lists.
        bool numeric_list = !v.empty();
        {
            std::istringstream probe(v);
            std::string item;
            while (probe >> item) {
                char* end = nullptr;
                std::strtod(item.c_str(), &end);
                if (end == item.c_str() || *end != '\0') {
                    numeric_list = false;
                    break;
                }
            }
        }
        if (needs_quotes && !numeric_list) {
            out += k + " = \"" + v + "\"\n";
        } else {
            out += k + " = " + v + "\n";
        }
    }
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace csb
