#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stochctl::cli {

struct KeySpec {
    const char* key;
    const char* help;
};

/// Every accepted configuration key.
const std::vector<KeySpec>& known_keys();

/// Flat key=value configuration. Lookups that fail or do not parse throw
/// InvalidInput naming the key.
class Config {
public:
    /// key=value lines, '#' comments. A JSON run summary is also accepted; its
    /// "config" object is read back.
    static Config from_file(const std::filesystem::path& path);
    static Config from_text(const std::string& text);

    /// Throws InvalidInput for unknown keys.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string text(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    std::size_t count(const std::string& key) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
    /// Numbers separated by commas.
    std::vector<double> numbers(const std::string& key) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace stochctl::cli
