#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polarlab/model.hpp"

namespace polarlab {

/// Flat key=value configuration. Blank lines and lines starting with '#' are
/// ignored; a line "[name]" prefixes the following keys with "name.".
///
///     [radial]
///     family = exponential
///     rate = 1.0
///
/// is equivalent to "radial.family = exponential" and "radial.rate = 1.0".
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, const std::string& source = "<config>");
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    /// Throws ParameterError naming the key when it is missing.
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    void set(const std::string& key, const std::string& value);

    /// Keys in first-seen order with their final values.
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    /// Canonical "key=value\n" text, sorted by key.
    std::string canonical() const;

    /// Throws ParameterError for any key outside `allowed` (exact names or
    /// "prefix.*" patterns).
    void check_keys(const std::vector<std::string>& allowed) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Model keys recognized by model_spec_from_config.
const std::vector<std::string>& model_config_keys();

/// Reads model.*, radial.*, angular.*, shape_u.*, shape_v.* keys.
/// radial.family, angular.family and shape_u.family are required.
ModelSpec model_spec_from_config(const KeyValueConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

}  // namespace polarlab
