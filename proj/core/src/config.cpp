#include "polarlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "polarlab/errors.hpp"

namespace polarlab {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& source)
{
    KeyValueConfig config;
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto end = text.find('\n');
        std::string_view line = trim(text.substr(0, end));
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParameterError(where + ": malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParameterError(where + ": expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ParameterError(where + ": empty key");
        }
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        config.set(full, std::string(trim(line.substr(eq + 1))));
    }
    return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParameterError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

bool KeyValueConfig::has(const std::string& key) const { return get(key).has_value(); }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const
{
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string KeyValueConfig::require(const std::string& key) const
{
    auto v = get(key);
    if (!v) {
        throw ParameterError("missing required key '" + key + "'");
    }
    return *v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    double out = 0.0;
    const char* first = v->data();
    const char* last = first + v->size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ParameterError("key '" + key + "': '" + *v + "' is not a number");
    }
    return out;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const
{
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    int out = 0;
    const char* first = v->data();
    const char* last = first + v->size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ParameterError("key '" + key + "': '" + *v + "' is not an integer");
    }
    return out;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const
{
    const auto v = get(key);
    if (!v) {
        return fallback;
    }
    std::uint64_t out = 0;
    const char* first = v->data();
    const char* last = first + v->size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ParameterError("key '" + key + "': '" + *v + "' is not an unsigned integer");
    }
    return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value)
{
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

std::string KeyValueConfig::canonical() const
{
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (const auto& [k, v] : sorted) {
        out += k + "=" + v + "\n";
    }
    return out;
}

void KeyValueConfig::check_keys(const std::vector<std::string>& allowed) const
{
    for (const auto& [k, v] : entries_) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const std::string& a) {
            if (a.size() >= 2 && a.ends_with(".*")) {
                return k.starts_with(a.substr(0, a.size() - 1));
            }
            return a == k;
        });
        if (!ok) {
            throw ParameterError("unknown config key '" + k + "'");
        }
    }
}

const std::vector<std::string>& model_config_keys()
{
    static const std::vector<std::string> keys = {
        "model.t0",          "model.sidedness",    "radial.family",      "radial.rate",
        "radial.beta",       "angular.family",     "angular.lower",      "angular.upper",
        "angular.tau",       "angular.tau_minus",  "angular.tau_plus",   "angular.weight_plus",
        "angular.half_width", "shape_u.family",    "shape_u.kappa",      "shape_u.kappa_minus",
        "shape_u.kappa_plus", "shape_u.scale",     "shape_v.family",     "shape_v.rho",
        "shape_v.delta",     "shape_v.coefficient", "shape_v.theta0",    "shape_v.n",
        "shape_v.theta_deriv",
    };
    return keys;
}

ModelSpec model_spec_from_config(const KeyValueConfig& c)
{
    ModelSpec spec;
    spec.t0 = c.get_double("model.t0", 0.0);
    const std::string sidedness = c.get("model.sidedness").value_or("one_sided_right");
    if (sidedness == "one_sided_right") {
        spec.sidedness = Sidedness::OneSidedRight;
    } else if (sidedness == "two_sided") {
        spec.sidedness = Sidedness::TwoSided;
    } else {
        throw ParameterError("key 'model.sidedness': unknown value '" + sidedness +
                             "' (expected one_sided_right or two_sided)");
    }

    spec.radial.family = c.require("radial.family");
    spec.radial.rate = c.get_double("radial.rate", spec.radial.rate);
    spec.radial.beta = c.get_double("radial.beta", spec.radial.beta);

    spec.angular.family = c.require("angular.family");
    spec.angular.lower = c.get_double("angular.lower", spec.angular.lower);
    spec.angular.upper = c.get_double("angular.upper", spec.angular.upper);
    spec.angular.tau = c.get_double("angular.tau", spec.angular.tau);
    spec.angular.tau_minus = c.get_double("angular.tau_minus", spec.angular.tau_minus);
    spec.angular.tau_plus = c.get_double("angular.tau_plus", spec.angular.tau_plus);
    spec.angular.weight_plus = c.get_double("angular.weight_plus", spec.angular.weight_plus);
    spec.angular.half_width = c.get_double("angular.half_width", spec.angular.half_width);

    spec.shape_u.family = c.require("shape_u.family");
    const double kappa = c.get_double("shape_u.kappa", spec.shape_u.kappa_plus);
    spec.shape_u.kappa_minus = c.get_double("shape_u.kappa_minus", kappa);
    spec.shape_u.kappa_plus = c.get_double("shape_u.kappa_plus", kappa);
    spec.shape_u.scale = c.get_double("shape_u.scale", spec.shape_u.scale);

    spec.shape_v.family = c.get("shape_v.family").value_or("none");
    spec.shape_v.rho = c.get_double("shape_v.rho", spec.shape_v.rho);
    spec.shape_v.delta = c.get_double("shape_v.delta", spec.shape_v.delta);
    spec.shape_v.coefficient = c.get_double("shape_v.coefficient", spec.shape_v.coefficient);
    spec.shape_v.theta0 = c.get_double("shape_v.theta0", spec.shape_v.theta0);
    spec.shape_v.n = c.get_int("shape_v.n", spec.shape_v.n);
    spec.shape_v.theta_deriv = c.get_double("shape_v.theta_deriv", spec.shape_v.theta_deriv);
    return spec;
}

std::uint64_t fnv1a(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace polarlab
