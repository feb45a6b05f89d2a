#ifndef CSPQ_CONFIG_HPP
#define CSPQ_CONFIG_HPP

/// Flat key=value config files ('#' comments, blank lines ignored).
/// Keys mirror the experiment parameter names: N, M, zeta, psi, epsilon,
/// p_t, eta, N1, theta, plus world, seed, pdf, tau_min, tau_max.

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace cspq {

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

class Config {
public:
    Config() = default;
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;

    void set(const std::string& key, std::string value);
    [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace cspq

#endif  // CSPQ_CONFIG_HPP
