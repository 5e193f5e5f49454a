#include "racf/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

namespace racf {

namespace {

using Field = std::variant<bool RunConfig::*, int RunConfig::*, double RunConfig::*>;

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"ic", &RunConfig::ic},
        {"ic_amount", &RunConfig::ic_amount},
        {"ic_sigma", &RunConfig::ic_sigma},
        {"ic_threshold", &RunConfig::ic_threshold},
        {"rotation", &RunConfig::rotation},
        {"rot_delta", &RunConfig::rot_delta},
        {"rot_halfcount", &RunConfig::rot_halfcount},
        {"fpe", &RunConfig::fpe},
        {"fpe_rho", &RunConfig::fpe_rho},
        {"dc", &RunConfig::dc},
        {"omega_d", &RunConfig::omega_d},
        {"omega_a", &RunConfig::omega_a},
        {"scales", &RunConfig::scales},
        {"scale_step", &RunConfig::scale_step},
        {"newton_iters", &RunConfig::newton_iters},
        {"learning_rate", &RunConfig::learning_rate},
        {"memory_capacity", &RunConfig::memory_capacity},
        {"cell_size", &RunConfig::cell_size},
        {"sigma_factor", &RunConfig::sigma_factor},
        {"padding", &RunConfig::padding},
        {"w_min", &RunConfig::w_min},
        {"w_scale", &RunConfig::w_scale},
        {"reg_kernel", &RunConfig::reg_kernel},
        {"gs_sweeps_init", &RunConfig::gs_sweeps_init},
        {"gs_sweeps", &RunConfig::gs_sweeps},
        {"gs_tolerance", &RunConfig::gs_tolerance},
        {"low_confidence", &RunConfig::low_confidence},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw FormatError("invalid value '" + text + "' for " + key);
    return v;
}

void check(bool cond, const std::string& what) {
    if (!cond) throw FormatError("config out of range: " + what);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void RunConfig::validate() const {
    check(ic_amount >= 0, "ic_amount >= 0");
    check(ic_sigma > 0, "ic_sigma > 0");
    check(ic_threshold >= 0 && ic_threshold <= 1, "ic_threshold in [0,1]");
    check(rot_delta > 0 && rot_delta < 180, "rot_delta in (0,180)");
    check(rot_halfcount >= 0 && rot_halfcount <= 18, "rot_halfcount in [0,18]");
    check(fpe_rho > 0, "fpe_rho > 0");
    check(omega_d >= 0 && omega_d <= 1, "omega_d in [0,1]");
    check(omega_a >= 0 && omega_a <= 1, "omega_a in [0,1]");
    check(scales >= 1 && scales % 2 == 1, "scales odd and >= 1");
    check(scale_step > 1, "scale_step > 1");
    check(newton_iters >= 0, "newton_iters >= 0");
    check(learning_rate > 0 && learning_rate < 1, "learning_rate in (0,1)");
    check(memory_capacity >= 1, "memory_capacity >= 1");
    check(cell_size >= 1, "cell_size >= 1");
    check(sigma_factor > 0, "sigma_factor > 0");
    check(padding >= 1, "padding >= 1");
    check(w_min > 0, "w_min > 0");
    check(w_scale > 0, "w_scale > 0");
    check(reg_kernel == 0 || (reg_kernel > 0 && reg_kernel % 2 == 1), "reg_kernel odd or 0");
    check(gs_sweeps_init >= 1 && gs_sweeps >= 1, "gs sweeps >= 1");
    check(gs_tolerance > 0, "gs_tolerance > 0");
    check(low_confidence >= 0, "low_confidence >= 0");
}

SearchConfig RunConfig::search() const {
    SearchConfig s;
    s.scales = scales;
    s.scale_step = scale_step;
    s.rot_halfcount = rotation ? rot_halfcount : 0;
    s.rot_delta = rot_delta;
    s.rho = fpe_rho;
    s.newton_iters = newton_iters;
    s.fpe = fpe;
    return s;
}

IcParams RunConfig::ic_params() const { return {ic_amount, ic_sigma, ic_threshold}; }

void RunConfig::set(const std::string& key, const std::string& value) {
    for (const auto& [name, field] : fields()) {
        if (name != key) continue;
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(this->*member)>;
                if constexpr (std::is_same_v<T, bool>) {
                    if (value == "true" || value == "1") this->*member = true;
                    else if (value == "false" || value == "0") this->*member = false;
                    else throw FormatError("invalid boolean '" + value + "' for " + key);
                } else {
                    this->*member = parse_number<T>(key, value);
                }
            },
            field);
        return;
    }
    throw FormatError("unknown config key: " + key);
}

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    for (const auto& [name, field] : fields()) {
        out << name << '=';
        std::visit(
            [&](auto member) {
                using T = std::remove_cv_t<std::remove_reference_t<decltype(cfg.*member)>>;
                if constexpr (std::is_same_v<T, bool>) out << (cfg.*member ? "true" : "false");
                else if constexpr (std::is_same_v<T, int>) out << cfg.*member;
                else out << format_double(cfg.*member);
            },
            field);
        out << '\n';
    }
    return out.str();
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
        base.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    base.validate();
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

}  // namespace racf
