#include "molspec/model/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "molspec/bath/dephasing.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::model {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where, "must be an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) throw ConfigError(join(where, item.key()), "unknown key");
    }
}

double number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join(where, key), "required field is missing");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(where, key), "must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, where, key) : fallback;
}

const json& section(const json& root, const char* key) {
    if (!root.contains(key)) throw ConfigError(key, "required section is missing");
    return root.at(key);
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t k = 0; k < std::min(byte, text.size()); ++k)
        if (text[k] == '\n') ++line;
    return line;
}

}  // namespace

ModelConfig config_from_json(const json& root) {
    reject_unknown(root, "", {"gamma1_per_ns", "zpl_wavelength_nm", "temperature_K", "modes", "bulk_bath", "lv_bath", "dephasing",
                              "drive", "jitter_fwhm_ps", "instrument_fwhm_meV", "initial_mode_state"});
    ModelConfig c;
    c.gamma1_per_ns = number(root, "", "gamma1_per_ns");
    c.zpl_wavelength_nm = number_or(root, "", "zpl_wavelength_nm", c.zpl_wavelength_nm);
    c.temperature_K = number(root, "", "temperature_K");

    const json& modes = section(root, "modes");
    if (!modes.is_array()) throw ConfigError("modes", "must be an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string at = "modes[" + std::to_string(i) + "]";
        reject_unknown(modes[i], at, {"delta_meV", "eta_meV"});
        c.modes.push_back({number(modes[i], at, "delta_meV"), number(modes[i], at, "eta_meV")});
    }

    const json& bulk = section(root, "bulk_bath");
    reject_unknown(bulk, "bulk_bath", {"alpha_ps2", "dwf_target", "dwf_temperature_K", "xi_meV", "quadrature"});
    c.bulk_bath.xi_meV = number(bulk, "bulk_bath", "xi_meV");
    if (bulk.contains("quadrature")) {
        const json& q = bulk.at("quadrature");
        reject_unknown(q, "bulk_bath.quadrature", {"omega_max_meV", "n_points"});
        c.bulk_bath.omega_max_meV = number_or(q, "bulk_bath.quadrature", "omega_max_meV", 0.0);
        if (q.contains("n_points")) {
            if (!q.at("n_points").is_number_integer()) throw ConfigError("bulk_bath.quadrature.n_points", "must be an integer");
            c.bulk_bath.n_points = q.at("n_points").get<int>();
        }
    }
    const bool has_alpha = bulk.contains("alpha_ps2"), has_target = bulk.contains("dwf_target");
    if (has_alpha == has_target) throw ConfigError("bulk_bath.alpha_ps2", "give exactly one of alpha_ps2 or dwf_target");
    if (!has_target && bulk.contains("dwf_temperature_K")) throw ConfigError("bulk_bath.dwf_temperature_K", "only valid with dwf_target");

    const json& lv = section(root, "lv_bath");
    reject_unknown(lv, "lv_bath", {"scale", "zeta_meV"});
    c.lv_bath = {number(lv, "lv_bath", "scale"), number(lv, "lv_bath", "zeta_meV")};

    const json& deph = section(root, "dephasing");
    reject_unknown(deph, "dephasing", {"mu_ps6", "rate_target_per_ns", "rate_temperature_K", "omega_c_meV"});
    c.dephasing.omega_c_meV = number(deph, "dephasing", "omega_c_meV");
    const bool has_mu = deph.contains("mu_ps6"), has_rate = deph.contains("rate_target_per_ns");
    if (has_mu == has_rate) throw ConfigError("dephasing.mu_ps6", "give exactly one of mu_ps6 or rate_target_per_ns");
    if (has_mu) c.dephasing.mu_ps6 = number(deph, "dephasing", "mu_ps6");

    if (root.contains("drive")) {
        const json& d = root.at("drive");
        reject_unknown(d, "drive", {"omega_meV", "detuning_from_polaron_zpl_meV", "include_drive_dissipator"});
        DriveSpec drive;
        drive.omega_meV = number(d, "drive", "omega_meV");
        drive.detuning_meV = number_or(d, "drive", "detuning_from_polaron_zpl_meV", 0.0);
        if (d.contains("include_drive_dissipator")) {
            if (!d.at("include_drive_dissipator").is_boolean()) throw ConfigError("drive.include_drive_dissipator", "must be true or false");
            drive.include_drive_dissipator = d.at("include_drive_dissipator").get<bool>();
        }
        c.drive = drive;
    }
    if (root.contains("jitter_fwhm_ps")) c.jitter_fwhm_ps = number(root, "", "jitter_fwhm_ps");
    if (root.contains("instrument_fwhm_meV")) c.instrument_fwhm_meV = number(root, "", "instrument_fwhm_meV");
    if (root.contains("initial_mode_state")) {
        const json& s = root.at("initial_mode_state");
        if (s == "thermal") c.initial_mode_state = InitialModeState::thermal;
        else if (s == "ground") c.initial_mode_state = InitialModeState::ground;
        else throw ConfigError("initial_mode_state", "must be \"thermal\" or \"ground\"");
    }

    // Validate the directly given fields before solving calibrations that depend on them.
    if (has_alpha) c.bulk_bath.alpha_ps2 = number(bulk, "bulk_bath", "alpha_ps2");
    c.validate();
    if (has_target) {
        const double target = number(bulk, "bulk_bath", "dwf_target");
        if (!(target > 0.0 && target <= 1.0)) throw ConfigError("bulk_bath.dwf_target", "must lie in (0, 1]");
        const double t = number_or(bulk, "bulk_bath", "dwf_temperature_K", c.temperature_K);
        if (!(t >= 0.0)) throw ConfigError("bulk_bath.dwf_temperature_K", "must be non-negative");
        const auto p = c.bulk_params();
        c.bulk_bath.alpha_ps2 = bath::solve_alpha_for_dwf(target, t, p.xi_per_ps, p.quadrature);
    }
    if (has_rate) {
        const double rate = number(deph, "dephasing", "rate_target_per_ns");
        if (!(rate >= 0.0)) throw ConfigError("dephasing.rate_target_per_ns", "must be non-negative");
        const double t = number(deph, "dephasing", "rate_temperature_K");
        if (!(t > 0.0)) throw ConfigError("dephasing.rate_temperature_K", "must be positive");
        c.dephasing.mu_ps6 = bath::solve_mu_for_rate(units::per_ns_to_per_ps(rate), t, c.dephasing_params().omega_c_per_ps);
    }
    c.validate();
    return c;
}

ModelConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", "parse error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    return config_from_json(root);
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

json config_to_json(const ModelConfig& c) {
    json root;
    root["gamma1_per_ns"] = c.gamma1_per_ns;
    root["zpl_wavelength_nm"] = c.zpl_wavelength_nm;
    root["temperature_K"] = c.temperature_K;
    root["modes"] = json::array();
    for (const auto& m : c.modes) root["modes"].push_back({{"delta_meV", m.delta_meV}, {"eta_meV", m.eta_meV}});
    json quad{{"n_points", c.bulk_bath.n_points}};
    if (c.bulk_bath.omega_max_meV > 0.0) quad["omega_max_meV"] = c.bulk_bath.omega_max_meV;
    root["bulk_bath"] = {{"alpha_ps2", c.bulk_bath.alpha_ps2}, {"xi_meV", c.bulk_bath.xi_meV}, {"quadrature", quad}};
    root["lv_bath"] = {{"scale", c.lv_bath.scale}, {"zeta_meV", c.lv_bath.zeta_meV}};
    root["dephasing"] = {{"mu_ps6", c.dephasing.mu_ps6}, {"omega_c_meV", c.dephasing.omega_c_meV}};
    if (c.drive)
        root["drive"] = {{"omega_meV", c.drive->omega_meV},
                         {"detuning_from_polaron_zpl_meV", c.drive->detuning_meV},
                         {"include_drive_dissipator", c.drive->include_drive_dissipator}};
    if (c.jitter_fwhm_ps) root["jitter_fwhm_ps"] = *c.jitter_fwhm_ps;
    if (c.instrument_fwhm_meV) root["instrument_fwhm_meV"] = *c.instrument_fwhm_meV;
    root["initial_mode_state"] = c.initial_mode_state == InitialModeState::thermal ? "thermal" : "ground";
    return root;
}

}  // namespace molspec::model
