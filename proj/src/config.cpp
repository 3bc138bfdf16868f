#include "cogmac/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace cogmac {

namespace {

struct Entry {
    std::string value;
    int line;
};

using Section = std::map<std::string, std::vector<Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"system",
         {"noise_density", "power_primary", "power_secondary", "bandwidth_hz",
          "slot_seconds", "sensing_quantum_seconds", "packet_bits", "var_primary_link",
          "var_secondary_link"}},
        {"profile", {"builtin", "row"}},
        {"sweep",
         {"delay_cap", "lambda_start", "lambda_stop", "lambda_step", "variants",
          "output"}},
        {"optimizer",
         {"multistarts", "grid_points_per_dim", "tolerance", "max_iterations", "seed"}},
        {"simulation", {"n_slots", "warmup_slots", "seed"}},
    };
    return k;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
    throw ConfigError(src + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_at(const std::string& src, int line, int col,
                          const std::string& msg) {
    throw ConfigError(src + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": " + msg);
}

double parse_double(const std::string& src, const Entry& e, const std::string& path) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(src, e.line, path + ": expected a number, got '" + e.value + "'");
    return v;
}

long long parse_int(const std::string& src, const Entry& e, const std::string& path) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(src, e.line, path + ": expected an integer, got '" + e.value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& src, const Entry& e, const std::string& path) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE ||
        e.value.find('-') != std::string::npos)
        fail(src, e.line, path + ": expected a non-negative integer, got '" + e.value + "'");
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(trim(s.substr(pos)));
            break;
        }
        out.push_back(trim(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

const Entry* find_one(const std::string& src, const Section& sec,
                      const std::string& sec_name, const std::string& key) {
    auto it = sec.find(key);
    if (it == sec.end()) return nullptr;
    if (it->second.size() > 1)
        fail(src, it->second[1].line, "duplicate key '" + key + "' in [" + sec_name + "]");
    return &it->second[0];
}

const Entry& require_one(const std::string& src, const Section& sec,
                         const std::string& sec_name, const std::string& key) {
    const Entry* e = find_one(src, sec, sec_name, key);
    if (!e) throw ConfigError(src + ": [" + sec_name + "] is missing key '" + key + "'");
    return *e;
}

} // namespace

std::vector<double> LambdaGrid::values() const {
    std::size_t n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

ParsedConfig parse_config(const std::string& text, bool allow_nonmonotone_roc,
                          const std::string& source_name) {
    const std::string& src = source_name;
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_lines;

    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::size_t cut = raw.find_first_of("#;");
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail_at(src, line_no, static_cast<int>(line.size()),
                        "unterminated section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (!known_keys().count(name)) fail(src, line_no, "unknown section [" + name + "]");
            if (sections.count(name)) fail(src, line_no, "duplicate section [" + name + "]");
            sections[name];
            section_lines[name] = line_no;
            current = name;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
            fail_at(src, line_no,
                    static_cast<int>(raw.find_first_not_of(" \t") + 1),
                    "expected 'key = value' or '[section]'");
        if (current.empty()) fail(src, line_no, "key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!known_keys().at(current).count(key))
            fail(src, line_no, "unknown key '" + key + "' in [" + current + "]");
        if (key != "row") {
            auto it = sections[current].find(key);
            if (it != sections[current].end())
                fail(src, line_no, "duplicate key '" + key + "' in [" + current + "]");
        }
        sections[current][key].push_back({value, line_no});
    }

    for (const char* required : {"system", "profile", "sweep"})
        if (!sections.count(required))
            throw ConfigError(src + ": missing required section [" + std::string(required) + "]");

    ParsedConfig out;
    RunConfig& cfg = out.config;

    {
        const Section& sec = sections.at("system");
        auto get = [&](const char* key) {
            return parse_double(src, require_one(src, sec, "system", key),
                                std::string("system.") + key);
        };
        cfg.system.noise_density = get("noise_density");
        cfg.system.power_primary = get("power_primary");
        cfg.system.power_secondary = get("power_secondary");
        cfg.system.bandwidth_hz = get("bandwidth_hz");
        cfg.system.slot_seconds = get("slot_seconds");
        cfg.system.sensing_quantum_seconds = get("sensing_quantum_seconds");
        cfg.system.packet_bits = get("packet_bits");
        cfg.system.var_primary_link = get("var_primary_link");
        cfg.system.var_secondary_link = get("var_secondary_link");
        try {
            cfg.system.validate();
        } catch (const std::invalid_argument& e) {
            fail(src, section_lines.at("system"), std::string("system: ") + e.what());
        }
    }

    std::size_t m_expected = num_instants(cfg.system);
    {
        const Section& sec = sections.at("profile");
        const Entry* builtin = find_one(src, sec, "profile", "builtin");
        auto rows_it = sec.find("row");
        if (builtin && rows_it != sec.end())
            fail(src, builtin->line, "[profile] cannot mix 'builtin' and 'row'");
        if (builtin) {
            if (builtin->value != "default10")
                fail(src, builtin->line,
                     "profile.builtin: only 'default10' is available, got '" + builtin->value + "'");
            if (m_expected != 10)
                fail(src, builtin->line,
                     "profile.builtin default10 requires floor(T/tau) = 10, config gives " +
                         std::to_string(m_expected));
            cfg.profile = default_profile(10);
        } else if (rows_it != sec.end()) {
            std::vector<std::pair<long long, RocEntry>> rows;
            for (const Entry& e : rows_it->second) {
                std::vector<std::string> parts = split_commas(e.value);
                if (parts.size() != 3)
                    fail(src, e.line, "profile.row: expected 'k, p_fa, p_md'");
                Entry k{parts[0], e.line}, fa{parts[1], e.line}, md{parts[2], e.line};
                rows.emplace_back(parse_int(src, k, "profile.row index"),
                                  RocEntry{parse_double(src, fa, "profile.row p_fa"),
                                           parse_double(src, md, "profile.row p_md")});
            }
            std::sort(rows.begin(), rows.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (rows[i].first != static_cast<long long>(i + 1))
                    fail(src, rows_it->second[0].line,
                         "profile rows must cover indices 1.." + std::to_string(rows.size()) +
                             " exactly");
            for (auto& [k, roc] : rows) cfg.profile.entries.push_back(roc);
            if (cfg.profile.size() != m_expected)
                fail(src, rows_it->second[0].line,
                     "profile has " + std::to_string(cfg.profile.size()) + " rows but floor(T/tau) = " +
                         std::to_string(m_expected));
        } else {
            fail(src, section_lines.at("profile"),
                 "[profile] needs either 'builtin = default10' or 'row' entries");
        }

        std::vector<std::string> range_violations = validate_ranges(cfg.profile);
        if (!range_violations.empty())
            fail(src, section_lines.at("profile"), "profile: " + range_violations.front());
        std::vector<std::string> violations = validate(cfg.profile);
        if (!violations.empty()) {
            if (allow_nonmonotone_roc)
                for (const std::string& v : violations)
                    out.warnings.push_back("profile: " + v);
            else
                fail(src, section_lines.at("profile"), "profile: " + violations.front());
        }
    }

    {
        const Section& sec = sections.at("sweep");
        cfg.delay_cap =
            parse_double(src, require_one(src, sec, "sweep", "delay_cap"), "sweep.delay_cap");
        const Entry& cap_entry = require_one(src, sec, "sweep", "delay_cap");
        if (!(cfg.delay_cap > 1.0))
            fail(src, cap_entry.line, "sweep.delay_cap must be > 1");
        cfg.lambda_grid.start = parse_double(
            src, require_one(src, sec, "sweep", "lambda_start"), "sweep.lambda_start");
        cfg.lambda_grid.stop = parse_double(
            src, require_one(src, sec, "sweep", "lambda_stop"), "sweep.lambda_stop");
        cfg.lambda_grid.step = parse_double(
            src, require_one(src, sec, "sweep", "lambda_step"), "sweep.lambda_step");
        int grid_line = require_one(src, sec, "sweep", "lambda_start").line;
        if (!(cfg.lambda_grid.step > 0.0))
            fail(src, require_one(src, sec, "sweep", "lambda_step").line,
                 "sweep.lambda_step must be > 0");
        if (cfg.lambda_grid.start < 0.0 || cfg.lambda_grid.stop > 1.0 ||
            cfg.lambda_grid.start > cfg.lambda_grid.stop)
            fail(src, grid_line, "sweep lambda grid must satisfy 0 <= start <= stop <= 1");
        const Entry& ve = require_one(src, sec, "sweep", "variants");
        for (const std::string& name : split_commas(ve.value)) {
            if (name.empty()) fail(src, ve.line, "sweep.variants: empty entry");
            try {
                cfg.variants.push_back(variant_from_name(name));
            } catch (const std::invalid_argument& e) {
                fail(src, ve.line, std::string("sweep.variants: ") + e.what());
            }
        }
        for (std::size_t i = 0; i < cfg.variants.size(); ++i)
            for (std::size_t j = i + 1; j < cfg.variants.size(); ++j)
                if (cfg.variants[i] == cfg.variants[j])
                    fail(src, ve.line, std::string("sweep.variants: duplicate variant '") +
                                           variant_name(cfg.variants[i]) + "'");
        cfg.output_path = require_one(src, sec, "sweep", "output").value;
        if (cfg.output_path.empty())
            fail(src, require_one(src, sec, "sweep", "output").line,
                 "sweep.output must not be empty");
    }

    if (sections.count("optimizer")) {
        const Section& sec = sections.at("optimizer");
        if (const Entry* e = find_one(src, sec, "optimizer", "multistarts"))
            cfg.optimizer.multistarts =
                static_cast<int>(parse_int(src, *e, "optimizer.multistarts"));
        if (const Entry* e = find_one(src, sec, "optimizer", "grid_points_per_dim"))
            cfg.optimizer.grid_points_per_dim =
                static_cast<int>(parse_int(src, *e, "optimizer.grid_points_per_dim"));
        if (const Entry* e = find_one(src, sec, "optimizer", "tolerance"))
            cfg.optimizer.tolerance = parse_double(src, *e, "optimizer.tolerance");
        if (const Entry* e = find_one(src, sec, "optimizer", "max_iterations"))
            cfg.optimizer.max_iterations =
                static_cast<int>(parse_int(src, *e, "optimizer.max_iterations"));
        if (const Entry* e = find_one(src, sec, "optimizer", "seed"))
            cfg.optimizer.seed = parse_u64(src, *e, "optimizer.seed");
        try {
            cfg.optimizer.validate();
        } catch (const std::invalid_argument& e) {
            fail(src, section_lines.at("optimizer"), e.what());
        }
    }

    if (sections.count("simulation")) {
        const Section& sec = sections.at("simulation");
        SimConfig sim;
        sim.n_slots = parse_u64(src, require_one(src, sec, "simulation", "n_slots"),
                                "simulation.n_slots");
        sim.warmup_slots = sim.n_slots / 20;  // 5% unless stated
        if (const Entry* e = find_one(src, sec, "simulation", "warmup_slots"))
            sim.warmup_slots = parse_u64(src, *e, "simulation.warmup_slots");
        if (const Entry* e = find_one(src, sec, "simulation", "seed"))
            sim.seed = parse_u64(src, *e, "simulation.seed");
        try {
            sim.validate();
        } catch (const std::invalid_argument& e) {
            fail(src, section_lines.at("simulation"), e.what());
        }
        cfg.simulation = sim;
    }

    return out;
}

std::string serialize_profile(const SensingProfile& profile) {
    std::string out;
    char buf[128];
    for (std::size_t k = 1; k <= profile.size(); ++k) {
        const RocEntry& e = profile.roc_at(k);
        std::snprintf(buf, sizeof buf, "row = %zu, %.17g, %.17g\n", k, e.p_fa, e.p_md);
        out += buf;
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace cogmac
