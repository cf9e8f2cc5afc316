#include "hmcf/run_config.hpp"

#include "hmcf/number_format.hpp"
#include "hmcf/string_solver.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hmcf {

namespace {

std::string trim(std::string_view sv) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0;
    std::size_t e = sv.size();
    while (b < e && is_space(sv[b])) ++b;
    while (e > b && is_space(sv[e - 1])) --e;
    return std::string(sv.substr(b, e - b));
}

struct ConfigEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, ConfigEntry>;

struct RawConfig {
    std::string name;
    std::map<std::string, Section> sections;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw InvalidConfigError(name + ":" + std::to_string(line) + ": " + msg);
    }
};

RawConfig tokenize(std::string_view text, std::string_view name) {
    static const std::set<std::string> known_sections = {"initial", "velocity", "solver",
                                                         "output", "string"};
    RawConfig raw;
    raw.name = std::string(name);
    std::string current;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') raw.fail(lineno, "malformed section header '" + t + "'");
            current = trim(std::string_view(t).substr(1, t.size() - 2));
            if (!known_sections.count(current)) {
                raw.fail(lineno, "unknown section [" + current + "]");
            }
            raw.sections[current]; // may legitimately be empty
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) raw.fail(lineno, "expected 'key = value', got '" + t + "'");
        if (current.empty()) raw.fail(lineno, "key outside any [section]");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty() || value.empty()) raw.fail(lineno, "empty key or value");
        auto [it, inserted] = raw.sections[current].emplace(key, ConfigEntry{value, lineno});
        if (!inserted) raw.fail(lineno, "duplicate key '" + key + "' in [" + current + "]");
    }
    return raw;
}

class SectionReader {
  public:
    SectionReader(RawConfig& raw, const std::string& section) : raw_(raw), section_(section) {
        auto it = raw.sections.find(section);
        entries_ = (it == raw.sections.end()) ? nullptr : &it->second;
    }

    bool present() const { return entries_ != nullptr; }

    bool has(const std::string& key) const { return entries_ && entries_->count(key); }

    std::string get_string(const std::string& key, const std::string& fallback) {
        ConfigEntry* e = find(key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& key, double fallback) {
        ConfigEntry* e = find(key);
        if (!e) return fallback;
        try {
            return parse_double(e->value);
        } catch (const InvalidConfigError&) {
            raw_.fail(e->line, "value for '" + key + "' is not a number: '" + e->value + "'");
        }
    }

    int get_int(const std::string& key, int fallback) {
        ConfigEntry* e = find(key);
        if (!e) return fallback;
        int v = 0;
        const auto res = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (res.ec != std::errc{} || res.ptr != e->value.data() + e->value.size()) {
            raw_.fail(e->line, "value for '" + key + "' is not an integer: '" + e->value + "'");
        }
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) {
        ConfigEntry* e = find(key);
        if (!e) return fallback;
        std::string v = e->value;
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (v == "true" || v == "on" || v == "1") return true;
        if (v == "false" || v == "off" || v == "0") return false;
        raw_.fail(e->line, "value for '" + key + "' is not a boolean: '" + e->value + "'");
    }

    void require(const std::string& key) const {
        if (!has(key)) {
            throw InvalidConfigError(raw_.name + ": missing required key '" + key + "' in [" +
                                     section_ + "]");
        }
    }

    [[noreturn]] void fail_key(const std::string& key, const std::string& msg) {
        ConfigEntry* e = find(key);
        raw_.fail(e ? e->line : 0, msg);
    }

  private:
    ConfigEntry* find(const std::string& key) {
        if (!entries_) return nullptr;
        auto it = entries_->find(key);
        if (it == entries_->end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    RawConfig& raw_;
    std::string section_;
    Section* entries_;
};

void reject_unused(const RawConfig& raw) {
    for (const auto& [section, entries] : raw.sections) {
        for (const auto& [key, entry] : entries) {
            if (!entry.used) {
                throw InvalidConfigError(raw.name + ":" + std::to_string(entry.line) +
                                         ": unknown key '" + key + "' in [" + section + "]");
            }
        }
    }
}

FlowConfig parse_flow(RawConfig& raw) {
    FlowConfig cfg;

    SectionReader initial(raw, "initial");
    initial.require("kind");
    const std::string kind = initial.get_string("kind", "");
    if (kind == "circle") {
        cfg.initial = InitialShape::circle(initial.get_double("r0", 1.0));
    } else if (kind == "ellipse") {
        initial.require("a");
        initial.require("b");
        cfg.initial = InitialShape::ellipse(initial.get_double("a", 0.0),
                                            initial.get_double("b", 0.0));
    } else if (kind == "perturbed") {
        initial.require("eps");
        initial.require("m");
        cfg.initial = InitialShape::perturbed(initial.get_double("r0", 1.0),
                                              initial.get_double("eps", 0.0),
                                              initial.get_int("m", 2));
    } else {
        initial.fail_key("kind", "unknown initial kind '" + kind +
                                     "' (expected circle, ellipse or perturbed)");
    }

    SectionReader velocity(raw, "velocity");
    if (velocity.present()) {
        const std::string vkind = velocity.get_string("kind", "constant");
        if (vkind == "constant") {
            cfg.velocity = InitialVelocity::constant(velocity.get_double("f0", 0.0));
        } else if (vkind == "cosine") {
            cfg.velocity = InitialVelocity::cosine(velocity.get_double("f0", 0.0),
                                                   velocity.get_double("amp", 0.0),
                                                   velocity.get_int("mode", 1));
        } else {
            velocity.fail_key("kind", "unknown velocity kind '" + vkind +
                                          "' (expected constant or cosine)");
        }
    }

    SectionReader solver(raw, "solver");
    solver.require("n");
    cfg.n = solver.get_int("n", 128);
    cfg.cfl = solver.get_double("cfl", 0.5);
    cfg.d = solver.get_double("d", 0.0);
    cfg.t_end = solver.get_double("t_end", 10.0);
    cfg.k_max_limit = solver.get_double("k_max_limit", 1e4);
    cfg.width_min = solver.get_double("width_min", 1e-3);
    cfg.record_every = solver.get_int("record_every", 4);
    cfg.dealias = solver.get_bool("dealias", false);
    return cfg;
}

StringRunConfig parse_string(RawConfig& raw) {
    StringRunConfig cfg;
    SectionReader str(raw, "string");
    const std::string shape = str.get_string("shape", "circle");
    if (shape == "circle") {
        cfg.shape = StringRunConfig::Shape::circle;
        cfg.r0 = str.get_double("r0", 1.0);
        cfg.v0 = str.get_double("v0", 0.0);
    } else if (shape == "ellipse") {
        cfg.shape = StringRunConfig::Shape::ellipse;
        str.require("a");
        str.require("b");
        cfg.a = str.get_double("a", 1.0);
        cfg.b = str.get_double("b", 1.0);
    } else {
        str.fail_key("shape", "unknown string shape '" + shape + "'");
    }
    cfg.m = str.get_int("m", 64);
    cfg.cfl = str.get_double("cfl", 0.25);
    cfg.t_end = str.get_double("t_end", 1.0);
    cfg.collapse_diameter = str.get_double("collapse_diameter", 1e-3);
    cfg.record_every = str.get_int("record_every", 4);
    return cfg;
}

void validate_string_config(const StringRunConfig& cfg) {
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) {
        throw InvalidConfigError("string cfl must lie in (0, 1]");
    }
    if (!(cfg.t_end > 0.0) || cfg.record_every < 1 || !(cfg.collapse_diameter > 0.0)) {
        throw InvalidConfigError("string t_end, record_every and collapse_diameter must be "
                                 "positive");
    }
    // constructors validate shape parameters and the grid
    if (cfg.shape == StringRunConfig::Shape::circle) {
        make_string_circle(cfg.r0, cfg.v0, cfg.m);
    } else {
        make_string_ellipse(cfg.a, cfg.b, cfg.m);
    }
}

} // namespace

std::string to_string(StringRunConfig::Shape shape) {
    return shape == StringRunConfig::Shape::circle ? "circle" : "ellipse";
}

RunSpec parse_config_text(std::string_view text, std::string_view name) {
    RawConfig raw = tokenize(text, name);

    const bool has_string = raw.sections.count("string") != 0;
    const bool has_flow = raw.sections.count("initial") || raw.sections.count("velocity") ||
                          raw.sections.count("solver");
    if (has_string && has_flow) {
        throw InvalidConfigError(raw.name + ": [string] cannot be combined with "
                                 "[initial]/[velocity]/[solver]");
    }
    if (!has_string && !raw.sections.count("initial")) {
        throw InvalidConfigError(raw.name + ": need an [initial] section (flow run) or a "
                                 "[string] section (string run)");
    }

    RunSpec spec;
    if (has_string) {
        StringRunConfig cfg = parse_string(raw);
        SectionReader output(raw, "output");
        spec.output.dir = output.get_string("dir", spec.output.dir);
        reject_unused(raw);
        validate_string_config(cfg);
        spec.config = cfg;
    } else {
        FlowConfig cfg = parse_flow(raw);
        SectionReader output(raw, "output");
        spec.output.dir = output.get_string("dir", spec.output.dir);
        reject_unused(raw);
        validate(cfg); // includes make_initial, which names convexity margins
        spec.config = cfg;
    }
    return spec;
}

RunSpec parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw InvalidConfigError("cannot open config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string canonical_config_text(const RunSpec& spec) {
    std::string out;
    auto kv = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    auto kvd = [&](const char* key, double v) { kv(key, format_sig17(v)); };
    auto kvi = [&](const char* key, int v) { kv(key, std::to_string(v)); };

    if (const FlowConfig* cfg = std::get_if<FlowConfig>(&spec.config)) {
        out += "[initial]\n";
        kv("kind", to_string(cfg->initial.kind));
        switch (cfg->initial.kind) {
            case InitialShape::Kind::circle:
                kvd("r0", cfg->initial.r0);
                break;
            case InitialShape::Kind::ellipse:
                kvd("a", cfg->initial.a);
                kvd("b", cfg->initial.b);
                break;
            case InitialShape::Kind::perturbed:
                kvd("r0", cfg->initial.r0);
                kvd("eps", cfg->initial.eps);
                kvi("m", cfg->initial.mode);
                break;
        }
        out += "[velocity]\n";
        kv("kind", to_string(cfg->velocity.kind));
        kvd("f0", cfg->velocity.f0);
        if (cfg->velocity.kind == InitialVelocity::Kind::cosine) {
            kvd("amp", cfg->velocity.amp);
            kvi("mode", cfg->velocity.mode);
        }
        out += "[solver]\n";
        kvi("n", cfg->n);
        kvd("cfl", cfg->cfl);
        kvd("d", cfg->d);
        kvd("t_end", cfg->t_end);
        kvd("k_max_limit", cfg->k_max_limit);
        kvd("width_min", cfg->width_min);
        kvi("record_every", cfg->record_every);
        kv("dealias", cfg->dealias ? "true" : "false");
    } else {
        const StringRunConfig& cfg = std::get<StringRunConfig>(spec.config);
        out += "[string]\n";
        kv("shape", to_string(cfg.shape));
        if (cfg.shape == StringRunConfig::Shape::circle) {
            kvd("r0", cfg.r0);
            kvd("v0", cfg.v0);
        } else {
            kvd("a", cfg.a);
            kvd("b", cfg.b);
        }
        kvi("m", cfg.m);
        kvd("cfl", cfg.cfl);
        kvd("t_end", cfg.t_end);
        kvd("collapse_diameter", cfg.collapse_diameter);
        kvi("record_every", cfg.record_every);
    }
    out += "[output]\n";
    kv("dir", spec.output.dir);
    return out;
}

std::string config_digest(const RunSpec& spec) {
    const std::string text = canonical_config_text(spec);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[hash & 0xf];
        hash >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf, 16);
}

} // namespace hmcf
