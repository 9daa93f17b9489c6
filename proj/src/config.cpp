#include "besic/config.hpp"

#include <fstream>
#include <set>

#include "besic/error.hpp"
#include "besic/format.hpp"

namespace besic {

namespace {

Rational rational_field(const nlohmann::json& v, const char* key)
{
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_object()) return dyadic_from_json(v);
    throw ConfigError(std::string("config key '") + key + "' must be a rational string, integer or dyadic object");
}

template <class T>
T number_field(const nlohmann::json& v, const char* key)
{
    if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_float() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    return v.get<T>();
}

Real real_field(const nlohmann::json& v, const char* key)
{
    if (v.is_string()) return to_real(parse_rational(v.get<std::string>()));
    if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    return v.get<long double>();
}

} // namespace

void validate(const RunConfig& cfg)
{
    if (cfg.s < 0 || cfg.s > 1) throw ConfigError("s must lie in [0, 1]");
    if (cfg.depth < 1) throw ConfigError("depth must be >= 1");
    if (!(cfg.C_tube > 1)) throw ConfigError("C_tube must exceed 1");
    if (!(cfg.angle_tol > 0) || !(cfg.angle_tol < 1)) throw ConfigError("angle_tol must lie in (0, 1)");
    if (!(cfg.raster_resolution >= 4)) throw ConfigError("raster_resolution must be >= 4 (cell <= radius / 4)");
    if (cfg.materialization_cap < 1) throw ConfigError("materialization_cap must be positive");
    if (cfg.max_raster_cells < 1) throw ConfigError("max_raster_cells must be positive");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.c <= 0 || cfg.c >= Rational(1, 10)) throw ConfigError("c must lie in (0, 1/10)");
    if (!is_dyadic(cfg.c)) throw ConfigError("c must be dyadic");
}

RunConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {
        "s", "c", "depth", "profile", "C_tube", "angle_tol", "raster_resolution", "materialization_cap",
        "max_raster_cells", "render_cap", "seed", "spacing_samples", "identity_samples", "containment_thetas",
        "limit_thetas", "threads", "cache_dir"};
    for (const auto& [k, _] : j.items())
        if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
    RunConfig c;
    if (j.contains("s")) c.s = rational_field(j["s"], "s");
    if (j.contains("c")) c.c = rational_field(j["c"], "c");
    if (j.contains("depth")) c.depth = number_field<int>(j["depth"], "depth");
    if (j.contains("profile")) c.profile = parse_profile(j["profile"].get<std::string>());
    if (j.contains("C_tube")) c.C_tube = real_field(j["C_tube"], "C_tube");
    if (j.contains("angle_tol")) c.angle_tol = real_field(j["angle_tol"], "angle_tol");
    if (j.contains("raster_resolution")) c.raster_resolution = real_field(j["raster_resolution"], "raster_resolution");
    if (j.contains("materialization_cap"))
        c.materialization_cap = number_field<std::size_t>(j["materialization_cap"], "materialization_cap");
    if (j.contains("max_raster_cells"))
        c.max_raster_cells = number_field<std::size_t>(j["max_raster_cells"], "max_raster_cells");
    if (j.contains("render_cap")) c.render_cap = number_field<std::size_t>(j["render_cap"], "render_cap");
    if (j.contains("seed")) c.seed = number_field<std::uint64_t>(j["seed"], "seed");
    if (j.contains("spacing_samples"))
        c.spacing_samples = number_field<std::size_t>(j["spacing_samples"], "spacing_samples");
    if (j.contains("identity_samples"))
        c.identity_samples = number_field<std::size_t>(j["identity_samples"], "identity_samples");
    if (j.contains("containment_thetas"))
        c.containment_thetas = number_field<std::size_t>(j["containment_thetas"], "containment_thetas");
    if (j.contains("limit_thetas")) c.limit_thetas = number_field<std::size_t>(j["limit_thetas"], "limit_thetas");
    if (j.contains("threads")) c.threads = number_field<int>(j["threads"], "threads");
    if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
    validate(c);
    return c;
}

nlohmann::json to_json(const RunConfig& c)
{
    return {{"s", to_string(c.s)},
            {"c", to_string(c.c)},
            {"depth", c.depth},
            {"profile", to_string(c.profile)},
            {"C_tube", decimal(c.C_tube, 12)},
            {"angle_tol", decimal(c.angle_tol, 6)},
            {"raster_resolution", decimal(c.raster_resolution, 12)},
            {"materialization_cap", c.materialization_cap},
            {"max_raster_cells", c.max_raster_cells},
            {"render_cap", c.render_cap},
            {"seed", c.seed},
            {"spacing_samples", c.spacing_samples},
            {"identity_samples", c.identity_samples},
            {"containment_thetas", c.containment_thetas},
            {"limit_thetas", c.limit_thetas},
            {"threads", c.threads}};
}

RunConfig load_config(const std::string& file)
{
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot read config " + file);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + file + ": " + e.what());
    }
    return config_from_json(j);
}

SequenceTable make_table(const RunConfig& cfg)
{
    validate(cfg);
    return derive_sequences(build_schedule(cfg.s, cfg.depth), cfg.c, cfg.profile, Rational(2), cfg.C_tube);
}

HierarchyOptions hierarchy_options(const RunConfig& cfg)
{
    HierarchyOptions o;
    o.materialization_cap = cfg.materialization_cap;
    o.arc.angle_tol = cfg.angle_tol;
    o.threads = cfg.threads;
    o.cache_dir = cfg.cache_dir;
    return o;
}

} // namespace besic
