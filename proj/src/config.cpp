#include "sarmoco/config.hpp"

#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "sarmoco/errors.hpp"

namespace sarmoco {

namespace {

using nlohmann::json;

// Strict view over one JSON object: every key must be consumed exactly once,
// leftovers are reported as unknown fields.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: '" + label() + "' must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <typename T>
    T get(const std::string& key, T fallback) {
        if (!j_.contains(key)) return fallback;
        return convert<T>(key);
    }
    template <typename T>
    T require(const std::string& key) {
        if (!j_.contains(key))
            throw ConfigError("config: missing required field '" + field(key) + "'");
        return convert<T>(key);
    }
    Vec3 vec(const std::string& key, const Vec3& fallback) {
        if (!j_.contains(key)) return fallback;
        return to_vec(key);
    }
    Vec3 require_vec(const std::string& key) {
        if (!j_.contains(key))
            throw ConfigError("config: missing required field '" + field(key) + "'");
        return to_vec(key);
    }
    std::optional<Section> child(const std::string& key) {
        if (!j_.contains(key)) return std::nullopt;
        seen_.insert(key);
        return Section(j_.at(key), field(key));
    }
    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }
    std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key()))
                throw ConfigError("config: unknown field '" + field(it.key()) + "'");
        }
    }

private:
    std::string label() const { return path_.empty() ? "<root>" : path_; }

    template <typename T>
    T convert(const std::string& key) {
        seen_.insert(key);
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
                    throw ConfigError("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError("");
            }
            return v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError("config: field '" + field(key) + "' has the wrong type");
        }
    }

    Vec3 to_vec(const std::string& key) {
        seen_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
            !v[2].is_number())
            throw ConfigError("config: field '" + field(key) + "' must be an array of 3 numbers");
        return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::complex<double> parse_reflectivity(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("config: field '" + field + "' must be a number or [re, im]");
}

template <typename Enum>
Enum parse_enum(const std::string& value, const std::string& field,
                std::initializer_list<std::pair<const char*, Enum>> options) {
    for (const auto& [name, e] : options)
        if (value == name) return e;
    throw ConfigError("config: field '" + field + "' has unsupported value '" + value + "'");
}

}  // namespace

std::vector<Scatterer> lattice_scatterers(const LatticeSpec& spec) {
    if (spec.rows == 0 || spec.cols == 0) throw ConfigError("config: lattice needs rows, cols >= 1");
    if (spec.x_max < spec.x_min || spec.y_max < spec.y_min)
        throw ConfigError("config: lattice extent is empty");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(-spec.jitter, spec.jitter);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    const double cell_x = (spec.x_max - spec.x_min) / double(spec.cols);
    const double cell_y = (spec.y_max - spec.y_min) / double(spec.rows);
    std::vector<Scatterer> out;
    out.reserve(spec.rows * spec.cols);
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
            Scatterer s;
            const double jx = spec.jitter > 0.0 ? jitter(rng) : 0.0;
            const double jy = spec.jitter > 0.0 ? jitter(rng) : 0.0;
            s.position = {spec.x_min + (double(c) + 0.5) * cell_x + jx,
                          spec.y_min + (double(r) + 0.5) * cell_y + jy, spec.height};
            const double ph = spec.random_phase ? phase(rng) : 0.0;
            s.reflectivity = std::polar(spec.amplitude, ph);
            out.push_back(s);
        }
    }
    return out;
}

Trajectory RunConfig::trajectory() const { return Trajectory(position, velocity, pulses, radar.pri); }

Trajectory RunConfig::navigation() const {
    return apply_velocity_error(trajectory(), injected_delta_v);
}

void RunConfig::validate() const {
    try {
        radar.validate();
        array.validate();
        scene.validate();
        (void)trajectory();
        if (!injected_delta_v.is_finite()) throw std::invalid_argument("injected_delta_v not finite");
        if (moco.gcp_count < 1) throw std::invalid_argument("moco.gcp_count must be >= 1");
        if (moco.pad_factor < 1) throw std::invalid_argument("moco.pad_factor must be >= 1");
        if (moco.margin < 1.0) throw std::invalid_argument("moco.margin must be >= 1");
        if (!(moco.refine.half_width > 0.0)) throw std::invalid_argument("moco.half_width must be > 0");
        if (!(moco.refine.tolerance > 0.0)) throw std::invalid_argument("moco.tolerance must be > 0");
        if (!(moco.wls.max_condition > 1.0))
            throw std::invalid_argument("moco.max_condition must be > 1");
        if (!(dynamic_range_db > 0.0)) throw std::invalid_argument("dynamic_range_db must be > 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::size_t required_range_bins(const RunConfig& cfg) {
    const Trajectory traj = cfg.trajectory();
    double r_max = 0.0;
    const auto consider = [&](const Vec3& p) {
        for (std::size_t m : {std::size_t{0}, traj.pulses() - 1}) {
            for (const auto& vpc : vpc_positions(traj, cfg.array, m)) {
                r_max = std::max(r_max, (p - vpc).norm());
            }
        }
    };
    const auto& g = cfg.grid;
    for (double x : {g.x(0), g.x(g.nx() - 1)})
        for (double y : {g.y(0), g.y(g.ny() - 1)}) consider({x, y, g.height()});
    for (const auto& s : cfg.scene.scatterers) {
        const double half = 0.5 * double(traj.pulses()) * traj.pri();
        consider(s.position + s.velocity * half);
        consider(s.position - s.velocity * half);
    }
    // Margin of a few resolution cells beyond the farthest range.
    const double span = r_max + 10.0 * cfg.radar.range_resolution - cfg.radar.first_bin_range;
    return std::size_t(std::ceil(std::max(span, 0.0) / cfg.radar.bin_spacing)) + 2;
}

RunConfig parse_run_config(const json& j) {
    RunConfig cfg;
    Section root(j, "");

    if (auto s = root.child("radar")) {
        cfg.radar.wavelength = s->get("wavelength", cfg.radar.wavelength);
        cfg.radar.range_resolution = s->get("range_resolution", cfg.radar.range_resolution);
        cfg.radar.bin_spacing = s->get("bin_spacing", 0.5 * cfg.radar.range_resolution);
        cfg.radar.first_bin_range = s->get("first_bin_range", cfg.radar.first_bin_range);
        cfg.radar.num_bins = s->get<std::size_t>("num_bins", 0);
        cfg.radar.pri = s->get("pri", cfg.radar.pri);
        cfg.radar.nav_accuracy = s->get("nav_accuracy", cfg.radar.nav_accuracy);
        s->finish();
    } else {
        cfg.radar.num_bins = 0;
    }

    if (auto s = root.child("trajectory")) {
        cfg.position = s->vec("position", cfg.position);
        cfg.velocity = s->vec("velocity", cfg.velocity);
        cfg.pulses = s->get<std::size_t>("pulses", cfg.pulses);
        s->finish();
    }

    cfg.array.spacing = cfg.radar.wavelength / 4.0;
    if (auto s = root.child("array")) {
        cfg.array.count = s->get<std::size_t>("count", cfg.array.count);
        cfg.array.spacing = s->get("spacing", cfg.array.spacing);
        cfg.array.mounting_offset = s->vec("mounting_offset", cfg.array.mounting_offset);
        s->finish();
    }

    if (auto s = root.child("grid")) {
        const double x_min = s->get("x_min", 5.0);
        const double x_max = s->get("x_max", 50.0);
        const double dx = s->get("dx", 0.05);
        const double y_min = s->get("y_min", -15.0);
        const double y_max = s->get("y_max", 15.0);
        const double dy = s->get("dy", 0.05);
        const double q = s->get("height", 0.0);
        s->finish();
        try {
            cfg.grid = GroundGrid::from_extent(x_min, x_max, dx, y_min, y_max, dy, q);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: grid: ") + e.what());
        }
    }

    {
        auto s = root.child("scene");
        if (!s) throw ConfigError("config: missing required field 'scene'");
        if (s->has("scatterers")) {
            const json& list = s->raw("scatterers");
            if (!list.is_array()) throw ConfigError("config: field 'scene.scatterers' must be an array");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Section item(list[i], "scene.scatterers[" + std::to_string(i) + "]");
                Scatterer sc;
                sc.position = item.require_vec("position");
                if (item.has("reflectivity"))
                    sc.reflectivity = parse_reflectivity(item.raw("reflectivity"),
                                                         item.field("reflectivity"));
                sc.velocity = item.vec("velocity", sc.velocity);
                item.finish();
                cfg.scene.scatterers.push_back(sc);
            }
        }
        if (auto l = s->child("lattice")) {
            LatticeSpec spec;
            spec.x_min = l->get("x_min", spec.x_min);
            spec.x_max = l->get("x_max", spec.x_max);
            spec.y_min = l->get("y_min", spec.y_min);
            spec.y_max = l->get("y_max", spec.y_max);
            spec.rows = l->get<std::size_t>("rows", spec.rows);
            spec.cols = l->get<std::size_t>("cols", spec.cols);
            spec.jitter = l->get("jitter", spec.jitter);
            spec.height = l->get("height", spec.height);
            spec.amplitude = l->get("amplitude", spec.amplitude);
            spec.random_phase = l->get("random_phase", spec.random_phase);
            spec.seed = l->get<std::uint64_t>("seed", spec.seed);
            l->finish();
            for (const auto& sc : lattice_scatterers(spec)) cfg.scene.scatterers.push_back(sc);
        }
        s->finish();
    }

    if (root.has("injected_delta_v")) cfg.injected_delta_v = root.vec("injected_delta_v", {});

    if (auto s = root.child("noise")) {
        cfg.scene.noise.power = s->get("power", 0.0);
        cfg.scene.noise.seed = s->get<std::uint64_t>("seed", 0);
        s->finish();
    }

    if (auto s = root.child("moco")) {
        auto& m = cfg.moco;
        m.gcp_count = s->get<std::size_t>("gcp_count", m.gcp_count);
        m.min_separation = s->get<std::size_t>("min_separation", m.min_separation);
        m.pad_factor = s->get<std::size_t>("pad_factor", m.pad_factor);
        m.margin = s->get("margin", m.margin);
        m.wls.drop_z = s->get("drop_z", m.wls.drop_z);
        m.wls.drop_y = s->get("drop_y", m.wls.drop_y);
        m.wls.max_condition = s->get("max_condition", m.wls.max_condition);
        m.refine.iterations = s->get<std::size_t>("iterations", m.refine.iterations);
        m.refine.half_width = s->get("half_width", m.refine.half_width);
        m.refine.tolerance = s->get("tolerance", m.refine.tolerance);
        if (s->has("compensation"))
            cfg.compensation = parse_enum<Compensation>(
                s->require<std::string>("compensation"), s->field("compensation"),
                {{"phase", Compensation::phase}, {"refocus", Compensation::refocus}});
        if (s->has("weighting"))
            m.wls.weighting = parse_enum<Weighting>(
                s->require<std::string>("weighting"), s->field("weighting"),
                {{"amplitude", Weighting::amplitude},
                 {"prominence", Weighting::prominence},
                 {"uniform", Weighting::uniform}});
        if (s->has("peak_mode"))
            m.peak_mode = parse_enum<PeakMode>(s->require<std::string>("peak_mode"),
                                               s->field("peak_mode"),
                                               {{"parabolic", PeakMode::parabolic},
                                                {"raw", PeakMode::raw}});
        s->finish();
    }

    if (auto s = root.child("focus")) {
        if (s->has("interpolator"))
            cfg.focus.interpolator = parse_enum<RangeInterpolator>(
                s->require<std::string>("interpolator"), s->field("interpolator"),
                {{"linear", RangeInterpolator::linear}, {"sinc8", RangeInterpolator::sinc8}});
        cfg.focus.threads = s->get<unsigned>("threads", cfg.focus.threads);
        s->finish();
    }
    cfg.moco.threads = cfg.focus.threads;

    if (auto s = root.child("output")) {
        cfg.dynamic_range_db = s->get("dynamic_range_db", cfg.dynamic_range_db);
        s->finish();
    }
    root.finish();

    if (cfg.radar.num_bins == 0) {
        // Validate what the bin computation depends on before using it.
        try {
            cfg.array.validate();
            (void)cfg.trajectory();
            if (!(cfg.radar.bin_spacing > 0.0)) throw std::invalid_argument("bin spacing must be > 0");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        cfg.radar.num_bins = required_range_bins(cfg);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

}  // namespace sarmoco
