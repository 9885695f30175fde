#include "sarmoco/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "sarmoco/errors.hpp"

namespace sarmoco::io {

namespace {

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::array<unsigned char, sizeof(T)> b;
        std::memcpy(b.data(), &v, sizeof(T));
        std::reverse(b.begin(), b.end());
        std::memcpy(&v, b.data(), sizeof(T));
    }
    return v;
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        path_ = path.string();
    }
    void magic(const char (&m)[5]) { out_.write(m, 4); }
    template <typename T>
    void put(T v) {
        v = to_little(v);
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void samples(std::span<const std::complex<float>> s) {
        if constexpr (std::endian::native == std::endian::little) {
            out_.write(reinterpret_cast<const char*>(s.data()),
                       std::streamsize(s.size() * sizeof(std::complex<float>)));
        } else {
            for (const auto& z : s) {
                put(z.real());
                put(z.imag());
            }
        }
    }
    void finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open " + path.string());
        path_ = path.string();
    }
    void expect_magic(const char (&m)[5]) {
        char got[4];
        in_.read(got, 4);
        if (!in_ || std::memcmp(got, m, 4) != 0)
            throw FormatError(path_ + ": bad magic, expected " + std::string(m, 4));
    }
    template <typename T>
    T get() {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_) throw FormatError(path_ + ": truncated header");
        return to_little(v);
    }
    void samples(std::span<std::complex<float>> s) {
        if constexpr (std::endian::native == std::endian::little) {
            in_.read(reinterpret_cast<char*>(s.data()),
                     std::streamsize(s.size() * sizeof(std::complex<float>)));
            if (!in_) throw FormatError(path_ + ": truncated sample data");
        } else {
            for (auto& z : s) {
                const float re = get<float>();
                const float im = get<float>();
                z = {re, im};
            }
        }
    }
    void expect_end() {
        in_.peek();
        if (!in_.eof()) throw FormatError(path_ + ": trailing bytes after sample data");
    }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
};

void check_version(Reader& r) {
    const auto version = r.get<std::uint32_t>();
    if (version != kFormatVersion)
        throw FormatError(r.path() + ": unsupported format version " + std::to_string(version));
}

void write_grid(Writer& w, const GroundGrid& g) {
    w.put(std::uint32_t(g.ny()));
    w.put(std::uint32_t(g.nx()));
    w.put(g.x_min());
    w.put(g.dx());
    w.put(g.y_min());
    w.put(g.dy());
    w.put(g.height());
}

GroundGrid read_grid(Reader& r) {
    const auto ny = r.get<std::uint32_t>();
    const auto nx = r.get<std::uint32_t>();
    const auto x_min = r.get<double>();
    const auto dx = r.get<double>();
    const auto y_min = r.get<double>();
    const auto dy = r.get<double>();
    const auto q = r.get<double>();
    try {
        return GroundGrid(x_min, dx, nx, y_min, dy, ny, q);
    } catch (const std::invalid_argument& e) {
        throw FormatError(r.path() + ": invalid grid: " + e.what());
    }
}

}  // namespace

void write_cube(const std::filesystem::path& path, const DataCube& cube) {
    Writer w(path);
    w.magic("SRCC");
    w.put(kFormatVersion);
    w.put(std::uint32_t(cube.num_vpcs()));
    w.put(std::uint32_t(cube.num_pulses()));
    w.put(std::uint32_t(cube.num_bins()));
    w.put(cube.first_bin_range());
    w.put(cube.bin_spacing());
    w.put(cube.pri());
    w.put(cube.wavelength());
    w.samples(cube.samples());
    w.finish();
}

DataCube read_cube(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic("SRCC");
    check_version(r);
    const auto n = r.get<std::uint32_t>();
    const auto m = r.get<std::uint32_t>();
    const auto bins = r.get<std::uint32_t>();
    const auto first = r.get<double>();
    const auto spacing = r.get<double>();
    const auto pri = r.get<double>();
    const auto lambda = r.get<double>();
    std::optional<DataCube> cube;
    try {
        cube.emplace(bins, n, m, first, spacing, pri, lambda);
    } catch (const std::invalid_argument& e) {
        throw FormatError(r.path() + ": invalid cube header: " + e.what());
    }
    r.samples(cube->samples());
    r.expect_end();
    return std::move(*cube);
}

void write_image(const std::filesystem::path& path, const SarImage& img) {
    Writer w(path);
    w.magic("SIMG");
    w.put(kFormatVersion);
    w.put(std::uint32_t(0));
    w.put(std::uint32_t(1));
    write_grid(w, img.grid());
    w.samples(img.pixels());
    w.finish();
}

SarImage read_image(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic("SIMG");
    check_version(r);
    const auto kind = r.get<std::uint32_t>();
    const auto count = r.get<std::uint32_t>();
    if (kind != 0 || count != 1) throw FormatError(r.path() + ": not a single image");
    SarImage img(read_grid(r));
    r.samples(img.pixels());
    r.expect_end();
    return img;
}

void write_stack(const std::filesystem::path& path, const ImageStack& stack) {
    Writer w(path);
    w.magic("SIMG");
    w.put(kFormatVersion);
    w.put(std::uint32_t(1));
    w.put(std::uint32_t(stack.pulses()));
    write_grid(w, stack.grid());
    for (double t : stack.tau()) w.put(t);
    w.samples(stack.data());
    w.finish();
}

ImageStack read_stack(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic("SIMG");
    check_version(r);
    const auto kind = r.get<std::uint32_t>();
    const auto count = r.get<std::uint32_t>();
    if (kind != 1 || count == 0) throw FormatError(r.path() + ": not an image stack");
    const GroundGrid grid = read_grid(r);
    std::vector<double> tau(count);
    for (auto& t : tau) t = r.get<double>();
    ImageStack stack(grid, std::move(tau));
    r.samples(stack.data());
    r.expect_end();
    return stack;
}

void write_pgm(const std::filesystem::path& path, const SarImage& img, double dynamic_range_db) {
    if (!(dynamic_range_db > 0.0)) throw std::invalid_argument("dynamic range must be > 0 dB");
    const auto& g = img.grid();
    double peak = 0.0;
    for (const auto& v : img.pixels()) peak = std::max(peak, double(std::abs(v)));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
    std::vector<unsigned char> row(g.nx());
    for (std::size_t r = 0; r < g.ny(); ++r) {
        const std::size_t iy = g.ny() - 1 - r;
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            const double mag = std::abs(img.at(iy, ix));
            double db = peak > 0.0 && mag > 0.0 ? 20.0 * std::log10(mag / peak) : -dynamic_range_db;
            db = std::clamp(db, -dynamic_range_db, 0.0);
            row[ix] = static_cast<unsigned char>(std::lround(255.0 * (1.0 + db / dynamic_range_db)));
        }
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

nlohmann::json to_json(const Gcp& g) {
    return {
        {"pixel", {g.row, g.col}},
        {"position", to_json(g.position)},
        {"amplitude", g.amplitude},
        {"omega", g.omega},
        {"prominence", g.prominence},
        {"weight", g.weight},
        {"outlier", g.outlier},
    };
}

nlohmann::json to_json(const MocoReport& report) {
    nlohmann::json acc = nlohmann::json::array();
    const double a[3] = {report.accuracy.x, report.accuracy.y, report.accuracy.z};
    const bool dropped[3] = {false, report.y_dropped, report.z_dropped};
    for (int i = 0; i < 3; ++i) acc.push_back(dropped[i] ? nlohmann::json(nullptr) : nlohmann::json(a[i]));
    nlohmann::json gcps = nlohmann::json::array();
    for (const auto& g : report.gcps) gcps.push_back(to_json(g));
    nlohmann::json history = nlohmann::json::array();
    for (const auto& v : report.history) history.push_back(to_json(v));
    return {
        {"delta_v", to_json(report.delta_v)},
        {"accuracy", acc},
        {"condition_number", report.condition_number},
        {"y_dropped", report.y_dropped},
        {"z_dropped", report.z_dropped},
        {"gcps_used", report.gcps_used},
        {"history", history},
        {"gcps", gcps},
    };
}

nlohmann::json to_json(const FocusMetrics& fm, const GroundGrid& grid) {
    const auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return {
        {"peak_magnitude", fm.peak_magnitude},
        {"peak_pixel", {fm.peak.row, fm.peak.col}},
        {"peak_position", to_json(grid.pixel(fm.peak.row, fm.peak.col))},
        {"width_x", opt(fm.width_x)},
        {"width_y", opt(fm.width_y)},
        {"entropy", fm.entropy},
        {"contrast", fm.contrast},
    };
}

MocoReport moco_report_from_json(const nlohmann::json& j) {
    try {
        MocoReport r;
        const auto vec = [](const nlohmann::json& a) {
            return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
        };
        r.delta_v = vec(j.at("delta_v"));
        const auto& acc = j.at("accuracy");
        const auto val = [](const nlohmann::json& v) { return v.is_null() ? 0.0 : v.get<double>(); };
        r.accuracy = {val(acc.at(0)), val(acc.at(1)), val(acc.at(2))};
        r.condition_number = j.at("condition_number").get<double>();
        r.y_dropped = j.at("y_dropped").get<bool>();
        r.z_dropped = j.at("z_dropped").get<bool>();
        r.gcps_used = j.at("gcps_used").get<std::size_t>();
        for (const auto& v : j.at("history")) r.history.push_back(vec(v));
        for (const auto& g : j.at("gcps")) {
            Gcp gcp;
            gcp.row = g.at("pixel").at(0).get<std::size_t>();
            gcp.col = g.at("pixel").at(1).get<std::size_t>();
            gcp.position = vec(g.at("position"));
            gcp.amplitude = g.at("amplitude").get<double>();
            gcp.omega = g.at("omega").get<double>();
            gcp.prominence = g.at("prominence").get<double>();
            gcp.weight = g.at("weight").get<double>();
            gcp.outlier = g.at("outlier").get<bool>();
            r.gcps.push_back(gcp);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed MoCo report: ") + e.what());
    }
}

std::string gcp_csv(const MocoReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "row,col,x,y,z,amplitude,omega,prominence,weight,outlier\n";
    for (const auto& g : report.gcps) {
        out << g.row << ',' << g.col << ',' << g.position.x << ',' << g.position.y << ','
            << g.position.z << ',' << g.amplitude << ',' << g.omega << ',' << g.prominence << ','
            << g.weight << ',' << (g.outlier ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace sarmoco::io
