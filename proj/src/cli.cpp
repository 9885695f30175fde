#include "sarmoco/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sarmoco/config.hpp"
#include "sarmoco/errors.hpp"
#include "sarmoco/io.hpp"
#include "sarmoco/pipeline.hpp"

namespace sarmoco::cli {

namespace {

using nlohmann::json;

struct Column {
    std::string name;
    bool numeric;
};

const std::vector<Column>& columns() {
    static const std::vector<Column> cols = {
        {"run", false},          {"mode", false},          {"dv_x", true},
        {"dv_y", true},          {"dv_z", true},           {"gcps_used", true},
        {"peak_magnitude", true}, {"entropy", true},       {"contrast", true},
        {"width_x", true},       {"width_y", true},        {"detected", true},
        {"mean_loc_error", true},
    };
    return cols;
}

std::optional<double> number(const json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

std::vector<std::optional<double>> numeric_row(const json& run) {
    const json& focus = run.at("focus");
    const json& moco = run.at("moco");
    std::vector<std::optional<double>> v;
    for (int i = 0; i < 3; ++i)
        v.push_back(moco.is_null() ? std::nullopt : number(moco.at("delta_v").at(i)));
    v.push_back(moco.is_null() ? std::nullopt : number(moco.at("gcps_used")));
    v.push_back(number(focus.at("peak_magnitude")));
    v.push_back(number(focus.at("entropy")));
    v.push_back(number(focus.at("contrast")));
    v.push_back(number(focus.at("width_x")));
    v.push_back(number(focus.at("width_y")));
    v.push_back(number(run.at("localization").at("detected")));
    v.push_back(number(run.at("localization").at("mean_error")));
    return v;
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream s;
    s << std::setprecision(6) << *v;
    return s.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

int fail(const std::string& msg, int code) {
    std::cerr << "sarmoco: " << msg << "\n";
    return code;
}

int cmd_simulate(const std::string& config, const std::string& out,
                 std::optional<std::uint64_t> seed, std::optional<unsigned> threads) {
    RunConfig cfg = load_run_config(config);
    if (seed) cfg.scene.noise.seed = *seed;
    if (threads) cfg.focus.threads = *threads;
    io::write_cube(out, simulate(cfg));
    return 0;
}

int cmd_focus(const std::string& cube_path, const std::string& config, const std::string& out,
              FocusMode mode, std::optional<double> dr_db, std::optional<unsigned> threads) {
    RunConfig cfg = load_run_config(config);
    if (threads) {
        cfg.focus.threads = *threads;
        cfg.moco.threads = *threads;
    }
    const double dynamic_range = dr_db.value_or(cfg.dynamic_range_db);
    if (!(dynamic_range > 0.0)) throw ConfigError("--dynamic-range-db must be > 0");
    const DataCube cube = io::read_cube(cube_path);
    const FocusResult result = focus(cube, cfg, mode);

    io::write_image(out + ".simg", result.image);
    io::write_pgm(out + ".pgm", result.image, dynamic_range);
    io::write_text(out + ".json", to_json(result).dump(2) + "\n");
    if (result.moco && !result.moco->gcps.empty())
        io::write_text(out + "_gcp.csv", io::gcp_csv(*result.moco));
    return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& format,
               const std::string& out) {
    std::vector<json> runs;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot open " + f);
        try {
            runs.push_back(json::parse(in));
        } catch (const json::parse_error& e) {
            throw FormatError(f + ": " + e.what());
        }
    }
    const std::string table =
        report_table(files, runs, format == "csv" ? TableFormat::csv : TableFormat::markdown);
    if (out.empty())
        std::cout << table;
    else
        io::write_text(out, table);
    return 0;
}

}  // namespace

std::string report_table(const std::vector<std::string>& names, const std::vector<json>& runs,
                         TableFormat format) {
    if (runs.empty()) throw FormatError("report: no run summaries given");
    if (names.size() != runs.size()) throw std::invalid_argument("report: names and runs differ");

    std::vector<std::vector<std::optional<double>>> values;
    std::vector<std::string> modes;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const json& r = runs[i];
        try {
            if (!r.is_object() || r.value("format", "") != "sarmoco-run" ||
                r.at("version").get<int>() != 1)
                throw FormatError("");
            modes.push_back(r.at("mode").get<std::string>());
            values.push_back(numeric_row(r));
        } catch (const std::exception&) {
            throw FormatError("report: " + names[i] + " is not a run summary of the expected schema");
        }
    }

    const auto& cols = columns();
    std::vector<std::string> header;
    for (const auto& c : cols) header.push_back(c.name);
    const bool deltas = runs.size() > 1;
    if (deltas)
        for (const auto& c : cols)
            if (c.numeric) header.push_back("d_" + c.name);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::vector<std::string> row = {names[i], modes[i]};
        for (const auto& v : values[i]) row.push_back(fmt(v));
        if (deltas) {
            for (std::size_t k = 0; k < values[i].size(); ++k) {
                const auto& a = values[i][k];
                const auto& b = values[0][k];
                row.push_back(a && b ? fmt(*a - *b) : "");
            }
        }
        rows.push_back(std::move(row));
    }

    std::ostringstream s;
    if (format == TableFormat::csv) {
        for (std::size_t k = 0; k < header.size(); ++k) s << (k ? "," : "") << header[k];
        s << "\n";
        for (const auto& row : rows) {
            for (std::size_t k = 0; k < row.size(); ++k) s << (k ? "," : "") << csv_field(row[k]);
            s << "\n";
        }
    } else {
        s << "|";
        for (const auto& h : header) s << " " << h << " |";
        s << "\n|";
        for (std::size_t k = 0; k < header.size(); ++k) s << (k < 2 ? " --- |" : " ---: |");
        s << "\n";
        for (const auto& row : rows) {
            s << "|";
            for (const auto& c : row) s << " " << c << " |";
            s << "\n";
        }
    }
    return s.str();
}

int run(int argc, char** argv) {
    CLI::App app{"MIMO SAR simulation, back-projection and velocity-error autofocus"};
    app.require_subcommand(1);

    std::string config, out, cube, report_out, report_format = "md";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> dr_db;
    std::vector<std::string> files;

    auto* sim = app.add_subcommand("simulate", "Simulate a range-compressed data cube");
    sim->add_option("--config", config, "Run configuration (JSON)")->required();
    sim->add_option("--out", out, "Output cube file")->required();
    sim->add_option("--seed", seed, "Noise seed (overrides the configuration)");
    sim->add_option("--threads", threads, "Worker threads, 0 = all cores");

    bool no_moco = false, moco = false, oracle = false;
    auto* foc = app.add_subcommand("focus", "Back-project a cube, optionally with autofocus");
    foc->add_option("--cube", cube, "Input cube file")->required();
    foc->add_option("--config", config, "Run configuration (JSON)")->required();
    foc->add_option("--out", out, "Output path prefix")->required();
    auto* f1 = foc->add_flag("--no-moco", no_moco, "Focus with the navigation track as is");
    auto* f2 = foc->add_flag("--moco", moco, "Estimate and compensate the residual velocity (default)");
    auto* f3 = foc->add_flag("--oracle-moco", oracle, "Compensate with the injected velocity error");
    f1->excludes(f2)->excludes(f3);
    f2->excludes(f3);
    foc->add_option("--dynamic-range-db", dr_db, "Quick-look dynamic range (dB)");
    foc->add_option("--threads", threads, "Worker threads, 0 = all cores");

    auto* rep = app.add_subcommand("report", "Compare run summaries");
    rep->add_option("files", files, "Run summary JSON files");
    rep->add_option("--format", report_format, "Table format")
        ->check(CLI::IsMember({"md", "csv"}));
    rep->add_option("--out", report_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) return cmd_simulate(config, out, seed, threads);
        if (*foc) {
            (void)moco;
            const FocusMode mode = no_moco  ? FocusMode::none
                                   : oracle ? FocusMode::oracle
                                            : FocusMode::moco;
            return cmd_focus(cube, config, out, mode, dr_db, threads);
        }
        return cmd_report(files, report_format, report_out);
    } catch (const ConfigError& e) {
        return fail(e.what(), 2);
    } catch (const NumericalError& e) {
        return fail(e.what(), 3);
    } catch (const std::exception& e) {
        return fail(e.what(), 1);
    }
}

}  // namespace sarmoco::cli
