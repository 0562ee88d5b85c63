// Serialization: 17-significant-digit number formatting, CSV/JSON table
// emission with a shared metadata block, and the strict run-configuration
// schema consumed by the command-line tool. Unknown configuration keys are
// rejected rather than ignored so typos cannot silently change a run.
#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polarization.hpp"
#include "ring.hpp"
#include "search.hpp"
#include "spin.hpp"

namespace ringpol::io {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest fixed-precision form that round-trips a double exactly.
// Negative zero is normalized so equal values always print identically.
inline std::string fmt17(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct Cell {
    enum class Kind { number, text, empty } kind{Kind::empty};
    double value{};
    std::string text;

    Cell() = default;
    Cell(double v) : kind(Kind::number), value(v) {}
    Cell(std::string t) : kind(Kind::text), text(std::move(t)) {}
    static Cell none() { return Cell(); }
};

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class Format { csv, json };

inline Format format_from_string(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("format must be 'csv' or 'json'");
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

// RFC 4180 body preceded by "# key = value" metadata comment lines.
inline void write_csv(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << detail::csv_escape(t.columns[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            switch (row[i].kind) {
                case Cell::Kind::number: os << fmt17(row[i].value); break;
                case Cell::Kind::text: os << detail::csv_escape(row[i].text); break;
                case Cell::Kind::empty: break;
            }
        }
        os << "\n";
    }
}

inline void write_json(std::ostream& os, const Table& t) {
    nlohmann::ordered_json doc;
    auto& meta = doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    doc["columns"] = t.columns;
    auto& rows = doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            switch (c.kind) {
                case Cell::Kind::number: r.push_back(c.value); break;
                case Cell::Kind::text: r.push_back(c.text); break;
                case Cell::Kind::empty: r.push_back(nullptr); break;
            }
        }
        rows.push_back(std::move(r));
    }
    os << doc.dump(2) << "\n";
}

// Empty path writes to stdout.
inline void write_table(const std::string& path, Format fmt, const Table& t) {
    const auto emit = [&](std::ostream& os) {
        if (fmt == Format::csv) write_csv(os, t);
        else write_json(os, t);
        if (!os) throw io_error("failed while writing output stream");
    };
    if (path.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open output file: " + path);
    emit(f);
    f.close();
    if (!f) throw io_error("failed to finish writing: " + path);
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct OutputSpec {
    std::string path;         // empty = stdout
    Format format{Format::csv};
    std::string points_path;  // optional companion file for refined points
};

struct RunConfig {
    std::optional<RingGeometry> geometry;
    std::optional<RingParams> params;
    std::optional<search::SweepSpec> sweep;
    std::optional<polar::InputMode> input_mode;
    int texture_samples{721};
    OutputSpec output{};
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const char* where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known)
            throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
    }
}

inline double require_number(const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
    return v.get<double>();
}

inline cplx parse_complex(const nlohmann::json& v, const char* what) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw std::invalid_argument(std::string(what) + " must be [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

inline polar::InputMode parse_input_mode(const nlohmann::json& v) {
    polar::InputMode mode;
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "eigen_mixture") mode.kind = polar::InputKind::eigen_mixture;
        else if (s == "sz_mixture") mode.kind = polar::InputKind::sz_mixture;
        else throw std::invalid_argument("input_mode string must be eigen_mixture or sz_mixture");
        return mode;
    }
    if (v.is_object()) {
        detail::reject_unknown_keys(v, "input_mode", {"pure"});
        if (!v.contains("pure")) throw std::invalid_argument("input_mode object needs 'pure'");
        const auto& p = v["pure"];
        if (!p.is_object()) throw std::invalid_argument("input_mode.pure must be an object");
        detail::reject_unknown_keys(p, "input_mode.pure", {"up", "down"});
        mode.kind = polar::InputKind::pure_state;
        mode.state.up = p.contains("up") ? detail::parse_complex(p["up"], "input_mode.pure.up") : cplx{};
        mode.state.down =
            p.contains("down") ? detail::parse_complex(p["down"], "input_mode.pure.down") : cplx{};
        return mode;
    }
    throw std::invalid_argument("input_mode must be a string or an object");
}

inline search::SweepSpec parse_sweep(const nlohmann::json& v) {
    if (!v.is_object()) throw std::invalid_argument("sweep must be an object");
    detail::reject_unknown_keys(v, "sweep",
                                {"variable", "range", "samples", "case", "geometry_rule"});
    search::SweepSpec spec;
    if (!v.contains("variable") || !v.contains("range"))
        throw std::invalid_argument("sweep needs 'variable' and 'range'");
    spec.variable = search::sweep_variable_from_string(v["variable"].get<std::string>());
    const auto& range = v["range"];
    if (!range.is_array() || range.size() != 2)
        throw std::invalid_argument("sweep.range must be [lo, hi]");
    spec.lo = detail::require_number(range[0], "sweep.range[0]");
    spec.hi = detail::require_number(range[1], "sweep.range[1]");
    if (v.contains("samples")) {
        if (!v["samples"].is_number_integer())
            throw std::invalid_argument("sweep.samples must be an integer");
        spec.samples = v["samples"].get<int>();
    }
    if (v.contains("case")) spec.case_tag = polar::case_from_string(v["case"].get<std::string>());
    if (v.contains("geometry_rule")) {
        const auto& gr = v["geometry_rule"];
        if (!gr.is_object()) throw std::invalid_argument("sweep.geometry_rule must be an object");
        detail::reject_unknown_keys(gr, "sweep.geometry_rule", {"type", "anchor", "index", "sign"});
        const std::string type = gr.contains("type") ? gr["type"].get<std::string>() : "fixed";
        if (type == "fixed") {
            spec.rule.use_family = false;
        } else if (type == "family") {
            spec.rule.use_family = true;
            if (gr.contains("anchor")) {
                const std::string a = gr["anchor"].get<std::string>();
                if (a == "gamma2") spec.rule.family.anchor = polar::FamilyAnchor::fixed_gamma2;
                else if (a == "gamma1") spec.rule.family.anchor = polar::FamilyAnchor::fixed_gamma1;
                else throw std::invalid_argument("geometry_rule.anchor must be gamma1 or gamma2");
            }
            if (gr.contains("index")) {
                if (!gr["index"].is_number_integer())
                    throw std::invalid_argument("geometry_rule.index must be an integer");
                spec.rule.family.index = gr["index"].get<int>();
            }
            if (gr.contains("sign")) {
                if (!gr["sign"].is_number_integer())
                    throw std::invalid_argument("geometry_rule.sign must be +1 or -1");
                spec.rule.family.sign = gr["sign"].get<int>();
            }
        } else {
            throw std::invalid_argument("geometry_rule.type must be 'fixed' or 'family'");
        }
    }
    return spec;
}

inline RunConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("configuration root must be an object");
    detail::reject_unknown_keys(
        doc, "configuration",
        {"geometry", "params", "sweep", "input_mode", "texture_samples", "output"});
    RunConfig cfg;
    if (doc.contains("geometry")) {
        const auto& g = doc["geometry"];
        if (!g.is_object()) throw std::invalid_argument("geometry must be an object");
        detail::reject_unknown_keys(g, "geometry", {"gamma1", "gamma2"});
        if (!g.contains("gamma1") || !g.contains("gamma2"))
            throw std::invalid_argument("geometry needs gamma1 and gamma2");
        cfg.geometry = RingGeometry{detail::require_number(g["gamma1"], "geometry.gamma1"),
                                    detail::require_number(g["gamma2"], "geometry.gamma2")};
    }
    if (doc.contains("params")) {
        const auto& p = doc["params"];
        if (!p.is_object()) throw std::invalid_argument("params must be an object");
        detail::reject_unknown_keys(p, "params", {"so_ratio", "ka"});
        if (!p.contains("so_ratio") || !p.contains("ka"))
            throw std::invalid_argument("params needs so_ratio and ka");
        cfg.params = RingParams{detail::require_number(p["so_ratio"], "params.so_ratio"),
                                detail::require_number(p["ka"], "params.ka")};
    }
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc["sweep"]);
    if (doc.contains("input_mode")) cfg.input_mode = parse_input_mode(doc["input_mode"]);
    if (doc.contains("texture_samples")) {
        if (!doc["texture_samples"].is_number_integer() || doc["texture_samples"].get<int>() < 2)
            throw std::invalid_argument("texture_samples must be an integer >= 2");
        cfg.texture_samples = doc["texture_samples"].get<int>();
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        if (!o.is_object()) throw std::invalid_argument("output must be an object");
        detail::reject_unknown_keys(o, "output", {"path", "format", "points_path"});
        if (o.contains("path")) cfg.output.path = o["path"].get<std::string>();
        if (o.contains("format")) cfg.output.format = format_from_string(o["format"].get<std::string>());
        if (o.contains("points_path")) cfg.output.points_path = o["points_path"].get<std::string>();
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        f >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    if (cfg.geometry)
        doc["geometry"] = {{"gamma1", cfg.geometry->gamma1}, {"gamma2", cfg.geometry->gamma2}};
    if (cfg.params)
        doc["params"] = {{"so_ratio", cfg.params->so_ratio}, {"ka", cfg.params->ka}};
    if (cfg.sweep) {
        nlohmann::ordered_json s;
        s["variable"] = search::to_string(cfg.sweep->variable);
        s["range"] = {cfg.sweep->lo, cfg.sweep->hi};
        s["samples"] = cfg.sweep->samples;
        s["case"] = polar::to_string(cfg.sweep->case_tag);
        if (cfg.sweep->rule.use_family) {
            s["geometry_rule"] = {
                {"type", "family"},
                {"anchor", cfg.sweep->rule.family.anchor == polar::FamilyAnchor::fixed_gamma2
                               ? "gamma2"
                               : "gamma1"},
                {"index", cfg.sweep->rule.family.index},
                {"sign", cfg.sweep->rule.family.sign}};
        } else {
            s["geometry_rule"] = {{"type", "fixed"}};
        }
        doc["sweep"] = std::move(s);
    }
    if (cfg.input_mode) {
        switch (cfg.input_mode->kind) {
            case polar::InputKind::eigen_mixture: doc["input_mode"] = "eigen_mixture"; break;
            case polar::InputKind::sz_mixture: doc["input_mode"] = "sz_mixture"; break;
            case polar::InputKind::pure_state:
                doc["input_mode"] = {
                    {"pure",
                     {{"up", {cfg.input_mode->state.up.real(), cfg.input_mode->state.up.imag()}},
                      {"down",
                       {cfg.input_mode->state.down.real(), cfg.input_mode->state.down.imag()}}}}};
                break;
        }
    }
    doc["texture_samples"] = cfg.texture_samples;
    nlohmann::ordered_json o;
    o["path"] = cfg.output.path;
    o["format"] = cfg.output.format == Format::csv ? "csv" : "json";
    if (!cfg.output.points_path.empty()) o["points_path"] = cfg.output.points_path;
    doc["output"] = std::move(o);
    return doc;
}

}  // namespace ringpol::io
