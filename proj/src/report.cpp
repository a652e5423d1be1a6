#include "levelset/harness.hpp"

#include "levelset/errors.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace levelset {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct ConfigValue {
    enum class Kind { string, number, boolean, array } kind;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<ConfigValue> items;
};

ConfigValue parse_value(const std::string& raw, const std::string& where);

std::vector<ConfigValue> parse_array(const std::string& raw,
                                     const std::string& where) {
    std::vector<ConfigValue> items;
    std::string body = trim(raw);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw io_error("malformed array at " + where);
    body = body.substr(1, body.size() - 2);
    std::string cell;
    bool in_quote = false;
    for (char ch : body) {
        if (ch == '"') in_quote = !in_quote;
        if (ch == ',' && !in_quote) {
            if (!trim(cell).empty()) items.push_back(parse_value(cell, where));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    if (!trim(cell).empty()) items.push_back(parse_value(cell, where));
    return items;
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
    const std::string v = trim(raw);
    if (v.empty()) throw io_error("empty value at " + where);
    ConfigValue out{};
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw io_error("unterminated string at " + where);
        out.kind = ConfigValue::Kind::string;
        out.str = v.substr(1, v.size() - 2);
        return out;
    }
    if (v.front() == '[') {
        out.kind = ConfigValue::Kind::array;
        out.items = parse_array(v, where);
        return out;
    }
    if (v == "true" || v == "false") {
        out.kind = ConfigValue::Kind::boolean;
        out.boolean = v == "true";
        return out;
    }
    try {
        std::size_t used = 0;
        out.num = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        out.kind = ConfigValue::Kind::number;
        return out;
    } catch (const std::exception&) {
        throw io_error("cannot parse value '" + v + "' at " + where);
    }
}

double expect_number(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::number)
        throw io_error("config key '" + key + "' expects a number");
    return v.num;
}

std::string expect_string(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::string)
        throw io_error("config key '" + key + "' expects a string");
    return v.str;
}

std::vector<double> expect_number_array(const ConfigValue& v,
                                        const std::string& key) {
    if (v.kind != ConfigValue::Kind::array)
        throw io_error("config key '" + key + "' expects an array");
    std::vector<double> out;
    for (const auto& item : v.items) out.push_back(expect_number(item, key));
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);

    ExperimentConfig cfg;
    cfg.methods.clear();
    std::optional<std::vector<double>> grid_lower, grid_upper;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        std::string stripped;
        bool in_quote = false;
        for (char ch : line) {
            if (ch == '"') in_quote = !in_quote;
            if (ch == '#' && !in_quote) break;
            stripped += ch;
        }
        stripped = trim(stripped);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw io_error("expected key = value at " + path + ":" +
                           std::to_string(lineno));
        const std::string key = trim(stripped.substr(0, eq));
        const std::string where = path + ":" + std::to_string(lineno);
        const ConfigValue value = parse_value(stripped.substr(eq + 1), where);

        if (key == "case") {
            cfg.case_name = expect_string(value, key);
        } else if (key == "n") {
            cfg.n = static_cast<std::size_t>(expect_number(value, key));
        } else if (key == "runs") {
            cfg.runs = static_cast<std::size_t>(expect_number(value, key));
        } else if (key == "bootstrap") {
            cfg.bootstrap = static_cast<std::size_t>(expect_number(value, key));
        } else if (key == "alpha") {
            cfg.alpha = expect_number(value, key);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(expect_number(value, key));
        } else if (key == "methods") {
            if (value.kind != ConfigValue::Kind::array)
                throw io_error("config key 'methods' expects an array");
            for (const auto& item : value.items)
                cfg.methods.push_back(
                    method_from_name(expect_string(item, key)));
        } else if (key == "grid_cells") {
            cfg.grid_cells = static_cast<int>(expect_number(value, key));
        } else if (key == "gradient_raster_cells") {
            cfg.gradient_raster_cells =
                static_cast<int>(expect_number(value, key));
        } else if (key == "contour_cells") {
            cfg.contour_cells = static_cast<int>(expect_number(value, key));
        } else if (key == "bootstrap_contour_cells") {
            cfg.bootstrap_contour_cells =
                static_cast<int>(expect_number(value, key));
        } else if (key == "probe_points") {
            cfg.probe_points =
                static_cast<std::size_t>(expect_number(value, key));
        } else if (key == "bandwidth_rule") {
            const std::string rule = expect_string(value, key);
            if (rule == "normal_scale") {
                cfg.bandwidth_rule.kind = BandwidthRule::Kind::normal_scale;
            } else if (rule == "plugin") {
                cfg.bandwidth_rule.kind = BandwidthRule::Kind::plugin;
            } else if (rule == "fixed") {
                cfg.bandwidth_rule.kind = BandwidthRule::Kind::fixed;
            } else {
                throw io_error("unknown bandwidth_rule: " + rule);
            }
        } else if (key == "h") {
            cfg.bandwidth_rule.h = expect_number_array(value, key);
        } else if (key == "l") {
            cfg.bandwidth_rule.l = expect_number_array(value, key);
        } else if (key == "g") {
            cfg.bandwidth_rule.g = expect_number_array(value, key);
        } else if (key == "undersmooth_factor") {
            cfg.undersmooth_factor = expect_number(value, key);
        } else if (key == "grid_lower") {
            grid_lower = expect_number_array(value, key);
        } else if (key == "grid_upper") {
            grid_upper = expect_number_array(value, key);
        } else {
            throw io_error("unknown config key '" + key + "' at " + where);
        }
    }
    if (cfg.methods.empty())
        throw io_error("config: 'methods' must list at least one method");
    if (grid_lower || grid_upper) {
        if (!grid_lower || !grid_upper || grid_lower->size() != 2 ||
            grid_upper->size() != 2)
            throw io_error(
                "config: grid_lower and grid_upper must both be given as "
                "2-element arrays");
        GridSpec g;
        g.lower = {(*grid_lower)[0], (*grid_lower)[1]};
        g.upper = {(*grid_upper)[0], (*grid_upper)[1]};
        g.cells = {cfg.grid_cells, cfg.grid_cells};
        cfg.grid = g;
    }
    return cfg;
}

void emit_report(const CoverageReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write report file: " + path);
    out << "method,case,n,M,B,alpha,coverage,mean_volume,mean_mass,failures\n";
    for (const auto& m : report.methods) {
        out << method_name(m.method) << ',' << report.config.case_name << ','
            << report.config.n << ',' << report.config.runs << ','
            << report.config.bootstrap << ',' << fmt17(report.config.alpha)
            << ',' << fmt17(m.coverage) << ',' << fmt17(m.mean_volume) << ','
            << fmt17(m.mean_mass) << ',' << m.failure_runs << '\n';
    }
    if (!out) throw io_error("failed writing report file: " + path);
}

std::vector<ReportRow> parse_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open report file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw io_error("empty report file: " + path);
    if (line != "method,case,n,M,B,alpha,coverage,mean_volume,mean_mass,failures")
        throw io_error("unexpected report header in " + path);
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 10)
            throw io_error("malformed report row in " + path);
        ReportRow row;
        row.method = cells[0];
        row.case_name = cells[1];
        row.n = std::stoul(cells[2]);
        row.runs = std::stoul(cells[3]);
        row.bootstrap = std::stoul(cells[4]);
        row.alpha = std::stod(cells[5]);
        row.coverage = std::stod(cells[6]);
        row.mean_volume = std::stod(cells[7]);
        row.mean_mass = std::stod(cells[8]);
        row.failures = std::stoul(cells[9]);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace levelset
