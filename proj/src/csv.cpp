#include "tndkit/csv.hpp"

#include "tndkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tndkit {

std::string format_double(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

int parse_binary(const std::string& s, const std::string& col, std::size_t row) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw SchemaError("column '" + col + "' row " + std::to_string(row) +
                      ": expected 0 or 1, got '" + s + "'");
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_table(std::istream& is) {
    RawTable t;
    std::string line;
    if (!std::getline(is, line)) throw SchemaError("empty file: missing header row");
    t.header = split_line(line);
    std::size_t row_no = 1;
    while (std::getline(is, line)) {
        ++row_no;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != t.header.size()) {
            throw SchemaError("row " + std::to_string(row_no) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

std::size_t required_column(const RawTable& t, const std::string& name) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (t.header[j] == name) return j;
    }
    throw SchemaError("missing required column '" + name + "'");
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& quebec_columns() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> cols = [] {
        std::vector<std::string> weeks;
        for (int w = 27; w <= 44; ++w) weeks.push_back(std::to_string(w));
        return std::vector<std::pair<std::string, std::vector<std::string>>>{
            {"age_group", {"60-69", "70-79", "80-89", "90+"}},
            {"sex", {"Female", "Male"}},
            {"multimorbidity", {"Yes", "No"}},
            {"epi_week", weeks},
        };
    }();
    return cols;
}

} // namespace

void write_dataset_csv(const TndDataset& data, std::ostream& os) {
    for (const std::string& name : data.feature_names) os << name << ',';
    os << "v,y\n";
    for (const TndRecord& r : data.records) {
        for (double c : r.covariates) os << format_double(c) << ',';
        os << r.v << ',' << r.y << '\n';
    }
}

void write_population_csv(const std::vector<FullPopulationRow>& rows, std::ostream& os) {
    os << "c,v,y,u1,u2,i1,i2,w,h\n";
    for (const FullPopulationRow& r : rows) {
        os << format_double(r.c) << ',' << r.v << ',' << r.y << ',' << r.u1 << ',' << r.u2 << ','
           << r.i1 << ',' << r.i2 << ',' << r.w << ',' << r.h << '\n';
    }
}

std::vector<FullPopulationRow> read_population_csv(std::istream& is) {
    RawTable t = read_table(is);
    const char* names[] = {"c", "v", "y", "u1", "u2", "i1", "i2", "w", "h"};
    std::size_t idx[9];
    for (int k = 0; k < 9; ++k) idx[k] = required_column(t, names[k]);
    std::vector<FullPopulationRow> rows;
    rows.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& f = t.rows[i];
        FullPopulationRow r;
        if (!parse_number(f[idx[0]], r.c)) {
            throw SchemaError("column 'c' row " + std::to_string(i + 2) + ": not a number");
        }
        r.v = parse_binary(f[idx[1]], "v", i + 2);
        r.y = parse_binary(f[idx[2]], "y", i + 2);
        r.u1 = parse_binary(f[idx[3]], "u1", i + 2);
        r.u2 = parse_binary(f[idx[4]], "u2", i + 2);
        r.i1 = parse_binary(f[idx[5]], "i1", i + 2);
        r.i2 = parse_binary(f[idx[6]], "i2", i + 2);
        r.w = parse_binary(f[idx[7]], "w", i + 2);
        r.h = parse_binary(f[idx[8]], "h", i + 2);
        r.s = ((r.i1 == 1 || r.i2 == 1) && r.w == 1 && r.h == 1) ? 1 : 0;
        rows.push_back(r);
    }
    return rows;
}

TndDataset read_dataset_csv(std::istream& is, const std::string& schema) {
    RawTable t = read_table(is);
    const std::size_t col_v = required_column(t, "v");
    const std::size_t col_y = required_column(t, "y");
    if (t.rows.empty()) throw SchemaError("no data rows");

    TndDataset out;

    if (schema == "quebec") {
        for (const auto& [name, levels] : quebec_columns()) {
            const std::size_t j = required_column(t, name);
            for (const std::string& level : levels) out.feature_names.push_back(name + "=" + level);
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                const std::string& val = t.rows[i][j];
                if (std::find(levels.begin(), levels.end(), val) == levels.end()) {
                    throw SchemaError("column '" + name + "' row " + std::to_string(i + 2) +
                                      ": unknown category '" + val + "'");
                }
            }
        }
        out.records.resize(t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            TndRecord& r = out.records[i];
            r.v = parse_binary(t.rows[i][col_v], "v", i + 2);
            r.y = parse_binary(t.rows[i][col_y], "y", i + 2);
            for (const auto& [name, levels] : quebec_columns()) {
                const std::size_t j = required_column(t, name);
                const std::string& val = t.rows[i][j];
                for (const std::string& level : levels) r.covariates.push_back(val == level ? 1.0 : 0.0);
            }
        }
        return validate_dataset(out), out;
    }
    if (schema != "generic") throw SchemaError("unknown schema: " + schema);

    // Generic schema: every non-(v,y) column is a covariate; columns with any
    // non-numeric entry are treated as categorical and one-hot encoded.
    std::vector<std::size_t> cov_cols;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (j != col_v && j != col_y) cov_cols.push_back(j);
    }
    if (cov_cols.empty()) throw SchemaError("need at least one covariate column besides v and y");

    out.records.resize(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.records[i].v = parse_binary(t.rows[i][col_v], "v", i + 2);
        out.records[i].y = parse_binary(t.rows[i][col_y], "y", i + 2);
    }
    for (std::size_t j : cov_cols) {
        bool numeric = true;
        double tmp;
        for (const auto& row : t.rows) {
            if (!parse_number(row[j], tmp)) {
                numeric = false;
                break;
            }
        }
        if (numeric) {
            out.feature_names.push_back(t.header[j]);
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                parse_number(t.rows[i][j], tmp);
                out.records[i].covariates.push_back(tmp);
            }
        } else {
            std::set<std::string> level_set;
            for (const auto& row : t.rows) level_set.insert(row[j]);
            const std::vector<std::string> levels(level_set.begin(), level_set.end());
            for (const std::string& level : levels) {
                out.feature_names.push_back(t.header[j] + "=" + level);
            }
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                for (const std::string& level : levels) {
                    out.records[i].covariates.push_back(t.rows[i][j] == level ? 1.0 : 0.0);
                }
            }
        }
    }
    validate_dataset(out);
    return out;
}

void write_dataset_csv(const TndDataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw SchemaError("cannot open for writing: " + path);
    write_dataset_csv(data, os);
}

void write_population_csv(const std::vector<FullPopulationRow>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw SchemaError("cannot open for writing: " + path);
    write_population_csv(rows, os);
}

std::vector<FullPopulationRow> read_population_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open: " + path);
    return read_population_csv(is);
}

TndDataset read_dataset_csv(const std::string& path, const std::string& schema) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open: " + path);
    return read_dataset_csv(is, schema);
}

} // namespace tndkit
