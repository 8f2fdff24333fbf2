#include "lmce/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lmce {

namespace {

double parse_double(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("field csv: bad ") + what + " '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument(std::string("field csv: bad ") + what + " '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const char* what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument(std::string("field csv: bad ") + what + " '" + s + "'");
    }
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string field_to_csv(const ScalarField2& f) {
    const Grid2& g = f.grid();
    std::ostringstream os;
    os << "# lmce-field L=" << format_number(g.half_width()) << " n=" << g.nodes_per_axis() << "\n";
    os << "i,j,value\n";
    const int n = g.nodes_per_axis();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) os << i << ',' << j << ',' << format_number(f(i, j)) << '\n';
    return os.str();
}

void write_field_csv(const ScalarField2& f, const std::filesystem::path& path) { write_text(path, field_to_csv(f)); }

ScalarField2 field_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("field csv: empty input");
    std::istringstream head(trim(line));
    std::string hash, marker, l_tok, n_tok;
    head >> hash >> marker >> l_tok >> n_tok;
    if (hash != "#" || marker != "lmce-field") throw std::invalid_argument("field csv: missing '# lmce-field' header");
    if (l_tok.rfind("L=", 0) != 0 || n_tok.rfind("n=", 0) != 0) {
        throw std::invalid_argument("field csv: header must name L and n");
    }
    const Grid2 grid(parse_double(l_tok.substr(2), "L"), parse_int(n_tok.substr(2), "n"));

    if (!std::getline(is, line) || trim(line) != "i,j,value") {
        throw std::invalid_argument("field csv: expected column header 'i,j,value'");
    }
    std::vector<double> values(grid.size(), 0.0);
    std::vector<char> seen(grid.size(), 0);
    const int n = grid.nodes_per_axis();
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw std::invalid_argument("field csv: malformed row '" + line + "'");
        }
        const int i = parse_int(line.substr(0, c1), "i");
        const int j = parse_int(line.substr(c1 + 1, c2 - c1 - 1), "j");
        if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("field csv: node index out of range");
        const std::size_t k = grid.index(i, j);
        if (seen[k]) throw std::invalid_argument("field csv: duplicate node");
        seen[k] = 1;
        values[k] = parse_double(line.substr(c2 + 1), "value");
    }
    for (char s : seen)
        if (!s) throw std::invalid_argument("field csv: missing nodes");
    return ScalarField2(grid, std::move(values));
}

ScalarField2 read_field_csv(const std::filesystem::path& path) { return field_from_csv(read_text(path)); }

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    const auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += csv_escape(row[k]);
        }
        out += "\r\n";
    };
    emit(table.header);
    for (const auto& r : table.rows) emit(r);
    return out;
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') ++k;
            if (any || !field.empty()) {
                record.push_back(std::move(field));
                records.push_back(std::move(record));
            }
            field.clear();
            record.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

HeatmapRange write_pgm(const ScalarField2& f, const std::filesystem::path& path) {
    const Grid2& g = f.grid();
    const int n = g.nodes_per_axis();
    const HeatmapRange range{f.min(), f.max()};
    const double span = range.max - range.min;
    std::string data = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    data.reserve(data.size() + g.size());
    for (int row = 0; row < n; ++row) {
        const int j = n - 1 - row;
        for (int i = 0; i < n; ++i) {
            const double t = span > 0.0 ? (f(i, j) - range.min) / span : 0.0;
            data += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
        }
    }
    write_text(path, data);
    return range;
}

}  // namespace lmce
