#include "fbw/io.hpp"

#include <openssl/sha.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fbw {

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

double to_double(const std::string& s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw InputError("bad number in CSV: '" + s + "'");
    return v;
}

std::string header_value(const std::string& field, const std::string& key) {
    if (field.rfind(key + "=", 0) != 0) throw InputError("CSV header: expected " + key + "=");
    return field.substr(key.size() + 1);
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cur;
    bool quoted = false, any = false;
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    cur += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cur));
            cur.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') ++k;
            row.push_back(std::move(cur));
            cur.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            cur += c;
            any = true;
        }
    }
    if (quoted) throw InputError("CSV: unterminated quote");
    if (any || !row.empty()) {
        row.push_back(std::move(cur));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string field_to_csv(const ScalarField& f) {
    const GridSpec& g = f.grid;
    std::string out = "nx=" + std::to_string(g.nx) + ",ny=" + std::to_string(g.ny) + ",h=" + fmt_double(g.h) +
                      ",origin=" + fmt_double(g.x0) + " " + fmt_double(g.y0) + "\r\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out += ',';
            if (f.active(i, j)) out += fmt_double(f(i, j));
        }
        out += "\r\n";
    }
    return out;
}

ScalarField field_from_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0].size() != 4) throw InputError("CSV: missing grid header");
    GridSpec g;
    g.nx = std::stoi(header_value(rows[0][0], "nx"));
    g.ny = std::stoi(header_value(rows[0][1], "ny"));
    g.h = to_double(header_value(rows[0][2], "h"));
    std::istringstream o(header_value(rows[0][3], "origin"));
    std::string a, b;
    o >> a >> b;
    g.x0 = to_double(a);
    g.y0 = to_double(b);
    g.validate();
    if (rows.size() != static_cast<std::size_t>(g.ny) + 1) throw InputError("CSV: row count does not match ny");
    ScalarField f(g, 0.0);
    f.mask.assign(g.size(), 0);
    for (int j = 0; j < g.ny; ++j) {
        const auto& r = rows[j + 1];
        if (r.size() != static_cast<std::size_t>(g.nx)) throw InputError("CSV: row length does not match nx");
        for (int i = 0; i < g.nx; ++i) {
            if (r[i].empty()) continue;
            f(i, j) = to_double(r[i]);
            f.mask[g.idx(i, j)] = 1;
        }
    }
    return f;
}

nlohmann::ordered_json field_descriptor(const ScalarField& f, const std::string& csv_name) {
    nlohmann::ordered_json j;
    j["kind"] = "scalar_field";
    j["file"] = csv_name;
    j["nx"] = f.grid.nx;
    j["ny"] = f.grid.ny;
    j["h"] = f.grid.h;
    j["origin"] = {f.grid.x0, f.grid.y0};
    long active = 0;
    for (auto m : f.mask) active += m != 0;
    j["active"] = active;
    return j;
}

nlohmann::ordered_json branching_json(const BranchingSet& b) {
    nlohmann::ordered_json j;
    j["points"] = b.points;
    j["tol"] = b.tol;
    j["h"] = b.h;
    return j;
}

std::string svg_polylines(const std::vector<Polyline>& lines, double x0, double x1, double y0, double y1) {
    if (!(x1 > x0) || !(y1 > y0)) throw InputError("SVG window is empty");
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + fmt_double(x0) + " " + fmt_double(-y1) +
                    " " + fmt_double(x1 - x0) + " " + fmt_double(y1 - y0) + "\">\n";
    for (const auto& l : lines) {
        s += "<polyline fill=\"none\" stroke=\"" + l.stroke + "\" stroke-width=\"" + fmt_double(l.width) +
             "\" vector-effect=\"non-scaling-stroke\" points=\"";
        for (std::size_t k = 0; k < l.pts.size(); ++k) {
            if (k) s += ' ';
            s += fmt_double(l.pts[k].x) + "," + fmt_double(-l.pts[k].y);
        }
        s += "\"/>\n";
    }
    return s + "</svg>\n";
}

std::string content_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned char c : md) {
        out += hex[c >> 4];
        out += hex[c & 15];
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InputError("cannot write " + tmp.string());
        f << content;
        if (!f) throw InputError("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace fbw
