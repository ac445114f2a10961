#include "heilbronn/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace heilbronn {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_string(const Violation& v) {
    return v.line ? "line " + std::to_string(v.line) + ": " + v.message : v.message;
}

namespace {

void put_coords(std::ostream& os, Vec3 v, int d) {
    for (int k = 0; k < d; ++k) os << ' ' << fmt_double(v[k]);
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

bool parse_double(const std::string& s, double& x) {
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(x);
}

struct Header {
    int dim = 0;
    std::size_t n = 0;
};

// Walks records after the header; `record` returns an error message or "".
// Stops at the first violation when `first_only`.
std::vector<Violation> walk(std::istream& is, const std::string& magic, bool first_only,
                            const std::function<std::string(const std::vector<std::string>&, const Header&)>& record) {
    std::vector<Violation> out;
    std::string line;
    std::size_t lineno = 0;
    Header h;
    bool have_header = false;
    std::size_t count = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tok = split(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (!have_header) {
            have_header = true;
            bool ok = tok.size() == 4 && tok[0] == magic && tok[1] == "v1" && tok[2].rfind("dim=", 0) == 0 &&
                      tok[3].rfind("n=", 0) == 0;
            if (ok) {
                try {
                    h.dim = std::stoi(tok[2].substr(4));
                    h.n = std::stoul(tok[3].substr(2));
                } catch (...) {
                    ok = false;
                }
            }
            if (!ok || (h.dim != 2 && h.dim != 3)) {
                out.push_back({lineno, "expected header '" + magic + " v1 dim=<2|3> n=<count>'"});
                return out;
            }
            continue;
        }
        ++count;
        std::string err = record(tok, h);
        if (!err.empty()) {
            out.push_back({lineno, err});
            if (first_only) return out;
        }
    }
    if (!have_header) out.push_back({0, "empty file"});
    else if (count != h.n)
        out.push_back({lineno, "header announces " + std::to_string(h.n) + " records, found " + std::to_string(count)});
    return out;
}

// tag followed by d numbers, starting at tok[at]
std::string take(const std::vector<std::string>& tok, std::size_t& at, const char* tag, int d, Vec3& v) {
    if (at >= tok.size() || tok[at] != tag) return std::string("expected '") + tag + "'";
    ++at;
    for (int k = 0; k < d; ++k, ++at) {
        double x;
        if (at >= tok.size() || !parse_double(tok[at], x)) return std::string("bad number after '") + tag + "'";
        v[k] = x;
    }
    return "";
}

bool in_unit_cube(Vec3 p, int d) {
    for (int k = 0; k < d; ++k)
        if (p[k] < -1e-9 || p[k] > 1 + 1e-9) return false;
    return true;
}

std::string plc_record(const std::vector<std::string>& tok, const Header& h, Configuration* X) {
    const int d = h.dim;
    Vec3 p, q, v;
    std::size_t at = 0;
    std::string e;
    if (!(e = take(tok, at, "p", d, p)).empty() || !(e = take(tok, at, "q", d, q)).empty() ||
        !(e = take(tok, at, "v", d, v)).empty())
        return e;
    if (at != tok.size()) return "trailing tokens";
    if (std::abs(norm(v) - 1) > 1e-6) return "direction is not a unit vector (|v| = " + fmt_double(norm(v)) + ")";
    Vec3 r = p - q;
    double off = norm(r - dot(r, v) / dot(v, v) * v);
    if (off > 1e-6) return "point is " + fmt_double(off) + " away from its line";
    if (X) {
        Point pp{p, d};
        X->pairs.push_back(PointLinePair::make(pp, Line(Point{q, d}, v)));
    }
    return "";
}

std::string pts_record(const std::vector<std::string>& tok, const Header& h, std::vector<Point>* P) {
    if (tok.size() != static_cast<std::size_t>(h.dim)) return "expected " + std::to_string(h.dim) + " coordinates";
    Vec3 p;
    for (int k = 0; k < h.dim; ++k)
        if (!parse_double(tok[k], p[k])) return "bad number";
    if (!in_unit_cube(p, h.dim)) return "point outside the unit cube";
    if (P) P->push_back({p, h.dim});
    return "";
}

std::string tube_record(const std::vector<std::string>& tok, const Header& h, std::vector<Tube>* T) {
    const int d = h.dim;
    Vec3 c, v, w, l;
    std::size_t at = 0;
    std::string e;
    if (!(e = take(tok, at, "c", d, c)).empty() || !(e = take(tok, at, "v", d, v)).empty() ||
        !(e = take(tok, at, "w", 1, w)).empty() || !(e = take(tok, at, "l", 1, l)).empty())
        return e;
    if (at != tok.size()) return "trailing tokens";
    if (std::abs(norm(v) - 1) > 1e-6) return "direction is not a unit vector";
    if (!(w.x > 0) || !(l.x > 0) || w.x > l.x) return "need 0 < width <= length";
    if (T) T->push_back(Tube::make(d, c, v, w.x, l.x));
    return "";
}

template <class Out>
Out read_with(std::istream& is, const std::string& name, const std::string& magic,
              std::string (*rec)(const std::vector<std::string>&, const Header&, Out*), int* dim = nullptr) {
    Out out{};
    Header seen;
    auto v = walk(is, magic, true, [&](const std::vector<std::string>& tok, const Header& h) {
        seen = h;
        return rec(tok, h, &out);
    });
    if (!v.empty()) throw InvalidInput(name + ":" + std::to_string(v[0].line) + ": " + v[0].message);
    if (dim) *dim = seen.dim;
    return out;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot read " + path);
    return f;
}

}  // namespace

void write_plc(std::ostream& os, const Configuration& X) {
    os << "plc v1 dim=" << X.dim << " n=" << X.size() << '\n';
    for (auto& pr : X.pairs) {
        os << 'p';
        put_coords(os, pr.p.v, X.dim);
        os << " q";
        put_coords(os, pr.l.base().v, X.dim);
        os << " v";
        put_coords(os, pr.l.dir(), X.dim);
        os << '\n';
    }
}

void write_pts(std::ostream& os, const std::vector<Point>& P) {
    const int d = P.empty() ? 2 : P[0].dim;
    os << "pts v1 dim=" << d << " n=" << P.size() << '\n';
    for (auto& p : P) {
        for (int k = 0; k < d; ++k) os << (k ? " " : "") << fmt_double(p[k]);
        os << '\n';
    }
}

void write_tubes(std::ostream& os, const std::vector<Tube>& T) {
    const int d = T.empty() ? 2 : T[0].dim;
    os << "tubes v1 dim=" << d << " n=" << T.size() << '\n';
    for (auto& t : T) {
        os << 'c';
        put_coords(os, t.center, d);
        os << " v";
        put_coords(os, t.dir, d);
        os << " w " << fmt_double(t.width) << " l " << fmt_double(t.length) << '\n';
    }
}

Configuration read_plc(std::istream& is, const std::string& name) {
    Configuration X;
    std::vector<Violation> v = walk(is, "plc", true, [&](const std::vector<std::string>& tok, const Header& h) {
        X.dim = h.dim;
        return plc_record(tok, h, &X);
    });
    if (!v.empty()) throw InvalidInput(name + ":" + std::to_string(v[0].line) + ": " + v[0].message);
    X.provenance = name;
    return X;
}

std::vector<Point> read_pts(std::istream& is, const std::string& name) { return read_with(is, name, "pts", &pts_record); }

std::vector<Tube> read_tubes(std::istream& is, const std::string& name) {
    return read_with(is, name, "tubes", &tube_record);
}

std::vector<Violation> check_plc(std::istream& is) {
    return walk(is, "plc", false, [](auto& tok, auto& h) { return plc_record(tok, h, nullptr); });
}
std::vector<Violation> check_pts(std::istream& is) {
    return walk(is, "pts", false, [](auto& tok, auto& h) { return pts_record(tok, h, nullptr); });
}
std::vector<Violation> check_tubes(std::istream& is) {
    return walk(is, "tubes", false, [](auto& tok, auto& h) { return tube_record(tok, h, nullptr); });
}

Configuration load_plc(const std::string& path) {
    auto f = open_or_throw(path);
    return read_plc(f, path);
}
std::vector<Point> load_pts(const std::string& path) {
    auto f = open_or_throw(path);
    return read_pts(f, path);
}
std::vector<Tube> load_tubes(const std::string& path) {
    auto f = open_or_throw(path);
    return read_tubes(f, path);
}

std::vector<Violation> validate_file(const std::string& path) {
    auto f = open_or_throw(path);
    std::string first;
    std::streampos start = f.tellg();
    while (std::getline(f, first)) {
        auto tok = split(first);
        if (!tok.empty() && tok[0][0] != '#') break;
        first.clear();
    }
    f.clear();
    f.seekg(start);
    auto tok = split(first);
    if (tok.empty()) return {{0, "empty file"}};
    if (tok[0] == "plc") return check_plc(f);
    if (tok[0] == "pts") return check_pts(f);
    if (tok[0] == "tubes") return check_tubes(f);
    return {{1, "unknown format '" + tok[0] + "'"}};
}

void save_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + path);
    f << body;
    if (!f) throw InvalidInput("write failed for " + path);
}

CsvTable& CsvTable::comment(const std::string& line) {
    comments_.push_back(line);
    return *this;
}

CsvTable& CsvTable::column(const std::string& name, const std::string& meaning) {
    names_.push_back(name);
    comments_.push_back(name + ": " + meaning);
    return *this;
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != names_.size()) throw InvalidInput("CSV row width differs from the header");
    rows_.push_back(cells);
    return *this;
}

std::string CsvTable::cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string CsvTable::str() const {
    std::string out;
    for (auto& c : comments_) out += "# " + c + "\n";
    for (std::size_t i = 0; i < names_.size(); ++i) out += (i ? "," : "") + names_[i];
    out += "\n";
    for (auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += "\n";
    }
    return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace heilbronn
