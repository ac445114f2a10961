#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "heilbronn/config.hpp"
#include "heilbronn/incidence.hpp"
#include "heilbronn/io.hpp"
#include "heilbronn/multiscale.hpp"
#include "heilbronn/search.hpp"
#include "heilbronn/triangles.hpp"
#include "heilbronn/tubes.hpp"

using namespace heilbronn;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "heilbronn 0.1.0";

enum Exit { kOk = 0, kUsage = 2, kInvalid = 3, kNumeric = 4 };

struct Run {
    std::string hash_source;  // manifest bytes, or the argument line
    std::uint64_t seed = 0;
    std::string out;
    int status = kOk;
};

std::string hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string c(double x) { return CsvTable::cell(x); }
std::string c(std::size_t x) { return CsvTable::cell(x); }
std::string c(int x) { return std::to_string(x); }

void emit(const Run& run, const std::string& body) {
    if (run.out.empty() || run.out == "-") std::cout << body;
    else save_text(run.out, body);
}

CsvTable table(const Run& run, const std::string& what) {
    CsvTable t;
    t.comment(what);
    t.comment("seed=" + std::to_string(run.seed));
    return t;
}

// key,value certificate tables
CsvTable kv_table(const Run& run, const std::string& what) {
    CsvTable t = table(run, what);
    t.column("key", "quantity name").column("value", "measured or configured value");
    return t;
}

Configuration lines_as_config(const std::vector<Line>& L, int d) {
    Configuration X;
    X.dim = d;
    for (auto& l : L) X.pairs.push_back(PointLinePair::make(l.base(), l));
    return X;
}

void save_points_lines(const PointsLines& pl, const std::string& base) {
    std::ostringstream p, l;
    write_pts(p, pl.points);
    write_plc(l, lines_as_config(pl.lines, pl.dim));
    save_text(base + ".pts", p.str());
    save_text(base + ".plc", l.str());
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw InvalidInput("bad number '" + t + "' in list");
        }
    }
    return out;
}

std::vector<std::string> read_manifest(const std::string& path, std::string& bytes) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot read manifest " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    bytes = ss.str();
    std::vector<std::string> args;
    std::string command;
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(bytes);
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r"), z = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, z - a + 1);
        };
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k == "command") command = v;
        else kv.emplace_back(k, v);
    }
    if (command.empty()) throw InvalidInput(path + ": manifest has no command");
    std::istringstream cs(command);
    for (std::string t; cs >> t;) args.push_back(t);
    for (auto& [k, v] : kv) {
        if (v == "true") {
            args.push_back("--" + k);
        } else {
            args.push_back("--" + k);
            args.push_back(v);
        }
    }
    return args;
}

int dispatch(std::vector<std::string> args, std::string hash_source);

void add_common(CLI::App* sub, Run& run) {
    sub->add_option("-o,--out", run.out, "output path (stdout if omitted)");
    sub->add_option("--seed", run.seed, "random seed")->capture_default_str();
}

void build(CLI::App& app, Run& run, std::function<void()>& action) {
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // ---- gen
    {
        auto* s = app.add_subcommand("gen", "generate a configuration, point set, line set or tube family");
        static std::string family;
        static double delta = 0.0625, t1 = 1, t2 = 1, lambda = 1, C = 1;
        static int dim = 3, bushes = 4, N = 64;
        static std::size_t n = 100;
        s->add_option("family", family,
                      "vertical | random | points | lines | bush | plane | st-grid | parabola | tubes-random | "
                      "tubes-pencil | tubes-katz-tao")
            ->required();
        s->add_option("--delta", delta)->capture_default_str();
        s->add_option("--dim", dim)->capture_default_str();
        s->add_option("--n", n)->capture_default_str();
        s->add_option("--bushes", bushes)->capture_default_str();
        s->add_option("--N", N, "ST grid size")->capture_default_str();
        s->add_option("--t1", t1)->capture_default_str();
        s->add_option("--t2", t2)->capture_default_str();
        s->add_option("--C", C, "Katz-Tao constant for tubes-katz-tao")->capture_default_str();
        (void)lambda;
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                if (run.out.empty()) throw InvalidInput("gen needs -o");
                std::ostringstream os;
                if (family == "vertical") write_plc(os, generate_vertical(delta, dim));
                else if (family == "random") write_plc(os, random_configuration(n, dim, run.seed));
                else if (family == "points") write_pts(os, random_points(n, dim, run.seed));
                else if (family == "lines") write_plc(os, lines_as_config(random_lines(n, dim, run.seed), dim));
                else if (family == "parabola") write_pts(os, generate_erdos_parabola(static_cast<int>(n)));
                else if (family == "bush" || family == "plane" || family == "st-grid") {
                    PointsLines pl = family == "bush"    ? generate_bush(delta, dim, bushes, run.seed)
                                     : family == "plane" ? generate_plane_example(delta, run.seed)
                                                         : generate_st_grid(N);
                    save_points_lines(pl, run.out);
                    return;
                } else if (family == "tubes-random" || family == "tubes-pencil") {
                    Rng rng(run.seed);
                    std::uniform_real_distribution<double> U(-1, 1), A(0, M_PI);
                    std::vector<Tube> T;
                    for (std::size_t i = 0; i < n; ++i) {
                        double th = family == "tubes-pencil" ? M_PI * static_cast<double>(i) / static_cast<double>(n) : A(rng);
                        Vec3 ctr = family == "tubes-pencil" ? Vec3{} : Vec3{U(rng), U(rng), 0};
                        T.push_back(Tube::make(2, ctr, {std::cos(th), std::sin(th), 0}, delta));
                    }
                    write_tubes(os, T);
                } else if (family == "tubes-katz-tao") {
                    auto kt = generate_katz_tao_tubes(delta, t1, t2, n, run.seed, dim, C);
                    if (!kt.complete)
                        std::cerr << "warning: only " << kt.tubes.size() << " of " << n << " tubes placed\n";
                    write_tubes(os, kt.tubes);
                } else {
                    throw InvalidInput("unknown family '" + family + "'");
                }
                save_text(run.out, os.str());
            };
        });
    }

    // ---- validate
    {
        auto* s = app.add_subcommand("validate", "check a .plc/.pts/.tubes file and list violations");
        static std::string path;
        s->add_option("path", path)->required();
        s->callback([&] {
            action = [&] {
                auto v = validate_file(path);
                for (auto& x : v) std::cout << path << ": " << to_string(x) << '\n';
                if (v.empty()) std::cout << path << ": ok\n";
                run.status = v.empty() ? kOk : kInvalid;
            };
        });
    }

    // ---- dx
    {
        auto* s = app.add_subcommand("dx", "minimum point-to-other-line distance of a configuration");
        static std::string in;
        s->add_option("-i,--input", in)->required();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto X = load_plc(in);
                auto w = min_config_distance_witness(X);
                CsvTable t = table(run, "minimum distance d(X)");
                t.column("n", "pairs").column("dx", "min over i != j of d(p_i, l_j)");
                t.column("i", "point index").column("j", "line index");
                t.row({c(X.size()), c(w.value), c(w.i), c(w.j)});
                emit(run, t.str());
            };
        });
    }

    // ---- min-triangle
    {
        auto* s = app.add_subcommand("min-triangle", "minimum triangle area of a point set");
        static std::string in, method = "fast";
        s->add_option("-p,--points", in)->required();
        s->add_option("--method", method, "fast | brute")->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto P = load_pts(in);
                if (method != "fast" && method != "brute") throw InvalidInput("method must be fast or brute");
                auto w = method == "fast" ? min_triangle_fast(P) : min_triangle_brute(P);
                CsvTable t = table(run, "minimum triangle");
                t.column("n", "points").column("area", "minimum area").column("i", "vertex").column("j", "vertex");
                t.column("k", "vertex");
                t.row({c(P.size()), c(w.area), c(w.idx[0]), c(w.idx[1]), c(w.idx[2])});
                emit(run, t.str());
            };
        });
    }

    // ---- pair-pipeline
    {
        auto* s = app.add_subcommand("pair-pipeline", "close pairs to point-line configuration to small triangle");
        static std::string in;
        s->add_option("-p,--points", in)->required();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto P = load_pts(in);
                PipelineReport rep;
                auto w = triangle_via_pointline(P, &rep);
                CsvTable t = table(run, "triangle via the point-line reduction");
                t.column("n", "points").column("m", "pairs").column("delta", "min d(p_i, l_j) over the pair lines");
                t.column("max_pair_length", "longest pair").column("implied_bound", "max_pair_length * delta / 2");
                t.column("area", "area of the certified triangle").column("i", "vertex").column("j", "vertex");
                t.column("k", "vertex").column("degenerate", "1 if a pair had coincident points");
                t.row({c(P.size()), c(rep.m), c(rep.delta), c(rep.max_pair_length), c(rep.implied_bound), c(w.area),
                       c(w.idx[0]), c(w.idx[1]), c(w.idx[2]), c(rep.degenerate_pair ? 1 : 0)});
                emit(run, t.str());
            };
        });
    }

    // ---- conc
    {
        auto* s = app.add_subcommand("conc", "concentration numbers over the dyadic ladder");
        static std::string pts, in, what = "points";
        static double delta = 1.0 / 16;
        s->add_option("-p,--points", pts);
        s->add_option("-i,--input", in, ".plc (lines or configuration)");
        s->add_option("--what", what, "points | lines | config")->capture_default_str();
        s->add_option("--delta", delta)->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto ladder = dyadic_ladder(1, delta);
                if (what == "points") {
                    auto P = pts.empty() ? load_plc(in).points() : load_pts(pts);
                    CsvTable t = table(run, "point concentration");
                    t.column("w", "cube side").column("M_P", "max points in a w-cube");
                    for (double w : ladder) t.row({c(w), c(m_points(P, w))});
                    emit(run, t.str());
                } else if (what == "lines") {
                    auto L = load_plc(in).lines();
                    CsvTable t = table(run, "line concentration");
                    t.column("u", "thin side").column("w", "middle side").column("M_L", "max lines with chord >= 1/2 in a u x w x 1 box");
                    for (double w : ladder)
                        for (double u : ladder)
                            if (u <= w) t.row({c(u), c(w), c(m_lines(L, u, w))});
                    emit(run, t.str());
                } else if (what == "config") {
                    auto X = load_plc(in);
                    CsvTable t = table(run, "covering numbers against configuration concentration");
                    t.column("w", "scale").column("cover_points", "|P|_w").column("cover_lines", "|L|_w");
                    t.column("cover_dirs", "|theta|_w").column("M_points", "M_X(w,1,1)").column("M_lines", "M_X(1,1,w)");
                    t.column("M_dirs", "M_X(1,w,1)").column("ratio_points", "cover * M / |X|");
                    t.column("ratio_lines", "cover * M / |X|").column("ratio_dirs", "cover * M / |X|");
                    for (auto& r : covering_profiles(X, ladder))
                        t.row({c(r.w), c(r.points), c(r.lines), c(r.dirs), c(r.mx_points), c(r.mx_lines), c(r.mx_dirs),
                               c(r.ratio_points), c(r.ratio_lines), c(r.ratio_dirs)});
                    emit(run, t.str());
                } else {
                    throw InvalidInput("--what must be points, lines or config");
                }
            };
        });
    }

    // ---- katz-tao
    {
        auto* s = app.add_subcommand("katz-tao", "fit M_L(u x w x 1) ~ C (u/delta)^t1 (w/delta)^t2");
        static std::string in, tubes;
        static double delta = 1.0 / 32;
        s->add_option("-l,--lines", in, ".plc lines");
        s->add_option("-t,--tubes", tubes, ".tubes family (axes are used)");
        s->add_option("--delta", delta)->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto L = tubes.empty() ? load_plc(in).lines() : tube_axes(load_tubes(tubes));
                auto f = katz_tao_fit(L, delta);
                CsvTable t = table(run, "Katz-Tao fit");
                t.comment("fit t1=" + fmt_double(f.t1) + " t2=" + fmt_double(f.t2) + " C=" + fmt_double(f.C) +
                          " populated=" + std::to_string(f.populated));
                t.column("u", "thin side").column("w", "middle side").column("M_L", "box count");
                t.column("residual", "log residual of the fit");
                for (auto& cell : f.cells) t.row({c(cell.u), c(cell.w), c(cell.count), c(cell.residual)});
                emit(run, t.str());
            };
        });
    }

    // ---- plane-check
    {
        auto* s = app.add_subcommand("plane-check", "slab counts against the plane-reduction bound");
        static std::string in;
        static double delta = 1.0 / 16, gamma = 0;
        s->add_option("-i,--input", in)->required();
        s->add_option("--delta", delta)->capture_default_str();
        s->add_option("--gamma", gamma)->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto rep = plane_reduction_check(load_plc(in), delta, gamma);
                CsvTable t = table(run, "plane reduction");
                t.comment("dx=" + fmt_double(rep.dx) + " precondition_ok=" + (rep.precondition_ok ? "1" : "0") +
                          " fitted_constant=" + fmt_double(rep.fitted_constant));
                t.column("u", "thin side").column("w", "middle side").column("measured", "pairs in the best box");
                t.column("bound", "delta^-3 u^(1+gamma) w^(2-gamma)").column("ratio", "measured / bound");
                t.column("slab_pairs", "pairs in the planar image").column("slab_separation", "d of the planar image");
                t.column("slab_bound", "(u/w)^(-2+gamma)");
                for (auto& r : rep.rows)
                    t.row({c(r.u), c(r.w), c(r.measured), c(r.bound), c(r.ratio), c(r.slab_pairs),
                           c(r.slab_separation), c(r.slab_bound)});
                emit(run, t.str());
            };
        });
    }

    // ---- uniformize
    {
        auto* s = app.add_subcommand("uniformize", "extract a (delta,K)-uniform subconfiguration");
        static std::string in, save;
        static double delta = 1.0 / 64, K = 2, Cd = 4;
        static bool separate = false;
        s->add_option("-i,--input", in)->required();
        s->add_option("--delta", delta)->capture_default_str();
        s->add_option("--K", K)->capture_default_str();
        s->add_flag("--separate", separate, "also enforce separated covering cubes");
        s->add_option("--Cd", Cd, "separation constant")->capture_default_str();
        s->add_option("--save", save, "write the kept pairs as .plc");
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                UniformizeOptions o;
                o.enforce_separation = separate, o.separation_constant = Cd;
                auto U = uniformize(load_plc(in), K, delta, o);
                if (!save.empty()) {
                    std::ostringstream os;
                    write_plc(os, U.X);
                    save_text(save, os.str());
                }
                CsvTable t = kv_table(run, "uniformization certificate");
                t.row({"input_size", c(U.cert.input_size)}).row({"output_size", c(U.cert.output_size)});
                t.row({"rounds", c(U.cert.rounds)}).row({"K", c(U.cert.K)}).row({"min_ratio", c(U.cert.min_ratio)});
                t.row({"valid", c(U.cert.valid() ? 1 : 0)});
                t.row({"independent_ratio", c(uniformity_ratio(U.X, U.cert.scales))});
                emit(run, t.str());
            };
        });
    }

    // ---- scan-b
    {
        auto* s = app.add_subcommand("scan-b", "normalized incidence B(w) over a dyadic ladder");
        static std::string pts, lines;
        static double wmin = 1.0 / 64, wmax = 0.25, eps = 0;
        s->add_option("-p,--points", pts)->required();
        s->add_option("-l,--lines", lines)->required();
        s->add_option("--wmin", wmin)->capture_default_str();
        s->add_option("--wmax", wmax)->capture_default_str();
        s->add_option("--eps", eps)->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto P = load_pts(pts);
                auto L = load_plc(lines).lines();
                auto rep = dyadic_scan(P, L, wmin, wmax, eps);
                CsvTable t = table(run, "multiscale incidence scan");
                t.column("w", "kernel scale").column("B", "I(w) / (w^(d-1) |P| |L|)");
                t.column("diff", "|B(previous row) - B(w)|").column("M_P", "max points in a w-cube");
                t.column("M_L", "max lines in a w x w x 1 box (w x 1 in 2D)");
                t.column("rhs_basic", "basic high-low right-hand side at w");
                t.column("rhs_refined", "direction-limited refinement (3D, 0 in 2D)");
                t.column("ratio", "diff^2 / rhs_basic");
                for (auto& r : rep.rows)
                    t.row({c(r.w), c(r.B), c(r.diff), c(r.mp), c(r.ml), c(r.rhs_basic), c(r.rhs_refined), c(r.ratio)});
                emit(run, t.str());
            };
        });
    }

    // ---- highlow-check
    {
        auto* s = app.add_subcommand("highlow-check", "one high-low inequality at scale delta");
        static std::string mode, pts, lines;
        static double delta = 1.0 / 32, eps = 0, nu = 1, kappa = 0, M = -1, t1 = 1, t2 = 1, K = 2, A = 1, C0 = 1;
        s->add_option("mode", mode, "basic | refined | direction-limited | wellspaced")->required();
        s->add_option("-p,--points", pts)->required();
        s->add_option("-l,--lines", lines)->required();
        s->add_option("--delta", delta)->capture_default_str();
        s->add_option("--eps", eps)->capture_default_str();
        s->add_option("--nu", nu)->capture_default_str();
        s->add_option("--kappa", kappa)->capture_default_str();
        s->add_option("--M", M, "line bound; default M_L(delta x delta x 1)")->capture_default_str();
        s->add_option("--t1", t1)->capture_default_str();
        s->add_option("--t2", t2)->capture_default_str();
        s->add_option("--K", K)->capture_default_str();
        s->add_option("--A", A)->capture_default_str();
        s->add_option("--C0", C0)->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto P = load_pts(pts);
                auto L = load_plc(lines).lines();
                CsvTable t = kv_table(run, "high-low check (" + mode + ")");
                double lhs = 0, rhs = 0;
                if (mode == "wellspaced") {
                    auto r = rhs_wellspaced(delta, P, L, t1, t2, K, A, C0, eps);
                    lhs = r.lhs, rhs = r.value;
                    t.row({"alpha", c(r.alpha)}).row({"measured_A", c(r.measured_A)});
                    t.row({"measured_C0", c(r.measured_C0)}).row({"measured_K", c(r.measured_K)});
                } else {
                    double d = normalized_b(delta, P, L) - normalized_b(2 * delta, P, L);
                    lhs = d * d;
                    if (mode == "basic") rhs = rhs_basic(delta, P, L, eps);
                    else if (mode == "refined") {
                        auto r = rhs_refined(delta, P, L, eps);
                        rhs = r.value;
                        t.row({"u", c(r.u)});
                    } else if (mode == "direction-limited") {
                        double m = M > 0 ? M : static_cast<double>(m_lines(L, delta, delta));
                        rhs = rhs_direction_limited(delta, P, L, nu, kappa, m, eps);
                    } else {
                        throw InvalidInput("unknown mode '" + mode + "'");
                    }
                }
                t.row({"delta", c(delta)}).row({"lhs", c(lhs)}).row({"rhs", c(rhs)});
                t.row({"ratio", c(rhs > 0 ? lhs / rhs : 0.0)});
                emit(run, t.str());
            };
        });
    }

    // ---- initial-est / double-count
    for (std::string name : {"initial-est", "double-count"}) {
        auto* s = app.add_subcommand(name, name == "initial-est" ? "B(w) against the covering-number estimate"
                                                                 : "line covering against direction x point covering");
        auto in = std::make_shared<std::string>();
        auto w = std::make_shared<double>(1.0 / 8);
        auto anchor = std::make_shared<std::size_t>(0);
        s->add_option("-i,--input", *in)->required();
        s->add_option("--w", *w)->capture_default_str();
        s->add_option("--anchor", *anchor)->capture_default_str();
        add_common(s, run);
        s->callback([&, name, in, w, anchor] {
            action = [&, name, in, w, anchor] {
                auto X = load_plc(*in);
                auto r = name == "initial-est" ? initial_estimate_check(X, *w, *anchor) : double_count_check(X, *w, *anchor);
                CsvTable t = table(run, name);
                t.column("w", "scale").column("lhs", "left side").column("rhs", "right side");
                t.column("slack", "rhs / lhs").column("cover_theta", "|theta|_w").column("cover_points", "|P|_w");
                t.column("cover_lines", "|L|_w");
                t.row({c(r.w), c(r.lhs), c(r.rhs), c(r.slack), c(r.cover_theta), c(r.cover_points), c(r.cover_lines)});
                emit(run, t.str());
            };
        });
    }

    // ---- two-ends
    {
        auto* s = app.add_subcommand("two-ends", "two-ends decomposition of a planar tube family");
        static std::string in, save;
        static double delta = 1.0 / 256, Delta = 1.0 / 8, C1 = 4;
        static int rounds = 0;
        s->add_option("-t,--tubes", in)->required();
        s->add_option("--delta", delta)->capture_default_str();
        s->add_option("--Delta", Delta)->capture_default_str();
        s->add_option("--C1", C1)->capture_default_str();
        s->add_option("--rounds", rounds, "0: 3 log_{2/Delta}(1/delta)")->capture_default_str();
        s->add_option("--save", save, "write the short tubes as .tubes");
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                TwoEndsOptions o;
                o.C1 = C1, o.rounds = rounds;
                auto r = two_ends_decompose(load_tubes(in), delta, Delta, o);
                if (!save.empty()) {
                    std::ostringstream os;
                    write_tubes(os, r.U);
                    save_text(save, os.str());
                }
                CsvTable t = kv_table(run, "two-ends certificate");
                t.row({"delta", c(r.delta)}).row({"Delta", c(r.Delta)}).row({"C1", c(r.C1)}).row({"r", c(r.r)});
                t.row({"m", c(r.m)}).row({"rounds_run", c(r.rounds_run)}).row({"U_count", c(r.U.size())});
                t.row({"overlap", c(r.overlap)}).row({"overlap_constant", c(r.overlap_constant)});
                t.row({"max_U_per_T", c(r.max_U_per_T)}).row({"U_constant", c(r.U_constant)});
                t.row({"coaxial_violations", c(r.coaxial_violations)});
                emit(run, t.str());
            };
        });
    }

    // ---- brush-check
    {
        auto* s = app.add_subcommand("brush-check", "union volume of a shaded tube family against the hairbrush bound");
        static std::string in;
        static double t1 = 1, t2 = 1, K = -1, eps = 0.1, lambda = 1, u = 1;
        static int pieces = 1;
        s->add_option("-t,--tubes", in)->required();
        s->add_option("--t1", t1)->capture_default_str();
        s->add_option("--t2", t2)->capture_default_str();
        s->add_option("--K", K, "Katz-Tao constant; default: measured")->capture_default_str();
        s->add_option("--eps", eps)->capture_default_str();
        s->add_option("--lambda", lambda, "shading density")->capture_default_str();
        s->add_option("--pieces", pieces, "shaded pieces per tube")->capture_default_str();
        s->add_option("--u", u, "planar variant scale")->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto T = load_tubes(in);
                if (T.empty()) throw EmptyConfiguration("no tubes");
                Shading Y = lambda >= 1 ? Shading::full(T) : random_shading(T, lambda, pieces, run.seed);
                const double delta = T[0].width;
                const bool planar = T[0].dim == 2;
                double k = K > 0 ? K : katz_tao_constant(tube_axes(T), delta, t1, planar ? 0 : t2);
                auto r = planar ? check_planar_brush(T, Y, t1, k, eps, u) : check_space_brush(T, Y, t1, t2, k, eps);
                CsvTable t = kv_table(run, planar ? "planar hairbrush" : "space hairbrush");
                t.row({"tubes", c(T.size())}).row({"lambda", c(r.lambda)}).row({"K", c(k)});
                t.row({"measured_K", c(r.measured_K)}).row({"exponent", c(r.exponent)});
                t.row({"volume", c(r.volume)}).row({"bound", c(r.bound)});
                t.row({"fitted_constant", c(r.fitted_constant)}).row({"holds", c(r.holds ? 1 : 0)});
                emit(run, t.str());
            };
        });
    }

    // ---- anneal
    {
        auto* s = app.add_subcommand("anneal", "simulated annealing for d(X) or the minimum triangle");
        static std::string objective = "dx", save;
        static std::size_t n = 16, moves = 2000, epochs = 100;
        static int dim = 2;
        static double T0 = 0, cooling = 0.95;
        s->add_option("--objective", objective, "dx | triangle")->capture_default_str();
        s->add_option("--n", n)->capture_default_str();
        s->add_option("--dim", dim)->capture_default_str();
        s->add_option("--T0", T0, "0: 0.1 x objective scale")->capture_default_str();
        s->add_option("--cooling", cooling)->capture_default_str();
        s->add_option("--moves", moves, "moves per epoch")->capture_default_str();
        s->add_option("--epochs", epochs)->capture_default_str();
        s->add_option("--save", save, "write the best configuration (.plc) or point set (.pts)");
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                AnnealSchedule sc{T0, cooling, moves, epochs, run.seed};
                std::vector<double> trace;
                double best = 0;
                std::ostringstream os;
                if (objective == "dx") {
                    auto r = anneal_max_dx(n, dim, sc);
                    trace = r.best_trace, best = r.dx;
                    write_plc(os, r.X);
                } else if (objective == "triangle") {
                    auto r = anneal_max_triangle(n, dim, sc);
                    trace = r.best_trace, best = r.area;
                    write_pts(os, r.P);
                } else {
                    throw InvalidInput("objective must be dx or triangle");
                }
                if (!save.empty()) save_text(save, os.str());
                CsvTable t = table(run, "annealing trace (" + objective + ")");
                t.comment("final=" + fmt_double(best));
                t.column("epoch", "epoch index").column("best", "best objective so far");
                for (std::size_t e = 0; e < trace.size(); ++e) t.row({c(e), c(trace[e])});
                emit(run, t.str());
            };
        });
    }

    // ---- exponent
    {
        auto* s = app.add_subcommand("exponent", "log-log exponent over a ladder, medians across seeds");
        static std::string family, ladder, seeds = "0";
        static int dim = 2;
        static std::size_t moves = 2000, epochs = 100;
        s->add_option("--family", family, "vertical | pipeline | anneal-dx | anneal-tri")->required();
        s->add_option("--ladder", ladder, "comma separated delta or n values")->required();
        s->add_option("--seeds", seeds, "comma separated")->capture_default_str();
        s->add_option("--dim", dim)->capture_default_str();
        s->add_option("--moves", moves)->capture_default_str();
        s->add_option("--epochs", epochs)->capture_default_str();
        add_common(s, run);
        s->callback([&] {
            action = [&] {
                auto lad = parse_list(ladder);
                std::vector<std::uint64_t> sd;
                for (double x : parse_list(seeds)) sd.push_back(static_cast<std::uint64_t>(x));
                ExponentOptions o;
                o.dim = dim;
                o.schedule.moves_per_epoch = moves, o.schedule.epochs = epochs;
                // resumable ledger next to the output, keyed by the manifest hash
                const std::string key = hex(fnv1a(run.hash_source));
                std::map<std::pair<std::size_t, std::uint64_t>, double> cache;
                std::string ledger;
                if (!run.out.empty() && run.out != "-") {
                    fs::path dir = fs::path(run.out).parent_path();
                    ledger = (dir.empty() ? fs::path("ledger.csv") : dir / "ledger.csv").string();
                    std::ifstream f(ledger);
                    for (std::string line; std::getline(f, line);) {
                        std::stringstream ls(line);
                        std::string h, r, sdv, v;
                        if (std::getline(ls, h, ',') && std::getline(ls, r, ',') && std::getline(ls, sdv, ',') &&
                            std::getline(ls, v) && h == key)
                            cache[{std::stoul(r), std::stoull(sdv)}] = std::stod(v);
                    }
                    o.cache = &cache;
                }
                const auto before = cache;
                auto f = exponent_estimate(family, lad, sd, o);
                if (!ledger.empty()) {
                    bool fresh = !fs::exists(ledger);
                    std::ofstream lf(ledger, std::ios::app);
                    if (fresh) lf << "hash,rung,seed,value\n";
                    for (auto& [k, v] : cache)
                        if (!before.count(k)) lf << key << ',' << k.first << ',' << k.second << ',' << fmt_double(v) << '\n';
                }
                CsvTable t = table(run, "exponent estimate (" + family + ")");
                t.comment("slope=" + fmt_double(f.slope) + " intercept=" + fmt_double(f.intercept) +
                          " r2=" + fmt_double(f.r2));
                t.column("x", "ladder value").column("median", "median over seeds");
                for (std::size_t i = 0; i < sd.size(); ++i) t.column("seed_" + std::to_string(sd[i]), "value for this seed");
                for (std::size_t r = 0; r < lad.size(); ++r) {
                    std::vector<std::string> row{c(f.ladder[r]), c(f.value[r])};
                    for (double v : f.samples[r]) row.push_back(c(v));
                    t.row(row);
                }
                emit(run, t.str());
            };
        });
    }

    // ---- run
    {
        auto* s = app.add_subcommand("run", "replay a manifest (key=value lines, 'command' names the command)");
        static std::string manifest;
        s->add_option("--manifest", manifest)->required();
        s->callback([&] {
            action = [&] {
                std::string bytes;
                auto args = read_manifest(manifest, bytes);
                if (!args.empty() && args[0] == "run") throw InvalidInput("manifests cannot nest run");
                run.status = dispatch(args, bytes);
            };
        });
    }
}

void write_log(const Run& run, const std::vector<std::string>& args, double seconds) {
    if (run.out.empty() || run.out == "-") return;
    std::ostringstream log;
    log << kVersion << '\n';
    log << "command:";
    for (auto& a : args) log << ' ' << a;
    log << '\n';
    log << "manifest_hash: " << hex(fnv1a(run.hash_source)) << '\n';
    log << "seed: " << run.seed << '\n';
    log << "wall_time_s: " << seconds << '\n';
    log << "status: " << run.status << '\n';
    save_text(run.out + ".log", log.str());
}

int dispatch(std::vector<std::string> args, std::string hash_source) {
    CLI::App app{"Heilbronn point-line toolkit"};
    Run run;
    std::function<void()> action;
    build(app, run, action);
    if (hash_source.empty())
        for (auto& a : args) hash_source += a + '\n';
    run.hash_source = hash_source;
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (action) action();
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        run.status = kInvalid;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violated: " << e.what() << '\n';
        run.status = kNumeric;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        run.status = kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        run.status = kNumeric;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (args.empty() || args[0] != "run") {
        try {
            write_log(run, args, secs);
        } catch (const std::exception& e) {
            std::cerr << "warning: " << e.what() << '\n';
        }
    }
    return run.status;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, "");
}
