#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heilbronn/config.hpp"
#include "heilbronn/tubes.hpp"

namespace heilbronn {

// Text formats, 17 significant digits:
//   plc v1 dim=<d> n=<count>    then  p <d> q <d> v <d>
//   pts v1 dim=<d> n=<count>    then  <d>
//   tubes v1 dim=<d> n=<count>  then  c <d> v <d> w <x> l <x>
void write_plc(std::ostream& os, const Configuration& X);
void write_pts(std::ostream& os, const std::vector<Point>& P);
void write_tubes(std::ostream& os, const std::vector<Tube>& T);

struct Violation {
    std::size_t line = 0;  // 1-based, 0 for whole-file problems
    std::string message;
};
std::string to_string(const Violation& v);

// Readers throw InvalidInput carrying "<name>:<line>: <message>" at the first
// violation. The check_* variants collect every violation instead.
Configuration read_plc(std::istream& is, const std::string& name = "<plc>");
std::vector<Point> read_pts(std::istream& is, const std::string& name = "<pts>");
std::vector<Tube> read_tubes(std::istream& is, const std::string& name = "<tubes>");
std::vector<Violation> check_plc(std::istream& is);
std::vector<Violation> check_pts(std::istream& is);
std::vector<Violation> check_tubes(std::istream& is);

Configuration load_plc(const std::string& path);
std::vector<Point> load_pts(const std::string& path);
std::vector<Tube> load_tubes(const std::string& path);
// Dispatch on the header magic.
std::vector<Violation> validate_file(const std::string& path);

void save_text(const std::string& path, const std::string& body);

std::string fmt_double(double x);  // %.17g

// RFC 4180 CSV with '#' comment lines describing each column.
class CsvTable {
public:
    CsvTable& comment(const std::string& line);
    CsvTable& column(const std::string& name, const std::string& meaning);
    CsvTable& row(const std::vector<std::string>& cells);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

    static std::string cell(double x) { return fmt_double(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(const std::string& s);

private:
    std::vector<std::string> comments_, names_;
    std::vector<std::vector<std::string>> rows_;
};

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace heilbronn
