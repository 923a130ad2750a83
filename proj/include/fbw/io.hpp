#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fbw/bernoulli.hpp"
#include "fbw/grid.hpp"
#include "json.hpp"

namespace fbw {

// CSV: first record "nx=..","ny=..","h=..","origin=x0 y0", then ny rows of nx values (row j = 0 first).
// Inactive samples are empty fields.
std::string field_to_csv(const ScalarField& f);
ScalarField field_from_csv(const std::string& text);

// one RFC-4180 record per line; quoted fields may hold commas, doubled quotes and line breaks
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

nlohmann::ordered_json field_descriptor(const ScalarField& f, const std::string& csv_name);
nlohmann::ordered_json branching_json(const BranchingSet& b);

struct Polyline {
    std::vector<Point2> pts;
    std::string stroke = "black";
    double width = 1.0;
};
// viewBox is the physical window [x0, x1] x [y0, y1]; y is flipped so it points up
std::string svg_polylines(const std::vector<Polyline>& lines, double x0, double x1, double y0, double y1);

// shortest decimal that round-trips
std::string fmt_double(double v);

// git blob hash: sha1("blob <len>\0" + content), lowercase hex
std::string content_hash(const std::string& content);

// write via a temporary file and rename
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace fbw
