#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "boxfollow/subdivision.hpp"

namespace boxfollow {

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

void write_tree(std::ostream& out, const BoxTree& tree);
BoxTree read_tree(std::istream& in);

void write_family(std::ostream& out, const CoveringFamily& family);
CoveringFamily read_family(std::istream& in);
void save_family(const std::filesystem::path& path, const CoveringFamily& family);
CoveringFamily load_family(const std::filesystem::path& path);

// "family_00042.bft" for schedule index 42.
std::string family_filename(int index);

enum class ExportFormat { kCsv };
ExportFormat parse_export_format(const std::string& name);

// Header "depth,center_1..n,radius_1..n[,lifetime]" and one row per
// retained depth-k box in path order. `lifetime`, when non-empty, is
// aligned with the snapshot.
void write_boxes_csv(std::ostream& out, const BoxTree& tree, int depth,
                     std::span<const double> lifetime = {});

}  // namespace boxfollow
