#include "boxfollow/family_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace boxfollow {

namespace {
constexpr const char* kMagic = "boxfollow-family";
constexpr int kFormatVersion = 1;

std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) break;
  }
  if (!in && line.empty()) throw ValidationError("family file: unexpected end, wanted '" + key + "'");
  std::istringstream ls(line);
  std::string got;
  ls >> got;
  if (got != key) throw ValidationError("family file: expected '" + key + "', found '" + got + "'");
  std::string rest;
  std::getline(ls, rest);
  const auto b = rest.find_first_not_of(' ');
  return b == std::string::npos ? std::string() : rest.substr(b);
}

Vector parse_vector(const std::string& text, std::size_t n, const char* what) {
  std::istringstream ls(text);
  Vector v;
  std::string tok;
  while (ls >> tok) v.push_back(parse_double(tok));
  if (v.size() != n) {
    throw ValidationError(std::string("family file: ") + what + " has " + std::to_string(v.size()) +
                          " entries, expected " + std::to_string(n));
  }
  return v;
}

long parse_int(const std::string& text, const char* what) {
  long v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ValidationError(std::string("family file: bad integer for ") + what + ": '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw ValidationError("not a number: '" + text + "'");
  return v;
}

void write_tree(std::ostream& out, const BoxTree& tree) {
  out << "dimension " << tree.dimension() << '\n';
  out << "lower";
  for (double v : tree.lower()) out << ' ' << format_double(v);
  out << "\nupper";
  for (double v : tree.upper()) out << ' ' << format_double(v);
  out << "\ndeepest " << tree.deepest() << '\n';
  for (int k = 0; k <= tree.deepest(); ++k) {
    const auto& snap = tree.snapshot(k);
    out << "depth " << k << ' ' << snap.size() << ' ' << (tree.is_final(k) ? 1 : 0) << '\n';
    char buf[24];
    for (PathBits p : snap) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p, 16);
      out.write(buf, end - buf);
      out << '\n';
    }
  }
}

BoxTree read_tree(std::istream& in) {
  const long n = parse_int(expect_key(in, "dimension"), "dimension");
  if (n < 1) throw ValidationError("family file: dimension must be positive");
  const auto dim = static_cast<std::size_t>(n);
  Vector lower = parse_vector(expect_key(in, "lower"), dim, "lower");
  Vector upper = parse_vector(expect_key(in, "upper"), dim, "upper");
  const long deepest = parse_int(expect_key(in, "deepest"), "deepest");
  if (deepest < 0 || deepest > kMaxDepth) throw ValidationError("family file: deepest out of range");
  BoxTree tree = BoxTree::create_root(std::move(lower), std::move(upper));
  for (int k = 0; k <= deepest; ++k) {
    std::istringstream hs(expect_key(in, "depth"));
    long kk = -1, count = -1, final = -1;
    hs >> kk >> count >> final;
    if (!hs || kk != k || count < 0) {
      throw ValidationError("family file: malformed header for depth " + std::to_string(k));
    }
    std::vector<PathBits> paths;
    paths.reserve(static_cast<std::size_t>(count));
    std::string line;
    for (long i = 0; i < count; ++i) {
      if (!std::getline(in, line)) throw ValidationError("family file: truncated depth " + std::to_string(k));
      PathBits p = 0;
      auto [end, ec] = std::from_chars(line.data(), line.data() + line.size(), p, 16);
      if (ec != std::errc() || end != line.data() + line.size()) {
        throw ValidationError("family file: bad path '" + line + "' at depth " + std::to_string(k));
      }
      paths.push_back(p);
    }
    tree.set_snapshot(k, std::move(paths), final != 0);
  }
  return tree;
}

void write_family(std::ostream& out, const CoveringFamily& family) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "lambda " << format_double(family.lambda) << '\n';
  if (family.provenance) {
    out << "provenance " << format_double(family.provenance->parent_lambda) << ' '
        << family.provenance->reuse_depth << '\n';
  } else {
    out << "provenance none\n";
  }
  write_tree(out, family.tree);
}

CoveringFamily read_family(std::istream& in) {
  const auto version = expect_key(in, kMagic);
  if (parse_int(version, "format version") != kFormatVersion) {
    throw ValidationError("family file: unsupported format version " + version);
  }
  CoveringFamily f;
  f.lambda = parse_double(expect_key(in, "lambda"));
  const auto prov = expect_key(in, "provenance");
  if (prov != "none") {
    std::istringstream ps(prov);
    std::string lam, k;
    ps >> lam >> k;
    f.provenance = Provenance{parse_double(lam), static_cast<int>(parse_int(k, "reuse depth"))};
  }
  f.tree = read_tree(in);
  return f;
}

void save_family(const std::filesystem::path& path, const CoveringFamily& family) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    write_family(out, family);
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CoveringFamily load_family(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open family file " + path.string());
  try {
    return read_family(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string family_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "family_%05d.bft", index);
  return buf;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  throw ValidationError("unknown export format '" + name + "' (supported: csv)");
}

void write_boxes_csv(std::ostream& out, const BoxTree& tree, int depth,
                     std::span<const double> lifetime) {
  const auto& snap = tree.snapshot(depth);
  if (!lifetime.empty() && lifetime.size() != snap.size()) {
    throw ValidationError("export: lifetime column does not match the snapshot size");
  }
  const std::size_t n = tree.dimension();
  out << "depth";
  for (std::size_t i = 1; i <= n; ++i) out << ",center_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",radius_" << i;
  if (!lifetime.empty()) out << ",lifetime";
  out << '\n';
  for (std::size_t j = 0; j < snap.size(); ++j) {
    const Box b = tree.box(depth, snap[j]);
    out << depth;
    for (double c : b.center) out << ',' << format_double(c);
    for (double r : b.radius) out << ',' << format_double(r);
    if (!lifetime.empty()) out << ',' << format_double(lifetime[j]);
    out << '\n';
  }
}

}  // namespace boxfollow
