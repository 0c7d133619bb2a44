#include "maibl/grid.hpp"

#include <fstream>
#include <sstream>

namespace maibl {
namespace {

constexpr std::string_view kDefaultMap =
    ".1111111.2222222\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "................\n"
    "##...######...##\n"
    "................\n"
    "................\n"
    "........G.......\n"
    "................\n"
    "................\n"
    "A..............B\n";

}  // namespace

std::string_view GridMap::default_map_text() { return kDefaultMap; }

const GridMap& GridMap::default_map() {
  static const GridMap map = GridMap::parse(kDefaultMap);
  return map;
}

GridMap GridMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

GridMap GridMap::parse(std::string_view text) {
  GridMap map;
  std::vector<std::string_view> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view row =
        nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    rows.push_back(row);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (rows.empty()) throw MapError("empty map", 1, 1);

  map.height_ = static_cast<int>(rows.size());
  map.width_ = static_cast<int>(rows[0].size());
  if (map.width_ == 0) throw MapError("empty row", 1, 1);
  if (static_cast<long long>(map.width_) * map.height_ > 65536)
    throw MapError("map larger than 65536 cells", 1, 1);
  map.cells_.resize(static_cast<std::size_t>(map.width_) * map.height_);

  bool have_a = false, have_b = false, have_item = false;
  for (int y = 0; y < map.height_; ++y) {
    const std::string_view row = rows[static_cast<std::size_t>(y)];
    const int line = y + 1;
    if (static_cast<int>(row.size()) != map.width_)
      throw MapError("row length differs from first row", line,
                     static_cast<int>(row.size()) + 1);
    for (int x = 0; x < map.width_; ++x) {
      const char c = row[static_cast<std::size_t>(x)];
      const int col = x + 1;
      Cell cell = Cell::empty;
      switch (c) {
        case '.': break;
        case '#': cell = Cell::obstacle; break;
        case '1': cell = Cell::dropzone1; break;
        case '2': cell = Cell::dropzone2; break;
        case 'A':
          if (have_a) throw MapError("duplicate agent start 'A'", line, col);
          have_a = true;
          map.agent_starts_[0] = {x, y};
          break;
        case 'B':
          if (have_b) throw MapError("duplicate agent start 'B'", line, col);
          have_b = true;
          map.agent_starts_[1] = {x, y};
          break;
        case 'G':
          if (have_item) throw MapError("duplicate item", line, col);
          have_item = true;
          map.item_start_ = {x, y};
          break;
        default:
          throw MapError(std::string("unexpected character '") + c + "'", line, col);
      }
      map.cells_[static_cast<std::size_t>(y) * map.width_ + x] = cell;
    }
  }

  if (!have_a) throw MapError("missing agent start 'A'", map.height_, 1);
  if (!have_b) throw MapError("missing agent start 'B'", map.height_, 1);
  if (!have_item) throw MapError("missing item 'G'", map.height_, 1);

  const Pos g = map.item_start_;
  const Pos left{g.x - 1, g.y};
  const Pos right{g.x + 1, g.y};
  if (!map.in_bounds(left) || map.cell(left) != Cell::empty ||
      !map.in_bounds(right) || map.cell(right) != Cell::empty)
    throw MapError("item needs empty cells on its immediate left and right", g.y + 1,
                   g.x + 1);
  return map;
}

}  // namespace maibl
