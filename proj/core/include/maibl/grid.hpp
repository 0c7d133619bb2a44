#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maibl {

enum class Action : int { stay = 0, left = 1, right = 2, up = 3, down = 4 };
inline constexpr int kNumActions = 5;

inline const char* action_name(Action a) {
  switch (a) {
    case Action::stay: return "stay";
    case Action::left: return "left";
    case Action::right: return "right";
    case Action::up: return "up";
    case Action::down: return "down";
  }
  return "?";
}

struct Pos {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pos&, const Pos&) = default;
};

// Unit displacement of an action; stay maps to (0,0).
inline Pos action_delta(Action a) {
  switch (a) {
    case Action::left: return {-1, 0};
    case Action::right: return {1, 0};
    case Action::up: return {0, -1};
    case Action::down: return {0, 1};
    default: return {0, 0};
  }
}

enum class Cell : std::uint8_t { empty, obstacle, dropzone1, dropzone2 };

// Parse failure with 1-based source coordinates.
struct MapError : std::runtime_error {
  int line;
  int column;
  MapError(const std::string& message, int line_, int column_)
      : std::runtime_error(message + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(column_) + ")"),
        line(line_),
        column(column_) {}
};

// Static world geometry: cell grid, the two agent start cells, the item
// start cell. Characters: '#' obstacle, '.' empty, 'A'/'B' agent starts,
// 'G' item, '1'/'2' dropzone cells. All rows must have equal length.
class GridMap {
 public:
  static GridMap parse(std::string_view text);
  static GridMap load(const std::filesystem::path& path);
  // The map shipped with the library: 16x16, two dropzone strips along the
  // top row, an interior wall with two three-cell exits separating a lower
  // room that holds the item and both agent starts.
  static const GridMap& default_map();
  static std::string_view default_map_text();

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Pos p) const {
    return p.x >= 0 && p.x < width_ && p.y >= 0 && p.y < height_;
  }
  Cell cell(Pos p) const { return cells_[static_cast<std::size_t>(p.y) * width_ + p.x]; }
  bool walkable(Pos p) const { return in_bounds(p) && cell(p) != Cell::obstacle; }
  // 0 when p is not a dropzone cell, otherwise the zone id (1 or 2).
  int zone_at(Pos p) const {
    if (!in_bounds(p)) return 0;
    const Cell c = cell(p);
    return c == Cell::dropzone1 ? 1 : c == Cell::dropzone2 ? 2 : 0;
  }

  Pos agent_start(int agent) const { return agent_starts_[agent]; }
  Pos item_start() const { return item_start_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
  Pos agent_starts_[2];
  Pos item_start_;
};

}  // namespace maibl
