#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sdfsim {

enum class TileColor : std::uint8_t
{
    White = 0,
    Black = 1,
};

/// Default tile side in meters: a 0.14 m/s robot crosses one tile diagonal per 1 s tick.
inline constexpr double kDefaultTileSide = 0.14 / 1.4142135623730951;

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

/**
 * Rectangular grid of black and white tiles. Immutable once built; tile (col, row)
 * covers [col*side, (col+1)*side) x [row*side, (row+1)*side).
 */
class Arena
{
public:
    /// Throws DomainError unless tiles.size() == width * height and tile_side > 0.
    Arena(std::size_t width_tiles, std::size_t height_tiles, std::vector<TileColor> tiles, double tile_side);

    std::size_t width_tiles() const noexcept { return width_; }
    std::size_t height_tiles() const noexcept { return height_; }
    double tile_side() const noexcept { return tile_side_; }
    double width_meters() const noexcept { return static_cast<double>(width_) * tile_side_; }
    double height_meters() const noexcept { return static_cast<double>(height_) * tile_side_; }

    std::size_t black_count() const noexcept { return black_count_; }
    std::size_t tile_count() const noexcept { return tiles_.size(); }

    TileColor tile(std::size_t col, std::size_t row) const { return tiles_.at(row * width_ + col); }

    /// Color under a point in meters. Throws DomainError outside [0, W) x [0, H).
    TileColor color_at(Point position) const;

    double fill_ratio() const noexcept;

    bool contains(Point position) const noexcept;

    /// One row per line, 'B' or 'W', each line newline-terminated.
    std::string to_grid_text() const;

    bool operator==(const Arena &other) const = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<TileColor> tiles_;
    double tile_side_;
    std::size_t black_count_;
};

/// Square arena with exactly round(target_fill_ratio * side_tiles^2) black tiles
/// placed by a seeded shuffle.
Arena generate_arena(std::size_t side_tiles, double target_fill_ratio, double tile_side, std::uint64_t seed);

/// Parse a grid of 'B'/'W' characters, one row per line. A trailing newline and
/// CRLF line endings are accepted. Throws ParseError with a line/column position.
Arena load_arena(std::string_view grid_text, double tile_side = kDefaultTileSide);

Arena load_arena_file(const std::string &path, double tile_side = kDefaultTileSide);

inline TileColor tile_color_at(const Arena &arena, Point position) { return arena.color_at(position); }
inline double actual_fill_ratio(const Arena &arena) noexcept { return arena.fill_ratio(); }

} // namespace sdfsim
