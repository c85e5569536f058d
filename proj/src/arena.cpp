#include "sdfsim/arena.hpp"

#include "sdfsim/error.hpp"
#include "sdfsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sdfsim {

Arena::Arena(std::size_t width_tiles, std::size_t height_tiles, std::vector<TileColor> tiles, double tile_side)
    : width_(width_tiles), height_(height_tiles), tiles_(std::move(tiles)), tile_side_(tile_side), black_count_(0)
{
    if (width_ == 0 || height_ == 0)
        throw DomainError("arena must have at least one tile in each dimension");
    if (tiles_.size() != width_ * height_)
        throw DomainError("arena tile count does not match its dimensions");
    if (!(tile_side_ > 0.0) || !std::isfinite(tile_side_))
        throw DomainError("tile side must be a positive length");
    black_count_ = static_cast<std::size_t>(std::count(tiles_.begin(), tiles_.end(), TileColor::Black));
}

bool Arena::contains(Point p) const noexcept
{
    return p.x >= 0.0 && p.y >= 0.0 && p.x < width_meters() && p.y < height_meters();
}

TileColor Arena::color_at(Point p) const
{
    if (!contains(p))
        throw DomainError("position outside arena bounds");
    // Floor convention: a point on a tile boundary belongs to the cell starting there.
    auto col = static_cast<std::size_t>(std::floor(p.x / tile_side_));
    auto row = static_cast<std::size_t>(std::floor(p.y / tile_side_));
    // Division can round up to the next cell just below the far wall.
    col = std::min(col, width_ - 1);
    row = std::min(row, height_ - 1);
    return tiles_[row * width_ + col];
}

double Arena::fill_ratio() const noexcept
{
    return static_cast<double>(black_count_) / static_cast<double>(tiles_.size());
}

std::string Arena::to_grid_text() const
{
    std::string out;
    out.reserve((width_ + 1) * height_);
    for (std::size_t row = 0; row < height_; ++row)
    {
        for (std::size_t col = 0; col < width_; ++col)
            out.push_back(tiles_[row * width_ + col] == TileColor::Black ? 'B' : 'W');
        out.push_back('\n');
    }
    return out;
}

Arena generate_arena(std::size_t side_tiles, double target_fill_ratio, double tile_side, std::uint64_t seed)
{
    if (side_tiles == 0)
        throw DomainError("arena side must be at least one tile");
    if (!(target_fill_ratio >= 0.0 && target_fill_ratio <= 1.0))
        throw DomainError("target fill ratio must lie in [0, 1]");

    const std::size_t total = side_tiles * side_tiles;
    const auto black = static_cast<std::size_t>(std::llround(target_fill_ratio * static_cast<double>(total)));

    std::vector<TileColor> tiles(total, TileColor::White);
    std::fill_n(tiles.begin(), black, TileColor::Black);
    RandomStream rng(seed, StreamTag::Arena);
    shuffle(tiles.begin(), tiles.end(), rng);

    return Arena(side_tiles, side_tiles, std::move(tiles), tile_side);
}

Arena load_arena(std::string_view text, double tile_side)
{
    std::vector<TileColor> tiles;
    std::size_t width = 0;
    std::size_t height = 0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
        {
            // Only trailing blank lines are tolerated.
            if (pos >= text.size() || text.find_first_not_of("\r\n", pos) == std::string_view::npos)
                break;
            throw ParseError("empty row inside grid", line_no, 1);
        }

        for (std::size_t col = 0; col < line.size(); ++col)
        {
            switch (line[col])
            {
            case 'B':
                tiles.push_back(TileColor::Black);
                break;
            case 'W':
                tiles.push_back(TileColor::White);
                break;
            default:
                throw ParseError(std::string("unexpected character '") + line[col] + "', expected 'B' or 'W'",
                                 line_no, col + 1);
            }
        }

        if (height == 0)
            width = line.size();
        else if (line.size() != width)
            throw ParseError("ragged row: expected " + std::to_string(width) + " columns, found " +
                                 std::to_string(line.size()),
                             line_no, std::min(line.size(), width) + 1);
        ++height;
    }

    if (height == 0)
        throw ParseError("empty arena grid", 1, 1);

    return Arena(width, height, std::move(tiles), tile_side);
}

Arena load_arena_file(const std::string &path, double tile_side)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open arena file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_arena(buf.str(), tile_side);
}

} // namespace sdfsim
