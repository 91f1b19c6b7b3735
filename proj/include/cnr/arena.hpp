#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cnr {

/// Grid coordinate. For graph arenas the vertex id lives in `x` and `y` is 0.
struct Coord {
    int x = 0;
    int y = 0;

    friend auto operator<=>(const Coord&, const Coord&) = default;
};

struct CoordHash {
    std::size_t operator()(const Coord& c) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(c.x)) << 32) | std::uint32_t(c.y));
    }
};

std::string to_string(const Coord& c);

enum class Connectivity : std::uint8_t { FourWay, EightWay };

/// Static content of a cell. Agents are not cells.
struct CellKind {
    enum class Tag : std::uint8_t { Open, Wall, SafeZone };

    Tag tag = Tag::Open;
    int zone = 0;  // 1..S when tag == SafeZone, else 0

    static constexpr CellKind open() { return {Tag::Open, 0}; }
    static constexpr CellKind wall() { return {Tag::Wall, 0}; }
    static constexpr CellKind safe_zone(int id) { return {Tag::SafeZone, id}; }

    bool is_open() const { return tag == Tag::Open; }
    bool is_wall() const { return tag == Tag::Wall; }
    bool is_zone() const { return tag == Tag::SafeZone; }

    friend bool operator==(const CellKind&, const CellKind&) = default;
};

std::string to_string(const CellKind& k);

/// Procedural layout of the infinite plane: checkerboard bands alternating
/// with an L-shape band, optionally sprinkled with periodic safe zones.
struct TilingSpec {
    int band_period = 100;
    int low = 25;
    int high = 75;
    /// Wall offsets inside each 4x4 block of the L-shape band.
    std::vector<Coord> lshape_mask = {{0, 0}, {1, 0}, {0, 1}, {0, 2}};
    /// 0 disables zones. Otherwise SafeZone(1) sits at (1,1) and SafeZone(2)
    /// at (1+p/2, 1+p/2) of every p x p block.
    int zone_period = 0;

    /// Throws InputError unless 0 < low < high < band_period, mask offsets
    /// are inside a 4x4 block, and zone_period is 0 or >= 4.
    void validate() const;

    friend bool operator==(const TilingSpec&, const TilingSpec&) = default;
};

/// Pure function of the coordinate.
CellKind tiling_cell(const TilingSpec& spec, Coord c);

/// Finite grid, undirected graph, or procedurally tiled plane.
///
/// Finite arenas (grid and graph) number their cells densely; the solver works
/// on those indices. Tiled arenas only answer coordinate queries and are solved
/// through extracted windows.
class Arena {
public:
    enum class Kind : std::uint8_t { Grid, Graph, Tiled };

    Arena() = default;

    /// `cells` is row-major, `width * height` entries.
    static Arena grid(int width, int height, std::vector<CellKind> cells,
                      Connectivity conn = Connectivity::EightWay);
    static Arena open_grid(int width, int height, Connectivity conn = Connectivity::EightWay);
    /// Undirected graph on vertices 0..n-1. Edges must be irreflexive; they
    /// are symmetrized and deduplicated. `cells` defaults to all Open.
    static Arena graph(int vertex_count, const std::vector<std::pair<int, int>>& edges,
                       std::vector<CellKind> cells = {});
    static Arena tiled(TilingSpec spec, Connectivity conn = Connectivity::EightWay);

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ != Kind::Tiled; }
    Connectivity connectivity() const { return conn_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const TilingSpec& tiling() const { return tiling_; }
    /// Canonical undirected edge list (u < v) of a graph arena.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    /// Number of cells of a finite arena.
    int cell_count() const { return static_cast<int>(cells_.size()); }
    bool contains(Coord c) const;
    /// Dense index of a finite arena cell; throws ContractViolation when out of bounds.
    int index(Coord c) const;
    Coord coord(int idx) const;

    CellKind cell(Coord c) const;
    CellKind cell_at(int idx) const { return cells_[static_cast<std::size_t>(idx)]; }

    /// Adjacent non-wall cells. Throws ContractViolation when `c` is outside a finite arena.
    std::vector<Coord> neighbors(Coord c) const;
    /// Same as neighbors() but on dense indices; finite arenas only.
    std::span<const int> adjacent(int idx) const;

    /// Largest SafeZone id present (finite arenas).
    int zone_count() const { return zone_count_; }

    /// Manhattan distance on grids, hop distance (ignoring walls) on graphs.
    int distance(Coord a, Coord b) const;
    /// Largest distance() between two cells of a finite arena.
    int diameter() const;

    friend bool operator==(const Arena& a, const Arena& b);

private:
    void build_adjacency();

    Kind kind_ = Kind::Grid;
    Connectivity conn_ = Connectivity::EightWay;
    int width_ = 0;
    int height_ = 0;
    std::vector<CellKind> cells_;
    std::vector<std::pair<int, int>> edges_;
    TilingSpec tiling_;
    int zone_count_ = 0;
    std::vector<int> adj_offsets_;
    std::vector<int> adj_;
    std::vector<int> hop_;  // all-pairs hop distance for graphs
};

/// Arena parsed from text plus the start positions written into it.
struct ParsedArena {
    Arena arena;
    std::vector<Coord> cops;
    std::vector<Coord> robbers;
};

/// Parses the ASCII map format ('.', '#', 'C', 'R', '1'..'9'), rows split on
/// newlines. Trailing whitespace on a row is ignored. Needs at least one cop
/// and one robber.
ParsedArena parse_arena(std::string_view text, Connectivity conn = Connectivity::EightWay);

/// parse_arena without the agent requirement, for maps whose agents are
/// listed elsewhere.
ParsedArena parse_map(std::string_view text, Connectivity conn = Connectivity::EightWay);

/// Inverse of parse_arena for grid arenas with at most nine zones.
std::string render_arena(const Arena& arena, const std::vector<Coord>& cops,
                         const std::vector<Coord>& robbers);

/// Start positions must be in bounds, on Open cells, and pairwise distinct
/// across both teams. Throws InputError naming the offending cell.
void validate_starts(const Arena& arena, const std::vector<Coord>& cops,
                     const std::vector<Coord>& robbers);

/// Zone ids must form {1..S}; S >= 2 when `safe_zone_variant`.
void validate_zones(const Arena& arena, bool safe_zone_variant);

/// A finite window cut out of a tiling; `origin` is the global coordinate of
/// local cell (0,0).
struct Window {
    Arena arena;
    Coord origin;

    Coord to_local(Coord global) const { return {global.x - origin.x, global.y - origin.y}; }
    Coord to_global(Coord local) const { return {local.x + origin.x, local.y + origin.y}; }
};

/// size x size window centered on `center`; boundary cells are Wall.
/// `size` must be odd and >= 3.
Window extract_window(const TilingSpec& spec, Coord center, int size,
                      Connectivity conn = Connectivity::EightWay);

}  // namespace cnr
