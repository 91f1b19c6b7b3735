#include "cnr/arena.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "cnr/errors.hpp"

namespace cnr {

namespace {

int floor_mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

constexpr int kDx8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy8[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDx4[4] = {0, -1, 1, 0};
constexpr int kDy4[4] = {-1, 0, 0, 1};

}  // namespace

std::string to_string(const Coord& c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

std::string to_string(const CellKind& k) {
    switch (k.tag) {
        case CellKind::Tag::Open: return "Open";
        case CellKind::Tag::Wall: return "Wall";
        case CellKind::Tag::SafeZone: return "SafeZone(" + std::to_string(k.zone) + ")";
    }
    return "?";
}

void TilingSpec::validate() const {
    if (!(0 < low && low < high && high < band_period))
        throw InputError("tiling: need 0 < low < high < bandPeriod");
    for (const Coord& m : lshape_mask) {
        if (m.x < 0 || m.x > 3 || m.y < 0 || m.y > 3)
            throw InputError("tiling: mask offset " + to_string(m) + " outside 4x4 block");
    }
    if (zone_period != 0 && zone_period < 4)
        throw InputError("tiling: zonePeriod must be 0 or >= 4");
}

CellKind tiling_cell(const TilingSpec& spec, Coord c) {
    if (spec.zone_period > 0) {
        const int zx = floor_mod(c.x, spec.zone_period);
        const int zy = floor_mod(c.y, spec.zone_period);
        const int far = 1 + spec.zone_period / 2;
        if (zx == 1 && zy == 1) return CellKind::safe_zone(1);
        if (zx == far && zy == far) return CellKind::safe_zone(2);
    }
    const int sum = c.x + c.y;
    const int band = floor_mod(sum, spec.band_period);
    if (band < spec.low || band >= spec.high)
        return floor_mod(sum, 2) == 0 ? CellKind::open() : CellKind::wall();
    const Coord off{floor_mod(c.x, 4), floor_mod(c.y, 4)};
    const bool walled = std::find(spec.lshape_mask.begin(), spec.lshape_mask.end(), off) !=
                        spec.lshape_mask.end();
    return walled ? CellKind::wall() : CellKind::open();
}

Arena Arena::grid(int width, int height, std::vector<CellKind> cells, Connectivity conn) {
    if (width <= 0 || height <= 0) throw InputError("arena: width and height must be positive");
    if (cells.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw InputError("arena: cell count does not match width*height");
    Arena a;
    a.kind_ = Kind::Grid;
    a.conn_ = conn;
    a.width_ = width;
    a.height_ = height;
    a.cells_ = std::move(cells);
    a.build_adjacency();
    return a;
}

Arena Arena::open_grid(int width, int height, Connectivity conn) {
    return grid(width, height,
                std::vector<CellKind>(static_cast<std::size_t>(width * height), CellKind::open()),
                conn);
}

Arena Arena::graph(int vertex_count, const std::vector<std::pair<int, int>>& edges,
                   std::vector<CellKind> cells) {
    if (vertex_count <= 0) throw InputError("graph arena: need at least one vertex");
    if (cells.empty()) cells.assign(static_cast<std::size_t>(vertex_count), CellKind::open());
    if (cells.size() != static_cast<std::size_t>(vertex_count))
        throw InputError("graph arena: cell kinds do not match vertex count");
    std::set<std::pair<int, int>> canon;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
            throw InputError("graph arena: edge endpoint out of range");
        if (u == v) throw InputError("graph arena: self-loop on vertex " + std::to_string(u));
        canon.emplace(std::min(u, v), std::max(u, v));
    }
    Arena a;
    a.kind_ = Kind::Graph;
    a.width_ = vertex_count;
    a.height_ = 1;
    a.cells_ = std::move(cells);
    a.edges_.assign(canon.begin(), canon.end());
    a.build_adjacency();
    return a;
}

Arena Arena::tiled(TilingSpec spec, Connectivity conn) {
    spec.validate();
    Arena a;
    a.kind_ = Kind::Tiled;
    a.conn_ = conn;
    a.tiling_ = std::move(spec);
    a.zone_count_ = a.tiling_.zone_period > 0 ? 2 : 0;
    return a;
}

void Arena::build_adjacency() {
    const int n = cell_count();
    zone_count_ = 0;
    for (const CellKind& k : cells_) zone_count_ = std::max(zone_count_, k.zone);

    std::vector<std::vector<int>> lists(static_cast<std::size_t>(n));
    if (kind_ == Kind::Graph) {
        for (auto [u, v] : edges_) {
            lists[static_cast<std::size_t>(u)].push_back(v);
            lists[static_cast<std::size_t>(v)].push_back(u);
        }
    } else {
        const bool eight = conn_ == Connectivity::EightWay;
        const int dirs = eight ? 8 : 4;
        for (int i = 0; i < n; ++i) {
            const Coord c = coord(i);
            for (int d = 0; d < dirs; ++d) {
                const Coord nb{c.x + (eight ? kDx8[d] : kDx4[d]), c.y + (eight ? kDy8[d] : kDy4[d])};
                if (contains(nb)) lists[static_cast<std::size_t>(i)].push_back(index(nb));
            }
        }
    }
    adj_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    adj_.clear();
    for (int i = 0; i < n; ++i) {
        auto& l = lists[static_cast<std::size_t>(i)];
        std::sort(l.begin(), l.end(), [&](int a, int b) {
            const Coord ca = coord(a), cb = coord(b);
            return std::pair(ca.y, ca.x) < std::pair(cb.y, cb.x);
        });
        for (int j : l)
            if (!cell_at(j).is_wall()) adj_.push_back(j);
        adj_offsets_[static_cast<std::size_t>(i) + 1] = static_cast<int>(adj_.size());
    }

    hop_.clear();
    if (kind_ == Kind::Graph) {
        hop_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
        for (int s = 0; s < n; ++s) {
            std::deque<int> q{s};
            hop_[static_cast<std::size_t>(s * n + s)] = 0;
            while (!q.empty()) {
                const int u = q.front();
                q.pop_front();
                for (int v : lists[static_cast<std::size_t>(u)]) {
                    auto& d = hop_[static_cast<std::size_t>(s * n + v)];
                    if (d < 0) {
                        d = hop_[static_cast<std::size_t>(s * n + u)] + 1;
                        q.push_back(v);
                    }
                }
            }
        }
    }
}

bool Arena::contains(Coord c) const {
    if (kind_ == Kind::Tiled) return true;
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
}

int Arena::index(Coord c) const {
    if (kind_ == Kind::Tiled) throw ContractViolation("tiled arenas have no dense index");
    if (!contains(c)) throw ContractViolation("coordinate " + to_string(c) + " out of bounds");
    return c.y * width_ + c.x;
}

Coord Arena::coord(int idx) const {
    return {idx % width_, idx / width_};
}

CellKind Arena::cell(Coord c) const {
    if (kind_ == Kind::Tiled) return tiling_cell(tiling_, c);
    return cell_at(index(c));
}

std::vector<Coord> Arena::neighbors(Coord c) const {
    std::vector<Coord> out;
    if (kind_ != Kind::Tiled) {
        for (int j : adjacent(index(c))) out.push_back(coord(j));
        return out;
    }
    const bool eight = conn_ == Connectivity::EightWay;
    const int dirs = eight ? 8 : 4;
    for (int d = 0; d < dirs; ++d) {
        const Coord nb{c.x + (eight ? kDx8[d] : kDx4[d]), c.y + (eight ? kDy8[d] : kDy4[d])};
        if (!tiling_cell(tiling_, nb).is_wall()) out.push_back(nb);
    }
    return out;
}

std::span<const int> Arena::adjacent(int idx) const {
    const auto b = static_cast<std::size_t>(adj_offsets_[static_cast<std::size_t>(idx)]);
    const auto e = static_cast<std::size_t>(adj_offsets_[static_cast<std::size_t>(idx) + 1]);
    return std::span<const int>(adj_).subspan(b, e - b);
}

int Arena::distance(Coord a, Coord b) const {
    if (kind_ == Kind::Graph) {
        const int d = hop_[static_cast<std::size_t>(index(a) * width_ + index(b))];
        return d < 0 ? width_ + 1 : d;  // disconnected: farther than any path
    }
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

int Arena::diameter() const {
    if (kind_ == Kind::Tiled) throw ContractViolation("tiled arenas have no diameter");
    if (kind_ == Kind::Graph) {
        int best = 0;
        for (int d : hop_) best = std::max(best, d < 0 ? width_ + 1 : d);
        return best;
    }
    return width_ - 1 + height_ - 1;
}

bool operator==(const Arena& a, const Arena& b) {
    return a.kind_ == b.kind_ && a.conn_ == b.conn_ && a.width_ == b.width_ &&
           a.height_ == b.height_ && a.cells_ == b.cells_ && a.edges_ == b.edges_ &&
           a.tiling_ == b.tiling_;
}

ParsedArena parse_map(std::string_view text, Connectivity conn) {
    std::vector<std::string> rows;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string row(text.substr(pos, nl - pos));
        while (!row.empty() && (row.back() == ' ' || row.back() == '\r' || row.back() == '\t'))
            row.pop_back();
        rows.push_back(std::move(row));
        pos = nl + 1;
    }
    while (!rows.empty() && rows.back().empty()) rows.pop_back();
    if (rows.empty()) throw InputError("map: empty");

    const std::size_t width = rows.front().size();
    ParsedArena out;
    std::vector<CellKind> cells;
    cells.reserve(width * rows.size());
    for (std::size_t y = 0; y < rows.size(); ++y) {
        if (rows[y].size() != width)
            throw InputError("map: row " + std::to_string(y) + " has length " +
                             std::to_string(rows[y].size()) + ", expected " + std::to_string(width));
        for (std::size_t x = 0; x < width; ++x) {
            const char ch = rows[y][x];
            const Coord c{static_cast<int>(x), static_cast<int>(y)};
            switch (ch) {
                case '.': cells.push_back(CellKind::open()); break;
                case '#': cells.push_back(CellKind::wall()); break;
                case 'C': cells.push_back(CellKind::open()); out.cops.push_back(c); break;
                case 'R': cells.push_back(CellKind::open()); out.robbers.push_back(c); break;
                default:
                    if (ch >= '1' && ch <= '9') {
                        cells.push_back(CellKind::safe_zone(ch - '0'));
                        break;
                    }
                    throw InputError(std::string("map: unexpected character '") + ch + "' at " +
                                     to_string(c));
            }
        }
    }
    out.arena = Arena::grid(static_cast<int>(width), static_cast<int>(rows.size()), std::move(cells),
                            conn);
    return out;
}

ParsedArena parse_arena(std::string_view text, Connectivity conn) {
    ParsedArena out = parse_map(text, conn);
    if (out.cops.empty()) throw InputError("map: no cop ('C')");
    if (out.robbers.empty()) throw InputError("map: no robber ('R')");
    return out;
}

std::string render_arena(const Arena& arena, const std::vector<Coord>& cops,
                         const std::vector<Coord>& robbers) {
    if (arena.kind() != Arena::Kind::Grid) throw ContractViolation("render_arena: grid arenas only");
    if (arena.zone_count() > 9) throw ContractViolation("render_arena: more than nine zones");
    std::vector<std::string> rows(static_cast<std::size_t>(arena.height()),
                                  std::string(static_cast<std::size_t>(arena.width()), '.'));
    for (int i = 0; i < arena.cell_count(); ++i) {
        const Coord c = arena.coord(i);
        const CellKind k = arena.cell_at(i);
        char& ch = rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)];
        if (k.is_wall()) ch = '#';
        if (k.is_zone()) ch = static_cast<char>('0' + k.zone);
    }
    for (const Coord& c : cops) rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)] = 'C';
    for (const Coord& c : robbers) rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)] = 'R';
    std::ostringstream os;
    for (const auto& r : rows) os << r << '\n';
    return os.str();
}

void validate_starts(const Arena& arena, const std::vector<Coord>& cops,
                     const std::vector<Coord>& robbers) {
    std::set<Coord> seen;
    auto check = [&](const Coord& c, const char* who) {
        if (!arena.contains(c)) throw InputError(std::string(who) + " start " + to_string(c) + " out of bounds");
        const CellKind k = arena.cell(c);
        if (k.is_wall()) throw InputError(std::string(who) + " start " + to_string(c) + " is a wall");
        if (k.is_zone()) throw InputError(std::string(who) + " start " + to_string(c) + " is inside a safe zone");
        if (!seen.insert(c).second) throw InputError("duplicate occupancy at " + to_string(c));
    };
    for (const Coord& c : cops) check(c, "cop");
    for (const Coord& c : robbers) check(c, "robber");
}

void validate_zones(const Arena& arena, bool safe_zone_variant) {
    if (!arena.finite()) return;
    std::set<int> ids;
    for (int i = 0; i < arena.cell_count(); ++i)
        if (arena.cell_at(i).is_zone()) ids.insert(arena.cell_at(i).zone);
    const int s = static_cast<int>(ids.size());
    if (s > 0 && (*ids.begin() != 1 || *ids.rbegin() != s))
        throw InputError("safe zone ids must be contiguous 1..S");
    if (safe_zone_variant && s < 2)
        throw InputError("safe-zone variant needs at least two safe zones, found " + std::to_string(s));
}

Window extract_window(const TilingSpec& spec, Coord center, int size, Connectivity conn) {
    if (size < 3 || size % 2 == 0) throw ContractViolation("window size must be odd and >= 3");
    const Coord origin{center.x - size / 2, center.y - size / 2};
    std::vector<CellKind> cells;
    cells.reserve(static_cast<std::size_t>(size * size));
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const bool boundary = x == 0 || y == 0 || x == size - 1 || y == size - 1;
            cells.push_back(boundary ? CellKind::wall()
                                     : tiling_cell(spec, {origin.x + x, origin.y + y}));
        }
    }
    return {Arena::grid(size, size, std::move(cells), conn), origin};
}

}  // namespace cnr
