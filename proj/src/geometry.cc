#include "snaq/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace snaq {

Rational::Rational(int64_t n, int64_t d) {
    if (d == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) {
        g = 1;
    }
    num = n / g;
    den = d / g;
}

Rational Rational::parse(const std::string &text) {
    auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) {
            size_t used = 0;
            int64_t v = std::stoll(text, &used);
            if (used != text.size()) {
                throw std::invalid_argument(text);
            }
            return Rational(v, 1);
        }
        std::string whole = text.substr(0, dot);
        std::string frac = text.substr(dot + 1);
        if (frac.size() > 12 || frac.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument(text);
        }
        int64_t scale = 1;
        for (size_t i = 0; i < frac.size(); i++) {
            scale *= 10;
        }
        bool neg = !whole.empty() && whole[0] == '-';
        int64_t w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
        int64_t f = frac.empty() ? 0 : std::stoll(frac);
        int64_t n = (neg ? -1 : 1) * ((w < 0 ? -w : w) * scale + f);
        return Rational(n, scale);
    } catch (const std::logic_error &) {
        throw std::invalid_argument("not a rational number: '" + text + "'");
    }
}

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        q--;
    }
    return q;
}

int64_t ceil_div(int64_t a, int64_t b) {
    return -floor_div(-a, b);
}

int64_t Rational::floor() const { return floor_div(num, den); }
int64_t Rational::ceil() const { return ceil_div(num, den); }

std::string Rational::str() const {
    if (den == 1) {
        return std::to_string(num);
    }
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator*(const Rational &a, const Rational &b) {
    return Rational(a.num * b.num, a.den * b.den);
}
Rational operator/(const Rational &a, const Rational &b) {
    return Rational(a.num * b.den, a.den * b.num);
}
Rational operator+(const Rational &a, const Rational &b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}
bool operator<(const Rational &a, const Rational &b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
}

const char *side_name(Side s) {
    return s == Side::kLeft ? "left" : "right";
}

const char *pauli_name(PauliType t) {
    return t == PauliType::X ? "X" : "Z";
}

int DotArray::ports_per_patch_side(int d) const {
    return (int)(Rational(2 * (d + 1)) * rho).floor();
}

std::vector<int> DotArray::ports_in_rows(Side side, int row_lo, int row_hi) const {
    std::vector<int> out;
    for (const auto &p : ports) {
        if (p.side == side && p.row >= row_lo && p.row < row_hi) {
            out.push_back(p.id);
        }
    }
    return out;
}

std::vector<int> DotArray::ports_on(Side side) const {
    return ports_in_rows(side, std::numeric_limits<int>::min(), std::numeric_limits<int>::max());
}

DotArray build_array(int width, int length, Rational rho) {
    if (rho.num <= 0) {
        throw std::invalid_argument("readout density must be positive, got " + rho.str());
    }
    if (width < 5) {
        throw std::invalid_argument("array width " + std::to_string(width) + " cannot host a distance-3 patch (need >= 5)");
    }
    if (length < width) {
        throw std::invalid_argument("array length " + std::to_string(length) + " is shorter than its width " +
                                    std::to_string(width));
    }
    DotArray a;
    a.width = width;
    a.length = length;
    a.rho = rho;
    for (Side side : {Side::kLeft, Side::kRight}) {
        int prev_row = -1;
        int slot = 0;
        for (int64_t k = 0;; k++) {
            int64_t row = floor_div(k * rho.den, rho.num);
            if (row >= length) {
                break;
            }
            slot = row == prev_row ? slot + 1 : 0;
            prev_row = (int)row;
            a.ports.push_back(Port{(int)a.ports.size(), side, (int)row, slot});
        }
    }
    return a;
}

int max_distance(int width, int columns) {
    int d;
    if (columns == 1) {
        d = width - 2;
    } else if (columns == 2) {
        d = (int)floor_div(width - 3, 2);
    } else {
        throw std::invalid_argument("columns must be 1 or 2, got " + std::to_string(columns));
    }
    if (d < 3) {
        throw std::invalid_argument("width " + std::to_string(width) + " is too small for a " +
                                    std::to_string(columns) + "-column layout");
    }
    return d;
}

int Stabilizer::weight() const {
    int w = 0;
    for (int c : corners) {
        w += c >= 0;
    }
    return w;
}

std::vector<int> CodePatch::logical_support(PauliType basis) const {
    std::vector<int> out;
    if (basis == PauliType::Z) {
        for (int k = 0; k < data_cols; k++) {
            out.push_back(data_index(0, k));
        }
    } else {
        for (int i = 0; i < data_rows; i++) {
            out.push_back(data_index(i, 0));
        }
    }
    return out;
}

int CodePatch::count(PauliType t) const {
    int n = 0;
    for (const auto &s : stabilizers) {
        n += s.type == t;
    }
    return n;
}

CodePatch make_patch(int data_rows, int data_cols, Dot origin) {
    if (data_rows < 1 || data_cols < 2) {
        throw std::invalid_argument("patch needs at least 1 row and 2 columns");
    }
    CodePatch p;
    p.distance = std::min(data_rows, data_cols);
    p.data_rows = data_rows;
    p.data_cols = data_cols;
    p.origin = origin;
    p.lane_left = origin.col;
    p.lane_right = origin.col + data_cols + 1;
    for (int i = 0; i < data_rows; i++) {
        for (int k = 0; k < data_cols; k++) {
            p.data_sites.push_back(Dot{origin.row + 2 * i + 1, origin.col + k + 1});
        }
    }
    for (int r = 0; r <= data_rows; r++) {
        p.channel_rows.push_back(origin.row + 2 * r);
    }
    for (int r = 0; r <= data_rows; r++) {
        for (int j = -1; j < data_cols; j++) {
            PauliType t = ((r + j) % 2 + 2) % 2 == 0 ? PauliType::X : PauliType::Z;
            bool inner_r = 1 <= r && r <= data_rows - 1;
            bool inner_j = 0 <= j && j <= data_cols - 2;
            bool keep;
            if (inner_r && inner_j) {
                keep = true;
            } else if ((r == 0 || r == data_rows) && inner_j) {
                keep = t == PauliType::X;
            } else if ((j == -1 || j == data_cols - 1) && inner_r) {
                keep = t == PauliType::Z;
            } else {
                keep = false;
            }
            if (!keep) {
                continue;
            }
            Stabilizer s;
            s.id = (int)p.stabilizers.size();
            s.type = t;
            s.r = r;
            s.j = j;
            const int dr[4] = {-1, 0, -1, 0};
            const int dc[4] = {0, 0, 1, 1};
            for (int c = 0; c < 4; c++) {
                int i = r + dr[c];
                int k = j + dc[c];
                if (i >= 0 && i < data_rows && k >= 0 && k < data_cols) {
                    s.corners[c] = p.data_index(i, k);
                }
            }
            s.home_a = Dot{origin.row + 2 * r, origin.col + j + 1};
            s.home_b = Dot{origin.row + 2 * r, origin.col + j + 2};
            p.stabilizers.push_back(s);
        }
    }
    return p;
}

CodePatch embed_patch(const DotArray &array, int d, int column_slot, int row_slot) {
    if (d < 3 || d % 2 == 0) {
        throw std::invalid_argument("distance must be odd and >= 3, got " + std::to_string(d));
    }
    if (column_slot == 0) {
        if (d > array.width - 2) {
            throw std::invalid_argument("distance " + std::to_string(d) + " exceeds bound w-2=" +
                                        std::to_string(array.width - 2) + " for width " +
                                        std::to_string(array.width));
        }
    } else if (column_slot == 1) {
        int bound = (int)floor_div(array.width - 3, 2);
        if (d > bound) {
            throw std::invalid_argument("distance " + std::to_string(d) + " exceeds two-column bound floor((w-3)/2)=" +
                                        std::to_string(bound) + " for width " + std::to_string(array.width));
        }
    } else {
        throw std::invalid_argument("column slot must be 0 or 1");
    }
    if (row_slot < 0) {
        throw std::invalid_argument("row slot must be nonnegative");
    }
    Dot origin{row_slot * 2 * (d + 1), column_slot == 0 ? 0 : d + 1};
    CodePatch p = make_patch(d, d, origin);
    p.column_slot = column_slot;
    if (p.row_end() > array.length) {
        throw std::invalid_argument("array length " + std::to_string(array.length) + " cannot hold a distance-" +
                                    std::to_string(d) + " patch at row slot " + std::to_string(row_slot) +
                                    " (needs " + std::to_string(p.row_end()) + " rows)");
    }
    return p;
}

CodePatch merge_patches(const CodePatch &a, const CodePatch &b, int s) {
    if (a.data_cols != b.data_cols) {
        throw std::invalid_argument("merged patches must have equal width");
    }
    if (s < 0) {
        throw std::invalid_argument("separation must be nonnegative");
    }
    CodePatch m = make_patch(a.data_rows + s + b.data_rows, a.data_cols, a.origin);
    m.distance = std::min(a.distance, b.distance);
    m.column_slot = a.column_slot;
    return m;
}

int64_t wave_count(int64_t n_ancillas, const Rational &rho, int64_t dot_rows) {
    // ceil(n / (rho * rows)) = ceil(n * den / (num * rows))
    __int128 top = (__int128)n_ancillas * rho.den;
    __int128 bot = (__int128)rho.num * dot_rows;
    if (bot <= 0) {
        throw std::invalid_argument("wave count needs positive port capacity");
    }
    return (int64_t)((top + bot - 1) / bot);
}

int64_t wave_count_for_distance(int d, const Rational &rho) {
    return wave_count((int64_t)d * d - 1, rho, 2 * (int64_t)(d + 1));
}

namespace {

struct AncRef {
    int global = 0;
    const Stabilizer *stab = nullptr;
};

// Choose |items| ports out of `ports` (sorted by row) keeping order, minimizing
// total row distance. items are sorted by row as well.
std::vector<int> monotone_match(const std::vector<int> &item_rows, const std::vector<int> &port_ids,
                                const DotArray &array) {
    size_t m = item_rows.size();
    size_t n = port_ids.size();
    const int64_t inf = std::numeric_limits<int64_t>::max() / 4;
    // best[i][j]: cost placing first i items among first j ports
    std::vector<std::vector<int64_t>> best(m + 1, std::vector<int64_t>(n + 1, inf));
    for (size_t j = 0; j <= n; j++) {
        best[0][j] = 0;
    }
    for (size_t i = 1; i <= m; i++) {
        for (size_t j = i; j <= n; j++) {
            int64_t skip = best[i][j - 1];
            int64_t take = best[i - 1][j - 1];
            if (take < inf) {
                take += std::abs(item_rows[i - 1] - array.ports[port_ids[j - 1]].row);
            }
            best[i][j] = std::min(skip, take);
        }
    }
    std::vector<int> out(m);
    size_t i = m;
    size_t j = n;
    while (i > 0) {
        if (j > i && best[i][j] == best[i][j - 1]) {
            j--;
        } else {
            out[i - 1] = port_ids[j - 1];
            i--;
            j--;
        }
    }
    return out;
}

// Ports on `side` for the region, extended with the nearest outside ports
// when a wave needs more than the region provides.
std::vector<int> region_ports(const DotArray &array, Side side, int row_lo, int row_hi, size_t need) {
    std::vector<int> in = array.ports_in_rows(side, row_lo, row_hi);
    if (in.size() >= need) {
        return in;
    }
    std::vector<int> all = array.ports_on(side);
    std::vector<std::pair<int, int>> outside;
    for (int id : all) {
        int row = array.ports[id].row;
        if (row < row_lo || row >= row_hi) {
            int dist = row < row_lo ? row_lo - row : row - row_hi + 1;
            outside.push_back({dist, id});
        }
    }
    std::sort(outside.begin(), outside.end());
    for (size_t i = 0; i < outside.size() && in.size() < need; i++) {
        in.push_back(outside[i].second);
    }
    if (in.size() < need) {
        throw std::invalid_argument("array has too few " + std::string(side_name(side)) + " ports for one wave");
    }
    std::sort(in.begin(), in.end(), [&](int x, int y) {
        const Port &a = array.ports[x];
        const Port &b = array.ports[y];
        return a.row != b.row ? a.row < b.row : a.slot < b.slot;
    });
    return in;
}

std::vector<std::vector<int>> balanced_chunks(const std::vector<int> &items, int n) {
    std::vector<std::vector<int>> out(n);
    size_t base = items.size() / n;
    size_t extra = items.size() % n;
    size_t pos = 0;
    for (int k = 0; k < n; k++) {
        size_t len = base + ((size_t)k < extra ? 1 : 0);
        out[k].assign(items.begin() + pos, items.begin() + pos + len);
        pos += len;
    }
    return out;
}

}  // namespace

WaveAssignment assign_waves(const DotArray &array, const std::vector<CodePatch> &patches, bool both_edges) {
    if (patches.empty()) {
        throw std::invalid_argument("assign_waves needs at least one patch");
    }
    std::vector<AncRef> anc;
    int row_lo = std::numeric_limits<int>::max();
    int row_hi = std::numeric_limits<int>::min();
    for (const auto &p : patches) {
        for (const auto &s : p.stabilizers) {
            anc.push_back(AncRef{(int)anc.size(), &s});
        }
        row_lo = std::min(row_lo, p.row_begin());
        row_hi = std::max(row_hi, p.row_end());
    }
    int n = (int)anc.size();
    int rows = row_hi - row_lo;
    int cap = (int)array.ports_in_rows(Side::kLeft, row_lo, row_hi).size();

    WaveAssignment w;
    w.both_edges = both_edges;
    w.wave_of.assign(n, -1);
    w.entry_side.assign(n, Side::kLeft);
    w.in_port.assign(n, -1);
    w.out_port.assign(n, -1);
    w.ports = array.ports;

    auto x_first = [&](int a, int b) { return anc[a].stab->type == PauliType::X && anc[b].stab->type == PauliType::Z; };
    // Deepest ancilla (farthest from its entry edge) first.
    auto deeper_from_left = [&](int a, int b) {
        const Stabilizer &s = *anc[a].stab;
        const Stabilizer &t = *anc[b].stab;
        if (s.home_a.col != t.home_a.col) return s.home_a.col > t.home_a.col;
        if (s.home_a.row != t.home_a.row) return s.home_a.row < t.home_a.row;
        return x_first(a, b);
    };
    auto deeper_from_right = [&](int a, int b) {
        const Stabilizer &s = *anc[a].stab;
        const Stabilizer &t = *anc[b].stab;
        if (s.home_a.col != t.home_a.col) return s.home_a.col < t.home_a.col;
        if (s.home_a.row != t.home_a.row) return s.home_a.row < t.home_a.row;
        return x_first(a, b);
    };

    std::vector<int> left;
    std::vector<int> right;
    if (!both_edges) {
        for (int a = 0; a < n; a++) {
            left.push_back(a);
        }
        w.n_waves = (int)wave_count(n, array.rho, rows);
    } else {
        // Split every channel row in half so the two entry groups never cross.
        std::map<int, std::vector<int>> by_row;
        for (int a = 0; a < n; a++) {
            by_row[anc[a].stab->home_a.row].push_back(a);
        }
        for (auto &kv : by_row) {
            auto &v = kv.second;
            std::sort(v.begin(), v.end(), [&](int a, int b) { return anc[a].stab->home_a.col < anc[b].stab->home_a.col; });
            size_t half = v.size() / 2;
            for (size_t i = 0; i < v.size(); i++) {
                (i < half ? left : right).push_back(v[i]);
            }
        }
        int64_t nw = wave_count(n, array.rho * Rational(2), rows);
        nw = std::max<int64_t>(nw, ceil_div((int64_t)left.size(), std::max(cap, 1)));
        nw = std::max<int64_t>(nw, ceil_div((int64_t)right.size(), std::max(cap, 1)));
        w.n_waves = (int)nw;
    }
    std::sort(left.begin(), left.end(), deeper_from_left);
    std::sort(right.begin(), right.end(), deeper_from_right);
    auto left_chunks = balanced_chunks(left, w.n_waves);
    auto right_chunks = balanced_chunks(right, w.n_waves);

    size_t widest = 0;
    for (int k = 0; k < w.n_waves; k++) {
        widest = std::max({widest, left_chunks[k].size(), right_chunks[k].size()});
    }
    w.capacity_per_side = std::max<int>(cap, (int)widest);
    std::vector<int> lports = region_ports(array, Side::kLeft, row_lo, row_hi, widest);
    std::vector<int> rports = region_ports(array, Side::kRight, row_lo, row_hi, widest);

    auto match = [&](std::vector<int> group, const std::vector<int> &ports, std::vector<int> &dest) {
        std::sort(group.begin(), group.end(), [&](int a, int b) {
            const Stabilizer &s = *anc[a].stab;
            const Stabilizer &t = *anc[b].stab;
            return s.home_a.row != t.home_a.row ? s.home_a.row < t.home_a.row : s.home_a.col < t.home_a.col;
        });
        std::vector<int> item_rows;
        for (int a : group) {
            item_rows.push_back(anc[a].stab->home_a.row);
        }
        auto chosen = monotone_match(item_rows, ports, array);
        for (size_t i = 0; i < group.size(); i++) {
            dest[group[i]] = chosen[i];
        }
    };

    w.members.resize(w.n_waves);
    w.ports_of_wave.resize(w.n_waves);
    for (int k = 0; k < w.n_waves; k++) {
        for (int a : left_chunks[k]) {
            w.wave_of[a] = k;
            w.entry_side[a] = Side::kLeft;
            w.members[k].push_back(a);
        }
        for (int a : right_chunks[k]) {
            w.wave_of[a] = k;
            w.entry_side[a] = Side::kRight;
            w.members[k].push_back(a);
        }
        match(left_chunks[k], lports, w.in_port);
        if (!both_edges) {
            match(left_chunks[k], rports, w.out_port);
        } else {
            match(right_chunks[k], rports, w.in_port);
            for (int a : w.members[k]) {
                w.out_port[a] = w.in_port[a];
            }
        }
        for (int a : w.members[k]) {
            w.ports_of_wave[k].push_back(w.in_port[a]);
        }
        std::sort(w.ports_of_wave[k].begin(), w.ports_of_wave[k].end());
    }
    return w;
}

WaveAssignment assign_waves(const DotArray &array, const CodePatch &patch, bool both_edges) {
    return assign_waves(array, std::vector<CodePatch>{patch}, both_edges);
}

int64_t data_wave_count(int d, int64_t ports_per_side) {
    if (ports_per_side <= 0) {
        throw std::invalid_argument("data waves need at least one port per side");
    }
    int64_t n = (int64_t)d * d;
    int64_t left = (int64_t)d * ((d + 1) / 2);
    return std::max(ceil_div(n, 2 * ports_per_side), ceil_div(left, ports_per_side));
}

WaveAssignment assign_data_waves(const DotArray &array, const CodePatch &patch) {
    int n = (int)patch.data_sites.size();
    int cols = patch.data_cols;
    int split = (cols + 1) / 2;
    std::vector<int> left;
    std::vector<int> right;
    for (int q = 0; q < n; q++) {
        (q % cols < split ? left : right).push_back(q);
    }
    const auto &site = patch.data_sites;
    std::sort(left.begin(), left.end(), [&](int a, int b) {
        if (site[a].col != site[b].col) return site[a].col > site[b].col;
        return site[a].row < site[b].row;
    });
    std::sort(right.begin(), right.end(), [&](int a, int b) {
        if (site[a].col != site[b].col) return site[a].col < site[b].col;
        return site[a].row < site[b].row;
    });
    int cap = (int)array.ports_in_rows(Side::kLeft, patch.row_begin(), patch.row_end()).size();
    WaveAssignment w;
    w.both_edges = true;
    w.ports = array.ports;
    w.n_waves = (int)std::max<int64_t>(ceil_div(n, 2 * (int64_t)std::max(cap, 1)),
                                       std::max(ceil_div((int64_t)left.size(), std::max(cap, 1)),
                                                ceil_div((int64_t)right.size(), std::max(cap, 1))));
    w.wave_of.assign(n, -1);
    w.entry_side.assign(n, Side::kLeft);
    w.in_port.assign(n, -1);
    w.out_port.assign(n, -1);
    w.members.resize(w.n_waves);
    w.ports_of_wave.resize(w.n_waves);
    auto lc = balanced_chunks(left, w.n_waves);
    auto rc = balanced_chunks(right, w.n_waves);
    size_t widest = 0;
    for (int k = 0; k < w.n_waves; k++) {
        widest = std::max({widest, lc[k].size(), rc[k].size()});
    }
    w.capacity_per_side = std::max<int>(cap, (int)widest);
    for (Side side : {Side::kLeft, Side::kRight}) {
        auto &chunks = side == Side::kLeft ? lc : rc;
        std::vector<int> ports = region_ports(array, side, patch.row_begin(), patch.row_end(), widest);
        for (int k = 0; k < w.n_waves; k++) {
            std::vector<int> group = chunks[k];
            std::sort(group.begin(), group.end(), [&](int a, int b) {
                return site[a].row != site[b].row ? site[a].row < site[b].row : site[a].col < site[b].col;
            });
            std::vector<int> rows;
            for (int q : group) {
                rows.push_back(site[q].row);
            }
            auto chosen = monotone_match(rows, ports, array);
            for (size_t i = 0; i < group.size(); i++) {
                w.in_port[group[i]] = w.out_port[group[i]] = chosen[i];
            }
            for (int q : chunks[k]) {
                w.wave_of[q] = k;
                w.entry_side[q] = side;
                w.members[k].push_back(q);
                w.ports_of_wave[k].push_back(w.in_port[q]);
            }
        }
    }
    for (auto &v : w.ports_of_wave) {
        std::sort(v.begin(), v.end());
    }
    return w;
}

int ls_region_rows(int d, int s) {
    if (s < 0) {
        throw std::invalid_argument("separation must be nonnegative");
    }
    return 4 * (d + 1) + (s > 0 ? 2 * s + 2 : 0);
}

std::vector<CodePatch> ls_region(int d, int s) {
    if (s < 0) {
        throw std::invalid_argument("separation must be nonnegative");
    }
    std::vector<CodePatch> out;
    int strip = s > 0 ? 2 * s + 2 : 0;
    int lower = 2 * (d + 1) + strip;
    for (int slot = 0; slot < 2; slot++) {
        CodePatch p = make_patch(d, d, Dot{0, slot * (d + 1)});
        p.column_slot = slot;
        out.push_back(p);
    }
    if (s > 0) {
        for (int slot = 0; slot < 2; slot++) {
            CodePatch p = make_patch(s, d, Dot{2 * (d + 1), slot * (d + 1)});
            p.column_slot = slot;
            out.push_back(p);
        }
    }
    for (int slot = 0; slot < 2; slot++) {
        CodePatch p = make_patch(d, d, Dot{lower, slot * (d + 1)});
        p.column_slot = slot;
        out.push_back(p);
    }
    return out;
}

int ls_stabilizer_count(int d, int s) {
    int n = 0;
    for (const auto &p : ls_region(d, s)) {
        n += (int)p.stabilizers.size();
    }
    return n;
}

nlohmann::json to_json(const DotArray &a) {
    nlohmann::json ports = nlohmann::json::array();
    for (const auto &p : a.ports) {
        ports.push_back({{"side", side_name(p.side)}, {"row", p.row}, {"slot", p.slot}});
    }
    return {{"width", a.width}, {"length", a.length}, {"readout_density", a.rho.str()}, {"port_positions", ports}};
}

DotArray array_from_json(const nlohmann::json &j) {
    DotArray a = build_array(j.at("width").get<int>(), j.at("length").get<int>(),
                             Rational::parse(j.at("readout_density").get<std::string>()));
    if (j.contains("port_positions")) {
        a.ports.clear();
        for (const auto &p : j.at("port_positions")) {
            Port port;
            port.id = (int)a.ports.size();
            port.side = p.at("side").get<std::string>() == "left" ? Side::kLeft : Side::kRight;
            port.row = p.at("row").get<int>();
            port.slot = p.value("slot", 0);
            a.ports.push_back(port);
        }
    }
    return a;
}

nlohmann::json to_json(const CodePatch &p) {
    nlohmann::json data = nlohmann::json::array();
    for (const auto &d : p.data_sites) {
        data.push_back({d.row, d.col});
    }
    nlohmann::json stabs = nlohmann::json::array();
    for (const auto &s : p.stabilizers) {
        stabs.push_back({{"id", s.id},
                         {"type", pauli_name(s.type)},
                         {"r", s.r},
                         {"j", s.j},
                         {"corners", s.corners},
                         {"home_a", {s.home_a.row, s.home_a.col}},
                         {"home_b", {s.home_b.row, s.home_b.col}}});
    }
    return {{"distance", p.distance},
            {"data_rows", p.data_rows},
            {"data_cols", p.data_cols},
            {"origin", {p.origin.row, p.origin.col}},
            {"column_slot", p.column_slot},
            {"data_sites", data},
            {"stabilizers", stabs},
            {"channel_rows", p.channel_rows}};
}

CodePatch patch_from_json(const nlohmann::json &j) {
    Dot origin{j.at("origin")[0].get<int>(), j.at("origin")[1].get<int>()};
    CodePatch p = make_patch(j.at("data_rows").get<int>(), j.at("data_cols").get<int>(), origin);
    p.distance = j.at("distance").get<int>();
    p.column_slot = j.value("column_slot", 0);
    if (j.contains("stabilizers") && j.at("stabilizers").size() != p.stabilizers.size()) {
        throw std::invalid_argument("patch JSON stabilizer count does not match its geometry");
    }
    return p;
}

nlohmann::json to_json(const WaveAssignment &w) {
    nlohmann::json waves = nlohmann::json::array();
    for (int k = 0; k < w.n_waves; k++) {
        waves.push_back({{"ancillas", w.members[k]}, {"ports", w.ports_of_wave[k]}});
    }
    return {{"n_waves", w.n_waves}, {"both_edges", w.both_edges}, {"waves", waves}};
}

}  // namespace snaq
