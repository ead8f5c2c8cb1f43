#ifndef SNAQ_GEOMETRY_H
#define SNAQ_GEOMETRY_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace snaq {

// Exact rational with 64-bit parts. Kept normalized (den > 0, gcd 1).
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    Rational() = default;
    Rational(int64_t n, int64_t d = 1);

    // Accepts "3", "3/2", "1.25".
    static Rational parse(const std::string &text);

    double to_double() const { return (double)num / (double)den; }
    int64_t floor() const;
    int64_t ceil() const;
    std::string str() const;

    friend Rational operator*(const Rational &a, const Rational &b);
    friend Rational operator/(const Rational &a, const Rational &b);
    friend Rational operator+(const Rational &a, const Rational &b);
    friend bool operator==(const Rational &a, const Rational &b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(const Rational &a, const Rational &b);
    friend bool operator<=(const Rational &a, const Rational &b) { return !(b < a); }
};

int64_t floor_div(int64_t a, int64_t b);
int64_t ceil_div(int64_t a, int64_t b);

enum class Side { kLeft = 0, kRight = 1 };
const char *side_name(Side s);

struct Dot {
    int row = 0;
    int col = 0;
    friend bool operator==(const Dot &a, const Dot &b) { return a.row == b.row && a.col == b.col; }
    friend bool operator!=(const Dot &a, const Dot &b) { return !(a == b); }
    friend bool operator<(const Dot &a, const Dot &b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

// A readout sensor on one edge. Several ports may share a row when rho > 1;
// slot tells them apart.
struct Port {
    int id = 0;
    Side side = Side::kLeft;
    int row = 0;
    int slot = 0;
};

struct DotArray {
    int width = 0;
    int length = 0;
    Rational rho;
    std::vector<Port> ports;  // left side first, then right side

    // floor(2 rho (d + 1)): sensors adjacent to one side of a distance-d patch.
    int ports_per_patch_side(int d) const;
    // Port ids on a side whose row lies in [row_lo, row_hi).
    std::vector<int> ports_in_rows(Side side, int row_lo, int row_hi) const;
    std::vector<int> ports_on(Side side) const;
};

DotArray build_array(int width, int length, Rational rho);

// columns = 1: w - 2; columns = 2: floor((w - 3) / 2).
int max_distance(int width, int columns);

enum class PauliType { X = 0, Z = 1 };
const char *pauli_name(PauliType t);

enum Corner { kNW = 0, kSW = 1, kNE = 2, kSE = 3 };

struct Stabilizer {
    int id = 0;
    PauliType type = PauliType::X;
    int r = 0;  // channel row index inside the patch, 0..rows
    int j = 0;  // left data column of the plaquette, -1..cols-1
    std::array<int, 4> corners{-1, -1, -1, -1};  // data index per Corner, -1 if absent
    Dot home_a;  // channel dot for NW/SW interactions
    Dot home_b;  // channel dot for NE/SE interactions, one hop right of home_a

    int weight() const;
};

struct CodePatch {
    int distance = 0;
    int data_rows = 0;
    int data_cols = 0;
    Dot origin;  // top channel row, left lane column
    int column_slot = 0;
    std::vector<Dot> data_sites;  // row-major, index = i * data_cols + k
    std::vector<Stabilizer> stabilizers;
    std::vector<int> channel_rows;  // dot rows reserved for ancilla shuttling
    int lane_left = 0;
    int lane_right = 0;

    // Dot rows covered by the patch including the trailing spacer row.
    int row_span() const { return 2 * data_rows + 2; }
    int row_begin() const { return origin.row; }
    int row_end() const { return origin.row + row_span(); }
    int data_index(int i, int k) const { return i * data_cols + k; }
    // Data indices supporting the logical operator measured in the given basis.
    std::vector<int> logical_support(PauliType basis) const;
    int count(PauliType t) const;
};

// Rotated surface code patch with data_rows x data_cols data qubits whose top
// channel row and left lane sit at origin.
CodePatch make_patch(int data_rows, int data_cols, Dot origin);

CodePatch embed_patch(const DotArray &array, int d, int column_slot, int row_slot = 0);

// Merged code for lattice surgery: a's columns, a's rows + s routing rows + b's rows.
CodePatch merge_patches(const CodePatch &a, const CodePatch &b, int s);

// Ancilla dispatch data shared by the scheduler.
struct WaveAssignment {
    int n_waves = 0;
    bool both_edges = false;
    std::vector<int> wave_of;                  // per ancilla (flattened over patches)
    std::vector<Side> entry_side;              // per ancilla
    std::vector<int> in_port;                  // per ancilla, port id for INIT
    std::vector<int> out_port;                 // per ancilla, port id for MEASURE
    std::vector<std::vector<int>> members;     // per wave, ancillas in dispatch order
    std::vector<std::vector<int>> ports_of_wave;
    int capacity_per_side = 0;                 // ports usable by one wave on one side
    std::vector<Port> ports;                   // the array's ports, indexed by id
};

// Exact ceil(n / (rho * rows)); for a single patch rows = 2(d+1) and this is
// the wave-count formula with 2 rho (d + 1) ports per side.
int64_t wave_count(int64_t n_ancillas, const Rational &rho, int64_t dot_rows);
int64_t wave_count_for_distance(int d, const Rational &rho);

WaveAssignment assign_waves(const DotArray &array, const std::vector<CodePatch> &patches, bool both_edges = false);
WaveAssignment assign_waves(const DotArray &array, const CodePatch &patch, bool both_edges = false);

// Load/unload waves for the data qubits of one patch. Each data row is split
// in half and every half uses its own edge; indices are data indices.
WaveAssignment assign_data_waves(const DotArray &array, const CodePatch &patch);
// max(ceil(n / 2P), ceil(left half / P)) for a d x d patch with P ports per side.
int64_t data_wave_count(int d, int64_t ports_per_side);

// Region loaded during lattice surgery: patches A and B in the left column,
// routing tiles beside them, and s routing rows in each column between.
std::vector<CodePatch> ls_region(int d, int s);
int ls_region_rows(int d, int s);
int ls_stabilizer_count(int d, int s);

nlohmann::json to_json(const DotArray &a);
DotArray array_from_json(const nlohmann::json &j);
nlohmann::json to_json(const CodePatch &p);
CodePatch patch_from_json(const nlohmann::json &j);
nlohmann::json to_json(const WaveAssignment &w);

}  // namespace snaq

#endif
