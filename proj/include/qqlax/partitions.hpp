#pragma once

#include <compare>
#include <cstddef>
#include <utility>
#include <vector>

namespace qqlax {

// Box coordinates are 1-based (row, col). In a tuple the row index is the
// one paired with eps1 and the column index the one paired with eps2.
struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> rows);  // validates monotonicity

    const std::vector<int>& rows() const { return rows_; }
    int size() const;
    int length() const { return int(rows_.size()); }
    bool empty() const { return rows_.empty(); }
    int row(int i) const;  // lambda_i, 1-based, 0 beyond the length
    int col(int j) const;  // transpose_j, 1-based
    bool contains(int i, int j) const { return i >= 1 && j >= 1 && j <= row(i); }

    Partition transpose() const;
    int arm(int i, int j) const { return row(i) - j; }
    int leg(int i, int j) const { return col(j) - i; }
    int hook(int i, int j) const { return arm(i, j) + leg(i, j) + 1; }

    std::vector<Cell> cells() const;  // row-major
    std::vector<Cell> addable() const;
    std::vector<Cell> removable() const;
    Partition add(Cell c) const;
    Partition remove(Cell c) const;

    auto operator<=>(const Partition&) const = default;

private:
    std::vector<int> rows_;
};

using Tuple = std::vector<Partition>;

struct DiagramStats {
    Partition transpose;
    std::vector<Cell> cells;
    std::vector<int> arms;
    std::vector<int> legs;
    std::vector<int> hooks;
    std::vector<std::pair<int, int>> contents;  // (row-1, col-1)
    std::vector<Cell> addable;
    std::vector<Cell> removable;
};

DiagramStats diagram_stats(const Partition& p);

// Descending lexicographic order: (n), (n-1,1), ...
std::vector<Partition> enumerate_partitions(int size);
std::vector<Partition> enumerate_partitions_upto(int max_size);
std::vector<Tuple> enumerate_tuples(int n_colors, int total);

int tuple_size(const Tuple& t);
long long partition_count(int n);

}  // namespace qqlax
