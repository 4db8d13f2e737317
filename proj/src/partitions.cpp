#include "qqlax/partitions.hpp"

#include <functional>

#include "qqlax/errors.hpp"

namespace qqlax {

Partition::Partition(std::vector<int> rows) : rows_(std::move(rows)) {
    while (!rows_.empty() && rows_.back() == 0) rows_.pop_back();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i] <= 0 || (i > 0 && rows_[i] > rows_[i - 1]))
            throw DomainError("partition rows must be positive and non-increasing");
    }
}

int Partition::size() const {
    int s = 0;
    for (int r : rows_) s += r;
    return s;
}

int Partition::row(int i) const {
    return (i >= 1 && i <= length()) ? rows_[i - 1] : 0;
}

int Partition::col(int j) const {
    if (j < 1) return 0;
    int c = 0;
    while (c < length() && rows_[c] >= j) ++c;
    return c;
}

Partition Partition::transpose() const {
    std::vector<int> t;
    for (int j = 1; j <= row(1); ++j) t.push_back(col(j));
    return Partition(std::move(t));
}

std::vector<Cell> Partition::cells() const {
    std::vector<Cell> out;
    for (int i = 1; i <= length(); ++i)
        for (int j = 1; j <= rows_[i - 1]; ++j) out.push_back({i, j});
    return out;
}

std::vector<Cell> Partition::addable() const {
    std::vector<Cell> out;
    for (int i = 1; i <= length() + 1; ++i) {
        const int j = row(i) + 1;
        if (i == 1 || row(i - 1) >= j) out.push_back({i, j});
    }
    return out;
}

std::vector<Cell> Partition::removable() const {
    std::vector<Cell> out;
    for (int i = 1; i <= length(); ++i)
        if (row(i) > row(i + 1)) out.push_back({i, row(i)});
    return out;
}

Partition Partition::add(Cell c) const {
    std::vector<int> r = rows_;
    if (c.row == length() + 1) r.push_back(0);
    if (c.row < 1 || c.row > int(r.size()) || r[c.row - 1] + 1 != c.col)
        throw DomainError("cell is not addable");
    r[c.row - 1] += 1;
    return Partition(std::move(r));
}

Partition Partition::remove(Cell c) const {
    if (c.row < 1 || c.row > length() || row(c.row) != c.col || row(c.row + 1) >= c.col)
        throw DomainError("cell is not removable");
    std::vector<int> r = rows_;
    r[c.row - 1] -= 1;
    return Partition(std::move(r));
}

DiagramStats diagram_stats(const Partition& p) {
    DiagramStats s;
    s.transpose = p.transpose();
    s.cells = p.cells();
    for (const Cell& c : s.cells) {
        s.arms.push_back(p.arm(c.row, c.col));
        s.legs.push_back(p.leg(c.row, c.col));
        s.hooks.push_back(p.hook(c.row, c.col));
        s.contents.emplace_back(c.row - 1, c.col - 1);
    }
    s.addable = p.addable();
    s.removable = p.removable();
    return s;
}

std::vector<Partition> enumerate_partitions(int size) {
    std::vector<Partition> out;
    if (size < 0) return out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int cap) {
        if (left == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int r = std::min(left, cap); r >= 1; --r) {
            cur.push_back(r);
            rec(left - r, r);
            cur.pop_back();
        }
    };
    rec(size, size);
    return out;
}

std::vector<Partition> enumerate_partitions_upto(int max_size) {
    std::vector<Partition> out;
    for (int k = 0; k <= max_size; ++k) {
        auto part = enumerate_partitions(k);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::vector<Tuple> enumerate_tuples(int n_colors, int total) {
    std::vector<Tuple> out;
    if (n_colors < 1 || total < 0) return out;
    Tuple cur(n_colors);
    std::function<void(int, int)> rec = [&](int color, int left) {
        if (color == n_colors - 1) {
            for (const Partition& p : enumerate_partitions(left)) {
                cur[color] = p;
                out.push_back(cur);
            }
            return;
        }
        for (int k = left; k >= 0; --k) {
            for (const Partition& p : enumerate_partitions(k)) {
                cur[color] = p;
                rec(color + 1, left - k);
            }
        }
    };
    rec(0, total);
    return out;
}

int tuple_size(const Tuple& t) {
    int s = 0;
    for (const Partition& p : t) s += p.size();
    return s;
}

long long partition_count(int n) {
    if (n < 0) return 0;
    // Euler's pentagonal recurrence
    std::vector<long long> p(n + 1, 0);
    p[0] = 1;
    for (int k = 1; k <= n; ++k) {
        long long acc = 0;
        for (int j = 1;; ++j) {
            const int g1 = j * (3 * j - 1) / 2;
            const int g2 = j * (3 * j + 1) / 2;
            if (g1 > k) break;
            const long long sgn = (j % 2) ? 1 : -1;
            acc += sgn * p[k - g1];
            if (g2 <= k) acc += sgn * p[k - g2];
        }
        p[k] = acc;
    }
    return p[n];
}

}  // namespace qqlax
