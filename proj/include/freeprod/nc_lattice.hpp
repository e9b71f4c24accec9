#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freeprod {

/// Largest ground set the lattice routines accept. Catalan(12) = 208012
/// partitions are enumerated in well under a second.
inline constexpr int kMaxGroundSet = 12;

/// A set partition of {0, ..., n-1}, stored as its restricted growth string:
/// labels[i] is the index of the block holding i, with blocks numbered in the
/// order of their least element. The text form is 1-based ("{1,3}{2}{4}").
class Partition {
public:
    /// Canonicalizes arbitrary block labels.
    static Partition from_labels(std::span<const int> labels);
    /// `blocks` holds 1-based elements; they must cover {1..n} exactly.
    static Partition from_blocks(int n, const std::vector<std::vector<int>>& blocks);
    static Partition bottom(int n);
    static Partition top(int n);
    /// Interval partition {1..s_1}{s_1+1..s_2}... for the given block sizes.
    static Partition interval(std::span<const int> block_sizes);

    int size() const noexcept { return static_cast<int>(labels_.size()); }
    int block_count() const noexcept { return block_count_; }
    int block_of(int element) const { return labels_[static_cast<std::size_t>(element)]; }
    std::span<const int> labels() const noexcept { return labels_; }

    /// Blocks as ascending 0-based element lists, ordered by least element.
    std::vector<std::vector<int>> blocks() const;

    /// Packs the growth string into 4 bits per element.
    std::uint64_t code() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition& a, const Partition& b) { return a.labels_ <=> b.labels_; }

private:
    explicit Partition(std::vector<int> labels, int block_count)
        : labels_(std::move(labels)), block_count_(block_count) {}

    std::vector<int> labels_;
    int block_count_ = 0;
};

std::string to_string(const Partition& p);

/// Parses "{1,3}{2}{4}". Whitespace is ignored. When `n` is positive the
/// blocks must cover {1..n}; otherwise they must cover {1..max element}.
Partition parse_partition(std::string_view text, int n = 0);

/// All of NC(n), lexicographic in the restricted growth string. The list is
/// built once per n and cached for the life of the process.
const std::vector<Partition>& enumerate_nc(int n);

bool is_noncrossing(const Partition& p);

/// Reverse refinement: every block of `sigma` lies inside a block of `pi`.
bool leq(const Partition& sigma, const Partition& pi);

/// Least upper bound in NC(n).
Partition join_nc(const Partition& sigma, const Partition& pi);

/// Möbius function of NC(n) on the interval [sigma, pi], memoized per
/// interval. Throws OrderError unless sigma <= pi.
std::int64_t moebius(const Partition& sigma, const Partition& pi);

/// mu(sigma, 1_n) for every sigma, aligned with enumerate_nc(n).
const std::vector<std::int64_t>& moebius_to_top(int n);

/// Indices into enumerate_nc(sigma.size()) of every pi with
/// join_nc(pi, sigma) = 1_n. Cached per sigma.
const std::vector<std::size_t>& connecting_partitions(const Partition& sigma);

} // namespace freeprod
