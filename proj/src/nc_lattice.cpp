#include "freeprod/nc_lattice.hpp"

#include "freeprod/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace freeprod {

namespace {

void require_size(int n) {
    if (n < 1 || n > kMaxGroundSet) {
        throw SizeError("ground set size " + std::to_string(n) + " outside [1, " +
                        std::to_string(kMaxGroundSet) + "]");
    }
}

void require_same_size(const Partition& a, const Partition& b) {
    if (a.size() != b.size()) {
        throw DimensionError("partitions over different ground sets (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    }
}

/// Finds two distinct blocks that cross, or returns {-1, -1}. Scans each pair
/// of consecutive elements a < b of a block and looks for an element strictly
/// between them whose block reaches outside [a, b].
std::pair<int, int> find_crossing(std::span<const int> labels, int block_count) {
    const int n = static_cast<int>(labels.size());
    std::vector<int> first(static_cast<std::size_t>(block_count), n);
    std::vector<int> last(static_cast<std::size_t>(block_count), -1);
    for (int i = 0; i < n; ++i) {
        const auto b = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        first[b] = std::min(first[b], i);
        last[b] = std::max(last[b], i);
    }
    std::vector<int> previous(static_cast<std::size_t>(block_count), -1);
    for (int j = 0; j < n; ++j) {
        const int b = labels[static_cast<std::size_t>(j)];
        const int a = previous[static_cast<std::size_t>(b)];
        if (a >= 0) {
            for (int c = a + 1; c < j; ++c) {
                const int other = labels[static_cast<std::size_t>(c)];
                if (first[static_cast<std::size_t>(other)] < a || last[static_cast<std::size_t>(other)] > j) {
                    return {b, other};
                }
            }
        }
        previous[static_cast<std::size_t>(b)] = j;
    }
    return {-1, -1};
}

/// Visits every non-crossing partition tau >= sigma in lexicographic order of
/// the growth string. Elements that are not the least of their sigma-block
/// are forced into the tau-block of that least element.
void for_each_nc_above(const Partition& sigma, const std::function<void(const Partition&)>& visit) {
    const int n = sigma.size();
    std::vector<int> leader(static_cast<std::size_t>(sigma.block_count()), -1);
    for (int i = 0; i < n; ++i) {
        auto& l = leader[static_cast<std::size_t>(sigma.block_of(i))];
        if (l < 0) {
            l = i;
        }
    }
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    // last[b]: largest element assigned to tau-block b so far; first[b]: least.
    std::vector<int> first(static_cast<std::size_t>(n), 0);
    std::vector<int> last(static_cast<std::size_t>(n), 0);

    // Element j joins existing block b: it crosses iff some element strictly
    // between last[b] and j sits in a block that started before last[b].
    auto admissible = [&](int j, int b) {
        const int from = last[static_cast<std::size_t>(b)];
        for (int c = from + 1; c < j; ++c) {
            if (first[static_cast<std::size_t>(labels[static_cast<std::size_t>(c)])] < from) {
                return false;
            }
        }
        return true;
    };

    std::function<void(int, int)> extend = [&](int j, int blocks) {
        if (j == n) {
            visit(Partition::from_labels(labels));
            return;
        }
        const int lead = leader[static_cast<std::size_t>(sigma.block_of(j))];
        auto place = [&](int b, int new_blocks) {
            const int saved_last = last[static_cast<std::size_t>(b)];
            labels[static_cast<std::size_t>(j)] = b;
            if (b == blocks) {
                first[static_cast<std::size_t>(b)] = j;
            }
            last[static_cast<std::size_t>(b)] = j;
            extend(j + 1, new_blocks);
            last[static_cast<std::size_t>(b)] = saved_last;
        };
        if (lead != j) {
            const int b = labels[static_cast<std::size_t>(lead)];
            if (admissible(j, b)) {
                place(b, blocks);
            }
            return;
        }
        for (int b = 0; b < blocks; ++b) {
            if (admissible(j, b)) {
                place(b, blocks);
            }
        }
        place(blocks, blocks + 1);
    };
    extend(0, 0);
}

struct IntervalKey {
    int n;
    std::uint64_t lower;
    std::uint64_t upper;
    bool operator==(const IntervalKey&) const = default;
};

struct IntervalKeyHash {
    std::size_t operator()(const IntervalKey& k) const noexcept {
        std::size_t h = std::hash<std::uint64_t>{}(k.lower);
        h ^= std::hash<std::uint64_t>{}(k.upper) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h ^ static_cast<std::size_t>(k.n);
    }
};

/// Per-n index from partition code to position in enumerate_nc(n).
const std::unordered_map<std::uint64_t, std::size_t>& nc_index(int n) {
    static std::array<std::once_flag, kMaxGroundSet + 1> once;
    static std::array<std::unordered_map<std::uint64_t, std::size_t>, kMaxGroundSet + 1> index;
    require_size(n);
    std::call_once(once[static_cast<std::size_t>(n)], [n] {
        const auto& all = enumerate_nc(n);
        auto& map = index[static_cast<std::size_t>(n)];
        map.reserve(all.size());
        for (std::size_t k = 0; k < all.size(); ++k) {
            map.emplace(all[k].code(), k);
        }
    });
    return index[static_cast<std::size_t>(n)];
}

} // namespace

Partition Partition::from_labels(std::span<const int> labels) {
    if (labels.empty()) {
        throw ValidationError("partition of an empty ground set");
    }
    std::map<int, int> relabel;
    std::vector<int> canonical;
    canonical.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = relabel.try_emplace(l, static_cast<int>(relabel.size()));
        canonical.push_back(it->second);
    }
    const int count = static_cast<int>(relabel.size());
    return Partition(std::move(canonical), count);
}

Partition Partition::from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
    if (n < 1) {
        throw ValidationError("partition of an empty ground set");
    }
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) {
            throw ValidationError("empty block in partition");
        }
        for (int e : blocks[b]) {
            if (e < 1 || e > n) {
                throw ValidationError("element " + std::to_string(e) + " outside {1.." + std::to_string(n) + "}");
            }
            auto& slot = labels[static_cast<std::size_t>(e - 1)];
            if (slot >= 0) {
                throw ValidationError("element " + std::to_string(e) + " appears twice");
            }
            slot = static_cast<int>(b);
        }
    }
    for (int i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] < 0) {
            throw ValidationError("element " + std::to_string(i + 1) + " is not covered");
        }
    }
    return from_labels(labels);
}

Partition Partition::bottom(int n) {
    if (n < 1) {
        throw ValidationError("partition of an empty ground set");
    }
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    return Partition(std::move(labels), n);
}

Partition Partition::top(int n) {
    if (n < 1) {
        throw ValidationError("partition of an empty ground set");
    }
    return Partition(std::vector<int>(static_cast<std::size_t>(n), 0), 1);
}

Partition Partition::interval(std::span<const int> block_sizes) {
    std::vector<int> labels;
    int block = 0;
    for (int s : block_sizes) {
        if (s < 1) {
            throw ValidationError("interval block of size " + std::to_string(s));
        }
        labels.insert(labels.end(), static_cast<std::size_t>(s), block++);
    }
    return from_labels(labels);
}

std::vector<std::vector<int>> Partition::blocks() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(block_count_));
    for (int i = 0; i < size(); ++i) {
        out[static_cast<std::size_t>(labels_[static_cast<std::size_t>(i)])].push_back(i);
    }
    return out;
}

std::uint64_t Partition::code() const {
    if (size() > 16) {
        throw SizeError("partition code supports at most 16 elements");
    }
    std::uint64_t c = 0;
    for (int l : labels_) {
        c = (c << 4) | static_cast<std::uint64_t>(l);
    }
    return (c << 4) | static_cast<std::uint64_t>(size() & 0xF);
}

std::string to_string(const Partition& p) {
    std::string out;
    for (const auto& block : p.blocks()) {
        out.push_back('{');
        for (std::size_t k = 0; k < block.size(); ++k) {
            if (k > 0) {
                out.push_back(',');
            }
            out += std::to_string(block[k] + 1);
        }
        out.push_back('}');
    }
    return out;
}

Partition parse_partition(std::string_view text, int n) {
    std::vector<std::vector<int>> blocks;
    bool in_block = false;
    std::string number;
    int max_element = 0;
    auto flush = [&](std::size_t pos) {
        if (number.empty()) {
            throw ParseError("expected an element", "offset " + std::to_string(pos));
        }
        const int e = std::stoi(number);
        blocks.back().push_back(e);
        max_element = std::max(max_element, e);
        number.clear();
    };
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (std::isspace(static_cast<unsigned char>(c))) {
            continue;
        }
        if (c == '{') {
            if (in_block) {
                throw ParseError("nested '{'", "offset " + std::to_string(pos));
            }
            in_block = true;
            blocks.emplace_back();
        } else if (c == '}') {
            if (!in_block) {
                throw ParseError("unmatched '}'", "offset " + std::to_string(pos));
            }
            flush(pos);
            in_block = false;
        } else if (c == ',') {
            if (!in_block) {
                throw ParseError("',' outside a block", "offset " + std::to_string(pos));
            }
            flush(pos);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            if (!in_block) {
                throw ParseError("element outside a block", "offset " + std::to_string(pos));
            }
            number.push_back(c);
            if (number.size() > 6) {
                throw ParseError("element too large", "offset " + std::to_string(pos));
            }
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", "offset " + std::to_string(pos));
        }
    }
    if (in_block) {
        throw ParseError("unterminated block", "offset " + std::to_string(text.size()));
    }
    if (blocks.empty()) {
        throw ParseError("no blocks");
    }
    try {
        return Partition::from_blocks(n > 0 ? n : max_element, blocks);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), "\"" + std::string(text) + "\"");
    }
}

const std::vector<Partition>& enumerate_nc(int n) {
    static std::array<std::once_flag, kMaxGroundSet + 1> once;
    static std::array<std::vector<Partition>, kMaxGroundSet + 1> cache;
    require_size(n);
    std::call_once(once[static_cast<std::size_t>(n)], [n] {
        auto& out = cache[static_cast<std::size_t>(n)];
        for_each_nc_above(Partition::bottom(n), [&](const Partition& p) { out.push_back(p); });
    });
    return cache[static_cast<std::size_t>(n)];
}

bool is_noncrossing(const Partition& p) {
    return find_crossing(p.labels(), p.block_count()).first < 0;
}

bool leq(const Partition& sigma, const Partition& pi) {
    require_same_size(sigma, pi);
    std::vector<int> image(static_cast<std::size_t>(sigma.block_count()), -1);
    for (int i = 0; i < sigma.size(); ++i) {
        auto& target = image[static_cast<std::size_t>(sigma.block_of(i))];
        if (target < 0) {
            target = pi.block_of(i);
        } else if (target != pi.block_of(i)) {
            return false;
        }
    }
    return true;
}

Partition join_nc(const Partition& sigma, const Partition& pi) {
    require_same_size(sigma, pi);
    const int n = sigma.size();
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        }
        return x;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    };
    for (const Partition* p : {&sigma, &pi}) {
        std::vector<int> head(static_cast<std::size_t>(p->block_count()), -1);
        for (int i = 0; i < n; ++i) {
            auto& h = head[static_cast<std::size_t>(p->block_of(i))];
            if (h < 0) {
                h = i;
            } else {
                unite(h, i);
            }
        }
    }
    // Any upper bound in NC(n) must merge every crossing pair of blocks.
    for (;;) {
        std::vector<int> roots(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            roots[static_cast<std::size_t>(i)] = find(i);
        }
        const Partition current = Partition::from_labels(roots);
        const auto [a, b] = find_crossing(current.labels(), current.block_count());
        if (a < 0) {
            return current;
        }
        int ea = -1;
        int eb = -1;
        for (int i = 0; i < n; ++i) {
            if (current.block_of(i) == a && ea < 0) {
                ea = i;
            }
            if (current.block_of(i) == b && eb < 0) {
                eb = i;
            }
        }
        unite(ea, eb);
    }
}

std::int64_t moebius(const Partition& sigma, const Partition& pi) {
    require_same_size(sigma, pi);
    require_size(sigma.size());
    if (!is_noncrossing(sigma) || !is_noncrossing(pi)) {
        throw ValidationError("moebius is defined on non-crossing partitions only");
    }
    if (!leq(sigma, pi)) {
        throw OrderError("moebius(" + to_string(sigma) + ", " + to_string(pi) + "): not comparable");
    }

    static std::mutex mutex;
    static std::unordered_map<IntervalKey, std::int64_t, IntervalKeyHash> memo;
    const int n = sigma.size();
    const IntervalKey key{n, sigma.code(), pi.code()};
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
    }

    // mu(sigma, sigma) = 1 and sum_{sigma <= tau <= rho} mu(sigma, tau) = 0,
    // evaluated for every rho in the interval from the bottom up.
    std::vector<Partition> interval;
    for_each_nc_above(sigma, [&](const Partition& tau) {
        if (leq(tau, pi)) {
            interval.push_back(tau);
        }
    });
    std::stable_sort(interval.begin(), interval.end(), [](const Partition& a, const Partition& b) {
        return a.block_count() > b.block_count();
    });
    std::vector<std::int64_t> mu(interval.size(), 0);
    for (std::size_t r = 0; r < interval.size(); ++r) {
        if (r == 0) {
            mu[r] = 1;
            continue;
        }
        std::int64_t sum = 0;
        for (std::size_t t = 0; t < r; ++t) {
            if (interval[t].block_count() > interval[r].block_count() && leq(interval[t], interval[r])) {
                sum += mu[t];
            }
        }
        mu[r] = -sum;
    }

    std::lock_guard lock(mutex);
    std::int64_t result = 0;
    for (std::size_t r = 0; r < interval.size(); ++r) {
        memo.emplace(IntervalKey{n, sigma.code(), interval[r].code()}, mu[r]);
        if (interval[r] == pi) {
            result = mu[r];
        }
    }
    return result;
}

const std::vector<std::int64_t>& moebius_to_top(int n) {
    static std::array<std::once_flag, kMaxGroundSet + 1> once;
    static std::array<std::vector<std::int64_t>, kMaxGroundSet + 1> cache;
    require_size(n);
    std::call_once(once[static_cast<std::size_t>(n)], [n] {
        // Dual form of the recursion: mu(pi, pi) = 1 and
        // sum_{sigma <= tau <= pi} mu(tau, pi) = 0, with pi = 1_n. Partitions
        // with fewer blocks are finished first.
        const auto& all = enumerate_nc(n);
        const auto& index = nc_index(n);
        std::vector<std::size_t> order(all.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return all[a].block_count() < all[b].block_count();
        });
        auto& mu = cache[static_cast<std::size_t>(n)];
        mu.assign(all.size(), 0);
        for (std::size_t k : order) {
            if (all[k].block_count() == 1) {
                mu[k] = 1;
                continue;
            }
            std::int64_t sum = 0;
            for_each_nc_above(all[k], [&](const Partition& tau) {
                if (tau.block_count() < all[k].block_count()) {
                    sum += mu[index.at(tau.code())];
                }
            });
            mu[k] = -sum;
        }
    });
    return cache[static_cast<std::size_t>(n)];
}

const std::vector<std::size_t>& connecting_partitions(const Partition& sigma) {
    static std::mutex mutex;
    static std::unordered_map<std::uint64_t, std::vector<std::size_t>> memo;
    const int n = sigma.size();
    require_size(n);
    const std::uint64_t key = sigma.code();
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
    }
    const auto& all = enumerate_nc(n);
    std::vector<std::size_t> hits;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (join_nc(all[k], sigma).block_count() == 1) {
            hits.push_back(k);
        }
    }
    std::lock_guard lock(mutex);
    // Node-based map: references stay valid across later insertions.
    return memo.emplace(key, std::move(hits)).first->second;
}

} // namespace freeprod
